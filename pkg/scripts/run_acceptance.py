#!/usr/bin/env python3
"""Run the full acceptance sweep on the bundled systems and write one JSON report per criterion.

Usage:
  python scripts/run_acceptance.py --out-dir acceptance
  python scripts/run_acceptance.py --workers 4 --seed 0
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from coxeter_walls.config import config_to_dict, load_config
from coxeter_walls.coxeter import load_system, system_digest
from coxeter_walls.engine import VerificationEngine
from coxeter_walls.export import report_json
from coxeter_walls.models import GeneratorSubset, RunReport

AFFINE = ("a2t", "c2t", "a1t_a1t")
EXACT = ("a2", "a2t", "c2t", "a1t_a1t", "dihedral_inf")


def criteria(engine: VerificationEngine):
    """Yield (name, system name or None, parameters, results) for each criterion."""
    for name in EXACT:
        system = load_system(name)
        yield "oracle", name, {"radius": 8}, [
            engine.oracle_agreement(system, 8),
            engine.backend_agreement(system, 5),
        ]
    for name in EXACT:
        yield "lemma22", name, {"radius": 6}, [engine.lemma22_sweep(load_system(name), 6)]
    for name in EXACT:
        yield "sphericity", name, {}, [engine.sphericity_sweep(load_system(name))]
    yield "random_sphericity", None, {"count": 200}, [engine.random_sphericity(200)]
    for name in AFFINE:
        system = load_system(name)
        yield "lemma0_lemma1", name, {"radius": 5}, [
            engine.lemma0_sweep(system, 5),
            engine.lemma1_sweep(system, 5),
        ]
    for name in ("a2t", "c2t"):
        system = load_system(name)
        yield "lemma31_lemma32", name, {"radius": 6}, [
            engine.lemma31_sweep(system, 6),
            engine.lemma32_sweep(system, 6),
        ]
    for name in AFFINE:
        yield "geodesic", name, {"radius": 8}, [engine.geodesic_sweep(load_system(name), 8)]
    for name in AFFINE:
        system = load_system(name)
        yield "convex_halfspace", name, {"trials": 10_000, "radius": 6}, [
            engine.convexity_sweep(system, 10_000),
            engine.halfspace_sweep(system, 6, 10_000),
        ]
    yield "limits", "a1t_a1t", {"radius": 1000, "subset": [0, 1]}, [
        engine.limits(load_system("a1t_a1t"), GeneratorSubset.of(0, 1), 1000.0),
        engine.limits(load_system("a1t_a1t"), GeneratorSubset.of(0), 1000.0),
    ]
    yield "limits", "a2t", {"radius": 1000, "subset": [0, 1, 2]}, [
        engine.limits(load_system("a2t"), GeneratorSubset.of(0, 1, 2), 1000.0),
    ]
    for name in AFFINE:
        yield "cor12", name, {"radius": 100}, [engine.cor12_sweep(load_system(name), 100.0)]


def main():
    parser = argparse.ArgumentParser(description="Run every acceptance criterion and write RunReports")
    parser.add_argument("--out-dir", type=Path, default=Path("acceptance"), help="Report directory (default: acceptance)")
    parser.add_argument("--config", help="JSON file with VerifyConfig overrides")
    parser.add_argument("--seed", type=int, default=0, help="Seed (default: 0)")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes (default: 1)")
    parser.add_argument("-v", "--verbose", action="store_true", help="INFO logging on stderr")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    config = replace(load_config(args.config), seed=args.seed, workers=args.workers)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "config.json").write_text(json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n")

    failed = []
    with VerificationEngine(config) as engine:
        started = time.perf_counter()
        for name, system_name, parameters, results in criteria(engine):
            digest = system_digest(load_system(system_name)) if system_name else None
            report = RunReport(
                command=f"acceptance:{name}",
                system=digest,
                parameters={"system": system_name, **parameters},
                results=results,
                seed=config.seed,
            )
            target = args.out_dir / f"{name}_{system_name or 'random'}.json"
            target.write_text(report_json(report))
            status = "[OK]" if report.passed else "[X]"
            print(f"{status} {name} {system_name or ''} ({time.perf_counter() - started:.1f}s) -> {target}")
            started = time.perf_counter()
            if not report.passed:
                failed.append(target)

    if failed:
        print(f"\n[X] {len(failed)} criteria failed")
        return 1
    print("\n[OK] All acceptance criteria passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
