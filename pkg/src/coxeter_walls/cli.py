"""Command-line front end: every command prints one JSON RunReport."""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable

from coxeter_walls.config import load_config
from coxeter_walls.coxeter import (
    ball,
    ball_sizes,
    element_order,
    enumeration_lines,
    full_subset,
    is_reduced,
    load_system,
    normal_form,
    order_label,
    system_digest,
)
from coxeter_walls.engine import VerificationEngine
from coxeter_walls.errors import CoxeterError, NotAffineType
from coxeter_walls.export import cayley_dot, chambers_in_window, export_tiling, report_json
from coxeter_walls.models import CheckResult, CoxeterSystem, Element, GeneratorSubset, RunReport, VerifyConfig
from coxeter_walls.parabolic import (
    check_lemma22,
    cor15_hypothesis,
    cor16_hypothesis,
    cor17_hypothesis,
    essential_subset,
    has_finite_index,
    maximal_spherical_subsets,
    min_coset_rep,
    sphericity,
    splits_as_product,
    w_singleton_set,
)

logger = logging.getLogger(__name__)

VERIFY_TARGETS = (
    "lemma0", "lemma1", "lemma31", "lemma32", "geodesic", "convexity",
    "halfspace", "limits", "lemma22", "cor12", "rays",
)

DEFAULT_RADIUS = {
    "lemma0": 5,
    "lemma1": 5,
    "lemma31": 6,
    "lemma32": 6,
    "lemma22": 6,
    "geodesic": 8,
    "halfspace": 6,
    "limits": 1000,
    "cor12": 100,
    "rays": 100,
    "ball": 4,
    "cayley-dot": 3,
    "tiling-svg": 5,
    "wset": 6,
    "qdensity": 6,
}
DEFAULT_TRIALS = 10_000


class Invocation:
    """Parsed flags plus the loaded system and config of one run."""

    def __init__(self, args: argparse.Namespace, system: CoxeterSystem, config: VerifyConfig):
        self.args = args
        self.system = system
        self.config = config
        self.parameters: dict = {}

    def radius(self, command: str, integral: bool = True) -> int | float:
        value = self.args.radius if self.args.radius is not None else DEFAULT_RADIUS[command]
        if integral:
            if float(value) != int(value) or value < 0:
                raise ValueError(f"--radius must be a non-negative integer for {command}, got {value}")
            value = int(value)
        elif value <= 0:
            raise ValueError(f"--radius must be positive for {command}, got {value}")
        self.parameters["radius"] = value
        return value

    def subset(self, command: str, required: bool = True) -> GeneratorSubset | None:
        if self.args.subset is None:
            if required:
                raise ValueError(f"--subset is required for {command}")
            return None
        T = GeneratorSubset.parse(self.args.subset)
        for s in T:
            if not 0 <= s < self.system.rank:
                raise ValueError(f"--subset index {s} is not a generator of a rank {self.system.rank} system")
        self.parameters["subset"] = list(T.sorted())
        return T

    def word(self, command: str) -> tuple[int, ...]:
        if self.args.word is None:
            raise ValueError(f"--word is required for {command}")
        text = self.args.word.strip()
        try:
            word = tuple(int(part) for part in text.split(",") if part.strip()) if text else ()
        except ValueError:
            raise ValueError(f"Invalid --word syntax: {self.args.word!r}") from None
        self.parameters["word"] = list(word)
        return word

    def element(self, command: str) -> Element:
        return normal_form(self.system, self.word(command), backend=self.config.word_backend)

    def generator_index(self, command: str, required: bool = True) -> int | None:
        s0 = self.args.generator
        if s0 is None:
            if required:
                raise ValueError(f"--generator is required for {command}")
            return None
        self.parameters["generator"] = s0
        return s0

    def trials(self) -> int:
        trials = self.args.trials if self.args.trials is not None else DEFAULT_TRIALS
        if trials < 1:
            raise ValueError(f"--trials must be positive, got {trials}")
        self.parameters["trials"] = trials
        return trials

    def write_artifact(self, command: str, text: str) -> dict:
        if self.args.artifact is None:
            raise ValueError(f"{command} needs --artifact <file>")
        Path(self.args.artifact).write_text(text)
        return {"artifact": str(self.args.artifact), "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()}


# -------------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------------


def cmd_validate(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Check the matrix, report its digest, sphericity and realization."""
    system = inv.system
    whole = sphericity(system, full_subset(system), inv.config)
    data = {
        "rank": system.rank,
        "m": system.file_matrix(),
        "digest": system_digest(system),
        "spherical": whole.spherical,
        "order": whole.order,
    }
    try:
        real = engine.realization(system)
    except NotAffineType as e:
        data.update({"affine": False, "reason": str(e)})
    else:
        data.update({"affine": True, "dim": real.dim, "diam": real.diam})
    return [CheckResult(check="validate", passed=True, data=data)]


def cmd_ball(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Layer sizes of ball(radius); --artifact writes the elements as JSON lines."""
    radius = inv.radius("ball")
    data = {"radius": radius, "sizes": ball_sizes(inv.system, radius, inv.config.ball_cap)}
    if inv.args.artifact is not None:
        data.update(inv.write_artifact("ball", enumeration_lines(ball(inv.system, radius, inv.config.ball_cap))))
    return [CheckResult(check="ball", passed=True, data=data)]


def cmd_reduce(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """ShortLex normal form and length of --word."""
    word = inv.word("reduce")
    e = normal_form(inv.system, word, backend=inv.config.word_backend)
    data = {"nf": e.nf, "length": e.length, "input_reduced": is_reduced(inv.system, word)}
    return [CheckResult(check="reduce", passed=True, data=data)]


def cmd_coset(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Split --word as v x with v in W_T and x the minimal coset representative."""
    w = inv.element("coset")
    T = inv.subset("coset")
    dec = min_coset_rep(w, T)
    radius = inv.radius("lemma22")
    passed = check_lemma22(w, T, radius)
    data = {"w": w, "v": dec.v, "x": dec.x, "len_v": dec.v.length, "len_x": dec.x.length}
    return [CheckResult(check="coset", passed=passed, data=data, witness=None if passed else w)]


def cmd_spherical(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Whether W_T is finite, with its order and leading minors."""
    report = sphericity(inv.system, inv.subset("spherical"), inv.config)
    data = {"spherical": report.spherical, "order": report.order, "minors": report.minors, "exact": report.exact}
    return [CheckResult(check="spherical", passed=True, data=data)]


def cmd_essential(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Union of the non-spherical components of T."""
    essential = essential_subset(inv.system, inv.subset("essential"), inv.config)
    return [CheckResult(check="essential", passed=True, data={"essential": essential})]


def cmd_split_check(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Whether W splits as W_T~ x W_(S - T~)."""
    T = inv.subset("split-check")
    data = {
        "splits": splits_as_product(inv.system, T, inv.config),
        "essential": essential_subset(inv.system, T, inv.config),
    }
    return [CheckResult(check="split-check", passed=True, data=data)]


def cmd_finite_index(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Whether [W : W_T] is finite."""
    T = inv.subset("finite-index")
    data = {"finite_index": has_finite_index(inv.system, T, inv.config)}
    return [CheckResult(check="finite-index", passed=True, data=data)]


def cmd_wset(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Elements of ball(radius) whose right descents lie in {s0}."""
    s0 = inv.generator_index("wset")
    elements = w_singleton_set(inv.system, s0, inv.radius("wset"))
    return [CheckResult(check="wset", passed=True, data={"count": len(elements), "elements": elements})]


def cmd_order(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Order of the element given by --word."""
    e = inv.element("order")
    order = element_order(e, inv.config.order_cap)
    return [CheckResult(check="order", passed=True, data={"nf": e, "order": order_label(order)})]


def cmd_max_spherical(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Maximal spherical subsets of S."""
    subsets = maximal_spherical_subsets(inv.system, inv.config)
    return [CheckResult(check="max-spherical", passed=True, data={"subsets": subsets})]


def cmd_cor17(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Search for a maximal spherical T and s0 meeting it with orders >= 3 and one infinite."""
    found = cor17_hypothesis(inv.system, inv.config)
    data = {"found": found is not None}
    if found is not None:
        data.update({"subset": found[0], "generator": found[1]})
    return [CheckResult(check="cor17", passed=True, data=data)]


def cmd_qdensity(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Worst distance from ball(radius) to W^{s0} (--generator) or to the union over infinite pairs."""
    radius = inv.radius("qdensity")
    s0 = inv.generator_index("qdensity", required=False)
    if s0 is None:
        profile = cor16_hypothesis(inv.system, radius)
        data = {}
    else:
        profile, t0 = cor15_hypothesis(inv.system, s0, radius)
        data = {"infinite_partner": t0}
    data.update({"radius": profile.radius, "worst_distance": profile.worst_distance})
    return [CheckResult(check="qdensity", passed=True, data=data, witness=profile.witness)]


def cmd_tiling_svg(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """SVG of the chambers within --radius of x0, optionally coloured by coset and with a gallery."""
    window = inv.radius("tiling-svg", integral=False)
    T = inv.subset("tiling-svg", required=False)
    w = inv.element("tiling-svg") if inv.args.word is not None else None
    real = engine.realization(inv.system)
    svg = export_tiling(real, window, T=T, w=w, config=inv.config)
    data = {"chambers": len(chambers_in_window(real, window, inv.config.ball_cap))}
    data.update(inv.write_artifact("tiling-svg", svg))
    return [CheckResult(check="tiling-svg", passed=True, data=data)]


def cmd_cayley_dot(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Cayley graph of ball(radius) in DOT."""
    radius = inv.radius("cayley-dot")
    dot = cayley_dot(inv.system, radius, inv.config.ball_cap)
    data = {"radius": radius, **inv.write_artifact("cayley-dot", dot)}
    return [CheckResult(check="cayley-dot", passed=True, data=data)]


def cmd_verify(inv: Invocation, engine: VerificationEngine) -> list[CheckResult]:
    """Run one verification sweep."""
    target = inv.args.target
    inv.parameters["target"] = target
    system = inv.system
    if target == "lemma0":
        return [engine.lemma0_sweep(system, inv.radius(target))]
    elif target == "lemma1":
        T = inv.subset(target, required=False)
        return [engine.lemma1_sweep(system, inv.radius(target), None if T is None else [T])]
    elif target == "lemma31":
        return [engine.lemma31_sweep(system, inv.radius(target))]
    elif target == "lemma32":
        return [engine.lemma32_sweep(system, inv.radius(target))]
    elif target == "geodesic":
        return [engine.geodesic_sweep(system, inv.radius(target))]
    elif target == "lemma22":
        T = inv.subset(target, required=False)
        return [engine.lemma22_sweep(system, inv.radius(target), None if T is None else [T])]
    elif target == "convexity":
        T = inv.subset(target, required=False)
        return [engine.convexity_sweep(system, inv.trials(), None if T is None else [T])]
    elif target == "halfspace":
        T = inv.subset(target, required=False)
        radius = inv.radius(target)
        return [engine.halfspace_sweep(system, radius, inv.trials(), None if T is None else [T])]
    elif target == "limits":
        T = inv.subset(target)
        return [engine.limits(system, T, inv.radius(target, integral=False))]
    elif target == "cor12":
        return [engine.cor12_sweep(system, inv.radius(target, integral=False))]
    elif target == "rays":
        T = inv.subset(target)
        return [engine.rays(system, T, inv.radius(target, integral=False))]
    raise ValueError(f"Unknown verify target: {target}")


COMMANDS: dict[str, Callable[[Invocation, VerificationEngine], list[CheckResult]]] = {
    "validate": cmd_validate,
    "ball": cmd_ball,
    "reduce": cmd_reduce,
    "coset": cmd_coset,
    "spherical": cmd_spherical,
    "essential": cmd_essential,
    "split-check": cmd_split_check,
    "finite-index": cmd_finite_index,
    "wset": cmd_wset,
    "verify": cmd_verify,
    "tiling-svg": cmd_tiling_svg,
    "cayley-dot": cmd_cayley_dot,
    "order": cmd_order,
    "max-spherical": cmd_max_spherical,
    "cor17": cmd_cor17,
    "qdensity": cmd_qdensity,
}


# -------------------------------------------------------------------------
# Parsing and entry point
# -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, help="System file (.cox or .json) or bundled name such as a2t")
    common.add_argument("--subset", help="Generator subset T as comma-separated indices, e.g. 0,2")
    common.add_argument("--radius", type=float, help="Ball radius, window or limit radius (per command default)")
    common.add_argument("--word", help="Word as comma-separated generator indices, e.g. 0,1,0")
    common.add_argument("--generator", type=int, help="Distinguished generator s0 for wset and qdensity")
    common.add_argument("--trials", type=int, help=f"Random trials or samples (default: {DEFAULT_TRIALS})")
    common.add_argument("--seed", type=int, help="Seed for every randomized check (default: 0)")
    common.add_argument("--tol", type=float, help="Side-of-wall tolerance (default: 1e-9)")
    common.add_argument("--out", help="Write the JSON report here instead of stdout")
    common.add_argument("--config", help="JSON file with VerifyConfig overrides")
    common.add_argument("--artifact", help="File for side artifacts: SVG, DOT, or JSON lines for ball")
    common.add_argument("--workers", type=int, help="Worker processes for sweeps (default: 1)")
    common.add_argument("--timing", action="store_true", help="Add elapsed seconds to the report")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")

    parser = argparse.ArgumentParser(
        prog="coxeter-walls",
        description="Coxeter-group combinatorics and reflection-group geometry checks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  coxeter-walls reduce --system a2t --word 0,1,0,0
  coxeter-walls spherical --system a2t.cox --subset 0,1
  coxeter-walls verify geodesic --system c2t --radius 8
  coxeter-walls tiling-svg --system a2t --subset 0,1 --word 0,1,2,0 --artifact tiling.svg
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        sub = commands.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
        if name == "verify":
            sub.add_argument("target", choices=VERIFY_TARGETS)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _resolve_config(args: argparse.Namespace) -> VerifyConfig:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        if args.tol <= 0:
            raise ValueError(f"--tol must be positive, got {args.tol}")
        overrides["side_tol"] = args.tol
    if args.workers is not None:
        if args.workers < 1:
            raise ValueError(f"--workers must be at least 1, got {args.workers}")
        overrides["workers"] = args.workers
    return replace(config, **overrides)


def run(argv: list[str] | None = None) -> int:
    """Run one command; 0 when every check passes, 1 when one fails, 2 on bad input."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args.verbose)

    started = time.perf_counter()
    try:
        config = _resolve_config(args)
        system = load_system(args.system)
        inv = Invocation(args, system, config)
        with VerificationEngine(config) as engine:
            results = COMMANDS[args.command](inv, engine)
        report = RunReport(
            command=args.command,
            system=system_digest(system),
            parameters={"system": system.name, **inv.parameters},
            results=results,
            seed=config.seed,
            elapsed=time.perf_counter() - started if args.timing else None,
        )
        text = report_json(report)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    except (CoxeterError, ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    if not report.passed:
        failed = [r.check for r in report.results if not r.passed]
        logger.info("Failed checks: %s", ", ".join(failed))
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
