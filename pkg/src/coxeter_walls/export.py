"""Side artifacts: SVG tilings, DOT Cayley graphs, JSON reports."""

from __future__ import annotations

import json
import logging
from typing import Any

import numpy as np
from scipy.spatial import ConvexHull

from coxeter_walls.coxeter import DEFAULT_BALL_CAP, ball, inverse, normal_form
from coxeter_walls.errors import DimensionNotTwo, ResourceCap
from coxeter_walls.galleries import crossing_path, gallery
from coxeter_walls.geometry import DEFAULT_CONFIG, affine_map
from coxeter_walls.models import (
    CheckResult,
    CoxeterSystem,
    Element,
    EuclideanRealization,
    GeneratorSubset,
    RunReport,
    VerifyConfig,
)
from coxeter_walls.parabolic import min_coset_rep

logger = logging.getLogger(__name__)

PALETTE = (
    "#f4e3b5", "#b5d6f4", "#c9f4b5", "#f4b5c9", "#d9b5f4",
    "#b5f4e8", "#f4cdb5", "#e0e0e0", "#b5bff4", "#eef4b5",
)
IDENTITY_FILL = "#f7c948"
PLAIN_FILL = "#ffffff"
CANVAS = 600


# -------------------------------------------------------------------------
# SVG tiling
# -------------------------------------------------------------------------


def chambers_in_window(
    real: EuclideanRealization, window: float, cap: int = DEFAULT_BALL_CAP
) -> list[Element]:
    """Elements w whose chamber wC comes within ``window`` of x0, in ball order.

    A chamber is kept when its centre is within window + diam of x0. Every
    chamber on the gallery towards a kept one has its centre within one more
    diam, so layers are added until a whole layer lies beyond that.
    """
    x0 = real.basepoint
    reach = window + real.diam
    found: list[Element] = []
    radius = 0
    while True:
        layer = [e for e in ball(real.system, radius, cap) if e.length == radius]
        if not layer:
            return found
        dist = np.array([np.linalg.norm(_centre(real, e) - x0) for e in layer])
        if radius > 0 and dist.min() > reach + real.diam:
            return found
        found.extend(e for e, d in zip(layer, dist) if d <= reach)
        radius += 1
        if len(found) > cap:
            raise ResourceCap(f"More than {cap} chambers within window {window}")


def _centre(real: EuclideanRealization, e: Element) -> np.ndarray:
    L, t = affine_map(real, e)
    return L @ real.basepoint + t


def _coset_key(e: Element, T: GeneratorSubset) -> tuple[int, ...]:
    """Label of the coset e W_T: the minimal representative of W_T e^-1."""
    return min_coset_rep(inverse(e), T).x.nf


def _fmt(x: float) -> str:
    text = f"{x:.3f}"
    return "0.000" if text == "-0.000" else text


def export_tiling(
    real: EuclideanRealization,
    window: float,
    T: GeneratorSubset | None = None,
    w: Element | None = None,
    config: VerifyConfig = DEFAULT_CONFIG,
) -> str:
    """SVG of the chambers near x0.

    Args:
        window: Distance from x0 that the picture must cover
        T: If given, chambers of one coset v W_T share a fill
        w: If given, overlay the segment [x0, w x0] and the gallery of its crossing word

    Raises:
        DimensionNotTwo: for realizations not in the plane
    """
    if real.dim != 2:
        raise DimensionNotTwo(real.dim)
    scale = CANVAS / (2.0 * (window + real.diam))
    cx, cy = real.basepoint

    def canvas(p: np.ndarray) -> tuple[str, str]:
        return _fmt(CANVAS / 2 + (p[0] - cx) * scale), _fmt(CANVAS / 2 - (p[1] - cy) * scale)

    def xy(p: np.ndarray) -> str:
        return ",".join(canvas(p))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect width="{CANVAS}" height="{CANVAS}" fill="#ffffff"/>',
        '<g stroke="#444444" stroke-width="0.6">',
    ]
    colours: dict[tuple[int, ...], str] = {}
    for e in chambers_in_window(real, window, config.ball_cap):
        L, t = affine_map(real, e)
        corners = real.chamber.vertices @ L.T + t
        ordered = corners[ConvexHull(corners).vertices]
        if T is not None:
            key = _coset_key(e, T)
            fill = colours.setdefault(key, PALETTE[len(colours) % len(PALETTE)])
        else:
            fill = IDENTITY_FILL if e.is_identity else PLAIN_FILL
        points = " ".join(xy(p) for p in ordered)
        lines.append(f'<polygon points="{points}" fill="{fill}"><title>{e.label()}</title></polygon>')
    lines.append("</g>")

    if w is not None:
        word, x0 = crossing_path(real, w, config)
        path = gallery(real, word, x0)
        (x1, y1), (x2, y2) = canvas(path.vertices[0]), canvas(path.vertices[-1])
        lines.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#d62728" stroke-width="2"/>'
        )
        polyline = " ".join(xy(p) for p in path.vertices)
        lines.append(f'<polyline points="{polyline}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------------
# DOT Cayley graph
# -------------------------------------------------------------------------


def cayley_dot(system: CoxeterSystem, radius: int, cap: int = DEFAULT_BALL_CAP) -> str:
    """Undirected Cayley graph of ball(radius); edges u -- us labelled by s."""
    elements = ball(system, radius, cap)
    index = {e.nf: i for i, e in enumerate(elements)}
    lines = ["graph cayley", "{", "    node [shape=box fontsize=10];"]
    for i, e in enumerate(elements):
        lines.append(f'    n{i} [label="{e.label()}"];')
    for i, e in enumerate(elements):
        for s in system.generators:
            j = index.get(normal_form(system, e.nf + (s,)).nf)
            if j is None or j < i:
                continue
            lines.append(f'    n{i} -- n{j} [label="{s}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------------
# JSON
# -------------------------------------------------------------------------


def to_jsonable(value: Any) -> Any:
    """Convert elements, subsets and numpy values for json.dumps."""
    if isinstance(value, Element):
        return list(value.nf)
    if isinstance(value, GeneratorSubset):
        return list(value.sorted())
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if np.isinf(v):
            return "inf"
        return round(v, 12)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def result_to_dict(result: CheckResult) -> dict[str, Any]:
    return {
        "check": result.check,
        "pass": bool(result.passed),
        "data": to_jsonable(result.data),
        "witness": to_jsonable(result.witness),
    }


def report_to_dict(report: RunReport) -> dict[str, Any]:
    out = {
        "command": report.command,
        "system": report.system,
        "parameters": to_jsonable(report.parameters),
        "seed": report.seed,
        "pass": report.passed,
        "results": [result_to_dict(r) for r in report.results],
    }
    if report.elapsed is not None:
        out["elapsed"] = round(report.elapsed, 3)
    return out


def report_json(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
