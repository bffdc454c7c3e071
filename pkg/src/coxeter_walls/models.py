"""Data models for coxeter_walls."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

# In-memory marker for m(s,t) = infinity; files encode it as 0.
INFINITY = math.inf

Word = tuple[int, ...]


@dataclass(frozen=True)
class VerifyConfig:
    """Caps, tolerances and seeds shared by every computation."""

    word_backend: str = "auto"  # "auto" | "roots" | "braid"
    ball_cap: int = 200_000
    sphericity_cap: int = 100_000
    minor_tol: float = 1e-10
    gram_tol: float = 1e-9
    side_tol: float = 1e-9
    vertex_tol: float = 1e-7
    degenerate_tol: float = 1e-8
    perturb_retries: int = 20
    fold_iteration_cap: int = 100_000
    hausdorff_fraction: float = 1e-3  # sampling step as a fraction of diam C
    bound_tol: float = 1e-6
    angle_tol: float = 1e-2
    direction_samples: int = 360
    box_radius: float = 10.0
    orbit_radius: int = 4
    order_cap: int = 50
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class CoxeterSystem:
    """Rank plus symmetric order matrix; the presentation source of truth."""

    rank: int
    orders: tuple[tuple[float, ...], ...]
    name: str | None = field(default=None, compare=False)

    def m(self, s: int, t: int) -> float:
        return self.orders[s][t]

    @property
    def generators(self) -> range:
        return range(self.rank)

    def file_matrix(self) -> list[list[int]]:
        """Order matrix with 0 standing for infinity."""
        return [[0 if v == INFINITY else int(v) for v in row] for row in self.orders]


@dataclass(frozen=True)
class Element:
    """A group element stored as its ShortLex-minimal reduced word."""

    system: CoxeterSystem = field(repr=False)
    nf: Word

    @property
    def length(self) -> int:
        return len(self.nf)

    @property
    def is_identity(self) -> bool:
        return not self.nf

    def label(self) -> str:
        return "e" if not self.nf else ".".join(str(s) for s in self.nf)


@dataclass(frozen=True)
class GeneratorSubset:
    """A subset T of the generators, indexing the parabolic subgroup W_T."""

    members: frozenset[int] = frozenset()

    @classmethod
    def of(cls, *indices: int) -> GeneratorSubset:
        return cls(frozenset(indices))

    @classmethod
    def parse(cls, text: str) -> GeneratorSubset:
        """Parse comma-separated indices such as ``0,2``; empty text is the empty set."""
        text = text.strip()
        if not text:
            return cls()
        try:
            return cls(frozenset(int(part) for part in text.split(",") if part.strip()))
        except ValueError:
            raise ValueError(f"Invalid subset syntax: {text!r}") from None

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def label(self) -> str:
        return ",".join(str(s) for s in self.sorted())

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, s: object) -> bool:
        return s in self.members

    def __or__(self, other: GeneratorSubset) -> GeneratorSubset:
        return GeneratorSubset(self.members | other.members)

    def __sub__(self, other: GeneratorSubset) -> GeneratorSubset:
        return GeneratorSubset(self.members - other.members)

    def __le__(self, other: GeneratorSubset) -> bool:
        return self.members <= other.members

    def __lt__(self, other: GeneratorSubset) -> bool:
        return self.members < other.members


@dataclass(frozen=True)
class CosetDecomposition:
    """w = v * x with v in W_T and x the shortest element of W_T w."""

    w: Element
    v: Element
    x: Element
    T: GeneratorSubset


@dataclass(frozen=True)
class QuasiDensityProfile:
    """Worst word-metric distance from a ball to a target set."""

    radius: int
    worst_distance: int
    witness: Element


@dataclass(frozen=True)
class SphericityReport:
    """Outcome of both finiteness tests for W_T."""

    T: GeneratorSubset
    spherical: bool
    order: int | None  # None when the BFS exceeded its cap
    minors: tuple[float, ...]
    exact: bool  # minors computed over Z[sqrt2, sqrt3]


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope {x : A x >= b} together with its vertex list."""

    A: np.ndarray
    b: np.ndarray
    vertices: np.ndarray

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0


@dataclass(frozen=True, eq=False)
class EuclideanRealization:
    """An affine-type system acting by reflections on Euclidean space."""

    system: CoxeterSystem
    dim: int
    normals: np.ndarray  # rank x dim, unit rows
    offsets: np.ndarray  # rank
    chamber: Polytope
    basepoint: np.ndarray
    diam: float
    components: tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class Wall:
    """A reflection with its hyperplane, oriented so that C lies on the + side."""

    reflection: Element
    normal: np.ndarray
    offset: float

    def side(self, p: np.ndarray) -> float:
        return float(np.dot(self.normal, p) - self.offset)


@dataclass(frozen=True, eq=False)
class Gallery:
    """Polyline through x0, s1 x0, s1 s2 x0, ..., w x0."""

    word: Word
    vertices: np.ndarray


@dataclass(frozen=True, eq=False)
class HausdorffReport:
    w: Element
    word: Word
    d_h: float
    bound: float
    passed: bool
    sampling_step: float
    basepoint: np.ndarray


@dataclass(frozen=True, eq=False)
class IntersectionReport:
    """C ∩ wC computed directly and through the three other terms of the identity."""

    w: Element
    support: GeneratorSubset
    direct: Polytope
    via_walls: Polytope
    via_neighbors: Polytope
    via_orbit: Polytope
    agree: bool


@dataclass(frozen=True, eq=False)
class LimitDirections:
    T: GeneratorSubset
    radius: float
    directions: np.ndarray  # k x dim, clustered unit vectors
    vertex_directions: np.ndarray
    max_mismatch: float  # worst angle between the two direction sets
    matches: bool


@dataclass
class CheckResult:
    """Outcome of one named check inside a report."""

    check: str
    passed: bool
    data: dict[str, Any] = field(default_factory=dict)
    witness: Any = None


@dataclass
class RunReport:
    """Everything one CLI invocation produced."""

    command: str
    system: str | None
    parameters: dict[str, Any]
    results: list[CheckResult] = field(default_factory=list)
    seed: int = 0
    elapsed: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)
