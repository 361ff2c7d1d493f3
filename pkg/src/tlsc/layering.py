"""Selection of torus layers: positive-orthant spherical codes SC(L, d)_+."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import RadiusVector

PROVENANCES = ("polygon2d", "permutation", "external", "sliced")
DIST_TOL = 1e-12


class LayerDistanceError(ValueError):
    """A pair of radius vectors is closer than the requested distance."""

    def __init__(self, i: int, j: int, dist: float, dmin: float):
        super().__init__(
            f"radius vectors {i} and {j} are {dist:.12g} apart, below dmin={dmin:.12g}"
        )
        self.pair = (i, j)
        self.distance = dist


@dataclass(frozen=True)
class LayerFamily:
    dim_L: int
    dmin: float
    radii: tuple[RadiusVector, ...]
    provenance: str
    angles: tuple[float, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for r in self.radii:
            if len(r) != self.dim_L:
                raise ValueError("radius vector dimension does not match dim_L")

    def __len__(self) -> int:
        return len(self.radii)

    def matrix(self) -> np.ndarray:
        return np.array([r.entries for r in self.radii]).reshape(len(self.radii), self.dim_L)

    def min_distance(self) -> float:
        if len(self.radii) < 2:
            return math.inf
        return float(_pairwise(self.matrix())[1])


def _pairwise(pts: np.ndarray):
    """Return ((i, j), distance) of the closest pair."""
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(dist, np.inf)
    i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
    return (min(i, j), max(i, j)), dist[i, j]


def _check_separation(pts: np.ndarray, d: float) -> None:
    if len(pts) < 2:
        return
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    bad = np.argwhere(np.triu(dist < d - DIST_TOL, k=1))
    if len(bad):
        i, j = (int(x) for x in bad[0])
        raise LayerDistanceError(i, j, float(dist[i, j]), d)


def polygon2d_angles(d: float) -> list[float]:
    """Angles ``pi/4 +- (2j-1)*arcsin(d/2)`` inside ``[0, pi/2]``, ascending."""
    if not 0 < d <= math.sqrt(2) + 1e-15:
        raise ValueError(f"d must lie in (0, sqrt(2)], got {d}")
    step = math.asin(min(d / 2.0, 1.0))
    out = []
    j = 1
    while True:
        off = (2 * j - 1) * step
        hi = math.pi / 4 + off
        if hi > math.pi / 2 + 1e-12:
            break
        hi = min(hi, math.pi / 2)
        lo = max(math.pi / 4 - off, 0.0)
        out.extend([lo, hi])
        j += 1
    return sorted(out)


def polygon2d_layers(d: float) -> LayerFamily:
    """Two-dimensional layer family symmetric about the diagonal ``y = x``."""
    alphas = polygon2d_angles(d)
    radii = tuple(RadiusVector.normalized([math.cos(a), math.sin(a)]) for a in alphas)
    return LayerFamily(2, d, radii, "polygon2d", angles=tuple(alphas))


def permutation_t(L: int, d: float) -> float:
    """Root ``t > 1`` of ``2 (t-1)^2 = d^2 ((L-1) + t^2)``."""
    if L < 2:
        raise ValueError("permutation layers need L >= 2")
    if not 0 < d < math.sqrt(2):
        raise ValueError(f"d must lie in (0, sqrt(2)), got {d}")
    a = 2.0 - d * d
    b = -4.0
    c = 2.0 - d * d * (L - 1)
    disc = b * b - 4 * a * c
    if disc < 0:
        raise ValueError(f"no permutation family reaches d={d} for L={L}")
    t = (-b + math.sqrt(disc)) / (2 * a)
    if t <= 1:
        raise ValueError(f"no root t > 1 for L={L}, d={d}")
    return t


def permutation_vector(L: int, t: float) -> np.ndarray:
    v = np.ones(L)
    v[0] = t
    return v / math.sqrt((L - 1) + t * t)


def permutation_layers(L: int, d: float) -> LayerFamily:
    """All ``L`` distinct permutations of ``(t, 1, ..., 1)/sqrt(L-1+t^2)``."""
    t = permutation_t(L, d)
    base = permutation_vector(L, t)
    radii = tuple(RadiusVector(np.roll(base, k)) for k in range(L))
    return LayerFamily(L, d, radii, "permutation", meta={"t": t})


def parse_points(text: str) -> list[list[float]]:
    """Parse whitespace/comma separated numeric rows; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in re.split(r"[,\s]+", line) if tok])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return rows


def external_layers(L: int, d: float, points: Iterable[Sequence[float]],
                    unit_tol: float = 1e-9) -> LayerFamily:
    """Keep the nonnegative-orthant points of a given spherical code."""
    kept = []
    for p in points:
        p = np.asarray(p, dtype=float)
        if p.shape != (L,):
            raise ValueError(f"point {p.tolist()} does not have dimension {L}")
        if np.any(p < 0):
            continue
        if abs(np.linalg.norm(p) - 1.0) > unit_tol:
            raise ValueError(f"point {p.tolist()} is not a unit vector")
        kept.append(p / np.linalg.norm(p))
    if not kept:
        raise ValueError("no point lies in the nonnegative orthant")
    _check_separation(np.array(kept), d)
    return LayerFamily(L, d, tuple(RadiusVector(p) for p in kept), "external")


def verify_family(fam: LayerFamily) -> None:
    _check_separation(fam.matrix(), fam.dmin)


@dataclass(frozen=True)
class SliceRing:
    """One ring of a sliced odd-dimensional code.

    ``kind`` is ``"torus"`` (a scaled TLSC(2L, d/r)), ``"antipodal"``
    (two points) or ``"point"``.
    """

    index: int
    height: float
    radius: float
    kind: str
    inner_d: float | None
    code: object = None

    @property
    def size(self) -> int:
        if self.kind == "torus":
            return int(self.code.total_M)
        return 2 if self.kind == "antipodal" else 1

    def points(self, L: int) -> np.ndarray:
        """Codewords of this ring as unit vectors in R^{2L+1}."""
        if self.kind == "torus":
            inner = self.code.codewords()
        elif self.kind == "antipodal":
            inner = np.zeros((2, 2 * L))
            inner[0, 0], inner[1, 0] = 1.0, -1.0
        else:
            inner = np.zeros((1, 2 * L))
            inner[0, 0] = 1.0
        out = np.empty((len(inner), 2 * L + 1))
        out[:, :-1] = self.radius * inner
        out[:, -1] = self.height
        return out


SLICE_RULE = (
    "polar angles phi_m = (m + 1/2) * 2*arcsin(d/2) - pi/2 for m = 0, 1, ... "
    "while phi_m < pi/2; ring radius r = cos(phi_m); r >= d/sqrt(2): TLSC(2L, d/r) "
    "scaled by r; d/2 <= r < d/sqrt(2): antipodal pair; r < d/2: single point"
)


def slice_odd_sphere(d: float, inner_builder: Callable[[float], object],
                     workers: int = 1) -> list[SliceRing]:
    """Slice S^{2L} by hyperplanes normal to the last axis and fill each ring.

    ``inner_builder(d_inner)`` returns a code with ``total_M`` and
    ``codewords()`` on S^{2L-1}. Ring order is by polar angle regardless of
    ``workers``.
    """
    if not 0 < d <= math.sqrt(2) + 1e-15:
        raise ValueError(f"d must lie in (0, sqrt(2)], got {d}")
    theta = 2.0 * math.asin(d / 2.0)
    specs = []
    m = 0
    while True:
        phi = (m + 0.5) * theta - math.pi / 2
        if phi >= math.pi / 2:
            break
        r = math.cos(phi)
        h = math.sin(phi)
        if r >= d / math.sqrt(2) - 1e-12:
            specs.append((m, h, r, "torus", min(d / r, math.sqrt(2))))
        elif r >= d / 2 - 1e-12:
            specs.append((m, h, r, "antipodal", None))
        else:
            specs.append((m, h, r, "point", None))
        m += 1

    inner_ds = sorted({s[4] for s in specs if s[3] == "torus"})
    if workers > 1 and len(inner_ds) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            built = dict(zip(inner_ds, ex.map(inner_builder, inner_ds)))
    else:
        built = {x: inner_builder(x) for x in inner_ds}
    return [
        SliceRing(m, h, r, kind, dd, built.get(dd) if kind == "torus" else None)
        for m, h, r, kind, dd in specs
    ]


def sliced_points(rings: Sequence[SliceRing], L: int) -> np.ndarray:
    return np.vstack([ring.points(L) for ring in rings])
