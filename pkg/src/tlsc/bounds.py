"""Size bounds, cap areas and packing density of torus layer codes."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
from scipy import integrate
from scipy.special import gamma

from .layering import LayerFamily, polygon2d_layers

FLOOR_GUARD = mpmath.mpf("1e-12")
_DPS = 40


def _sqrt(x):
    return mpmath.sqrt(x)


def _center_density_exact():
    s2, s3 = _sqrt(2), _sqrt(3)
    return {
        1: mpmath.mpf(1) / 2, 2: 1 / (2 * s3), 3: 1 / (4 * s2), 4: mpmath.mpf(1) / 8,
        5: 1 / (8 * s2), 6: 1 / (8 * s3), 7: mpmath.mpf(1) / 16, 8: mpmath.mpf(1) / 16,
        9: 1 / (16 * s2), 10: 1 / (16 * s3), 11: 1 / (18 * s3), 12: mpmath.mpf(1) / 27,
        13: 1 / (18 * s3), 14: 1 / (16 * s3), 15: 1 / (16 * s2), 16: mpmath.mpf(1) / 16,
        17: mpmath.mpf(1) / 16, 18: 1 / (8 * s3), 19: 1 / (8 * s2), 20: mpmath.mpf(1) / 8,
        21: 1 / (4 * s2), 22: 1 / (2 * s3), 23: mpmath.mpf(1) / 2, 24: mpmath.mpf(1),
    }


with mpmath.workdps(_DPS):
    # best known lattice center densities, dimensions 1..24
    CENTER_DENSITY: dict[int, float] = {
        p: float(mpmath.nstr(v, 15)) for p, v in _center_density_exact().items()}


def center_density(p: int) -> float:
    if p not in CENTER_DENSITY:
        raise ValueError(f"no center density tabulated for dimension {p}")
    return CENTER_DENSITY[p]


@dataclass(frozen=True)
class LayerBound:
    layer_index: int
    count: int
    face_dim: int


@dataclass(frozen=True)
class BoundReport:
    d: float
    kind: str
    per_layer: tuple[LayerBound, ...]

    @property
    def total(self) -> int:
        return sum(b.count for b in self.per_layer)

    @property
    def counts(self) -> list[int]:
        return [b.count for b in self.per_layer]


def _floor(x) -> int:
    return int(mpmath.floor(x - FLOOR_GUARD))


def grid_axis_count(c: float, d: float) -> int:
    """Points per axis of the rectangular grid on a circle of radius ``c``."""
    with mpmath.workdps(_DPS):
        if c <= 0:
            return 1
        arg = mpmath.mpf(d) / (2 * mpmath.mpf(c))
        if abs(arg) > 1:
            return 1
        return max(_floor(mpmath.pi / mpmath.asin(arg)), 1)


def grid_lower_bound(layers: LayerFamily, d: float) -> BoundReport:
    """Size of the rectangular-grid code on each layer."""
    if not 0 < d <= math.sqrt(2) + 1e-15:
        raise ValueError(f"d must lie in (0, sqrt(2)], got {d}")
    out = []
    for i, r in enumerate(layers.radii):
        out.append(LayerBound(i, math.prod(grid_axis_count(c, d) for c in r), layers.dim_L))
    return BoundReport(d, "lower", tuple(out))


def face_count(c_sorted: Sequence[float], p: int, d: float, table=None) -> int:
    """Lattice-packing estimate on the ``p``-face spanned by the ``p`` largest radii."""
    lam = (table or CENTER_DENSITY)[p]
    with mpmath.workdps(_DPS):
        prod = mpmath.fprod(mpmath.mpf(x) for x in c_sorted[:p])
        val = (mpmath.pi / mpmath.asin(mpmath.mpf(d) / 4)) ** p * prod * mpmath.mpf(lam)
        return max(_floor(val), 0)


def layer_upper(c: Sequence[float], d: float, table=None, max_face: bool = False):
    """Upper estimate for one layer: ``(count, face_dim)``.

    Default: faces of lower dimension are consulted only while the count is 0.
    ``max_face=True`` takes the maximum over all faces and the circle count.
    """
    cs = sorted((float(x) for x in c), reverse=True)
    L = len(cs)
    circle = grid_axis_count(cs[0], d)
    if max_face:
        best = (circle, 1)
        for p in range(L, 0, -1):
            v = face_count(cs, p, d, table)
            if v > best[0]:
                best = (v, p)
        return best
    for p in range(L, 0, -1):
        v = face_count(cs, p, d, table)
        if v > 0:
            return v, p
    return max(circle, 1), 1


def upper_bound(layers: LayerFamily, d: float, table=None, max_face: bool = False) -> BoundReport:
    out = []
    for i, r in enumerate(layers.radii):
        cnt, p = layer_upper(r.entries, d, table, max_face)
        out.append(LayerBound(i, cnt, p))
    return BoundReport(d, "upper", tuple(out))


def sphere_area(L: int) -> float:
    """Surface measure of S^{L-1} in R^L."""
    return L * math.pi ** (L / 2) / gamma(L / 2 + 1)


def ball_volume(L: int) -> float:
    return math.pi ** (L / 2) / gamma(L / 2 + 1)


def cap_area(theta_half: float, L: int) -> float:
    """Measure of a cap of angular radius ``theta_half`` on S^{L-1}."""
    if L < 2:
        raise ValueError("cap area needs L >= 2")
    if not 0 <= theta_half <= math.pi:
        raise ValueError("angular radius must lie in [0, pi]")
    if theta_half == 0:
        return 0.0
    val, _ = integrate.quad(lambda x: math.sin(x) ** (L - 2), 0.0, theta_half,
                            epsabs=0.0, epsrel=1e-12, limit=200)
    return sphere_area(L - 1) * val


def code_density(M: int, d: float, L_amb: int) -> float:
    """Fraction of S^{L_amb - 1} covered by the caps of radius ``arcsin(d/2)``."""
    if M < 1:
        raise ValueError("M must be positive")
    dens = cap_area(math.asin(min(d / 2, 1.0)), L_amb) * float(M) / sphere_area(L_amb)
    if dens > 1 + 1e-9:
        raise ValueError(f"density {dens:.6g} exceeds 1: inconsistent (M, d)")
    return dens


def product_lattice_density(L: int, table=None) -> float:
    """Packing density of ``Lambda_L x Lambda_{L-1}`` in R^{2L-1}."""
    t = table or CENTER_DENSITY
    return ball_volume(2 * L - 1) * t[L] * t[L - 1]


def asymptotic_density_ratio(d_values: Sequence[float], L: int,
                             count_fn: Callable[[float], int] | None = None,
                             table=None) -> list[float]:
    """Density of a TLSC(2L, d) over the product-lattice density, per ``d``.

    ``count_fn(d)`` gives the code size; the default is the grid code on the
    two-dimensional polygon layers (L = 2 only).
    """
    ds = list(d_values)
    if any(b >= a for a, b in zip(ds, ds[1:])):
        raise ValueError("d values must be strictly decreasing")
    if count_fn is None:
        if L != 2:
            raise ValueError("the default construction exists for L = 2 only")

        def count_fn(d):
            return grid_lower_bound(polygon2d_layers(d), d).total
    ref = product_lattice_density(L, table)
    return [code_density(count_fn(d), d, 2 * L) / ref for d in ds]


CSV_COLUMNS = ("d", "layer_index", "face_dim", "count", "total", "kind")


def reports_to_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for b in rep.per_layer:
            w.writerow([repr(rep.d), b.layer_index, b.face_dim, b.count, rep.total, rep.kind])
    return buf.getvalue()
