"""Largest cyclic group code on a 4-D torus layer.

The layer is fixed by the initial vector ``x0 = (cos a, 0, sin a, 0)``; the
group is generated by a block-diagonal rotation with angles
``2*pi*g1/M`` and ``2*pi*g2/M``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


@dataclass(frozen=True)
class CyclicLayerCode:
    alpha: float
    order_M: int
    generators: tuple[int, int]
    dmin_achieved: float
    start_M: int | None = None

    @property
    def radius(self) -> tuple[float, float]:
        return (math.cos(self.alpha), math.sin(self.alpha))


def rotation_generator(M: int, g1: int, g2: int) -> np.ndarray:
    """The 4x4 block-diagonal rotation ``G`` of order dividing ``M``."""
    G = np.zeros((4, 4))
    for blk, g in enumerate((g1, g2)):
        t = 2.0 * math.pi * g / M
        s = slice(2 * blk, 2 * blk + 2)
        G[s, s] = [[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]
    return G


def orbit_min_distance(alpha: float, M: int, g1: int, g2: int) -> float:
    """``min_{1 <= i <= M//2} ||G^i x0 - x0||`` in closed form."""
    if M < 2:
        raise ValueError("orbit distance needs M >= 2")
    i = np.arange(1, M // 2 + 1)
    # reduce g*i mod M first so large products keep full precision
    s1 = np.sin(math.pi * ((g1 * i) % M) / M)
    s2 = np.sin(math.pi * ((g2 * i) % M) / M)
    d2 = math.cos(alpha) ** 2 * s1 * s1 + math.sin(alpha) ** 2 * s2 * s2
    return float(2.0 * math.sqrt(d2.min()))


def initial_M(alpha: float, d: float) -> int:
    """Starting order from the hexagonal-packing estimate on the flat torus."""
    val = (math.pi ** 2 * math.cos(alpha) * math.sin(alpha)
           / (2.0 * math.sqrt(3.0) * math.asin(d / 4.0) ** 2))
    return math.floor(val)


def circle_count(r: float, d: float) -> int:
    """Points at chord distance ``>= d`` on a circle of radius ``r``."""
    if r <= 0:
        return 1
    x = d / (2.0 * r)
    if x > 1:
        return 1
    return max(math.floor(math.pi / math.asin(x)), 1)


def packing_bound(alpha: float, d: float) -> int:
    """Proven upper bound on the orbit size at chord distance ``d``.

    Flat distance dominates chord distance, so a code is a disk packing on
    the flat torus with sides ``2*pi*cos(a)`` and ``2*pi*sin(a)``. When both
    sides are at least ``d`` the hexagonal density bound applies. Otherwise
    the thin circle adds at most ``2r`` of chord, and the projections on the
    other circle must be ``sqrt(d^2 - 4 r^2)`` apart.
    """
    c, s = math.cos(alpha), math.sin(alpha)
    if 2.0 * math.pi * min(c, s) >= d:
        return math.floor(8.0 * math.pi ** 2 * c * s / (math.sqrt(3.0) * d * d) + 1e-9)
    thin, wide = min(c, s), max(c, s)
    return circle_count(wide, math.sqrt(d * d - 4.0 * thin * thin))


START_RULES = ("table", "proven")


def start_M(alpha: float, d: float, rule: str = "table") -> int:
    """First order tried by the search.

    ``table``: the hexagonal estimate, raised to the single-circle counts on
    thin tori (reproduces the published layer sizes). ``proven``: raised to
    :func:`packing_bound`, so the search result is the true maximum.
    """
    if rule == "table":
        return max(initial_M(alpha, d), circle_count(math.cos(alpha), d),
                   circle_count(math.sin(alpha), d))
    if rule == "proven":
        return max(initial_M(alpha, d), packing_bound(alpha, d))
    raise ValueError(f"unknown start rule {rule!r}")


def _scan_py(M, ca2, sa2, d2q, T):
    h = M // 2
    i = np.arange(1, h + 1)
    g = np.arange(1, h + 1)
    for g1 in g:
        a = T[(g1 * i) % M]
        for g2 in g:
            if ca2 * a[0] + sa2 * T[g2 % M] < d2q:
                continue
            if np.all(ca2 * a + sa2 * T[(g2 * i) % M] >= d2q) and math.gcd(int(g1), int(g2)) == 1:
                return int(g1), int(g2)
    return -1, -1


if njit is not None:
    @njit(cache=False, nogil=True)
    def _scan(M, ca2, sa2, d2q, T):
        h = M // 2
        for g1 in range(1, h + 1):
            for g2 in range(1, h + 1):
                ok = True
                a = 0
                b = 0
                for _ in range(h):
                    a += g1
                    if a >= M:
                        a -= M
                    b += g2
                    if b >= M:
                        b -= M
                    if ca2 * T[a] + sa2 * T[b] < d2q:
                        ok = False
                        break
                if ok:
                    x, y = g1, g2
                    while y:
                        x, y = y, x % y
                    if x == 1:
                        return g1, g2
        return -1, -1
else:  # pragma: no cover
    _scan = _scan_py


def find_generators(alpha: float, M: int, d: float) -> tuple[int, int] | None:
    """Lexicographically first coprime pair in ``[1, M//2]^2`` reaching ``d``.

    Pairs with a zero entry, ``(0, 1)`` then ``(1, 0)``, are tried last.
    """
    ca2 = math.cos(alpha) ** 2
    sa2 = math.sin(alpha) ** 2
    d2q = d * d / 4.0
    T = np.sin(math.pi * np.arange(M) / M) ** 2
    g1, g2 = _scan(M, ca2, sa2, d2q, T)
    if g1 > 0:
        return int(g1), int(g2)
    for pair in ((0, 1), (1, 0)):
        if orbit_min_distance(alpha, M, *pair) >= d:
            return pair
    return None


def search_layer(alpha: float, d: float, start: str = "table") -> CyclicLayerCode:
    """Largest order ``M`` with a coprime generator pair of orbit distance ``>= d``."""
    if not 0 < d <= math.sqrt(2) + 1e-15:
        raise ValueError(f"d must lie in (0, sqrt(2)], got {d}")
    if not 0 < alpha < math.pi / 2:
        raise ValueError(f"alpha must lie in (0, pi/2), got {alpha}")
    m0 = start_M(alpha, d, start)
    for M in range(m0, 1, -1):
        gens = find_generators(alpha, M, d)
        if gens is not None:
            return CyclicLayerCode(alpha, M, gens, orbit_min_distance(alpha, M, *gens), m0)
    return CyclicLayerCode(alpha, 1, (0, 0), math.inf, m0)


def mirror_layer(code: CyclicLayerCode) -> CyclicLayerCode:
    """Swap the two circles: ``alpha -> pi/2 - alpha`` and ``(g1, g2) -> (g2, g1)``."""
    g1, g2 = code.generators
    return replace(code, alpha=math.pi / 2 - code.alpha, generators=(g2, g1))
