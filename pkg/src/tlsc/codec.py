"""Torus layer spherical codes: assembly, labelling, encoding and decoding.

A code is a list of layers, each a structured point set in the box of one
flat torus ``T_c``. Three layer kinds exist:

* ``cyclic``: the orbit of ``x0`` under a 4-D block rotation (L = 2);
* ``grid``: a rectangular grid with ``W_j`` evenly spaced points per axis;
* ``quotient``: coset representatives of ``Lambda / alpha*diag(v)*Z^L``
  placed in the box.

Decoding projects onto the nearest torus, decodes there, and (in ``ml``
mode) refines over every torus that could still hold a closer codeword.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .cyclic import CyclicLayerCode, mirror_layer, search_layer
from .geometry import TWO_PI, RadiusVector, embed, polar_parts
from .layering import LayerFamily, permutation_layers, polygon2d_layers
from .lattice import (BoxFit, GroupStructure, LatticeBasis, named_basis, orthogonal_fit,
                      quotient_structure)
from .lattice.cvp import EXACT_DIM_CAP, _Tri, babai, closest_vector, enumerate_ball, lll_reduce
from .lattice.snf import row_basis

BRUTE_FORCE_CAP = 10 ** 6
PUBLISHED_LEECH_BETA = 0.10187
SCHEMA_VERSION = 1


class CodeTooLargeError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Label:
    layer_index: int
    group_coords: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.layer_index}:" + ",".join(str(k) for k in self.group_coords)

    @classmethod
    def parse(cls, text: str) -> "Label":
        head, _, tail = text.strip().partition(":")
        coords = tuple(int(t) for t in tail.split(",") if t.strip()) if tail else ()
        return cls(int(head), coords)


@dataclass(frozen=True)
class DecodeResult:
    codeword: np.ndarray
    label: Label
    distance: float
    ml_certified: bool
    tori_examined: int
    inbox_decodes: int = 1
    degenerate: bool = False
    suboptimal: bool = False


@dataclass
class _Hit:
    dist: float
    coords: tuple[int, ...]
    point: np.ndarray


def _chord(x, y) -> np.ndarray:
    return np.linalg.norm(np.asarray(y) - x, axis=-1)


class LayerCodebook:
    """Point set in the box of one torus. Subclasses fix the structure."""

    kind = "abstract"
    radius: RadiusVector
    exact_search = True

    @property
    def cardinality(self) -> int:
        raise NotImplementedError

    @property
    def moduli(self) -> tuple[int, ...]:
        raise NotImplementedError

    def check_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        mods = self.moduli
        if len(coords) != len(mods):
            raise ValueError(f"{self.kind} layer expects {len(mods)} coordinates, got {len(coords)}")
        out = tuple(int(k) for k in coords)
        for k, m in zip(out, mods):
            if not 0 <= k < m:
                raise ValueError(f"coordinate {k} out of range [0, {m})")
        return out

    def box_point(self, coords: Sequence[int]) -> np.ndarray:
        raise NotImplementedError

    def point(self, coords: Sequence[int]) -> np.ndarray:
        return embed(self.radius, self.box_point(self.check_coords(coords)))

    def labels(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.moduli))

    def index_to_coords(self, idx: int) -> tuple[int, ...]:
        """Mixed-radix position of ``idx`` in :meth:`labels` order."""
        out = []
        for m in reversed(self.moduli):
            idx, r = divmod(idx, m)
            out.append(r)
        return tuple(reversed(out))

    def codewords(self) -> np.ndarray:
        return np.array([self.point(k) for k in self.labels()]).reshape(-1, 2 * len(self.radius))

    def target(self, phi: np.ndarray) -> np.ndarray:
        """Box coordinates of the projection of a point with angles ``phi``."""
        return phi * self.radius.array

    def decode_fast(self, x, phi) -> _Hit:
        raise NotImplementedError

    def nearest(self, x, phi, bound: float, delta: float) -> _Hit | None:
        """Closest codeword to ``x`` if it lies within ``bound``; ``None`` otherwise."""
        hit = self.decode_fast(x, phi)
        return hit if hit.dist < bound else None

    def to_json(self) -> dict:
        raise NotImplementedError


def _best(x, c, cands: dict[tuple[int, ...], np.ndarray]) -> _Hit | None:
    if not cands:
        return None
    keys = sorted(cands)
    pts = embed(c, np.array([cands[k] for k in keys]))
    dist = _chord(x, pts)
    i = int(np.argmin(dist))  # first minimum: smallest label on ties
    return _Hit(float(dist[i]), keys[i], pts[i])


class CyclicLayer(LayerCodebook):
    """Orbit layer on a 4-D torus: point ``i`` has angles ``-2*pi*g*i/M``."""

    kind = "cyclic"

    def __init__(self, code: CyclicLayerCode):
        self.code = code
        self.radius = RadiusVector.normalized(code.radius)
        M = code.order_M
        g1, g2 = code.generators
        self.M, self.g = M, (g1, g2)
        c = self.radius.array
        self._step = TWO_PI * c / M
        if M > 1:
            if math.gcd(g1, g2) != 1:
                raise ValueError("cyclic generators must be coprime")
            basis = row_basis([(g1, g2), (M, 0), (0, M)])
            self._flat = _Tri((np.array(basis, dtype=float) * self._step).T)
            # Bezout: a*g1 + b*g2 = 1
            self._ab = _bezout(g1, g2)

    @property
    def cardinality(self) -> int:
        return self.M

    @property
    def moduli(self) -> tuple[int, ...]:
        return (self.M,)

    def box_point(self, coords) -> np.ndarray:
        (i,) = coords
        n = np.array([(-gj * i) % self.M for gj in self.g], dtype=float)
        return n * self._step

    def _label_of(self, n) -> int:
        if self.M == 1:
            return 0
        a, b = self._ab
        return (-(a * int(n[0]) + b * int(n[1]))) % self.M

    def _lattice_near(self, z, radius) -> dict:
        out = {}
        for x in enumerate_ball(self._flat, z, radius):
            n = np.rint(self._flat.B @ np.array(x, dtype=float) / self._step).astype(np.int64)
            i = self._label_of(n)
            out[(i,)] = self.box_point((i,))
        return out

    def decode_fast(self, x, phi) -> _Hit:
        if self.M == 1:
            return _Hit(float(_chord(x, self.point((0,)))), (0,), self.point((0,)))
        z = self.target(phi)
        xc = closest_vector(self._flat, z)
        n = np.rint(self._flat.B @ xc / self._step).astype(np.int64)
        i = self._label_of(n)
        p = self.point((i,))
        return _Hit(float(_chord(x, p)), (i,), p)

    def nearest(self, x, phi, bound, delta):
        if self.M == 1:
            return super().nearest(x, phi, bound, delta)
        # chord >= (2/pi) * flat distance on each torus
        R = 0.5 * math.pi * (bound + delta) + 1e-12
        hit = _best(x, self.radius, self._lattice_near(self.target(phi), R))
        return hit if hit is not None and hit.dist < bound else None

    def to_json(self) -> dict:
        return {"kind": self.kind, "radius": list(self.radius.entries),
                "alpha": self.code.alpha, "M": self.M, "generators": list(self.g),
                "dmin": _num(self.code.dmin_achieved), "start_M": self.code.start_M}


def _bezout(a: int, b: int) -> tuple[int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0


def _num(v: float):
    return v if math.isfinite(v) else None


class GridLayer(LayerCodebook):
    """``W_j`` evenly spaced points on circle ``j``; decoding rounds each angle."""

    kind = "grid"

    def __init__(self, radius: RadiusVector, counts: Sequence[int]):
        self.radius = radius
        self.counts = tuple(int(w) for w in counts)
        if len(self.counts) != len(radius) or min(self.counts) < 1:
            raise ValueError("grid needs one positive count per axis")
        for c, w in zip(radius.entries, self.counts):
            if c == 0 and w != 1:
                raise ValueError("a degenerate axis holds exactly one grid point")

    @property
    def cardinality(self) -> int:
        return math.prod(self.counts)

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.counts

    def box_point(self, coords) -> np.ndarray:
        w = np.array(self.counts, dtype=float)
        return np.array(coords, dtype=float) * TWO_PI * self.radius.array / w

    def decode_fast(self, x, phi) -> _Hit:
        # the chord is separable per circle and each term is monotone in the angle gap
        w = np.array(self.counts, dtype=float)
        m = np.rint(phi * w / TWO_PI).astype(np.int64) % np.array(self.counts)
        coords = tuple(int(v) for v in m)
        p = self.point(coords)
        return _Hit(float(_chord(x, p)), coords, p)

    def to_json(self) -> dict:
        return {"kind": self.kind, "radius": list(self.radius.entries), "counts": list(self.counts)}


class QuotientLayer(LayerCodebook):
    """Coset representatives of ``Lambda / alpha*diag(v)*Z^L`` in the box."""

    kind = "quotient"

    def __init__(self, radius: RadiusVector, basis: LatticeBasis, fit: BoxFit,
                 group: GroupStructure | None = None, dim_cap: int = EXACT_DIM_CAP):
        if radius.is_degenerate:
            raise ValueError("quotient layers need a non-degenerate radius vector")
        self.radius = radius
        self.basis = basis
        self.fit = fit
        self.group = group or quotient_structure(basis, fit.sublattice(basis))
        self.dim_cap = dim_cap
        self.exact_search = basis.dim <= dim_cap
        den = 1
        for row in basis.matrix:
            for v in row:
                den = math.lcm(den, v.denominator)
        self._den = den
        self._Bint = [[int(v * den) for v in row] for row in basis.matrix]
        sides = [s * den for s in fit.side_exact]
        if any(s.denominator != 1 for s in sides):
            raise ValueError("box side is not a lattice step")
        self._side_int = [int(s) for s in sides]
        self._unit = basis.scale / den
        # decode in an LLL-reduced basis; x = T y recovers original coordinates
        R, T = lll_reduce(self._Bint)
        self._T = [[int(v) for v in row] for row in T]
        self._tri = _Tri(np.array(R, dtype=float) * self._unit)

    @property
    def cardinality(self) -> int:
        return self.group.order

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.group.moduli

    def _reduced(self, x) -> list[int]:
        p = [sum(a * int(b) for a, b in zip(row, x)) for row in self._Bint]
        return [v % s for v, s in zip(p, self._side_int)]

    def _flat(self, p_int) -> np.ndarray:
        return np.array(p_int, dtype=float) * self._unit

    def box_point(self, coords) -> np.ndarray:
        return self._flat(self._reduced(self.group.coords_from_residues(coords)))

    def _seam_targets(self, z) -> list[np.ndarray]:
        side = self.fit.side
        box = TWO_PI * self.radius.array
        g = self.fit.guard
        near = [j for j in range(len(z)) if z[j] < g or z[j] > side[j] - g]
        out = [z]
        for j in near:
            t = z.copy()
            t[j] += box[j] if z[j] < g else -box[j]
            out.append(t)
        if len(near) > 1:
            t = z.copy()
            for j in near:
                t[j] += box[j] if z[j] < g else -box[j]
            out.append(t)
        return out

    def _cands_from(self, ys) -> dict:
        out = {}
        for y in ys:
            x = [sum(a * int(b) for a, b in zip(row, y)) for row in self._T]
            k = self.group.residues_from_coords(x)
            if k not in out:
                out[k] = self.box_point(k)
        return out

    def decode_fast(self, x, phi) -> _Hit:
        z = self.target(phi)
        solve = closest_vector if self.exact_search else babai
        xs = [solve(self._tri, t) for t in self._seam_targets(z)]
        return _best(x, self.radius, self._cands_from(xs))

    def nearest(self, x, phi, bound, delta):
        if not self.exact_search:
            return super().nearest(x, phi, bound, delta)
        z = self.target(phi)
        R = 0.5 * math.pi * (bound + delta) + 1e-12
        box = TWO_PI * self.radius.array
        side = self.fit.side
        shifts = []
        for j in range(len(z)):
            # whole turns m with [z + m*box - R, z + m*box + R] meeting [0, side)
            lo = math.ceil((-R - z[j]) / box[j])
            hi = math.floor((side[j] + R - z[j]) / box[j])
            shifts.append([m * box[j] for m in range(lo, hi + 1)])
        xs, ps = [], []
        for s in itertools.product(*shifts):
            vs = enumerate_ball(self._tri, z + np.array(s), R)
            if not vs:
                continue
            P = np.array(vs, dtype=float) @ self._tri.B.T
            inside = np.all((P > -1e-9) & (P < side + 1e-9), axis=1)
            xs.extend(v for v, ok in zip(vs, inside) if ok)
            ps.append(P[inside])
        if not xs:
            return None
        # label only the candidates tied for the smallest chord
        ps = np.vstack(ps)
        # a point on the far edge is the coset representative at 0
        ps = np.maximum(ps - side * np.floor((ps + 1e-9) / side), 0.0)
        dist = _chord(x, embed(self.radius, ps))
        keep = np.flatnonzero(dist <= dist.min() + 1e-12)
        hit = _best(x, self.radius, self._cands_from([xs[i] for i in keep]))
        return hit if hit is not None and hit.dist < bound else None

    def to_json(self) -> dict:
        b = self.basis
        named = b.name.lower() in ("leech", "e8", "d4") or (
            b.name.startswith("Z") and b.name[1:].isdigit())
        return {
            "kind": self.kind, "radius": list(self.radius.entries),
            "lattice": b.name,
            "basis": None if named else [[str(v) for v in row] for row in b.matrix],
            "min_norm2": None if b.min_norm2 is None else str(b.min_norm2),
            "scale": b.scale, "scale_note": b.scale_note,
            "alpha_exact": str(self.fit.alpha_exact), "alpha_flat": self.fit.alpha_scale,
            "counts": list(self.fit.counts), "guard": self.fit.guard,
            "invariant_factors": [str(f) for f in self.group.invariant_factors],
            "cardinality": str(self.cardinality),
        }


class TorusCode:
    """Immutable union of layer codebooks on ``S^{2L-1}``."""

    def __init__(self, L: int, dmin_design: float, layers: Sequence[LayerCodebook],
                 metadata: dict | None = None):
        if not layers:
            raise ValueError("a code needs at least one layer")
        for lay in layers:
            if len(lay.radius) != L:
                raise ValueError("layer radius dimension does not match L")
        self.L = int(L)
        self.dmin_design = float(dmin_design)
        self.layers = tuple(layers)
        self.metadata = dict(metadata or {})
        self._radii = np.array([lay.radius.array for lay in self.layers])
        self._sizes = [lay.cardinality for lay in self.layers]
        self._points = None

    @property
    def total_M(self) -> int:
        return sum(self._sizes)

    @property
    def radii(self) -> np.ndarray:
        return self._radii.copy()

    def __len__(self) -> int:
        return self.total_M

    def _layer(self, i: int) -> LayerCodebook:
        if not 0 <= i < len(self.layers):
            raise ValueError(f"unknown layer {i}")
        return self.layers[i]

    def encode(self, label: Label) -> np.ndarray:
        return self._layer(label.layer_index).point(label.group_coords)

    def labels(self) -> Iterator[Label]:
        for i, lay in enumerate(self.layers):
            for k in lay.labels():
                yield Label(i, tuple(k))

    def label_at(self, idx: int) -> Label:
        """Label of the ``idx``-th codeword in :meth:`labels` order."""
        if not 0 <= idx < self.total_M:
            raise IndexError(idx)
        for i, n in enumerate(self._sizes):
            if idx < n:
                return Label(i, self._layer(i).index_to_coords(idx))
            idx -= n
        raise IndexError(idx)  # pragma: no cover

    def _guard(self, cap: int):
        if self.total_M > cap:
            raise CodeTooLargeError(f"code has {self.total_M} codewords, cap is {cap}")

    def codewords(self, cap: int = BRUTE_FORCE_CAP) -> np.ndarray:
        self._guard(cap)
        if self._points is None:
            pts = np.vstack([lay.codewords() for lay in self.layers])
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def min_distance(self, cap: int = 10 ** 5, block: int = 2048) -> float:
        """Exact minimum distance by a full pairwise scan."""
        P = self.codewords(cap)
        if len(P) < 2:
            return math.inf
        best = math.inf
        for s in range(0, len(P), block):
            G = P[s:s + block] @ P.T
            for r in range(G.shape[0]):
                G[r, s + r] = -np.inf
            # the Gram form loses digits; re-measure the few closest pairs directly
            top = np.argwhere(G >= G.max() - 1e-9)
            for r, j in top:
                best = min(best, float(np.linalg.norm(P[s + r] - P[j])))
        return best

    def spot_check(self, samples: int = 2000, seed: int = 0) -> float:
        """Minimum distance over random codeword pairs (sampled audit)."""
        rng = np.random.default_rng(seed)
        best = math.inf
        for _ in range(samples):
            a, b = self.random_label(rng), self.random_label(rng)
            if a != b:
                best = min(best, float(np.linalg.norm(self.encode(a) - self.encode(b))))
        return best

    def random_label(self, rng: np.random.Generator) -> Label:
        """Uniform label over all codewords (exact for arbitrarily large codes)."""
        n = self.total_M
        nbytes = (n.bit_length() + 7) // 8 + 1
        limit = (256 ** nbytes // n) * n
        while True:
            v = int.from_bytes(rng.bytes(nbytes), "little")
            if v < limit:
                return self.label_at(v % n)

    # decoding

    def decode(self, x, mode: str = "ml") -> DecodeResult:
        if mode not in ("fast", "ml"):
            raise ValueError(f"unknown decode mode {mode!r}")
        u = normalize(x)
        if u.shape[-1] != 2 * self.L:
            raise ValueError(f"expected a vector of length {2 * self.L}")
        gamma, phi = polar_parts(u)
        delta = np.linalg.norm(gamma[None, :] - self._radii, axis=1)
        xi = int(np.argmin(delta))
        cxi = self._radii[xi]
        degenerate = bool(np.any((gamma == 0) & (cxi > 0)))
        hit = self.layers[xi].decode_fast(u, phi)
        best = (hit.dist, xi, hit.coords, hit.point)
        certified = hit.dist < self.dmin_design / 2
        if mode == "fast" or certified:
            return self._result(best, certified, 1, 1, degenerate,
                                not certified and not self.layers[xi].exact_search)
        examined = set()
        exhaustive = True
        calls = 1
        for i in np.argsort(delta, kind="stable"):
            i = int(i)
            if delta[i] >= best[0]:
                break
            lay = self.layers[i]
            examined.add(i)
            calls += 1
            exhaustive &= lay.exact_search
            h = lay.nearest(u, phi, best[0], float(delta[i]))
            if h is not None and (h.dist, i, h.coords) < best[:3]:
                best = (h.dist, i, h.coords, h.point)
        examined.add(xi)
        return self._result(best, exhaustive, len(examined), calls, degenerate, not exhaustive)

    def _result(self, best, certified, examined, calls, degenerate, suboptimal) -> DecodeResult:
        dist, i, coords, point = best
        return DecodeResult(np.asarray(point), Label(i, tuple(coords)), float(dist),
                            bool(certified), examined, calls, degenerate, bool(suboptimal))

    def brute_force_ml(self, x, cap: int = BRUTE_FORCE_CAP) -> DecodeResult:
        self._guard(cap)
        u = normalize(x)
        P = self.codewords(cap)
        idx = int(np.argmax(P @ u))
        lab = self.label_at(idx)
        return DecodeResult(P[idx], lab, float(np.linalg.norm(P[idx] - u)), True,
                            len(self.layers), len(self.layers))

    # serialization

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION, "L": self.L, "d": self.dmin_design,
            "total_M": str(self.total_M), "metadata": self.metadata,
            "layers": [lay.to_json() for lay in self.layers],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.dumps())

    @classmethod
    def from_json(cls, obj: dict) -> "TorusCode":
        layers = [_layer_from_json(o) for o in obj["layers"]]
        code = cls(obj["L"], obj["d"], layers, obj.get("metadata"))
        if "total_M" in obj and int(obj["total_M"]) != code.total_M:
            raise ValueError("stored total_M does not match the rebuilt layers")
        return code

    @classmethod
    def load(cls, path) -> "TorusCode":
        with open(path) as f:
            return cls.from_json(json.load(f))


def _layer_from_json(o: dict) -> LayerCodebook:
    kind = o["kind"]
    radius = RadiusVector(o["radius"])
    if kind == "cyclic":
        dmin = o.get("dmin")
        code = CyclicLayerCode(o["alpha"], int(o["M"]), tuple(o["generators"]),
                               math.inf if dmin is None else dmin, o.get("start_M"))
        return CyclicLayer(code)
    if kind == "grid":
        return GridLayer(radius, o["counts"])
    if kind == "quotient":
        if o.get("basis") is None:
            base = named_basis(o["lattice"], len(radius))
        else:
            base = LatticeBasis([[Fraction(v) for v in row] for row in o["basis"]],
                                1.0, o["lattice"], o.get("min_norm2"))
        b = LatticeBasis(base.matrix, o["scale"], base.name, base.min_norm2, o.get("scale_note", ""))
        fit = BoxFit(Fraction(o["alpha_exact"]), o["alpha_flat"], tuple(o["counts"]), o["guard"])
        lay = QuotientLayer(radius, b, fit)
        stored = tuple(int(f) for f in o.get("invariant_factors", ()))
        if stored and stored != lay.group.invariant_factors:
            raise ValueError("stored invariant factors do not match the lattice")
        return lay
    raise ValueError(f"unknown layer kind {kind!r}")


def normalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = float(np.linalg.norm(x))
    if n == 0 or not math.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return x / n


def assemble(family: LayerFamily, contents: Sequence[LayerCodebook],
             metadata: dict | None = None) -> TorusCode:
    if len(contents) == 0:
        raise ValueError("no layer contents given")
    if len(contents) != len(family):
        raise ValueError(f"{len(family)} layers but {len(contents)} contents")
    for r, lay in zip(family.radii, contents):
        if np.linalg.norm(r.array - lay.radius.array) > 1e-9:
            raise ValueError("layer content does not sit on its family radius")
    meta = {"provenance": family.provenance, **family.meta, **(metadata or {})}
    return TorusCode(family.dim_L, family.dmin, contents, meta)


# builders

def grid_counts(c: RadiusVector, d: float) -> tuple[int, ...]:
    from .bounds import grid_axis_count

    return tuple(grid_axis_count(ci, d) if ci > 0 else 1 for ci in c.entries)


def build_grid_code(family: LayerFamily) -> TorusCode:
    d = family.dmin
    layers = [GridLayer(r, grid_counts(r, d)) for r in family.radii]
    return assemble(family, layers, {"construction": "grid"})


def cyclic_layer_codes(d: float, workers: int = 1, start: str = "table"
                       ) -> tuple[LayerFamily, list[CyclicLayerCode | None]]:
    """Search every polygon layer of TLSC(4, d); ``None`` marks a degenerate layer."""
    fam = polygon2d_layers(d)
    angles = fam.angles
    upper = sorted({a for a in angles if math.pi / 4 <= a < math.pi / 2})
    if workers > 1 and len(upper) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            found = dict(zip(upper, ex.map(lambda a: search_layer(a, d, start), upper)))
    else:
        found = {a: search_layer(a, d, start) for a in upper}
    out = []
    for a in angles:
        if a <= 0 or a >= math.pi / 2:
            out.append(None)
        elif a in found:
            out.append(found[a])
        else:
            mate = min(upper, key=lambda b: abs((math.pi / 2 - a) - b))
            out.append(mirror_layer(found[mate]))
    return fam, out


def build_cyclic_code(d: float, workers: int = 1, start: str = "table") -> TorusCode:
    fam, codes = cyclic_layer_codes(d, workers, start)
    layers = []
    radii = []
    for r, code in zip(fam.radii, codes):
        if code is None:
            lay = GridLayer(r, grid_counts(r, d))
        else:
            lay = CyclicLayer(code)
        layers.append(lay)
        radii.append(lay.radius)
    # mirrored layers sit at pi/2 - alpha, equal to the family angle up to rounding
    fam2 = LayerFamily(fam.dim_L, fam.dmin, tuple(radii), fam.provenance,
                       tuple(math.atan2(r[1], r[0]) for r in radii), fam.meta)
    return assemble(fam2, layers, {"construction": "cyclic", "start_rule": start})


def derived_beta(family: LayerFamily) -> float:
    """Flat distance whose worst-case chord on every layer is ``d``."""
    cmin = min(min(x for x in r.entries if x > 0) for r in family.radii)
    if 2.0 * cmin < family.dmin:
        raise ValueError(f"a layer radius {cmin:.6g} is below d/2; give beta explicitly")
    return 2.0 * cmin * math.asin(family.dmin / (2.0 * cmin))


def build_quotient_code(family: LayerFamily, basis: LatticeBasis, beta: float | None = None,
                        guard: float | None = None, dim_cap: int = EXACT_DIM_CAP,
                        metadata: dict | None = None) -> TorusCode:
    if basis.dim != family.dim_L:
        raise ValueError("lattice and layer dimensions differ")
    if beta is None:
        beta = derived_beta(family)
    B = basis.with_min_distance(beta)
    g = beta if guard is None else guard
    layers = []
    cache: dict = {}
    for r in family.radii:
        fit = orthogonal_fit(B, r.entries, g)
        lay = QuotientLayer(r, B, fit, cache.get(fit.counts), dim_cap)
        cache[fit.counts] = lay.group
        layers.append(lay)
    meta = {"construction": "quotient", "lattice": basis.name, "beta": beta, "guard": g}
    meta.update(metadata or {})
    return assemble(family, layers, meta)


def build_leech_code(d: float = 0.1, published_beta: bool = False) -> TorusCode:
    fam = permutation_layers(24, d)
    beta = PUBLISHED_LEECH_BETA if published_beta else None
    return build_quotient_code(fam, named_basis("leech"), beta,
                               metadata={"beta_source": "published" if published_beta else "derived"})
