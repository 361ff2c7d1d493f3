"""Regenerate the published size and bound tables and grade each cell.

Published values live in ``data/published_values.json``; each cell carries a
tolerance and, where the value is known not to reproduce, an explanation.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources

from .bounds import grid_lower_bound, upper_bound
from .codec import build_cyclic_code, build_leech_code
from .layering import permutation_t, polygon2d_layers, slice_odd_sphere

STATUSES = ("PASS", "DEVIATION", "KNOWN-DEVIATION", "REPORTED", "SKIPPED")
REPORT_COLUMNS = ("table", "row", "column", "ours", "published", "status", "note")


@dataclass(frozen=True)
class Cell:
    table: str
    row: str
    column: str
    ours: object
    published: object
    status: str
    note: str = ""


def published_values() -> list[dict]:
    text = resources.files("tlsc").joinpath("data", "published_values.json").read_text()
    return json.loads(text)["cells"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.7g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def grade(entry: dict, ours) -> str:
    kind = entry["tol_kind"]
    if kind == "report":
        ok = None
    elif isinstance(entry["published"], list):
        ok = list(ours) == list(entry["published"])
    elif kind == "rel":
        ok = abs(float(ours) - entry["published"]) <= entry["tol"] * abs(entry["published"])
    else:
        ok = abs(float(ours) - entry["published"]) <= entry["tol"] + 1e-12
    if ok is None:
        return "REPORTED"
    if ok:
        return "PASS"
    return "KNOWN-DEVIATION" if entry.get("known_deviation") else "DEVIATION"


class _Compute:
    """Lazily computed quantities shared between cells."""

    def __init__(self, workers: int):
        self.workers = workers
        self._codes = {}
        self._leech = None

    def code(self, d: float):
        if d not in self._codes:
            self._codes[d] = build_cyclic_code(d, self.workers)
        return self._codes[d]

    def cyclic_rows(self, upper: bool):
        code = self.code(0.3)
        lays = [lay for lay in code.layers if (lay.code.alpha > math.pi / 4) == upper]
        return sorted(lays, key=lambda lay: lay.code.alpha, reverse=not upper)

    def leech(self):
        if self._leech is None:
            self._leech = build_leech_code(0.1)
        return self._leech

    def value(self, entry: dict):
        t, row, col = entry["table"], entry["row"], entry["column"]
        if t in ("I", "II"):
            rows = self.cyclic_rows(t == "I")
            lay = min(rows, key=lambda lay: abs(lay.code.alpha - float(row)))
            c = lay.code
            val = {"alpha": c.alpha, "M": c.order_M, "dmin": c.dmin_achieved}[col]
            return val, f"generators {c.generators[0]},{c.generators[1]}"
        d = float(row) if t != "Leech" else 0.1
        if t == "IV":
            return self.code(d).total_M, ""
        if t == "V":
            rings = slice_odd_sphere(d, lambda dd: self.code(round(dd, 15)), 1)
            return sum(r.size for r in rings), f"{len(rings)} rings"
        if t == "VI":
            fam = polygon2d_layers(d)
            if col == "upper bound":
                return upper_bound(fam, d).total, "projection only on zero"
            return grid_lower_bound(fam, d).total, ""
        if t == "Leech":
            code = self.leech()
            lay = code.layers[0]
            if col == "t":
                return permutation_t(24, 0.1), ""
            if col == "counts v":
                return list(lay.fit.counts), ""
            if col == "layer order":
                return lay.cardinality, f"exact {lay.cardinality}"
            if col == "total M":
                return code.total_M, f"exact {code.total_M}"
            if col == "invariant factors":
                return list(lay.group.invariant_factors), ""
        raise KeyError(f"no rule for cell {t}/{row}/{col}")


def build_tables(full: bool = False, workers: int = 1) -> list[Cell]:
    comp = _Compute(workers)
    out = []
    for entry in published_values():
        tier = entry.get("tier", "default")
        if tier == "never" or (tier == "full" and not full):
            why = "not regenerated by default (runtime)" if tier == "full" else "out of reach of this build"
            out.append(Cell(entry["table"], entry["row"], entry["column"], None, entry["published"],
                            "SKIPPED", why))
            continue
        ours, note = comp.value(entry)
        status = grade(entry, ours)
        if status != "PASS" and entry.get("known_deviation"):
            note = "; ".join(x for x in (note, entry["known_deviation"]) if x)
        out.append(Cell(entry["table"], entry["row"], entry["column"], ours, entry["published"],
                        status, note))
    return out


def render(cells: list[Cell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for c in cells:
        w.writerow([c.table, c.row, c.column, _fmt(c.ours), _fmt(c.published), c.status, c.note])
    return buf.getvalue()


def summary(cells: list[Cell]) -> dict[str, int]:
    return {s: sum(c.status == s for c in cells) for s in STATUSES}
