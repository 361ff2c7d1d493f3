"""Command-line front end: ``tlsc construct|bounds|decode|simulate|tables|slice``."""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import math
import sys

import numpy as np

from . import __version__
from .bounds import grid_lower_bound, reports_to_csv, upper_bound
from .codec import (TorusCode, build_cyclic_code, build_grid_code, build_quotient_code,
                    PUBLISHED_LEECH_BETA)
from .cyclic import START_RULES
from .layering import (SLICE_RULE, external_layers, parse_points, permutation_layers,
                       polygon2d_layers, slice_odd_sphere)
from .lattice import load_basis, named_basis
from .simulate import SIM_COLUMNS, awgn_trial
from .tables import build_tables, render, summary

EXIT_PARAM = 2
EXIT_DEVIATION = 3


class ParameterError(ValueError):
    pass


def _check_d(d: float) -> float:
    if not 0 < d <= math.sqrt(2) + 1e-15:
        raise ParameterError(f"minimum distance must lie in (0, sqrt(2)], got {d}")
    return d


def _even_L(dim: int) -> int:
    if dim < 2 or dim % 2:
        raise ParameterError(f"torus layer codes need an even dimension, got {dim}")
    return dim // 2


def _emit(text: str, path: str | None, stamp: bool) -> None:
    if stamp:
        now = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        text = f"# generated {now}\n" + text
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _family(args, L: int, d: float):
    rule = args.layers or ("polygon2d" if L == 2 else "permutation")
    if rule == "polygon2d":
        if L != 2:
            raise ParameterError("the polygon layer rule exists for dimension 4 only")
        return polygon2d_layers(d)
    if rule == "permutation":
        return permutation_layers(L, d)
    if not args.layers_file:
        raise ParameterError("--layers file needs --layers-file")
    with open(args.layers_file) as f:
        return external_layers(L, d, parse_points(f.read()))


def _lattice(args, L: int):
    if args.lattice_file:
        return load_basis(args.lattice_file, name="custom", min_norm2=args.lattice_min_norm2)
    return named_basis(args.lattice, L)


def make_code(args) -> TorusCode:
    d = _check_d(args.dmin)
    L = _even_L(args.dim)
    kind = args.kind
    if kind == "cyclic":
        if L != 2:
            raise ParameterError("cyclic layers are implemented for dimension 4")
        return build_cyclic_code(d, args.workers, args.start)
    fam = _family(args, L, d)
    if kind == "grid":
        return build_grid_code(fam)
    beta = PUBLISHED_LEECH_BETA if args.published_beta else args.beta
    basis = _lattice(args, L)
    meta = {"beta_source": "published" if args.published_beta else ("given" if args.beta else "derived")}
    return build_quotient_code(fam, basis, beta, metadata=meta)


def layer_table(code: TorusCode) -> str:
    buf = io.StringIO()
    for i, lay in enumerate(code.layers):
        c = lay.radius.entries
        if lay.kind == "cyclic":
            k = lay.code
            dm = f"{k.dmin_achieved:.6f}" if math.isfinite(k.dmin_achieved) else "inf"
            buf.write(f"{i:3d}  alpha={k.alpha:.6f}  cos={c[0]:.6f}  sin={c[1]:.6f}  "
                      f"dmin={dm}  M={k.order_M}  g=({k.generators[0]},{k.generators[1]})\n")
        elif lay.kind == "grid":
            buf.write(f"{i:3d}  c={_vec(c)}  grid={'x'.join(map(str, lay.counts))}  "
                      f"M={lay.cardinality}\n")
        else:
            buf.write(f"{i:3d}  c={_vec(c)}  v={_vec(lay.fit.counts)}  "
                      f"factors={_vec(lay.group.moduli)}  M={lay.cardinality}\n")
    return buf.getvalue()


def _vec(v) -> str:
    parts = [f"{x:.6f}" if isinstance(x, float) else str(x) for x in v]
    if len(parts) > 6:
        parts = parts[:3] + ["..."] + parts[-2:]
    return "(" + ",".join(parts) + ")"


def cmd_construct(args) -> int:
    code = make_code(args)
    if args.out:
        code.save(args.out)
    if not args.quiet:
        sys.stdout.write(layer_table(code))
    print(f"layers={len(code.layers)} total={code.total_M}")
    return 0


def cmd_bounds(args) -> int:
    if not args.d:
        raise ParameterError("give at least one distance with --d")
    reports = []
    for d in args.d:
        d = _check_d(d)
        L = _even_L(args.dim)
        fam = polygon2d_layers(d) if L == 2 else permutation_layers(L, d)
        reports.append(grid_lower_bound(fam, d))
        reports.append(upper_bound(fam, d))
        if args.max_face:
            rep = upper_bound(fam, d, max_face=True)
            reports.append(type(rep)(rep.d, "upper-max-face", rep.per_layer))
    _emit(reports_to_csv(reports), args.out, not args.no_timestamp)
    return 0


def read_vectors(path: str, dim: int | None = None) -> np.ndarray:
    rows = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            try:
                v = [float(t) for t in s.replace(",", " ").split()]
            except ValueError:
                raise ParameterError(f"{path}:{lineno}: cannot parse {s!r}") from None
            if dim is not None and len(v) != dim:
                raise ParameterError(f"{path}:{lineno}: expected {dim} entries, got {len(v)}")
            if not any(v):
                raise ParameterError(f"{path}:{lineno}: zero vector")
            rows.append(v)
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def cmd_decode(args) -> int:
    code = TorusCode.load(args.code)
    X = read_vectors(args.input, 2 * code.L)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "label", "distance", "ml_certified", "tori_examined"])
    for i, x in enumerate(X):
        r = code.decode(x, args.mode)
        w.writerow([i, str(r.label), f"{r.distance:.12g}", int(r.ml_certified), r.tori_examined])
    _emit(buf.getvalue(), args.out, False)
    return 0


def cmd_simulate(args) -> int:
    code = TorusCode.load(args.code) if args.code else make_code(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SIM_COLUMNS)
    for snr in args.snr:
        for st in awgn_trial(code, snr, args.trials, args.seed, args.modes, args.workers):
            w.writerow(st.row())
    _emit(buf.getvalue(), args.out, not args.no_timestamp)
    return 0


def cmd_tables(args) -> int:
    cells = build_tables(args.full, args.workers)
    _emit(render(cells), args.out, not args.no_timestamp)
    counts = summary(cells)
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr)
    if args.strict and counts["DEVIATION"]:
        return EXIT_DEVIATION
    return 0


def cmd_slice(args) -> int:
    d = _check_d(args.dmin)
    if args.dim != 5:
        raise ParameterError("the slice command builds codes in dimension 5")
    rings = slice_odd_sphere(d, lambda dd: build_cyclic_code(dd), args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ring", "height", "radius", "kind", "inner_d", "size"])
    for r in rings:
        inner = "" if r.inner_d is None else f"{r.inner_d:.9g}"
        w.writerow([r.index, f"{r.height:.9g}", f"{r.radius:.9g}", r.kind, inner, r.size])
    w.writerow(["total", "", "", "", "", sum(r.size for r in rings)])
    text = f"# rule: {SLICE_RULE}\n" + buf.getvalue()
    _emit(text, args.out, not args.no_timestamp)
    return 0


def _code_args(p, required: bool = True):
    p.add_argument("--dim", type=int, required=required, help="code dimension 2L")
    p.add_argument("--dmin", type=float, required=required, help="minimum distance d")
    p.add_argument("--kind", choices=("cyclic", "quotient", "grid"), default="cyclic")
    p.add_argument("--start", choices=START_RULES, default="table",
                   help="starting M of the cyclic search: table (default) or proven")
    p.add_argument("--lattice", default="leech", help="leech, e8, d4 or zN")
    p.add_argument("--lattice-file", help="basis matrix file (columns are generators)")
    p.add_argument("--lattice-min-norm2", type=str, default=None,
                   help="squared minimum norm of the file basis")
    p.add_argument("--layers", choices=("polygon2d", "permutation", "file"))
    p.add_argument("--layers-file")
    p.add_argument("--beta", type=float, default=None, help="flat minimum distance of the lattice")
    p.add_argument("--published-beta", action="store_true",
                   help=f"use beta = {PUBLISHED_LEECH_BETA} instead of the derived value")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tlsc", description="Torus layer spherical codes")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write its JSON description")
    _code_args(p)
    p.add_argument("--out", help="codebook JSON path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quiet", action="store_true", help="print the summary line only")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bounds", help="grid lower and face-count upper bounds as CSV")
    p.add_argument("--d", type=float, nargs="*", default=[])
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--max-face", action="store_true", help="also report the max-face rule")
    p.add_argument("--out")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("decode", help="decode received vectors against a saved code")
    p.add_argument("--code", required=True)
    p.add_argument("--input", required=True, help="one vector per line")
    p.add_argument("--mode", choices=("fast", "ml"), default="ml")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="AWGN symbol error rates")
    p.add_argument("--code", help="saved codebook JSON (otherwise build from --dim/--dmin)")
    _code_args(p, required=False)
    p.add_argument("--snr", type=float, nargs="+", default=[10.0, 15.0, 20.0], help="SNR in dB")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", nargs="+", choices=("fast", "ml"), default=["fast", "ml"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", help="regenerate the published tables with PASS/DEVIATION marks")
    p.add_argument("--full", action="store_true", help="include the slow cells")
    p.add_argument("--strict", action="store_true", help="exit 3 on an unexplained deviation")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("slice", help="odd-dimensional code by slicing S^4 into rings")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--dmin", type=float, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_slice)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "simulate" and not args.code and (args.dim is None or args.dmin is None):
        ap.error("simulate needs --code or both --dim and --dmin")
    if getattr(args, "trials", 1) < 1:
        ap.error("--trials must be at least 1")
    try:
        return args.func(args)
    except (ParameterError, ValueError) as e:
        print(f"tlsc: error: {e}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as e:
        print(f"tlsc: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
