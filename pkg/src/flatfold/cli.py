"""Command-line runs that write CSV or JSON.

Commands: ``fe`` (free energies), ``density`` and ``eos`` (lattice-gas
curves), ``transitions`` (critical points), ``enumerate`` (brute-force
partition functions) and ``verify`` (oracle cross-checks).  Floats are
written with 17 significant digits, so identical runs give identical bytes.

Exit codes: 0 success, 2 tolerance breach or non-converged row, 3 invalid
arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import coloring, latticegas, transitions
from .dimer import finite_Z, thermo_free_energy
from .enumeration import LatticeShape, enumerate_density, enumerate_Z
from .integrands import free_energy_of, kite_Z
from .model import CpKind, DefectFugacity, Staggering, random_model, symmetric_defect_weights
from .sixteen import SixteenVertexWeights

SCHEMA = "flatfold.run/1"
EXIT_OK, EXIT_TOLERANCE, EXIT_SPEC = 0, 2, 3

TOLERANCES = {"pfaffian": 1e-10, "closed_form": 1e-9, "kite": 1e-12, "barreto": 1e-12}


class SpecError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_SPEC)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".17g")) if math.isfinite(x) else str(x)
    return x


def _grid(args):
    if args.value is not None:
        return np.array([args.value], dtype=float)
    start, stop, points = args.grid
    points = int(points)
    if points < 2 or not (0 < start < stop) and not (args.allow_zero and 0 <= start < stop):
        raise SpecError("grid needs 0 < start < stop and at least 2 points")
    if args.log:
        if start <= 0:
            raise SpecError("a log grid needs a positive start")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _emit(args, header, rows, meta):
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        text = buf.getvalue()
    else:
        doc = {"schema": SCHEMA, **meta, "columns": list(header), "rows": [dict(zip(header, r)) for r in rows]}
        text = json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, grid, max_rel_err=None, tolerances=None):
    return {
        "model": getattr(args, "cp", None),
        "family": getattr(args, "family", None),
        "grid": [float(x) for x in grid] if grid is not None else None,
        "max_rel_err": max_rel_err,
        "tolerances": tolerances or {},
    }


# -- fe ------------------------------------------------------------------------


def _free_energy(cp, x, family, tol, method):
    if cp == "coloring":
        return latticegas.coloring_pressure(x), 0, True
    y = x if family == "y" else x ** 0.25
    if cp == "barreto" and method == "closed":
        return 0.5 * math.log1p(y ** 4), 0, True
    model = symmetric_defect_weights(cp, y)
    if y == 0:
        return 0.0, 0, True
    if method == "dimer":
        r = thermo_free_energy(model, tol=tol)
    else:
        r = free_energy_of(model, tol=tol)
    return r.value, r.order, r.converged


def cmd_fe(args):
    grid = _grid(args)
    rows = []
    for x in grid:
        val, order, ok = _free_energy(args.cp, float(x), args.family, args.tol, args.method)
        rows.append((float(x), val, order, bool(ok)))
    _emit(args, ("fugacity", "free_energy", "grid_order", "converged"), rows, _meta(args, grid))
    return EXIT_OK if all(r[3] for r in rows) else EXIT_TOLERANCE


# -- density / eos ---------------------------------------------------------------


def _critical_rows(grid, xc):
    """Index of the grid row nearest the critical fugacity within its bracket."""
    if xc is None or not grid[0] <= xc <= grid[-1]:
        return set()
    i = int(np.searchsorted(grid, xc))
    cand = [j for j in (i - 1, i) if 0 <= j < len(grid)]
    return {min(cand, key=lambda j: abs(grid[j] - xc))}


def _curve(args):
    if args.cp == "coloring" and args.family != "z":
        raise SpecError("the layer-ordering defects use the z family")
    grid = _grid(args)
    if np.any(grid <= 0):
        raise SpecError("fugacities must be positive")
    curve = latticegas.equation_of_state(args.cp, args.family, grid, tol=args.tol)
    crit = _critical_rows(grid, latticegas.critical_fugacity(args.cp, args.family))
    return grid, curve, crit


def cmd_density(args):
    grid, c, crit = _curve(args)
    rows = [
        (c.fugacity[i], c.density[i], c.slope[i], c.compressibility[i], c.pressure[i], i in crit)
        for i in range(len(grid))
    ]
    _emit(args, ("fugacity", "rho", "drho", "kT", "betaP", "critical"), rows, _meta(args, grid))
    return EXIT_OK


def cmd_eos(args):
    grid, c, crit = _curve(args)
    rows = [(c.density[i], c.pressure[i], c.fugacity[i], i in crit) for i in range(len(grid))]
    _emit(args, ("rho", "betaP", "fugacity", "critical"), rows, _meta(args, grid))
    return EXIT_OK


# -- transitions -------------------------------------------------------------------


def _sixteen_family(omega, v5):
    def family(v):
        return SixteenVertexWeights.equal_omega(omega, v, v, v5, v5)

    return family


def cmd_transitions(args):
    lo, hi = args.interval
    if args.cp == "sixteen":
        family = _sixteen_family(args.omega, args.v5)
    else:
        cp = CpKind.parse(args.cp).value

        def family(y):
            return symmetric_defect_weights(cp, y)

    pts = transitions.locate_critical(family, (lo, hi), conditions=args.conditions, points=args.points)
    rows = [(p.condition, p.label, p.parameter, p.residual, p.kind) for p in pts]
    _emit(
        args,
        ("condition_index", "condition", "parameter_root", "residual", "kind"),
        rows,
        _meta(args, [lo, hi]),
    )
    return EXIT_OK


# -- enumerate ----------------------------------------------------------------------


def cmd_enumerate(args):
    shape = LatticeShape(*args.shape)
    if shape.edges > 32:
        raise SpecError("enumeration is limited to 2MN <= 32 edges")
    model = symmetric_defect_weights(args.cp, args.y)
    ex = enumerate_Z(model, shape)
    rho = enumerate_density(model, shape)
    pf = finite_Z(model, shape) if args.y > 0 else float("nan")
    row = (shape.M, shape.N, args.y, ex.value, ex.config_count, rho, math.log(ex.value) / shape.sites, pf)
    header = ("M", "N", "y", "Z", "config_count", "rho", "log_Z_per_site", "pfaffian_Z")
    _emit(args, header, [row], _meta(args, [args.y]))
    return EXIT_OK


# -- verify -------------------------------------------------------------------------


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _verify_rows(args):
    rng = np.random.default_rng(args.seed)
    cps = [args.cp] if args.cp else ["miura", "trapezoid", "barreto", "kite", "square"]
    rows = []
    for name in cps:
        cp = CpKind.parse(name)
        stags = list(Staggering) if cp is CpKind.SIMPLE_SQUARE else [cp.default_staggering]
        for st in stags:
            label = cp.value if cp is not CpKind.SIMPLE_SQUARE else f"square/{st.value}"
            for _ in range(args.draws):
                model = random_model(cp, rng, st)
                for shape in ((2, 2), (2, 4), (4, 2)):
                    exact = enumerate_Z(model, shape).value
                    rows.append((label, "pfaffian", f"{shape[0]}x{shape[1]}", exact, finite_Z(model, shape), "pfaffian"))
            if cp is CpKind.SIMPLE_SQUARE and st is Staggering.COLUMN_FOUR:
                continue
            model = random_model(cp, rng, st)
            rows.append((label, "closed_form", "thermo", thermo_free_energy(model).value, free_energy_of(model).value, "closed_form"))
        if cp is CpKind.KITE:
            model = random_model(cp, rng)
            for shape in ((2, 2), (2, 4), (4, 2), (4, 4), (2, 6), (6, 2), (2, 8)):
                exact = enumerate_Z(model, shape).value
                got = kite_Z(model.units["v"], model.units["w"], shape)
                rows.append((label, "transfer_matrix", f"{shape[0]}x{shape[1]}", exact, got, "kite"))
        if cp is CpKind.BARRETO_MARS:
            for y in (0.3, 0.7, 1.0):
                model = symmetric_defect_weights(cp, y)
                ex = enumerate_Z(model, (4, 4))
                rows.append((label, "closed_form", f"y={y}", math.log(ex.value) / 16, 0.5 * math.log1p(y ** 4), "barreto"))
        if args.coloring and cp in (CpKind.MIURA, CpKind.TRAPEZOID):
            for shape in ((2, 2), (2, 4), (4, 4)):
                ci = coloring.count_identity(cp, shape)
                rows.append((label, "coloring_count", f"{shape[0]}x{shape[1]}", float(3 * ci.consistent), float(ci.colorings), "pfaffian"))
    return rows


def cmd_verify(args):
    raw = _verify_rows(args)
    rows, worst, ok = [], 0.0, True
    for model, check, case, oracle, exact, tol_key in raw:
        err = _rel(exact, oracle)
        tol = TOLERANCES[tol_key]
        passed = err <= tol
        ok &= passed
        worst = max(worst, err)
        rows.append((model, check, case, oracle, exact, err, tol, passed))
    header = ("model", "check", "case", "oracle", "exact", "rel_err", "tolerance", "passed")
    if args.format == "csv":
        _emit(args, header, rows, {})
    else:
        meta = {
            "model": args.cp or "all",
            "family": "random free-fermion draws" if not args.coloring else "random draws + colouring",
            "grid": None,
            "max_rel_err": worst,
            "tolerances": TOLERANCES,
            "seed": args.seed,
            "passed": ok,
        }
        _emit(args, header, rows, meta)
    return EXIT_OK if ok else EXIT_TOLERANCE


# -- argument parsing -----------------------------------------------------------------


def _common(p, fmt="csv"):
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--out", help="output path (default: stdout)")


def _sweep(p, family_default="y", allow_zero=False):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--y", "--value", dest="value", type=float, help="single fugacity value")
    g.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "POINTS"))
    p.add_argument("--log", action="store_true", help="geometric grid spacing")
    p.add_argument("--family", choices=("y", "z"), default=family_default)
    p.add_argument("--tol", type=float, default=1e-13, help="quadrature convergence tolerance")
    p.set_defaults(allow_zero=allow_zero)


def build_parser():
    p = _Parser(prog="flatfold", description="Exactly solvable origami tessellation models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fe = sub.add_parser("fe", help="per-site free energy -beta f of a defect family")
    fe.add_argument("--cp", required=True, choices=("miura", "trapezoid", "barreto", "kite", "coloring"))
    fe.add_argument("--method", choices=("closed", "dimer"), default="closed")
    _sweep(fe, allow_zero=True)
    _common(fe)
    fe.set_defaults(func=cmd_fe)

    for name, func, text in (("density", cmd_density, "defect density curve"), ("eos", cmd_eos, "equation of state (rho, beta P)")):
        q = sub.add_parser(name, help=text)
        q.add_argument("--cp", required=True, choices=latticegas.MODELS)
        _sweep(q)
        _common(q)
        q.set_defaults(func=func)

    tr = sub.add_parser("transitions", help="critical points along a one-parameter family")
    tr.add_argument("--cp", required=True, choices=("miura", "trapezoid", "barreto", "kite", "sixteen"))
    tr.add_argument("--interval", nargs=2, type=float, default=(0.01, 100.0), metavar=("LO", "HI"))
    tr.add_argument("--conditions", choices=sorted(transitions.CONDITION_SETS), default=None)
    tr.add_argument("--points", type=int, default=2001)
    tr.add_argument("--omega", type=float, default=1.0, help="sixteen-vertex: common even weight")
    tr.add_argument("--v5", type=float, default=1.0, help="sixteen-vertex: v5 = v7")
    _common(tr)
    tr.set_defaults(func=cmd_transitions)

    en = sub.add_parser("enumerate", help="brute-force partition function of a symmetric family")
    en.add_argument("--cp", required=True, choices=("miura", "trapezoid", "barreto", "kite", "square"))
    en.add_argument("--shape", nargs=2, type=int, required=True, metavar=("M", "N"))
    en.add_argument("--y", type=float, required=True)
    _common(en)
    en.set_defaults(func=cmd_enumerate)

    ve = sub.add_parser("verify", help="oracle versus Pfaffian and closed forms")
    ve.add_argument("--cp", choices=("miura", "trapezoid", "barreto", "kite", "square"))
    ve.add_argument("--coloring", action="store_true", help="also check the 3-to-1 colouring count")
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--draws", type=int, default=3)
    _common(ve, fmt="json")
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "y", None) is not None and args.command == "enumerate" and args.y < 0:
            raise SpecError("y must be non-negative")
        return args.func(args)
    except (SpecError, ValueError) as exc:
        print(f"flatfold: error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
