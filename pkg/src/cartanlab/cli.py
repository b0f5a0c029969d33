"""Batch front-end: load JSON inputs, run analyses, emit CSV/JSON.

Every command reads one JSON document (see `serialize`), writes one CSV
with a header row, and for report-style commands a JSON sidecar next to
the CSV (same path + ".json").  Output is byte-deterministic for a fixed
config: iteration orders are the breadth-first word order, floats print
with 12 significant digits, and sample grids take the --seed flag.

Exit codes: 0 success, 2 precondition/input failure, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bending import (
    BendingFamily,
    bend,
    centralizer_in_algebra,
    module_decomposition_check,
    pick_Y,
    so_form_algebra,
    so_subalgebra_basis,
    zariski_density_witness,
)
from .bending import QuadFormSpace
from .cartan import cartan, mu_norm, to_float_array
from .errors import (
    CartanLabError,
    IndeterminateError,
    NumericalError,
    PreconditionError,
)
from .projective import eps_proximal_check, proximal_analyze
from .serialize import (
    field_from_json,
    group_from_json,
    load_matrix_document,
    load_presentation_document,
    read_json,
    scalar_to_str,
)
from .stability import mu_cone, properness_margin, stability_scan
from .transverse import RankOneModel, decompose, displacement, orbit_data
from .wordgroups import HnnStructure, AmalgamStructure, evaluate, inclusion, word_ball


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_sidecar(path, payload):
    with open(path + ".json", "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_field_flag(text):
    kind, _, arg = text.partition(":")
    obj = {"kind": kind}
    if kind == "padic":
        obj["p"] = int(arg)
    elif kind == "quadratic":
        obj["r"] = int(arg)
    return field_from_json(obj)


def _parse_group_flag(text, field):
    family, _, arg = text.partition(":")
    if family == "SL":
        return group_from_json({"family": "SL", "n": int(arg)}, field)
    p, q = (int(x) for x in arg.split(","))
    return group_from_json({"family": family, "p": p, "q": q}, field)


def _load_matrices(args):
    obj = read_json(args.input)
    if "field" not in obj and args.field:
        obj["field"] = {}
    if args.field:
        field = _parse_field_flag(args.field)
    else:
        field = field_from_json(obj["field"])
    if args.group:
        group = _parse_group_flag(args.group, field)
        from .serialize import matrix_from_json
        from .cartan import GroupElement

        matrices = obj.get("matrices", [])
        ids = obj.get("ids") or [f"m{i}" for i in range(len(matrices))]
        return field, group, [
            (name, GroupElement(matrix_from_json(rows, field), group))
            for name, rows in zip(ids, matrices)
        ]
    return load_matrix_document(obj)


def cmd_cartan(args) -> int:
    field, group, items = _load_matrices(args)
    k = group.mu_length
    header = ["id"] + [f"mu_{i + 1}" for i in range(k)] + ["mu_norm"]
    rows = []
    for name, g in items:
        mu = cartan(g)
        rows.append([name] + [float(x) for x in mu.coords] + [mu_norm(mu)])
    _write_csv(args.output, header, rows)
    return 0


def cmd_ball(args) -> int:
    field, group, pres, _ = load_presentation_document(read_json(args.input))
    radius = int(args.radius)
    ball = word_ball(pres, inclusion(pres), radius)
    n = group.size
    header = ["word", "length"] + [
        f"entry_{i}_{j}" for i in range(n) for j in range(n)
    ]
    rows = []
    for e in ball.entries:
        mat = e.element.matrix
        flat = (
            [x for row in mat for x in row]
            if not isinstance(mat, np.ndarray)
            else [float(x) for x in mat.reshape(-1)]
        )
        rows.append(
            [e.word.format(pres.symbols), len(e.word)]
            + [scalar_to_str(x) if not isinstance(x, float) else x for x in flat]
        )
    _write_csv(args.output, header, rows)
    _write_sidecar(args.output, {
        "elements": len(ball.entries),
        "complete": ball.complete,
        "radius": radius,
    })
    return 0


def cmd_proximal(args) -> int:
    field, group, items = _load_matrices(args)
    header = [
        "id", "status", "eigenvalue", "eigenvalue_exact", "gap_ratio",
        "attracting", "repelling", "eps_ok", "eps_certified",
    ]
    rows = []
    for name, g in items:
        try:
            pd = proximal_analyze(g.matrix, field)
        except IndeterminateError:
            rows.append([name, "indeterminate", "", "", "", "", "", "", ""])
            continue
        if pd is None:
            rows.append([name, "not_proximal", "", "", "", "", "", "", ""])
            continue
        att = ";".join(scalar_to_str(x) for x in pd.attracting.vec)
        rep = ";".join(scalar_to_str(x) for x in pd.repelling.functional)
        eps_ok = eps_cert = ""
        if args.eps is not None:
            verdict = eps_proximal_check(
                g.matrix, float(args.eps), field, pd=pd, seed=args.seed
            )
            eps_ok, eps_cert = verdict.ok, verdict.certified
        rows.append([
            name, "proximal", scalar_to_str(pd.eigenvalue),
            pd.eigenvalue_exact, pd.gap_ratio, att, rep, eps_ok, eps_cert,
        ])
    _write_csv(args.output, header, rows)
    return 0


def _model_for(group):
    if group.family == "SL" and group.n == 2:
        if group.field.kind == "padic":
            return RankOneModel.sl2_tree(group.field.p)
        return RankOneModel.sl2_real()
    if group.family == "SO" and group.q == 1:
        return RankOneModel.hyperboloid(group.form)
    raise PreconditionError(
        "no rank-one model for this group (need SL(2) or SO(m,1))"
    )


def cmd_decompose(args) -> int:
    field, group, pres, _ = load_presentation_document(read_json(args.input))
    model = _model_for(group)
    phi = inclusion(pres)
    ball_radius = int(args.radius)
    ball = word_ball(pres, phi, ball_radius)
    R = args.subdivision
    if R is None:
        R = max(displacement(g, model) for g in pres.generators)
    orbit = orbit_data(pres, phi, model, ball_radius)
    header = [
        "word", "factor_index", "factor_word", "displacement", "gap_defect",
        "d_achieved", "ceiling", "accepted",
    ]
    rows = []
    for e in ball.entries:
        if len(e.word) == 0:
            continue
        dec = decompose(e.word, pres, model, R, phi=phi, orbit=orbit)
        wname = e.word.format(pres.symbols)
        if not dec.accepted:
            rows.append([wname, -1, "", "", "", "", "", False])
            continue
        for i, (w, d) in enumerate(zip(dec.factors, dec.displacements)):
            gap = dec.gap_defects[i - 1] if 0 < i <= len(dec.gap_defects) else ""
            rows.append([
                wname, i, w.format(pres.symbols), float(d), gap,
                dec.d_achieved, dec.predicted_ceiling, True,
            ])
    _write_csv(args.output, header, rows)
    _write_sidecar(args.output, {
        "subdivision": float(R),
        "ball_radius": ball_radius,
        "model": model.kind,
    })
    return 0


def _bending_family(pres, group, bending_block):
    if bending_block is None:
        raise PreconditionError("presentation file carries no bending block")
    if group.family != "SO" or group.q != 2:
        raise PreconditionError("bending needs an SO(m,2) group descriptor")
    space = QuadFormSpace(group.form)
    fixed = bending_block.get("fixed_coordinate", space.dim - 1)
    sub = so_subalgebra_basis(space, fixed)
    if "Y" in bending_block:
        Y = bending_block["Y"]
    else:
        s = pres.structure
        if isinstance(s, AmalgamStructure):
            edge = [evaluate(w1, inclusion(pres)) for w1, _ in s.gamma0_pairs]
        elif isinstance(s, HnnStructure):
            edge = [evaluate(w1, inclusion(pres)) for w1, _ in s.pairings]
        else:
            raise PreconditionError("bending needs an amalgam or HNN structure")
        ambient = so_form_algebra(space)
        cent = centralizer_in_algebra(edge, ambient) if edge else ambient
        Y = pick_Y(cent, sub)
    ts = [float(t) for t in bending_block.get("t", [0.0])]
    return BendingFamily(pres, Y, subalgebra=sub), ts, space.dim - 2


def cmd_bend(args) -> int:
    field, group, pres, bending_block = load_presentation_document(
        read_json(args.input)
    )
    family, ts, m = _bending_family(pres, group, bending_block)
    if args.t:
        ts = [float(x) for x in args.t.split(",")]
    header = ["t", "generator", "row", "col", "value"]
    rows = []
    witnesses = {}
    for t in ts:
        phi_t = bend(family, t)
        for gi, sym in enumerate(pres.symbols):
            mat = to_float_array(phi_t.images[gi].matrix)
            for i in range(mat.shape[0]):
                for j in range(mat.shape[1]):
                    rows.append([t, sym, i, j, float(mat[i, j])])
        witnesses[str(t)] = bool(zariski_density_witness(family.Y, t, m))
    _write_csv(args.output, header, rows)
    verdict = module_decomposition_check(m)
    _write_sidecar(args.output, {
        "witnesses": witnesses,
        "module_decomposition_ok": verdict.ok,
        "m": m,
        "density_assumption": (
            "witness certifies the Lie-algebra condition; Zariski density "
            "of the side groups in the rank-one subgroup is an input "
            "assumption of the shipped surrogates"
        ),
    })
    return 0


def cmd_stability(args) -> int:
    field, group, pres, bending_block = load_presentation_document(
        read_json(args.input)
    )
    radius = int(args.radius)
    rho0 = float(args.rho0) if args.rho0 is not None else None
    phi_ref = inclusion(pres)
    ts = [float(x) for x in args.t.split(",")] if args.t else [0.0]
    family = None
    if bending_block is not None:
        family, _, _ = _bending_family(pres, group, bending_block)
    header = ["t", "word", "length", "mu_norm", "deviation"]
    rows = []
    fits = {}
    for t in ts:
        if family is not None:
            phi_t = bend(family, t)
        elif t == 0.0:
            phi_t = phi_ref
        else:
            raise PreconditionError(
                "nonzero t needs a bending block in the presentation file"
            )
        rep = stability_scan(pres, phi_ref, phi_t, radius, rho0=rho0,
                             workers=args.workers)
        for r in rep.rows:
            rows.append([
                t, r.word.format(pres.symbols), r.length, r.mu_norm, r.deviation,
            ])
        fits[str(t)] = {
            "eps_hat": rep.eps_hat,
            "c_hat": rep.c_hat,
            "rho0": rep.rho0,
            "radius": rep.radius,
            "policy": rep.policy,
        }
    _write_csv(args.output, header, rows)
    _write_sidecar(args.output, {"fits": fits})
    return 0


def cmd_properness(args) -> int:
    obj = read_json(args.input)
    field, group, pres, _ = load_presentation_document(obj)
    cone_block = obj.get("cone")
    if cone_block is None:
        raise PreconditionError("properness needs a cone block in the input")
    from .serialize import matrix_from_json
    from .cartan import GroupElement

    if cone_block.get("compact"):
        from .stability import ConeModel

        cone = ConeModel([], group.mu_length)
    else:
        axis = [
            GroupElement(matrix_from_json(rows, field), group)
            for rows in cone_block["matrices"]
        ]
        cone = mu_cone(axis, group)
    radius = int(args.radius)
    ball = word_ball(pres, inclusion(pres), radius)
    samples = [cartan(e.element) for e in ball.entries]
    rho0 = float(args.rho0) if args.rho0 is not None else None
    report = properness_margin(samples, cone, rho0=rho0, radius=radius)
    header = ["word", "mu_norm", "margin"]
    rows = [
        [e.word.format(pres.symbols), r.mu_norm, r.margin]
        for e, r in zip(ball.entries, report.rows)
    ]
    _write_csv(args.output, header, rows)
    _write_sidecar(args.output, {
        "slope": report.slope,
        "intercept": report.intercept,
        "rho0": report.rho0,
        "radius": radius,
        "note": report.note,
        "cone_rays": [[float(x) for x in ray] for ray in cone.rays],
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cartanlab",
        description="Cartan projections, word balls, and deformation reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="input JSON path")
    common.add_argument("--output", required=True, help="output CSV path")
    common.add_argument("--field", help="field override, e.g. padic:3")
    common.add_argument("--group", help="group override, e.g. SL:2 or SO:2,2")
    common.add_argument("--radius", type=float, default=3,
                        help="word-ball radius (integer commands)")
    common.add_argument("--subdivision", type=float, default=None,
                        help="geodesic subdivision length for decompose")
    common.add_argument("--t", help="comma-separated deformation parameters")
    common.add_argument("--eps", type=float, default=None)
    common.add_argument("--rho0", type=float, default=None,
                        help="short-element cutoff for envelope fits")
    common.add_argument("--seed", type=int,
                        default=0, help="sample-grid seed")
    common.add_argument(
        "--workers", type=int,
        default=int(os.environ.get("CARTANLAB_WORKERS", "0")) or None,
        help="worker-count hint (deterministic output regardless)",
    )
    for name, fn in [
        ("cartan", cmd_cartan), ("ball", cmd_ball), ("proximal", cmd_proximal),
        ("decompose", cmd_decompose), ("bend", cmd_bend),
        ("stability", cmd_stability), ("properness", cmd_properness),
    ]:
        p = sub.add_parser(name, parents=[common])
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NumericalError, IndeterminateError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (CartanLabError, KeyError, ValueError, OSError,
            json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
