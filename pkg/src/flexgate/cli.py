"""Command-line front end.

Exit codes: 0 success / no obstruction found, 1 obstructed, 2 error,
3 continuation stalled.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import io
from .dehn import (
    DECOMP_TOL,
    DEHN_TOL,
    MAX_DENOMINATOR,
    auto_basis,
    decompose_lengths,
    decomposition_from_alpha,
    evaluate_dehn,
    per_edge_branch_consistency,
    unwrap_near,
)
from .edges import TRIG_TOL, Policy, dihedral_angles, dihedral_data
from .errors import ContinuationStalled, FlexgateError, KernelCollapse
from .flexspace import (
    FLEX_TOL,
    RANK_TOL,
    check_first_order_flex,
    flex_space,
    project_out_trivial,
    rigidity_rows,
)
from .mesh import degenerate_faces, edge_frames, topology_stats
from .minors import DEFAULT_SAMPLES, DERIV_TOL, VALUE_TOL, minimal_vanishing_size, minor_stationarity_report
from .oracle import Example, continue_flex, gen_example

SCHEMA = "flexgate.certify/1"
EXIT_OK, EXIT_OBSTRUCTED, EXIT_ERROR, EXIT_STALLED = 0, 1, 2, 3


def _dump(obj, out=None):
    out = out or sys.stdout
    json.dump(obj, out, indent=1)
    out.write("\n")


def _orientation(args):
    return "input" if args.keep_winding else "auto"


def _load(args):
    doc = io.read_mesh(args.mesh, orientation=_orientation(args))
    if args.flip_orientation:
        doc.polyhedron = doc.polyhedron.reoriented()
    return doc


def _topology_json(p):
    t = topology_stats(p)
    return {
        "V": t.V,
        "E": t.E,
        "F": t.F,
        "euler_char": t.euler_char,
        "orientable": t.orientable,
        "genus_or_crosscaps": t.genus_or_crosscaps,
    }


def _decomposition(p, doc, args):
    basis, alpha, source = doc.basis, doc.alpha, "mesh"
    if getattr(args, "basis", None):
        basis, alpha = io.read_basis(args.basis)
        source = "file"
    if basis is None:
        basis, source = auto_basis(p), "auto"
    if alpha is not None:
        return decomposition_from_alpha(p, basis, alpha), source
    return decompose_lengths(p, basis, args.decomp_tol, args.max_denominator), source


def cmd_analyze(args):
    p = _load(args).polyhedron
    report = {"topology": _topology_json(p), "degenerate_faces": degenerate_faces(p), "edges": []}
    if p.oriented:
        bad = set(degenerate_faces(p))
        for fr in edge_frames(p):
            entry = {"edge": [int(k) for k in p.edges[fr.edge_id]], "frame": list(fr.quad)}
            if bad & set(int(f) for f in p.edge_faces[fr.edge_id]):
                entry["degenerate"] = True
            else:
                d = dihedral_data(p, fr, args.trig_tol)
                entry.update(
                    length=d.ell,
                    cos_phi=d.cos_phi,
                    sin_phi=d.sin_phi,
                    phi=d.phi,
                    flat=bool(abs(d.sin_phi) <= args.trig_tol and d.cos_phi < 0),
                )
            report["edges"].append(entry)
    _dump(report)
    return EXIT_OK


def cmd_flexspace(args):
    p = _load(args).polyhedron
    rep = flex_space(p, args.rank_tol)
    if args.out is not None:
        if not 0 <= args.index < len(rep.nontrivial_basis):
            raise FlexgateError(f"no nontrivial flex with index {args.index}")
        with open(args.out, "w") as fh:
            _dump(io.flex_to_json(rep.nontrivial_basis[args.index]), fh)
    _dump(
        {
            "kernel_dim": rep.kernel_dim,
            "rank": rep.rank,
            "infinitesimally_flexible": rep.infinitesimally_flexible,
            "singular_values": rep.singular_values.tolist(),
            "nontrivial_basis": rep.nontrivial_basis.tolist(),
        }
    )
    return EXIT_OK


def cmd_certify(args):
    doc = _load(args)
    p = doc.polyhedron
    v = io.read_flex(args.flex, p.n_vertices)
    residuals = check_first_order_flex(p, v, args.flex_tol)
    failed = []
    report = {
        "schema": SCHEMA,
        "mesh": _topology_json(p),
        "flex_valid": True,
        "max_edge_residual": float(np.max(np.abs(residuals))),
    }

    hypotheses = p.oriented and not degenerate_faces(p)
    if hypotheses:
        decomp, source = _decomposition(p, doc, args)
        policy = Policy(args.policy)
        dehn = evaluate_dehn(p, decomp, v, policy, args.dehn_tol, args.trig_tol, args.slots, check=False)
        report["dehn"] = {
            "basis_source": source,
            "basis": [{"label": l, "value": x} for l, x in zip(decomp.basis.labels, decomp.basis.values)],
            "policy": policy.value,
            "residuals": dehn.residuals.tolist(),
            "scales": dehn.scales.tolist(),
            "passed": dehn.passed.tolist(),
            "tol": args.dehn_tol,
        }
        failed += [f"dehn[{j + 1}]" for j in np.flatnonzero(~dehn.passed)]
        checks = per_edge_branch_consistency(p, v, args.branch_tol, args.trig_tol, check=False)
        bad = [c for c in checks if not c.ok]
        report["branch_consistency"] = {
            "edges_checked": len(checks),
            "max_abs_discrepancy": max((abs(c.discrepancy) for c in checks), default=0.0),
            "failed_edges": [list(c.edge) for c in bad],
        }
        failed += [f"branch{list(c.edge)}" for c in bad]
    else:
        report["dehn"] = {"skipped": "needs an orientable surface with non-degenerate faces"}

    k = args.minor_size if args.minor_size is not None else 3 * p.n_vertices - 6
    seed = args.seed if args.seed is not None else int(os.environ.get("FLEXGATE_SEED", "0"))
    minors = minor_stationarity_report(
        p, v, k, args.minor_strategy, args.value_tol, args.deriv_tol, args.samples, seed
    )
    report["minors"] = minors.to_json()
    report["minors"]["minimal_vanishing_size"] = minimal_vanishing_size(
        rigidity_rows(p.vertices, p.edges), args.rank_tol
    )
    if not minors.all_derivatives_vanish:
        failed.append(f"minor-derivatives[k={k}]")
    if args.project_trivial:
        projected = minor_stationarity_report(
            p, project_out_trivial(p, v), k, args.minor_strategy, args.value_tol, args.deriv_tol, args.samples, seed
        )
        report["minors_projected"] = projected.to_json()

    report["verdict"] = "OBSTRUCTED" if failed else "NO_OBSTRUCTION_FOUND"
    report["failed"] = failed
    _dump(report)
    return EXIT_OBSTRUCTED if failed else EXIT_OK


def cmd_continue(args):
    doc = _load(args)
    p = doc.polyhedron
    rep = flex_space(p, args.rank_tol)
    if not rep.infinitesimally_flexible:
        raise KernelCollapse(f"kernel dimension {rep.kernel_dim}: no nontrivial direction")
    if not 0 <= args.direction_index < len(rep.nontrivial_basis):
        raise FlexgateError(f"no nontrivial flex with index {args.direction_index}")
    direction = rep.nontrivial_basis[args.direction_index]
    result = continue_flex(p, direction, args.step_size, args.steps, args.newton_tol, args.rank_tol)

    decomp = None
    if p.oriented and not degenerate_faces(p):
        decomp, _ = _decomposition(p, doc, args)
    frames = edge_frames(p) if decomp is not None else None
    ref = dihedral_angles(p.vertices, frames) if frames else None
    m = decomp.basis.m if decomp is not None else 0
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["t", "maxEdgeDrift", *[f"dehnExpr_{j + 1}" for j in range(m)], "kernelDim"])
        for s in result.steps:
            row = [repr(s.t), repr(s.edge_drift)]
            if decomp is not None:
                ref = unwrap_near(dihedral_angles(s.positions, frames), ref)
                row += [repr(float(x)) for x in decomp.matrix().T @ ref]
            w.writerow(row + [s.kernel_dim])
    finally:
        if out is not sys.stdout:
            out.close()
    if args.out:
        io.write_mesh(p.with_vertices(result.final_positions), args.out)
    return EXIT_OK


def _parse_param(text):
    key, _, value = text.partition("=")
    nums = [float(x) for x in value.split(",")]
    return key, nums[0] if len(nums) == 1 else tuple(nums)


def cmd_gen(args):
    params = dict(_parse_param(t) for t in args.param)
    p = gen_example(args.name, **params)
    if args.out:
        io.write_mesh(p, args.out)
    else:
        _dump(io.mesh_to_json(p))
    return EXIT_OK


def _common(sp):
    sp.add_argument("mesh", help="mesh file (.json or .off)")
    sp.add_argument("--flip-orientation", action="store_true", help="reverse every face winding after loading")
    sp.add_argument("--keep-winding", action="store_true", help="do not orient faces by signed volume")
    sp.add_argument("--rank-tol", type=float, default=RANK_TOL)
    sp.add_argument("--trig-tol", type=float, default=TRIG_TOL)


def _basis_opts(sp):
    sp.add_argument("--basis", help="JSON file with 'length_basis' (and optional 'alpha')")
    sp.add_argument("--decomp-tol", type=float, default=DECOMP_TOL)
    sp.add_argument("--max-denominator", type=int, default=MAX_DENOMINATOR)


def build_parser():
    ap = argparse.ArgumentParser(prog="flexgate", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="topology and per-edge dihedral data")
    _common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("flexspace", help="first-order flex space of a mesh")
    _common(sp)
    sp.add_argument("--out", help="write nontrivial flex number --index as flex JSON")
    sp.add_argument("--index", type=int, default=0)
    sp.set_defaults(func=cmd_flexspace)

    sp = sub.add_parser("certify", help="check necessary conditions for extending a first-order flex")
    _common(sp)
    _basis_opts(sp)
    sp.add_argument("flex", help="flex JSON file")
    sp.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.PREFER_STABLE.value)
    sp.add_argument("--slots", default="rss", help="r/s choice per slot for --policy mixed-slots")
    sp.add_argument("--minor-size", type=int, help="minor size k (default 3V-6)")
    sp.add_argument("--minor-strategy", choices=["full", "sampled"], default="full")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, help="sampling seed (default $FLEXGATE_SEED or 0)")
    sp.add_argument("--project-trivial", action="store_true", help="also report minors for the flex modulo rigid motions")
    sp.add_argument("--flex-tol", type=float, default=FLEX_TOL)
    sp.add_argument("--dehn-tol", type=float, default=DEHN_TOL)
    sp.add_argument("--branch-tol", type=float, default=1e-7)
    sp.add_argument("--value-tol", type=float, default=VALUE_TOL)
    sp.add_argument("--deriv-tol", type=float, default=DERIV_TOL)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("continue", help="follow a flex numerically")
    _common(sp)
    _basis_opts(sp)
    sp.add_argument("direction_index", type=int, nargs="?", default=0)
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--step-size", type=float, default=1e-2)
    sp.add_argument("--newton-tol", type=float, default=1e-12)
    sp.add_argument("--csv", help="write the log here instead of stdout")
    sp.add_argument("--out", help="write the final mesh here")
    sp.set_defaults(func=cmd_continue)

    sp = sub.add_parser("gen", help="write a canonical example mesh")
    sp.add_argument("name", help=", ".join(e.value for e in Example))
    sp.add_argument("--out")
    sp.add_argument("--param", action="append", default=[], help="e.g. A=2,0,1 or a=1.5")
    sp.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContinuationStalled as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STALLED
    except (FlexgateError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
