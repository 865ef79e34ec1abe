"""Command-line interface.

Exit codes: 0 success, 1 reproduction mismatch, 2 usage error or unreadable
input, 3 input data violating the density-matrix invariants.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import discord as dsc
from . import ensembles, gates, reproduce, tomography
from .jsonio import InputFileError, ReportBundle, load_matrix, load_state, matrix_to_json, to_jsonable
from .states import StateError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3
NATS_PER_BIT = math.log(2)


class _UsageError(Exception):
    pass


def _unit(args) -> tuple[float, str]:
    return (NATS_PER_BIT, "nats") if args.nats else (1.0, "bits")


def _basis_json(basis) -> dict:
    return matrix_to_json(basis.vectors)


def cmd_discord(args) -> ReportBundle:
    s = load_state(args.state)
    scale, unit = _unit(args)
    measures = ["d1", "d2", "d3"] if args.measure == "all" else [args.measure]
    sides = ["A", "B"] if args.side == "both" else [args.side]
    results = {}
    for side in sides:
        for m in measures:
            r = getattr(dsc, m)(s, side)
            results[f"{m}_{side}"] = {
                "value": round(r.value * scale, 6),
                "basis": _basis_json(r.optimal_basis),
                "bloch_angles": list(r.parameters) if r.parameters else None,
                "converged": r.converged,
                "evaluations": len(r.optimizer_trace),
                "degenerate_reduced_state": r.degenerate,
            }
    results["unit"] = unit
    results["mutual_information"] = round(dsc.mutual_information(s) * scale, 6)
    return ReportBundle(
        "discord",
        {"state": str(args.state), "measure": args.measure, "side": args.side, "dims": list(s.dims)},
        results,
        ["discord measures over rank-1 projective measurements"],
    )


def cmd_zero_test(args) -> ReportBundle:
    s = load_state(args.state)
    sides = ["A", "B"] if args.side == "both" else [args.side]
    results = {}
    for side in sides:
        rep = dsc.is_zero_discord(s, side)
        entry = {
            "is_zero": rep.is_zero,
            "commutator_norm": rep.commutator_norm,
            "decided_by": rep.decided_by,
            "witness_basis": _basis_json(rep.witness_basis) if rep.witness_basis else None,
        }
        if rep.decomposition:
            entry["decomposition"] = [
                {"p": p, "projector": matrix_to_json(pi), "conditional_state": matrix_to_json(rb)}
                for p, pi, rb in rep.decomposition
            ]
        results[side] = entry
    return ReportBundle("zero-test", {"state": str(args.state), "side": args.side}, results,
                        ["zero-discord decision via commutator and eigenvector structure"])


def cmd_table1(args) -> ReportBundle:
    rows = ensembles.table1_report(optimize=not args.fast)
    scale, unit = _unit(args)
    for r in rows:
        if r["d1_A"] is not None:
            r["d1_A"] = r["d1_A"] * scale
    return ReportBundle("ensembles table1", {"fast": args.fast}, {"rows": rows, "unit": unit},
                        ["local distinguishability versus discord"])


def cmd_table2(args) -> ReportBundle:
    u = gates.cnot("A", "B")
    rep = gates.verify_gate_on_set(u, gates.l_set(), tol=args.tolerance)
    rows = [
        {"pair": lab, "fidelity": f, "passed": ok}
        for lab, f, ok in zip(gates.L_LABELS, rep["fidelities"], rep["passed"])
    ]
    pairs = gates.l_set()
    reset = gates.reset_unitary()
    reset_fids = {
        gates.L_LABELS[k]: float(abs(np.vdot(pairs[k][0], reset @ pairs[k][1])) ** 2) for k in (0, 2)
    }
    return ReportBundle(
        "gates table2", {"check": args.check, "tolerance": args.tolerance},
        {"pairs": rows, "all_passed": rep["all_passed"], "max_deficit": rep["max_deficit"],
         "reset_fidelities": reset_fids},
        ["CNOT on four product inputs"],
    )


def cmd_discord_change(args) -> ReportBundle:
    weights = args.weights or [0.25] * 4
    if len(weights) != 4 or abs(sum(weights) - 1) > 1e-9 or min(weights) < 0:
        raise _UsageError("--weights needs four non-negative numbers summing to 1")
    scale, unit = _unit(args)
    ch = gates.ensemble_discord_change(gates.cnot("A", "B"), gates.l_set_ensemble(weights))
    ch = {k: {kk: vv * scale for kk, vv in v.items()} for k, v in ch.items()}
    ch["unit"] = unit
    return ReportBundle("gates discord-change", {"weights": weights}, ch,
                        ["symmetric D2 before and after CNOT"])


def _scheme(method: int):
    return tomography.method1() if method == 1 else tomography.method2()


def _run_json(run) -> dict:
    return {
        "chi": matrix_to_json(run.chi.chi),
        "eigenvalues": run.eigenvalues,
        "cp": run.cp_verdict,
        "probe_labels": list(run.scheme.labels),
        "probabilities": run.probabilities,
        "env_states": [matrix_to_json(e) for e in run.env_states],
        "output_states": [matrix_to_json(o) for o in run.output_states],
        "trace": float(np.trace(run.chi.chi).real),
    }


def _joint_and_unitary(args):
    joint = load_state(args.joint)
    u, _ = load_matrix(args.unitary)
    if u.shape != (4, 4) or not gates.is_unitary(u, 1e-10):
        raise InputFileError(f"{args.unitary}: expected a 4x4 unitary")
    return joint, u


def cmd_tomo_run(args) -> ReportBundle:
    joint, u = _joint_and_unitary(args)
    run = tomography.run_tomography(joint, u, _scheme(args.method), shots=args.shots, seed=args.seed)
    return ReportBundle(
        "tomo run",
        {"joint": str(args.joint), "unitary": str(args.unitary), "method": args.method,
         "shots": args.shots, "seed": args.seed},
        _run_json(run),
        ["standard process tomography with correlated environment"],
    )


def cmd_tomo_lemma2(args) -> ReportBundle:
    joint, u = _joint_and_unitary(args)
    schemes = [tomography.method2(), tomography.method2(tomography.hadamard_probes(), ("+", "-", "H", "L"))]
    rep = tomography.lemma2_product_check(joint, u, schemes)
    results = {
        "max_chi_distance": rep["max_chi_distance"],
        "chis": [matrix_to_json(c) for c in rep["chis"]],
        "eigenvalues": rep["eigenvalues"],
        "cp": rep["cp"],
        "probe_sets": [list(s.labels) for s in schemes],
    }
    return ReportBundle("tomo lemma2", {"joint": str(args.joint), "unitary": str(args.unitary)}, results,
                        ["probe-set dependence of reconstructed chi"])


def build_state(args):
    fam = args.family
    if fam == "exdisc":
        return ensembles.exdisc_state(args.b, args.c)
    if fam == "bell":
        return ensembles.bell_state()
    if fam == "lemma1":
        return ensembles.lemma1_state()
    if fam == "separable":
        return ensembles.separable_input_state()
    if fam == "teahouse":
        w = args.weights if args.weights else None
        if w is not None and len(w) != 9:
            raise _UsageError("teahouse needs nine weights")
        return ensembles.ensemble_density(ensembles.teahouse_states(w))
    if fam == "table2-ensemble":
        return ensembles.ensemble_density(gates.l_set_ensemble(args.weights or [0.25] * 4))
    if fam == "product":
        return ensembles.product_state(args.a, args.b_state)
    raise _UsageError(f"unknown family {fam!r}")


def cmd_state(args):
    try:
        s = build_state(args)
    except ValueError as exc:
        if isinstance(exc, StateError):
            raise
        raise _UsageError(str(exc)) from exc
    return matrix_to_json(s.matrix, s.dims)


def cmd_reproduce(args) -> ReportBundle:
    try:
        items = reproduce.run(args.only)
    except KeyError as exc:
        raise _UsageError(str(exc.args[0])) from exc
    results = {
        "items": [
            {"id": it.id, "description": it.description, "passed": it.passed,
             "expected": it.expected, "computed": it.computed, "tolerance": it.tolerance}
            for it in items
        ],
        "all_passed": all(it.passed for it in items),
    }
    return ReportBundle("reproduce-paper", {"only": args.only}, results,
                        ["published numeric examples and tables"])


# ---------------------------------------------------------------------------

def _text(bundle: ReportBundle) -> str:
    d = bundle.to_dict()
    res = d["results"]
    lines = [f"# {d['command']}"]
    if d["command"] == "reproduce-paper":
        for it in res["items"]:
            lines.append(f"{'PASS' if it['passed'] else 'FAIL':4}  {it['id']:<15} {it['description']}")
            if not it["passed"]:
                lines.append(f"      expected {json.dumps(it['expected'])}, got {json.dumps(it['computed'])}")
        return "\n".join(lines)
    if d["command"] == "ensembles table1":
        lines.append(f"{'states':<36} {'discord':<12} {'zero A/B':<12} distinguishable")
        for r in res["rows"]:
            lines.append(
                f"{r['states']:<36} {r['discord']:<12} {str(r['zero_A'])[0]}/{str(r['zero_B'])[0]:<10} "
                f"{'yes' if r['locally_distinguishable'] else 'no'}"
            )
        return "\n".join(lines)
    if d["command"] == "gates table2":
        for r in res["pairs"]:
            lines.append(f"{r['pair']}  fidelity {r['fidelity']:.9g}  {'ok' if r['passed'] else 'FAIL'}")
        return "\n".join(lines)
    for k, v in sorted(res.items()):
        if isinstance(v, dict) and "value" in v:
            lines.append(f"{k:<8} {v['value']:.6f}")
        elif not isinstance(v, (dict, list)):
            lines.append(f"{k:<20} {v}")
        else:
            lines.append(f"{k:<20} {json.dumps(v)}")
    return "\n".join(lines)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of a text table")
    common.add_argument("--nats", action="store_true", help="report entropic quantities in nats")
    common.add_argument("--tolerance", type=float, default=1e-10,
                        help="fidelity-deficit threshold for gates table2 (default 1e-10)")

    p = argparse.ArgumentParser(prog="qdiscord", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("discord", parents=[common], help="D1/D2/D3 of a state file")
    q.add_argument("--state", required=True, type=Path)
    q.add_argument("--measure", choices=["d1", "d2", "d3", "all"], default="all")
    q.add_argument("--side", choices=["A", "B", "both"], default="A")
    q.set_defaults(func=cmd_discord)

    q = sub.add_parser("zero-test", parents=[common], help="decide zero discord")
    q.add_argument("--state", required=True, type=Path)
    q.add_argument("--side", choices=["A", "B", "both"], default="both")
    q.set_defaults(func=cmd_zero_test)

    q = sub.add_parser("ensembles", parents=[common], help="ensemble reports")
    es = q.add_subparsers(dest="what", required=True)
    t1 = es.add_parser("table1", parents=[common])
    t1.add_argument("--fast", action="store_true", help="skip the optimized D1 column")
    t1.set_defaults(func=cmd_table1)

    q = sub.add_parser("gates", parents=[common], help="gate checks")
    gs = q.add_subparsers(dest="what", required=True)
    t2 = gs.add_parser("table2", parents=[common])
    t2.add_argument("--check", action="store_true", help="exit 1 unless every pair passes")
    t2.set_defaults(func=cmd_table2)
    dc = gs.add_parser("discord-change", parents=[common])
    dc.add_argument("--weights", type=float, nargs=4)
    dc.set_defaults(func=cmd_discord_change)

    q = sub.add_parser("tomo", parents=[common], help="process tomography")
    ts = q.add_subparsers(dest="what", required=True)
    tr = ts.add_parser("run", parents=[common])
    tr.add_argument("--joint", required=True, type=Path)
    tr.add_argument("--unitary", required=True, type=Path)
    tr.add_argument("--method", type=int, choices=[1, 2], default=2)
    tr.add_argument("--shots", type=int)
    tr.add_argument("--seed", type=int)
    tr.set_defaults(func=cmd_tomo_run)
    tl = ts.add_parser("lemma2", parents=[common])
    tl.add_argument("--joint", required=True, type=Path)
    tl.add_argument("--unitary", required=True, type=Path)
    tl.set_defaults(func=cmd_tomo_lemma2)

    q = sub.add_parser("state", help="write a named state in the matrix format")
    q.add_argument("family", choices=["exdisc", "bell", "lemma1", "separable", "teahouse", "table2-ensemble", "product"])
    q.add_argument("--b", type=float, default=0.5)
    q.add_argument("--c", type=float, default=0.5)
    q.add_argument("--weights", type=float, nargs="+")
    q.add_argument("--a", default="H", help="product: state label on A")
    q.add_argument("--b-state", default="H", help="product: state label on B")
    q.add_argument("--out", type=Path)
    q.set_defaults(func=cmd_state)

    q = sub.add_parser("reproduce-paper", parents=[common], help="run every published example")
    q.add_argument("--only", nargs="+")
    q.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFileError, tomography.PreparationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "state":
        text = json.dumps(to_jsonable(out), sort_keys=True)
        if args.out:
            args.out.write_text(text + "\n")
        else:
            print(text)
        return EXIT_OK

    print(out.dumps() if args.json else _text(out))
    if args.command == "reproduce-paper" and not out.results["all_passed"]:
        return EXIT_MISMATCH
    if args.command == "gates" and args.what == "table2" and args.check and not out.results["all_passed"]:
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
