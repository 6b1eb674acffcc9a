"""The qiso command line: validation, transport, feasibility, isometry
checks, envelopes, catalog management, and conjecture searches.

Exit codes: 0 success, 2 invalid input, 3 condition failed (with a
certificate in the JSON output), 4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import QisoError, SizeGuardExceeded
from .metric import MetricError
from .scalars import FLOAT, RATIONAL, format_scalar

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3
EXIT_GUARD = 4


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qiso",
        description="isometry conditions for finite quantum symmetries "
                    "of metric spaces, with exact optimal transport")

    def add_globals(parser, suppress):
        default = argparse.SUPPRESS if suppress else None
        parser.add_argument("--mode", choices=[RATIONAL, FLOAT],
                            default=default if suppress else RATIONAL,
                            help="arithmetic mode for parsing distributions")
        parser.add_argument("--tol", type=float,
                            default=default if suppress else 1e-9)
        parser.add_argument("--seed", type=int,
                            default=default if suppress else 0)
        parser.add_argument("--jobs", type=int,
                            default=default if suppress else 1)
        parser.add_argument("--out", default=default,
                            help="write the JSON result here instead of stdout")

    add_globals(ap, suppress=False)
    # the same flags are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a metric-space file",
                       parents=[common])
    v.add_argument("space")

    w = sub.add_parser("wasserstein", help="W_p with plan and dual certificate",
                       parents=[common])
    w.add_argument("--space", required=True)
    w.add_argument("--mu", required=True)
    w.add_argument("--nu", required=True)
    w.add_argument("--p", default="1")

    wi = sub.add_parser("winf", help="bottleneck distance with witness plan",
                        parents=[common])
    wi.add_argument("--space", required=True)
    wi.add_argument("--mu", required=True)
    wi.add_argument("--nu", required=True)

    co = sub.add_parser("coupling-on", help="coupling supported on a pair set",
                        parents=[common])
    co.add_argument("--mu", required=True)
    co.add_argument("--nu", required=True)
    co.add_argument("--pairs", required=True,
                    help='JSON file {"pairs": [[i,j],...]}')

    h = sub.add_parser("hall", help="subset condition vs coupling feasibility",
                       parents=[common])
    h.add_argument("instance", help='JSON {"mu": [...], "nu": [...], "pairs": [...]}')

    c = sub.add_parser("check", help="isometry conditions of a coaction",
                       parents=[common])
    c.add_argument("coaction")
    c.add_argument("--condition", required=True,
                   choices=["d", "lip", "winf", "thm-main"])
    c.add_argument("--p", default="1", help="p for --condition lip (number or inf)")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--universal", action="store_true", default=True)
    mode.add_argument("--state", help="state file: check this state only")

    e = sub.add_parser("envelope", help="largest (D)-isometric quotient",
                       parents=[common])
    e.add_argument("coaction")

    cat = sub.add_parser("catalog", help="built-in example management",
                         parents=[common])
    cat.add_argument("--list", action="store_true")
    cat.add_argument("--emit", metavar="DIR", help="write catalog files here")
    cat.add_argument("--verify", action="store_true")

    s = sub.add_parser("search", help="verification runs and conjecture searches",
                       parents=[common])
    s.add_argument("--config", help="SearchConfig JSON file")
    s.add_argument("--kind", choices=["catalog", "sublevel", "span"])
    s.add_argument("--random", type=int, help="number of random actions")
    s.add_argument("--format", choices=["json", "csv", "markdown"],
                   default="json")
    return ap


def _emit(args, doc) -> None:
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=1, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _plan_json(plan):
    return [[format_scalar(v) for v in row] for row in plan]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except SizeGuardExceeded as ex:
        print(json.dumps({"error": "size-guard", "detail": str(ex)}),
              file=sys.stderr)
        return EXIT_GUARD
    except (MetricError, QisoError, FileNotFoundError, KeyError,
            ValueError, json.JSONDecodeError) as ex:
        print(json.dumps({"error": type(ex).__name__, "detail": str(ex)}),
              file=sys.stderr)
        return EXIT_INVALID


def _dispatch(args) -> int:
    from . import fileio
    if args.command == "validate":
        try:
            space = fileio.load_space(args.space, tol=args.tol)
        except MetricError as ex:
            _emit(args, {"valid": False, "error": type(ex).__name__,
                         "detail": str(ex), "witness": list(ex.witness or ())})
            return EXIT_FAILED
        _emit(args, {"valid": True, "n": space.n, "mode": space.mode,
                     "realized_distances":
                         [format_scalar(v) for v in space.realized_distances]})
        return EXIT_OK

    if args.command == "wasserstein":
        from .transport import transport_with_power
        space = fileio.load_space(args.space, tol=args.tol)
        mu = fileio.load_distribution(args.mu, args.mode, args.tol)
        nu = fileio.load_distribution(args.nu, args.mode, args.tol)
        p = float("inf") if args.p == "inf" else (
            int(args.p) if args.p.isdigit() else float(args.p))
        if p == float("inf"):
            return _winf(args, space, mu, nu)
        res = transport_with_power(space, mu, nu, p)
        _emit(args, {
            "p": p,
            "value_power": format_scalar(res.value),
            "wasserstein": float(res.value) ** (1.0 / float(p)),
            "plan": _plan_json(res.plan.plan),
            "duals": {"f": [format_scalar(v) for v in res.duals.f],
                      "g": [format_scalar(v) for v in res.duals.g],
                      "objective": format_scalar(res.duals.objective)}})
        return EXIT_OK

    if args.command == "winf":
        space = fileio.load_space(args.space, tol=args.tol)
        mu = fileio.load_distribution(args.mu, args.mode, args.tol)
        nu = fileio.load_distribution(args.nu, args.mode, args.tol)
        return _winf(args, space, mu, nu)

    if args.command == "coupling-on":
        from .metric import PairSet
        from .transport import feasible_coupling_on
        mu = fileio.load_distribution(args.mu, args.mode, args.tol)
        nu = fileio.load_distribution(args.nu, args.mode, args.tol)
        with open(args.pairs) as fh:
            pairs = json.load(fh)["pairs"]
        Y = PairSet.from_pairs(mu.n, [tuple(p) for p in pairs])
        res = feasible_coupling_on(mu, nu, Y, tol=args.tol)
        if res.feasible:
            _emit(args, {"feasible": True, "plan": _plan_json(res.coupling.plan)})
            return EXIT_OK
        _emit(args, {"feasible": False, "violator": sorted(res.violator),
                     "mu_S": format_scalar(res.mu_S),
                     "nu_neighborhood": format_scalar(res.nu_neighborhood)})
        return EXIT_FAILED

    if args.command == "hall":
        from .hall import HallInstance, decide_hall, hall_condition
        from .metric import PairSet
        from .transport import prob_vector
        from .scalars import parse_scalar
        with open(args.instance) as fh:
            doc = json.load(fh)
        mu = prob_vector([parse_scalar(v, args.mode) for v in doc["mu"]], args.tol)
        nu = prob_vector([parse_scalar(v, args.mode) for v in doc["nu"]], args.tol)
        Y = PairSet.from_pairs(mu.n, [tuple(p) for p in doc["pairs"]])
        inst = HallInstance(mu, nu, Y)
        verdict = decide_hall(inst)
        holds, violator = hall_condition(inst)
        out = {"feasible": verdict.feasible, "subset_condition": holds}
        if verdict.feasible:
            out["plan"] = _plan_json(verdict.coupling.plan)
        else:
            out["violator"] = sorted(verdict.violator)
            out["mu_S"] = format_scalar(verdict.mu_S)
            out["nu_neighborhood"] = format_scalar(verdict.nu_neighborhood)
        _emit(args, out)
        return EXIT_OK if verdict.feasible else EXIT_FAILED

    if args.command == "check":
        return _check(args)

    if args.command == "envelope":
        from .envelope import envelope
        from .fileio import quantum_group_to_dict
        action = fileio.load_coaction(args.coaction, tol=args.tol)
        env = envelope(action, tol=args.tol)
        _emit(args, {
            "original_dimension": action.group.dim,
            "envelope_dimension": env.dimension,
            "killed_blocks": sorted(env.ideal.included_blocks),
            "surviving_blocks": env.survivors,
            "saturation_iterations": env.iterations,
            "verification": {k: r.worst() for k, r in env.reports.items()},
            "quotient": quantum_group_to_dict(env.quotient)})
        return EXIT_OK

    if args.command == "catalog":
        return _catalog(args)

    if args.command == "search":
        from .reports import SearchConfig, emit_report, run_search
        doc = {}
        if args.config:
            with open(args.config) as fh:
                doc = json.load(fh)
        config = SearchConfig.from_dict(doc)
        if args.kind:
            config.kind = args.kind
        if args.random is not None:
            config.random_actions = args.random
        if args.seed:
            config.seed = args.seed
        config.jobs = args.jobs
        report = run_search(config)
        _emit(args, emit_report(report, fmt=args.format))
        return EXIT_OK

    raise QisoError(f"unhandled command {args.command}")


def _winf(args, space, mu, nu) -> int:
    from .transport import wasserstein_inf
    res = wasserstein_inf(space, mu, nu)
    out = {"r": format_scalar(res.r), "plan": _plan_json(res.plan.plan)}
    if res.lower_violator is not None:
        out["lower_infeasibility_witness"] = sorted(res.lower_violator)
    _emit(args, out)
    return EXIT_OK


def _check(args) -> int:
    from . import fileio
    from . import isometry as iso
    action = fileio.load_coaction(args.coaction, tol=args.tol)
    p = float("inf") if args.p == "inf" else (
        int(args.p) if args.p.isdigit() else float(args.p))
    if args.state:
        psi = fileio.load_state(args.state, action.group.algebra)
        if args.condition == "d":
            verdict = iso.check_D_state(action, psi, tol=args.tol)
        elif args.condition == "lip":
            verdict = iso.check_lip_p_state(action, psi, p, tol=args.tol)
        elif args.condition == "winf":
            verdict = iso.check_lip_p_state(action, psi, float("inf"), tol=args.tol)
        else:
            verdict = iso.check_level_coupling_state(action, psi, tol=args.tol)
    else:
        if args.condition == "d":
            verdict = iso.check_D(action, tol=args.tol)
        elif args.condition == "lip":
            if p == 1:
                verdict = iso.check_lip1_universal(action, tol=args.tol)
            else:
                verdict = iso.check_lip_p_universal(action, p, tol=args.tol)
        elif args.condition == "winf":
            verdict = iso.check_winf_universal(action, tol=args.tol)
        else:
            verdict = iso.check_theorem_main(action, tol=args.tol)
    doc = verdict.as_dict()
    if doc.get("witness") and "state" in (doc["witness"] or {}):
        doc["witness"] = dict(doc["witness"])
        doc["witness"]["state"] = fileio.state_to_dict(doc["witness"]["state"])
    _emit(args, doc)
    return EXIT_OK if verdict.holds else EXIT_FAILED


def _catalog(args) -> int:
    import os
    from .catalog import standard_actions, standard_groups, verified_catalog
    from .fileio import save_coaction, save_quantum_group
    from .quantum_group import haar_state, verify_quantum_group

    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
        for entry in standard_actions():
            save_coaction(os.path.join(args.emit, f"{entry.name}.json"),
                          entry.action)
        for qg in standard_groups():
            save_quantum_group(os.path.join(args.emit, f"{qg.name}.group.json"), qg)
        _emit(args, {"written": args.emit})
        return EXIT_OK
    if args.verify:
        rows = []
        for entry in verified_catalog(tol=args.tol):
            qg = entry.action.group
            rows.append({"name": entry.name, "dim": qg.dim,
                         "blocks": list(qg.algebra.blocks),
                         "qg_residual": verify_quantum_group(qg).worst(),
                         "haar_reduced": haar_state(qg).reduced})
        for qg in standard_groups():
            rows.append({"name": qg.name, "dim": qg.dim,
                         "blocks": list(qg.algebra.blocks),
                         "qg_residual": verify_quantum_group(qg).worst(),
                         "haar_reduced": haar_state(qg).reduced})
        _emit(args, {"entries": rows})
        return EXIT_OK
    rows = [{"name": e.name, "points": e.action.n, "dim": e.action.group.dim,
             "blocks": list(e.action.group.algebra.blocks)}
            for e in standard_actions()]
    _emit(args, {"actions": rows,
                 "groups": [q.name for q in standard_groups()]})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
