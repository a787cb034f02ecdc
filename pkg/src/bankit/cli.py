"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 hypothesis not met or
target infeasible, 3 a verifier or scheduler emitted violation findings.
Text output is deterministic; --format json is the machine contract.
"""

import argparse
import json
import os
import sys

from . import __version__
from .causality import (
    anti_graph_to_dot,
    cause_union,
    g_tau,
    kappa,
    tau_forest,
    verify_causality_lemmas,
)
from .core import parse_ban, parse_config
from .dynamics import (
    Trajectory,
    attractors,
    attractor_of,
    hamiltonian_shortest,
    requires_reversibility,
    shortest_trajectory,
    transition_graph,
)
from .errors import (
    BadCharacter,
    BankitError,
    DuplicateAutomaton,
    ExprSyntaxError,
    LengthMismatch,
    MissingAutomaton,
    UnknownVariable,
)
from .gen import (
    random_config,
    random_monotone_ban,
    random_trajectory,
    random_acyclic_source_loop_ban,
    structured_acyclic_bans,
)
from .graph import (
    classify,
    favour_graph_to_dot,
    graph_to_dot,
    interaction_graph,
    reformulate_totally_positive,
)
from .potential import (
    carrier_tables,
    carrier_tables_to_csv,
    carrier_tables_to_json,
    conjecture_only_super_transmitted,
    super_survivors,
    survivors,
)
from .schedule import SCHEDULERS, bounds_suite, report_to_json

USAGE_ERRORS = (
    ExprSyntaxError,
    UnknownVariable,
    DuplicateAutomaton,
    MissingAutomaton,
    LengthMismatch,
    BadCharacter,
)


def _load_ban(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ban(fh.read())


def _parse_moves(text):
    return [int(part) for part in text.split(",") if part.strip()]


def _fmt_set(values):
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


def cmd_classify(args):
    ban = _load_ban(args.ban)
    cls = classify(ban)
    if args.format == "json":
        print(json.dumps(cls, sort_keys=True))
        return 0
    yn = lambda b: "yes" if b else "no"
    print(
        f"monotone: {yn(cls['monotone'])}, nice: {yn(cls['nice'])}, "
        f"totally positive: {yn(cls['totally_positive'])}"
    )
    if cls["witness"]:
        print(f"witness: {cls['witness']}")
    return 0


def cmd_igraph(args):
    ban = _load_ban(args.ban)
    g = interaction_graph(ban)
    if args.format == "dot":
        sys.stdout.write(graph_to_dot(g))
        return 0
    arcs = []
    for (j, i) in g.arcs():
        s = g.sign_sets[(j, i)]
        label = "+" if s == frozenset({1}) else "-" if s == frozenset({-1}) else "+/-"
        arcs.append({"from": j, "to": i, "sign": label})
    if args.format == "json":
        print(json.dumps({"n": g.n, "arcs": arcs}, sort_keys=True))
        return 0
    print(f"automata: {g.n}")
    for a in arcs:
        print(f"{a['from']} -> {a['to']} [{a['sign']}]")
    return 0


def cmd_reformulate(args):
    ban = _load_ban(args.ban)
    new_ban, flip_set = reformulate_totally_positive(ban)
    if args.format == "json":
        print(
            json.dumps(
                {"flip_set": sorted(flip_set), "ban": new_ban.render().splitlines()},
                sort_keys=True,
            )
        )
        return 0
    print(f"flip set: {_fmt_set(flip_set)}")
    print(new_ban.render())
    return 0


def cmd_shortest(args):
    ban = _load_ban(args.ban)
    x = parse_config(args.source, ban.n)
    y = parse_config(args.target, ban.n)
    traj = shortest_trajectory(ban, x, y)
    if traj is None:
        print("unreachable", file=sys.stderr)
        return 2
    if args.format == "json":
        print(traj.to_json())
        return 0
    print(f"length: {traj.length}")
    print("moves: " + ",".join(str(m) for m in traj.moves))
    print("configs: " + " ".join(str(c) for c in traj.configs()))
    return 0


def cmd_reversibility(args):
    ban = _load_ban(args.ban)
    x = parse_config(args.source, ban.n)
    y = parse_config(args.target, ban.n)
    rec = requires_reversibility(ban, x, y)
    if args.format == "json":
        print(json.dumps(rec, sort_keys=True))
        return 0
    print(f"distance: {rec['distance']}")
    print(f"long: {'yes' if rec['long'] else 'no'}")
    print(f"all shortest long: {'yes' if rec['all_shortest_long'] else 'no'}")
    print(f"shortest trajectories: {rec['shortest_count']}" + (" (truncated)" if rec["truncated"] else ""))
    return 0


def cmd_attractors(args):
    ban = _load_ban(args.ban)
    atts = attractors(ban)
    if args.format == "json":
        print(
            json.dumps(
                [
                    {"kind": a["kind"], "configs": [str(c) for c in a["configs"]]}
                    for a in atts
                ],
                sort_keys=True,
            )
        )
        return 0
    for a in atts:
        print(f"{a['kind']}: " + " ".join(str(c) for c in a["configs"]))
    return 0


def cmd_hamiltonian(args):
    ban = _load_ban(args.ban)
    traj = hamiltonian_shortest(ban)
    if traj is None:
        print("none")
        return 0
    if args.format == "json":
        print(traj.to_json())
        return 0
    print(f"length: {traj.length}")
    print("moves: " + ",".join(str(m) for m in traj.moves))
    print("configs: " + " ".join(str(c) for c in traj.configs()))
    return 0


def cmd_transition(args):
    ban = _load_ban(args.ban)
    tg = transition_graph(ban)
    sys.stdout.write(tg.to_dot())
    return 0


def cmd_causality(args):
    ban = _load_ban(args.ban)
    x = parse_config(args.source, ban.n)
    traj = Trajectory.from_moves(ban, x, _parse_moves(args.moves))
    forest = tau_forest(ban, traj)
    if args.dot == "anti":
        sys.stdout.write(anti_graph_to_dot(traj, forest))
        return 0
    if args.dot == "gtau":
        sys.stdout.write(graph_to_dot(g_tau(ban, traj, forest), name="Gtau"))
        return 0
    rows = []
    for e in forest.entries:
        t = e["t"]
        rows.append(
            {
                "t": t,
                "mover": e["mover"],
                "kind": e["kind"],
                "tau": e["tau"],
                "kappa": sorted(kappa(ban, traj, t)),
                "causes": sorted(cause_union(ban, traj, t, forest)),
            }
        )
    report = verify_causality_lemmas(ban, traj)
    if args.format == "json":
        print(json.dumps({"steps": rows, "checks": report}, sort_keys=True))
    else:
        for r in rows:
            tau = "-" if r["tau"] is None else r["tau"]
            print(
                f"t={r['t']} mover={r['mover']} kind={r['kind']} tau={tau} "
                f"kappa={_fmt_set(r['kappa'])} causes={_fmt_set(r['causes'])}"
            )
        for name in sorted(report):
            print(f"{name}: {report[name]['status']} ({report[name]['checked']} checks)")
    violated = any(v["status"] == "violated" for v in report.values())
    return 3 if violated else 0


def _streamline_args(args, ban):
    x = parse_config(args.source, ban.n)
    from .dynamics import Streamline

    return Streamline(ban, x, _parse_moves(args.updates))


def cmd_potentials(args):
    ban = _load_ban(args.ban)
    line = _streamline_args(args, ban)
    tables = carrier_tables(ban, line)
    if args.format == "json":
        print(carrier_tables_to_json(tables))
        return 0
    if args.format == "csv":
        sys.stdout.write(carrier_tables_to_csv(tables))
        return 0
    header = ["potential"] + [f"t{t}" for t in range(tables["T"] + 1)]
    print(" ".join(f"{h:>10}" for h in header))
    for i in sorted(tables["rows"]):
        cells = [
            "{" + ",".join(str(a) for a in sorted(cell)) + "}"
            for cell in tables["rows"][i]
        ]
        print(" ".join(f"{c:>10}" for c in [f"<0,{i}>"] + cells))
    return 0


def cmd_survivors(args):
    ban = _load_ban(args.ban)
    line = _streamline_args(args, ban)
    rec = survivors(ban, line)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "survivors": sorted(rec["survivors"]),
                    "lost": {str(k): v for k, v in sorted(rec["lost"].items())},
                },
                sort_keys=True,
            )
        )
        return 0
    print("survivors: " + _fmt_set(rec["survivors"]))
    for i, t in sorted(rec["lost"].items()):
        print(f"lost <0,{i}> at t={t}")
    return 0


def cmd_super_survivors(args):
    ban = _load_ban(args.ban)
    line = _streamline_args(args, ban)
    supers = super_survivors(ban, line)
    if args.format == "json":
        print(json.dumps(sorted(supers)))
        return 0
    print(_fmt_set(supers))
    return 0


def cmd_schedule(args):
    ban = _load_ban(args.ban)
    x = parse_config(args.source, ban.n)
    fn = SCHEDULERS[args.kind]
    if args.kind == "to-attractor":
        member = parse_config(args.target, ban.n)
        att = attractor_of(ban, member)
        if att is None:
            print("target configuration is not recurrent", file=sys.stderr)
            return 2
        report = fn(ban, x, att)
    else:
        y = parse_config(args.target, ban.n)
        report = fn(ban, x, y)
    if args.format == "json":
        print(report_to_json(report))
    else:
        print(f"scheduler: {report['scheduler']}")
        print(f"hypothesis: {'ok' if report['hypothesis_ok'] else 'violated'}")
        for r in report["reasons"]:
            print(f"reason: {r}")
        if report["trajectory"] is not None:
            print(f"bound: {report['bound']}  achieved: {report['achieved']}")
            print("moves: " + ",".join(str(m) for m in report["trajectory"].moves))
        for f in report["findings"]:
            print(f"finding: {json.dumps(f, sort_keys=True)}")
        for (t, old, new) in report["retarget_log"]:
            print(f"retarget at step {t}: {old} -> {new}")
    if not report["hypothesis_ok"]:
        return 2
    if report["findings"]:
        return 3
    return 0


def cmd_bounds(args):
    ban = _load_ban(args.ban)
    report = bounds_suite(ban)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"shape: {report['shape']} (n={report['n']})")
        for kind, confs in zip(report["kinds"], report["attractors"]):
            print(f"attractor [{kind}]: " + " ".join(confs))
        for name in sorted(report["checks"]):
            print(f"{name}: {report['checks'][name]}")
        for f in report["findings"]:
            print(f"finding: {json.dumps(f, sort_keys=True)}")
    return 3 if report["findings"] else 0


def cmd_conjecture1(args):
    if args.suite:
        return _conjecture_suite(args)
    ban = _load_ban(args.ban)
    x = parse_config(args.source, ban.n)
    if args.target:
        member = parse_config(args.target, ban.n)
        att = attractor_of(ban, member)
        if att is None:
            print("target configuration is not recurrent", file=sys.stderr)
            return 2
    else:
        atts = attractors(ban)
        if len(atts) != 1:
            print("several attractors; pass --target to pick one", file=sys.stderr)
            return 1
        att = atts[0]
    verdict = conjecture_only_super_transmitted(ban, x, att, cap=args.cap)
    _print_verdict(args, verdict)
    return 0


def _print_verdict(args, verdict):
    if args.format == "json":
        data = dict(verdict)
        if data["witness"] is not None:
            data["witness"] = json.loads(data["witness"].to_json())
        print(json.dumps(data, sort_keys=True))
    else:
        print(f"verdict: {verdict['verdict']} (examined {verdict['examined']})")
        if verdict["witness"] is not None:
            print("witness moves: " + ",".join(str(m) for m in verdict["witness"].moves))


def _conjecture_suite(args):
    import random

    from .dynamics import reachable_set
    from .core import Config

    rng = random.Random(args.seed)
    tallies = {"HOLDS": 0, "COUNTEREXAMPLE": 0, "INCONCLUSIVE": 0}
    out_dir = args.out or "bankit-findings"
    instances = []
    if args.suite == "structured":
        for ban in structured_acyclic_bans(4):
            instances.append(ban)
    else:
        for _ in range(args.count):
            instances.append(random_acyclic_source_loop_ban(rng, rng.randint(2, 6)))
    bundle_no = 0
    for idx, ban in enumerate(instances):
        for x_bits in range(1 << ban.n):
            x = Config(ban.n, x_bits)
            atts = attractors(ban)
            reach = reachable_set(ban, x)
            for att in atts:
                if att["configs"][0].bits not in reach:
                    continue
                verdict = conjecture_only_super_transmitted(ban, x, att, cap=args.cap)
                tallies[verdict["verdict"]] += 1
                if verdict["verdict"] == "COUNTEREXAMPLE":
                    bundle_no += 1
                    _persist_bundle(out_dir, bundle_no, ban, x, att)
    print(
        f"seed: {args.seed}  instances: {len(instances)}  "
        f"holds: {tallies['HOLDS']}  counterexamples: {tallies['COUNTEREXAMPLE']}  "
        f"inconclusive: {tallies['INCONCLUSIVE']}  version: {__version__}"
    )
    return 0


def _persist_bundle(out_dir, number, ban, x, att):
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"counterexample-{number:04d}")
    with open(base + ".ban", "w", encoding="utf-8") as fh:
        fh.write(ban.render() + "\n")
    with open(base + ".json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "source": str(x),
                "attractor": [str(c) for c in att["configs"]],
            },
            fh,
            sort_keys=True,
        )


def cmd_verify_all(args):
    import random

    ban = _load_ban(args.ban)
    cls = classify(ban)
    rows = []
    if args.moves:
        x = parse_config(args.source, ban.n)
        trajs = [Trajectory.from_moves(ban, x, _parse_moves(args.moves))]
    else:
        rng = random.Random(args.seed)
        trajs = []
        for _ in range(args.random):
            x = random_config(rng, ban.n)
            trajs.append(random_trajectory(rng, ban, x, args.length))
    violated = False
    merged = {}
    for traj in trajs:
        report = dict(verify_causality_lemmas(ban, traj))
        if cls["monotone"]:
            from .potential import verify_potential_lemmas

            report.update(verify_potential_lemmas(ban, traj))
        for name, rec in report.items():
            slot = merged.setdefault(name, {"checked": 0, "violated": 0})
            slot["checked"] += rec["checked"]
            if rec["status"] == "violated":
                slot["violated"] += 1
                violated = True
    if args.format == "json":
        print(json.dumps({"classification": cls, "checks": merged}, sort_keys=True))
    else:
        print(
            f"monotone: {'yes' if cls['monotone'] else 'no'}, nice: "
            f"{'yes' if cls['nice'] else 'no'}, totally positive: "
            f"{'yes' if cls['totally_positive'] else 'no'}"
        )
        for name in sorted(merged):
            rec = merged[name]
            flag = "FAIL" if rec["violated"] else "ok"
            print(f"{name}: {flag} ({rec['checked']} checks)")
        if not args.moves:
            print(f"seed: {args.seed}  trajectories: {len(trajs)}  version: {__version__}")
    return 3 if violated else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="bankit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--format", choices=["text", "json", "dot", "csv"], default="text")
        return p

    p = add("classify", cmd_classify)
    p.add_argument("ban")

    p = add("igraph", cmd_igraph)
    p.add_argument("ban")

    p = add("reformulate", cmd_reformulate)
    p.add_argument("ban")

    p = add("shortest", cmd_shortest)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("target")

    p = add("reversibility", cmd_reversibility)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("target")

    p = add("attractors", cmd_attractors)
    p.add_argument("ban")

    p = add("hamiltonian", cmd_hamiltonian)
    p.add_argument("ban")

    p = add("transition-graph", cmd_transition)
    p.add_argument("ban")

    p = add("causality", cmd_causality)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("--moves", required=True)
    p.add_argument("--dot", choices=["anti", "gtau"])

    p = add("potentials", cmd_potentials)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("--updates", required=True)

    p = add("survivors", cmd_survivors)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("--updates", required=True)

    p = add("super-survivors", cmd_super_survivors)
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("--updates", required=True)

    p = add("schedule", cmd_schedule)
    p.add_argument("kind", choices=sorted(SCHEDULERS))
    p.add_argument("ban")
    p.add_argument("source")
    p.add_argument("target", help="destination configuration (attractor member for to-attractor)")

    p = add("bounds", cmd_bounds)
    p.add_argument("ban")

    p = add("conjecture1", cmd_conjecture1)
    p.add_argument("ban", nargs="?")
    p.add_argument("source", nargs="?")
    p.add_argument("--target")
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--suite", choices=["structured", "random"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--out")

    p = add("verify-all", cmd_verify_all)
    p.add_argument("ban")
    p.add_argument("source", nargs="?")
    p.add_argument("--moves")
    p.add_argument("--random", type=int, default=20)
    p.add_argument("--length", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BankitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
