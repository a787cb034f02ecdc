"""Acceptance suite: one test per numbered criterion, each printing a
single PASS/FAIL line.  Sizes and time budgets are fixed here, not tuned
at runtime.  Violation witnesses are written to bankit-findings/ so a
red run is reproducible from the artifacts alone."""

import json
import os
import random
import time

import pytest

from bankit.core import Config, ban_from_texts, parse_config
from bankit.causality import verify_causality_lemmas
from bankit.dynamics import (
    Streamline,
    Trajectory,
    attractor_of,
    attractors,
    distance,
    hamiltonian_shortest,
    reachable_set,
    shortest_trajectory,
)
from bankit.gen import (
    random_acyclic_source_loop_ban,
    random_config,
    random_monotone_ban,
    random_nice_ban,
    random_trajectory,
    structured_acyclic_bans,
)
from bankit.graph import classify
from bankit.potential import (
    PotentialTracker,
    carrier_tables,
    conjecture_only_super_transmitted,
    super_survivors,
    survivors,
    transmits,
    verify_potential_lemmas,
)
from bankit.schedule import SCHEDULERS, bounds_suite, lemma14_check

FINDINGS_DIR = os.path.join(os.path.dirname(__file__), "..", "bankit-findings")


def announce(tag, ok, detail):
    print(f"ACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'} - {detail}")


def persist_witness(name, payload):
    os.makedirs(FINDINGS_DIR, exist_ok=True)
    path = os.path.join(FINDINGS_DIR, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
    return path


def test_c01_five_automata_end_to_end(ban5):
    t0 = time.time()
    x = parse_config("10110", 5)
    y = parse_config("01000", 5)
    traj = shortest_trajectory(ban5, x, y)
    expected_configs = [
        "10110", "00110", "00010", "00011", "10011",
        "11011", "11001", "01001", "01000",
    ]
    cls = classify(ban5)
    elapsed = time.time() - t0
    ok = (
        traj.length == 8
        and [str(c) for c in traj.configs()] == expected_configs
        and list(traj.moves) == [1, 3, 5, 1, 2, 4, 1, 5]
        and cls["totally_positive"]
        and ban5.unstable_set(y) == frozenset()
        and elapsed < 1.0
    )
    announce("C1", ok, f"length={traj.length} moves={list(traj.moves)} {elapsed:.3f}s")
    assert ok


# Stated reference cells for both update series of the four-automaton
# sample.  Two cells of the first series (rows of automaton 3 at t=1,2)
# disagree with the transmission rule this package implements; the test
# keeps the stated values and is expected to stay red until the source
# tables are corrected.  See the carrier-table unit tests for the
# rule-derived values.
SERIES1_STATED = {
    1: [{1}, {1, 4}, {1, 3, 4}, {1, 3, 4}],
    2: [{2}, {2, 4}, {2, 4}, {2, 4}],
    3: [{3}, {3, 4}, {4}, set()],
    4: [{4}, set(), set(), set()],
}
SERIES2_STATED = {
    1: [{1}, {1, 3}, {1, 3, 4}],
    2: [{2}, {2}, {2, 4}],
    3: [{3}, set(), set()],
    4: [{4}, {4}, set()],
}


def test_c02_four_automata_carrier_tables(ban4):
    t0 = time.time()
    x = parse_config("1100", 4)
    mismatches = []
    for label, updates, stated in (
        ("series1", [4, 3, 4], SERIES1_STATED),
        ("series2", [3, 4], SERIES2_STATED),
    ):
        rows = carrier_tables(ban4, Streamline(ban4, x, updates))["rows"]
        for i in range(1, 5):
            for t, cell in enumerate(stated[i]):
                got = set(rows[i][t])
                if got != cell:
                    mismatches.append(f"{label} R*_{i}({t}): stated {sorted(cell)} got {sorted(got)}")
    elapsed = time.time() - t0
    ok = not mismatches and elapsed < 1.0
    announce("C2", ok, f"28 cells, {len(mismatches)} mismatches {elapsed:.3f}s")
    for m in mismatches:
        print("  " + m)
    assert ok, mismatches


def test_c03_survivors_and_super_survivors(ban4):
    x = parse_config("1100", 4)
    line = Streamline(ban4, x, [4, 3])
    got_survivors = survivors(ban4, line)["survivors"]
    got_super = super_survivors(ban4, line)
    stated_survivors = frozenset({1, 2, 3})
    stated_super = frozenset({1, 2})
    ok = got_survivors == stated_survivors and got_super == stated_super
    announce(
        "C3",
        ok,
        f"survivors stated {sorted(stated_survivors)} got {sorted(got_survivors)}; "
        f"super stated {sorted(stated_super)} got {sorted(got_super)}",
    )
    assert ok


def test_c04_potential_facts(ban5):
    traj = Trajectory.from_moves(ban5, parse_config("10110", 5), [1, 3, 5, 1, 2, 4, 1, 5])
    rec = survivors(ban5, traj)
    tracker = PotentialTracker(ban5, traj)
    x3 = traj.config(3)
    ok = (
        rec["lost"].get(1) == 1
        and 1 in tracker.carrier_set((0, 5), 1)
        and 1 in tracker.carrier_set((0, 5), 7)
        and transmits(ban5, x3, 4, 1)
        and transmits(ban5, x3, 5, 1)
    )
    announce("C4", ok, f"lost(1)@{rec['lost'].get(1)}, carrier and transmission facts")
    assert ok


def _all_two_automata_bans():
    from bankit.core import BAN, LocalFunction, _reduce_support

    for t1 in range(16):
        for t2 in range(16):
            fs = []
            for table in (t1, t2):
                support, reduced = _reduce_support((1, 2), table)
                fs.append(LocalFunction(None, support, reduced))
            yield BAN(fs)


def test_c05_whole_space_trajectories_need_non_nice():
    t0 = time.time()
    checked = 0
    found = 0
    failures = []
    for ban in _all_two_automata_bans():
        checked += 1
        traj = hamiltonian_shortest(ban)
        if traj is None:
            continue
        found += 1
        if classify(ban)["nice"] or ban.unstable_bits(traj.config_bits[0]).bit_count() != 1:
            failures.append(ban.render())
    rng = random.Random(20260809)
    random_found = 0
    for _ in range(10_000):
        ban = random_monotone_ban(rng, 3)
        traj = hamiltonian_shortest(ban)
        if traj is None:
            continue
        random_found += 1
        if classify(ban)["nice"] or ban.unstable_bits(traj.config_bits[0]).bit_count() != 1:
            failures.append(ban.render())
    elapsed = time.time() - t0
    ok = not failures and elapsed < 300
    announce(
        "C5",
        ok,
        f"n=2 exhaustive {checked} nets ({found} hits), n=3 random 10000 "
        f"({random_found} hits), {len(failures)} counterexamples {elapsed:.1f}s",
    )
    if failures:
        persist_witness("c5-counterexamples.json", failures)
    assert ok


CHECK_NAMES = [
    "cause-arc-sign",
    "branch-walk-sign",
    "branch-up-down",
    "tree-up-down",
    "branch-repeat-move",
    "cause-graph-subgraph",
    "lineage-walk-sign",
    "charge-nonempty",
    "same-potential-same-move",
    "fresh-potential-per-move",
    "shortest-transmits-survivors",
    "destination-favourable-carriers",
    "first-move-loses-potential",
    "update-inheritance",
    "carrier-monotone-loss",
    "max-favour-instability",
]


def test_c06_lemma_suite():
    t0 = time.time()
    rng = random.Random(60_2026)
    instances = 10_000
    totals = {name: 0 for name in CHECK_NAMES}
    violations = []
    for it in range(instances):
        n = rng.randint(2, 6)
        nice_biased = rng.random() < 0.4
        ban = random_nice_ban(rng, n) if nice_biased else random_monotone_ban(rng, n)
        x = random_config(rng, n)
        traj = random_trajectory(rng, ban, x, 30)
        report = dict(verify_causality_lemmas(ban, traj))
        report.update(verify_potential_lemmas(ban, traj, check_shortest=False))
        short = shortest_trajectory(ban, x, traj.destination())
        report["shortest-transmits-survivors"] = verify_potential_lemmas(ban, short)[
            "shortest-transmits-survivors"
        ]
        l14 = lemma14_check(ban, traj.destination())
        report["max-favour-instability"] = {
            "status": "violated" if l14 else "verified",
            "checked": ban.n,
            "witnesses": l14,
        }
        for name, rec in report.items():
            if name not in totals:
                continue
            totals[name] += rec["checked"]
            if rec["status"] == "violated":
                violations.append(
                    {
                        "check": name,
                        "ban": ban.render(),
                        "x0": str(x),
                        "moves": list(traj.moves),
                        "witnesses": rec["witnesses"][:3],
                    }
                )
    elapsed = time.time() - t0
    ok = not violations and elapsed < 1800
    announce(
        "C6",
        ok,
        f"{instances} instances, {sum(totals.values())} checks, "
        f"{len(violations)} violations {elapsed:.1f}s",
    )
    if violations:
        path = persist_witness("c6-violations.json", violations)
        print(f"  witnesses: {path}")
    assert ok


def _signed_path(n, rng):
    texts = ["x1"]
    for k in range(2, n + 1):
        texts.append(f"{'!' if rng.random() < 0.5 else ''}x{k - 1}")
    return ban_from_texts(texts)


def _signed_cycle(n, rng, parity):
    flips = [rng.random() < 0.5 for _ in range(n)]
    if sum(flips) % 2 != parity:
        flips[0] = not flips[0]
    texts = []
    for k in range(1, n + 1):
        prev = n if k == 1 else k - 1
        texts.append(f"{'!' if flips[k - 1] else ''}x{prev}")
    return ban_from_texts(texts)


def test_c07_structural_bounds():
    t0 = time.time()
    rng = random.Random(7_2026)
    problems = []
    for n in range(2, 11):
        plain_path = ban_from_texts(["x1"] + [f"x{k - 1}" for k in range(2, n + 1)])
        pos = _signed_cycle(n, rng, 0)
        neg = _signed_cycle(n, rng, 1)
        cases = [("path", plain_path), ("positive_cycle", pos), ("negative_cycle", neg)]
        if n <= 8:
            cases.append(("path", _signed_path(n, rng)))
        dag = random_acyclic_source_loop_ban(rng, n, max_arity=2)
        cases.append(("acyclic", dag))
        for shape, ban in cases:
            rep = bounds_suite(ban)
            if shape in ("path", "positive_cycle", "negative_cycle") and rep["shape"] != shape:
                problems.append(f"n={n} expected {shape} got {rep['shape']}")
                continue
            if not rep["checks"]["config_attractor_within_n"]:
                problems.append(f"n={n} {shape}: attractor distance exceeds n")
            if rep["shape"] in ("path", "acyclic"):
                if not rep["checks"]["unique_reachable_stable_attractor"]:
                    problems.append(f"n={n} {rep['shape']}: reachable attractor not unique/stable")
            if rep["shape"] == "positive_cycle" and not rep["checks"]["census_two_stable"]:
                problems.append(f"n={n} positive cycle census != 2 stable")
            if rep["shape"] == "path" and not rep["checks"]["census_two_stable"]:
                problems.append(f"n={n} path census != 2 stable")
            if rep["shape"] == "negative_cycle":
                if not rep["checks"]["single_cyclic_attractor"]:
                    problems.append(f"n={n} negative cycle attractor census")
                if not rep["checks"]["recurrent_within_2n"]:
                    problems.append(f"n={n} negative cycle recurrent reach > 2n")
    elapsed = time.time() - t0
    ok = not problems and elapsed < 300
    announce("C7", ok, f"shapes n=2..10, {len(problems)} problems {elapsed:.1f}s")
    for p in problems:
        print("  " + p)
    assert ok


def test_c08_scheduler_validity():
    t0 = time.time()
    rng = random.Random(8_2026)
    generated = 0
    passed = {k: 0 for k in SCHEDULERS}
    emitted = {k: 0 for k in SCHEDULERS}
    findings = {k: 0 for k in SCHEDULERS}
    violations = []
    for _ in range(1200):
        n = rng.randint(2, 6)
        ban = random_nice_ban(rng, n) if rng.random() < 0.5 else random_monotone_ban(rng, n)
        x = random_config(rng, n)
        y = random_trajectory(rng, ban, x, 12).destination()
        generated += 1
        for kind, fn in SCHEDULERS.items():
            if kind == "to-attractor":
                att = attractor_of(ban, y)
                if att is None:
                    continue
                rep = fn(ban, x, att)
            else:
                rep = fn(ban, x, y)
            if not rep["hypothesis_ok"]:
                continue
            passed[kind] += 1
            if rep["findings"]:
                findings[kind] += 1
            if rep["trajectory"] is None:
                continue
            emitted[kind] += 1
            traj = rep["trajectory"]
            d = distance(ban, x, traj.destination())
            if not traj.is_valid(ban):
                violations.append({"kind": kind, "why": "invalid", "ban": ban.render()})
            elif rep["achieved"] > rep["bound"]:
                violations.append(
                    {"kind": kind, "why": "bound", "achieved": rep["achieved"],
                     "bound": rep["bound"], "ban": ban.render(), "x": str(x), "y": str(y)}
                )
            elif d is None or rep["achieved"] < d:
                violations.append({"kind": kind, "why": "beat-bfs", "ban": ban.render()})
    elapsed = time.time() - t0
    ok = generated >= 1000 and not violations and elapsed < 600
    announce(
        "C8",
        ok,
        f"{generated} instances; hypothesis passes {sum(passed.values())}, "
        f"emitted {sum(emitted.values())}, construction findings "
        f"{sum(findings.values())}, violations {len(violations)} {elapsed:.1f}s",
    )
    print(f"  per scheduler passes: { {k: passed[k] for k in sorted(passed)} }")
    print(f"  per scheduler findings: { {k: findings[k] for k in sorted(findings)} }")
    if violations:
        path = persist_witness("c8-violations.json", violations)
        print(f"  witnesses: {path}")
    assert ok


def test_c09_conjecture_harness(tmp_path):
    t0 = time.time()
    rng = random.Random(9_2026)
    tallies = {"HOLDS": 0, "COUNTEREXAMPLE": 0, "INCONCLUSIVE": 0}
    bundles = 0

    def run_instance(ban, x, att):
        nonlocal bundles
        verdict = conjecture_only_super_transmitted(ban, x, att, cap=50_000)
        tallies[verdict["verdict"]] += 1
        if verdict["verdict"] == "COUNTEREXAMPLE":
            bundles += 1
            bundle = tmp_path / f"conjecture-{bundles:05d}"
            bundle.mkdir()
            (bundle / "network.ban").write_text(ban.render() + "\n")
            (bundle / "instance.json").write_text(
                json.dumps(
                    {"x": str(x), "attractor": [str(c) for c in att["configs"]]},
                    sort_keys=True,
                )
            )

    structured = 0
    for ban in structured_acyclic_bans(4):
        structured += 1
        atts = attractors(ban)
        for bits in range(1 << ban.n):
            x = Config(ban.n, bits)
            reach = reachable_set(ban, x)
            for att in atts:
                if att["configs"][0].bits in reach:
                    run_instance(ban, x, att)
    randoms = 0
    for _ in range(1000):
        ban = random_acyclic_source_loop_ban(rng, rng.randint(2, 6))
        randoms += 1
        x = random_config(rng, ban.n)
        atts = attractors(ban)
        reach = reachable_set(ban, x)
        att = next(a for a in atts if a["configs"][0].bits in reach)
        run_instance(ban, x, att)
    elapsed = time.time() - t0
    searched = sum(tallies.values())
    persisted = len(list(tmp_path.iterdir()))
    ok = (
        structured > 1000
        and randoms >= 1000
        and tallies["INCONCLUSIVE"] == 0
        and persisted == bundles
        and elapsed < 600
    )
    announce(
        "C9",
        ok,
        f"{structured} structured + {randoms} random nets, {searched} searches: "
        f"holds {tallies['HOLDS']}, counterexamples {tallies['COUNTEREXAMPLE']} "
        f"(bundles {persisted}), inconclusive {tallies['INCONCLUSIVE']} {elapsed:.1f}s",
    )
    assert ok


def test_c10_core_identities():
    t0 = time.time()
    from bankit.core import bs, nabla, sb, step_bits

    from conftest import case_table_sign

    rng = random.Random(10_2026)
    failures = 0
    for b in (0, 1):
        failures += sb(bs(b)) != b
    for s in (-1, 1):
        failures += bs(sb(s)) != s
    for n in range(2, 9):
        for _ in range(3):
            ban = random_monotone_ban(rng, n)
            mask = rng.getrandbits(n)
            flip_set = {k + 1 for k in range(n) if (mask >> k) & 1}
            other = ban.flip_transform(flip_set)
            for bits in range(1 << n):
                x = Config(n, bits)
                for i in range(1, n + 1):
                    failures += x.flip(i).flip(i) != x
                    failures += sb(-nabla(x, i)) != x[i]
                    failures += step_bits(other, bits ^ mask, i) != step_bits(ban, bits, i) ^ mask
                for j in range(1, n + 1):
                    for i in range(1, n + 1):
                        failures += ban.local_sign(x, j, i) != case_table_sign(ban, x, j, i)
                for i in range(1, n + 1):
                    f = ban.function(i)
                    if not f.support:
                        continue
                    gi = ban.straight_function(i)
                    straightened = 0
                    for j in range(1, n + 1):
                        straightened |= ban.neighbour_input(x, j, i) << (j - 1)
                    failures += gi.eval_bits(straightened) != f.eval_bits(bits)
                    b = f.eval_bits(bits)
                    failures += not any(
                        ban.neighbour_input(x, j, i) == b for j in f.support
                    )
    elapsed = time.time() - t0
    ok = failures == 0 and elapsed < 120
    announce("C10", ok, f"{failures} failures across identity sweeps {elapsed:.1f}s")
    assert ok
