import random

from bankit.causality import (
    anti_graph_to_dot,
    cause_union,
    g_tau,
    kappa,
    tau_forest,
    verify_causality_lemmas,
)
from bankit.core import ban_from_texts, parse_config
from bankit.dynamics import Trajectory
from bankit.gen import random_config, random_monotone_ban, random_nice_ban, random_trajectory
from bankit.graph import interaction_graph


def sample_traj(ban5):
    x = parse_config("10110", 5)
    return Trajectory.from_moves(ban5, x, [1, 3, 5, 1, 2, 4, 1, 5])


def test_tau_forest_sample(ban5):
    forest = tau_forest(ban5, sample_traj(ban5))
    kinds = [(e["kind"], e["tau"]) for e in forest.entries]
    assert kinds == [
        ("root", None),
        ("caused", 0),
        ("root", None),
        ("caused", 2),
        ("caused", 3),
        ("caused", 1),
        ("caused", 5),
        ("caused", 6),
    ]
    assert forest.roots == [0, 2]
    assert len(forest.trees()) == 2
    assert forest.is_strongly_acyclic()


def test_first_step_is_root(ban5):
    traj = Trajectory.from_moves(ban5, parse_config("10110", 5), [1])
    forest = tau_forest(ban5, traj)
    assert forest.entries[0]["kind"] == "root"


def test_undefined_cause_is_flagged():
    flip1 = ban_from_texts(["!x1"])
    traj = Trajectory.from_moves(flip1, parse_config("0", 1), [1, 1])
    forest = tau_forest(flip1, traj)
    assert forest.entries[1]["kind"] == "undefined"
    assert forest.roots == [0]


def _tau_oracle(ban, traj, t):
    """Direct reading of the cause definition, scanned independently."""
    i = traj.moves[t]
    candidates = []
    for t_prime in range(t):
        bits = traj.config_bits[t_prime]
        stable = ban.function(i).eval_bits(bits) == ((bits >> (i - 1)) & 1)
        if stable and all(traj.moves[s] != i for s in range(t_prime + 1, t)):
            candidates.append(t_prime)
    if candidates:
        return ("caused", max(candidates))
    if all(traj.moves[s] != i for s in range(t)):
        return ("root", None)
    return ("undefined", None)


def test_tau_against_definition_oracle():
    rng = random.Random(21)
    for _ in range(150):
        ban = random_monotone_ban(rng, rng.randint(2, 5))
        traj = random_trajectory(rng, ban, random_config(rng, ban.n), 20)
        forest = tau_forest(ban, traj)
        for e in forest.entries:
            assert (e["kind"], e["tau"]) == _tau_oracle(ban, traj, e["t"])


def test_root_count_bound():
    rng = random.Random(22)
    for _ in range(80):
        ban = random_monotone_ban(rng, 4)
        x = random_config(rng, 4)
        traj = random_trajectory(rng, ban, x, 15)
        forest = tau_forest(ban, traj)
        assert len(forest.roots) <= ban.unstable_bits(x.bits).bit_count()


def test_g_tau(ban5):
    short = Trajectory.from_moves(ban5, parse_config("10110", 5), [1])
    assert g_tau(ban5, short).arcs() == []
    g = g_tau(ban5, sample_traj(ban5))
    assert (1, 3) in g.sign_sets
    arcs_of_g = set(interaction_graph(ban5).arcs())
    assert set(g.arcs()) <= arcs_of_g


def test_g_tau_subgraph_random():
    rng = random.Random(23)
    for _ in range(150):
        ban = random_monotone_ban(rng, rng.randint(2, 6))
        traj = random_trajectory(rng, ban, random_config(rng, ban.n), 25)
        g = g_tau(ban, traj)
        assert set(g.arcs()) <= set(interaction_graph(ban).arcs())


def test_kappa(ban5):
    traj = sample_traj(ban5)
    assert kappa(ban5, traj, 0) == frozenset()
    # a conjunction gate: both raised inputs are causes of the output move
    gate = ban_from_texts(["!x3", "!x3", "x1 & x2"])
    gt = Trajectory.from_moves(gate, parse_config("000", 3), [1, 2, 3])
    assert kappa(gate, gt, 2) == frozenset({0, 1})
    for t in range(traj.length):
        assert kappa(ban5, traj, t) <= cause_union(ban5, traj, t)


def test_cause_union_contains_tau(ban5):
    traj = sample_traj(ban5)
    forest = tau_forest(ban5, traj)
    for e in forest.entries:
        if e["tau"] is not None:
            assert e["tau"] in cause_union(ban5, traj, e["t"], forest)
    root_empty = Trajectory.from_moves(ban5, parse_config("10110", 5), [1])
    assert cause_union(ban5, root_empty, 0) == frozenset()


def test_verify_on_sample(ban5):
    report = verify_causality_lemmas(ban5, sample_traj(ban5))
    assert all(rec["status"] != "violated" for rec in report.values())
    assert report["cause-arc-sign"]["status"] == "verified"
    assert report["branch-repeat-move"]["checked"] == 1


def test_verify_vacuous_on_short_trajectory(ban5):
    traj = Trajectory.from_moves(ban5, parse_config("10110", 5), [1])
    report = verify_causality_lemmas(ban5, traj)
    assert all(rec["status"] != "violated" for rec in report.values())


def test_verify_random_suite():
    rng = random.Random(24)
    for _ in range(250):
        n = rng.randint(2, 6)
        ban = random_nice_ban(rng, n) if rng.random() < 0.5 else random_monotone_ban(rng, n)
        traj = random_trajectory(rng, ban, random_config(rng, n), 25)
        report = verify_causality_lemmas(ban, traj)
        bad = {k: v for k, v in report.items() if v["status"] == "violated"}
        assert not bad, (ban.render(), traj.moves, bad)


def test_anti_graph_dot(ban5):
    traj = sample_traj(ban5)
    dot = anti_graph_to_dot(traj, tau_forest(ban5, traj))
    assert 's0 [label="0:1"]' in dot
    assert "s0 -> s1" in dot
