import random

import pytest

from bankit.core import Config, ban_from_texts, hd, parse_config
from bankit.dynamics import (
    Streamline,
    Trajectory,
    all_shortest_move_sequences,
    attractor_of,
    attractors,
    distance,
    hamiltonian_shortest,
    reachable_set,
    recurrent_configs,
    requires_reversibility,
    shortest_to_attractor,
    shortest_trajectory,
    step,
    transition_graph,
)
from bankit.errors import TooLarge, Unreachable
from bankit.gen import random_monotone_ban, random_config
from bankit.graph import classify


def test_step(ban5, ban4):
    x = parse_config("1111", 4)
    assert step(ban4, x, 4) == x  # ineffective update
    assert str(step(ban5, parse_config("10110", 5), 1)) == "00110"
    stable = parse_config("01000", 5)
    for i in range(1, 6):
        assert step(ban5, stable, i) == stable


def test_transition_graph(ban5):
    flip1 = ban_from_texts(["!x1"])
    tg = transition_graph(flip1)
    assert tg.node_count == 2
    assert tg.arcs() == [(0, 1, 1), (1, 1, 0)]
    tg5 = transition_graph(ban5)
    assert tg5.node_count == 32
    assert tg5.out_degree(parse_config("10110", 5)) == 3


def test_transition_graph_cap(monkeypatch):
    monkeypatch.setenv("BANKIT_MAX_N", "3")
    big = ban_from_texts(["x2", "x3", "x4", "x1"])
    with pytest.raises(TooLarge):
        transition_graph(big)
    monkeypatch.setenv("BANKIT_MAX_N", "4")
    assert transition_graph(big).node_count == 16


def test_shortest_trajectory_sample(ban5):
    x = parse_config("10110", 5)
    y = parse_config("01000", 5)
    traj = shortest_trajectory(ban5, x, y)
    assert traj.length == 8
    assert list(traj.moves) == [1, 3, 5, 1, 2, 4, 1, 5]
    assert [str(c) for c in traj.configs()] == [
        "10110", "00110", "00010", "00011", "10011",
        "11011", "11001", "01001", "01000",
    ]
    assert traj.is_valid(ban5)
    assert shortest_trajectory(ban5, x, x).length == 0


def test_shortest_unreachable():
    pos2 = ban_from_texts(["x2", "x1"])
    assert shortest_trajectory(pos2, parse_config("00", 2), parse_config("11", 2)) is None


def test_requires_reversibility(ban5):
    x = parse_config("10110", 5)
    y = parse_config("01000", 5)
    rec = requires_reversibility(ban5, x, y)
    assert rec["distance"] == 8
    assert rec["long"] and rec["all_shortest_long"]
    assert not rec["truncated"]
    z = step(ban5, x, 1)
    rec1 = requires_reversibility(ban5, x, z)
    assert rec1["distance"] == 1 and not rec1["long"]
    with pytest.raises(Unreachable):
        requires_reversibility(
            ban_from_texts(["x2", "x1"]), parse_config("00", 2), parse_config("11", 2)
        )


def test_long_iff_distance_exceeds_hamming():
    # any move sequence without repeats has length |HD|, giving the oracle
    rng = random.Random(11)
    for _ in range(60):
        ban = random_monotone_ban(rng, rng.randint(2, 5))
        x = random_config(rng, ban.n)
        reach = sorted(reachable_set(ban, x))
        y = Config(ban.n, rng.choice(reach))
        rec = requires_reversibility(ban, x, y)
        assert rec["all_shortest_long"] == (rec["distance"] > len(hd(x, y)))


def test_all_shortest_enumeration(ban4):
    x = parse_config("1100", 4)
    y = parse_config("1111", 4)
    seqs, truncated = all_shortest_move_sequences(ban4, x, y)
    assert seqs == [(3, 4), (4, 3)]
    assert not truncated


def test_attractors_samples(ban4):
    atts = attractors(ban4)
    assert all(a["kind"] == "stable" for a in atts)
    configs = {str(a["configs"][0]) for a in atts}
    assert configs == {"0000", "0101", "1011", "1111"}
    pos3 = ban_from_texts(["x3", "x1", "x2"])
    atts3 = attractors(pos3)
    assert [str(a["configs"][0]) for a in atts3] == ["000", "111"]
    neg3 = ban_from_texts(["!x3", "x1", "x2"])
    attsn = attractors(neg3)
    assert len(attsn) == 1 and attsn[0]["kind"] == "cyclic"
    assert len(attsn[0]["configs"]) == 6


def test_attractors_against_definitional_oracle():
    rng = random.Random(12)
    for _ in range(25):
        ban = random_monotone_ban(rng, rng.randint(2, 5))
        size = 1 << ban.n
        reach = {b: reachable_set(ban, Config(ban.n, b)) for b in range(size)}
        recurrent = {b for b in range(size) if all(b in reach[c] for c in reach[b])}
        assert recurrent == recurrent_configs(ban)
        for att in attractors(ban):
            members = {c.bits for c in att["configs"]}
            some = next(iter(members))
            assert members == {c for c in reach[some] if c in recurrent}


def test_shortest_to_attractor(ban5):
    atts = attractors(ban5)
    x = parse_config("10110", 5)
    stable_y = parse_config("01000", 5)
    att = attractor_of(ban5, stable_y)
    assert att is not None
    traj = shortest_to_attractor(ban5, x, att)
    assert traj.is_valid(ban5)
    assert traj.destination().bits in {c.bits for c in att["configs"]}
    inside = shortest_to_attractor(ban5, stable_y, att)
    assert inside.length == 0
    del atts


def test_shortest_to_attractor_path_bound():
    path = ban_from_texts(["x1", "x1", "x2", "x3"])
    atts = attractors(path)
    for bits in range(16):
        x = Config(4, bits)
        reach = reachable_set(path, x)
        for att in atts:
            if att["configs"][0].bits in reach:
                assert shortest_to_attractor(path, x, att).length <= 4


def test_hamiltonian():
    flip1 = ban_from_texts(["!x1"])
    traj = hamiltonian_shortest(flip1)
    assert traj is not None and traj.length == 1
    nice = ban_from_texts(["x1", "x1", "x2", "x2"])
    assert hamiltonian_shortest(nice) is None
    with pytest.raises(TooLarge):
        hamiltonian_shortest(ban_from_texts(["x1"] * 5))


def test_hamiltonian_instances_are_not_nice():
    rng = random.Random(13)
    for _ in range(200):
        ban = random_monotone_ban(rng, 3)
        traj = hamiltonian_shortest(ban)
        if traj is not None:
            assert not classify(ban)["nice"]
            assert ban.unstable_bits(traj.config_bits[0]).bit_count() == 1


def test_trajectory_json_round_trip(ban5):
    x = parse_config("10110", 5)
    traj = shortest_trajectory(ban5, x, parse_config("01000", 5))
    again = Trajectory.from_json(traj.to_json(), ban5)
    assert again.moves == traj.moves
    assert again.config_bits == traj.config_bits


def test_trajectory_rejects_stable_moves(ban5):
    x = parse_config("01000", 5)  # stable
    with pytest.raises(ValueError):
        Trajectory.from_moves(ban5, x, [1])


def test_streamline(ban4):
    line = Streamline(ban4, parse_config("1100", 4), [4, 3, 4])
    assert [str(line.config(t)) for t in range(4)] == ["1100", "1101", "1111", "1111"]
    assert line.length == 3


def test_distance(ban5):
    assert distance(ban5, parse_config("10110", 5), parse_config("01000", 5)) == 8
    assert distance(ban_from_texts(["x2", "x1"]), parse_config("00", 2), parse_config("11", 2)) is None


def test_transition_graph_dot():
    flip1 = ban_from_texts(["!x1"])
    dot = transition_graph(flip1).to_dot()
    assert '"0" -> "1" [label="1"]' in dot
