"""Asynchronous dynamics: update steps, trajectories and streamlines, the
one-step transition graph, shortest trajectories by breadth-first search,
attractors as terminal strongly connected components, and the search for
trajectories that sweep the whole configuration space.

Everything here works on configurations packed as ints; ties between
equally short trajectories are always broken towards the lexicographically
smallest move sequence (smallest automaton id first), which keeps outputs
byte-stable.
"""

import json
import os

from .core import Config, step_bits
from .errors import TooLarge, Unreachable
from .graph import tarjan_scc

DEFAULT_MAX_N = 20
ENUMERATION_CAP = 10**6


def _max_n():
    return int(os.environ.get("BANKIT_MAX_N", DEFAULT_MAX_N))


def _check_cap(n):
    cap = _max_n()
    if n > cap:
        raise TooLarge(f"n={n} exceeds the configuration-space cap {cap}")


def step(ban, x, i):
    """Update automaton i once: flip when unstable, identity otherwise."""
    return Config(x.n, step_bits(ban, x.bits, i))


class Trajectory:
    """A configuration plus an ordered sequence of effective moves."""

    __slots__ = ("n", "x0_bits", "moves", "config_bits")

    def __init__(self, n, x0_bits, moves, config_bits):
        self.n = n
        self.x0_bits = x0_bits
        self.moves = tuple(moves)
        self.config_bits = tuple(config_bits)

    @classmethod
    def from_moves(cls, ban, x0, moves):
        bits = x0.bits
        configs = [bits]
        for t, i in enumerate(moves):
            f = ban.function(i)
            if f.eval_bits(bits) == ((bits >> (i - 1)) & 1):
                raise ValueError(f"move {t}: automaton {i} is stable")
            bits ^= 1 << (i - 1)
            configs.append(bits)
        return cls(x0.n, x0.bits, moves, configs)

    @property
    def length(self):
        return len(self.moves)

    def config(self, t):
        return Config(self.n, self.config_bits[t])

    def configs(self):
        return [Config(self.n, b) for b in self.config_bits]

    def destination(self):
        return Config(self.n, self.config_bits[-1])

    def is_valid(self, ban):
        bits = self.x0_bits
        for t, i in enumerate(self.moves):
            if bits != self.config_bits[t]:
                return False
            f = ban.function(i)
            if f.eval_bits(bits) == ((bits >> (i - 1)) & 1):
                return False
            bits ^= 1 << (i - 1)
        return bits == self.config_bits[-1]

    def mover_counts(self):
        counts = {}
        for i in self.moves:
            counts[i] = counts.get(i, 0) + 1
        return counts

    def to_json(self):
        return json.dumps(
            {
                "x0": str(self.config(0)),
                "moves": list(self.moves),
                "configs": [str(c) for c in self.configs()],
            }
        )

    @classmethod
    def from_json(cls, text, ban):
        data = json.loads(text)
        x0 = Config.from_str(data["x0"], ban.n)
        traj = cls.from_moves(ban, x0, data["moves"])
        if [str(c) for c in traj.configs()] != data["configs"]:
            raise ValueError("configuration sequence does not match the moves")
        return traj

    def __repr__(self):
        return f"Trajectory({self.config(0)}, moves={list(self.moves)})"


class Streamline:
    """A configuration plus updates that need not be effective."""

    __slots__ = ("n", "x0_bits", "updates", "config_bits")

    def __init__(self, ban, x0, updates):
        bits = x0.bits
        configs = [bits]
        for i in updates:
            bits = step_bits(ban, bits, i)
            configs.append(bits)
        self.n = x0.n
        self.x0_bits = x0.bits
        self.updates = tuple(updates)
        self.config_bits = tuple(configs)

    @property
    def length(self):
        return len(self.updates)

    def config(self, t):
        return Config(self.n, self.config_bits[t])

    def destination(self):
        return Config(self.n, self.config_bits[-1])


def streamline_of(ban, traj):
    return Streamline(ban, traj.config(0), traj.moves)


class TransitionGraph:
    """The full one-step asynchronous relation over 2^n configurations.

    Successors are generated on demand; `arcs()` materializes the relation
    for small n (DOT export and direct inspection).
    """

    def __init__(self, ban):
        _check_cap(ban.n)
        self.ban = ban
        self.n = ban.n
        self.node_count = 1 << ban.n

    def successors(self, bits):
        out = []
        mask = self.ban.unstable_bits(bits)
        k = 0
        while mask >> k:
            if (mask >> k) & 1:
                out.append((k + 1, bits ^ (1 << k)))
            k += 1
        return out

    def out_degree(self, x):
        return self.ban.unstable_bits(x.bits).bit_count()

    def arcs(self):
        out = []
        for bits in range(self.node_count):
            for i, nxt in self.successors(bits):
                out.append((bits, i, nxt))
        return out

    def to_dot(self, name="T"):
        lines = [f"digraph {name} {{"]
        for bits in range(self.node_count):
            lines.append(f'  "{Config(self.n, bits)}";')
        for bits, i, nxt in self.arcs():
            lines.append(
                f'  "{Config(self.n, bits)}" -> "{Config(self.n, nxt)}" [label="{i}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


def transition_graph(ban):
    return TransitionGraph(ban)


def _distances_to(ban, targets):
    """BFS over reversed transition arcs from a set of target ints."""
    _check_cap(ban.n)
    n = ban.n
    dist = {t: 0 for t in targets}
    frontier = list(targets)
    while frontier:
        nxt = []
        for w in frontier:
            d = dist[w]
            for k in range(n):
                z = w ^ (1 << k)
                if z in dist:
                    continue
                f = ban.function(k + 1)
                # z -> w is a transition iff automaton k+1 is unstable at z
                if f.eval_bits(z) == ((w >> k) & 1):
                    dist[z] = d + 1
                    nxt.append(z)
        frontier = nxt
    return dist


def _lex_walk(ban, x_bits, dist):
    """Greedy forward walk along strictly decreasing distances, smallest
    automaton first; yields the lexicographically smallest move sequence."""
    moves = []
    configs = [x_bits]
    bits = x_bits
    d = dist[bits]
    while d > 0:
        mask = ban.unstable_bits(bits)
        for k in range(ban.n):
            if (mask >> k) & 1 and dist.get(bits ^ (1 << k), -1) == d - 1:
                moves.append(k + 1)
                bits ^= 1 << k
                configs.append(bits)
                d -= 1
                break
        else:
            raise AssertionError("distance field has no descending move")
    return moves, configs


def shortest_trajectory(ban, x, y):
    """Lexicographically smallest shortest trajectory from x to y, or None
    when y is unreachable."""
    dist = _distances_to(ban, [y.bits])
    if x.bits not in dist:
        return None
    moves, configs = _lex_walk(ban, x.bits, dist)
    return Trajectory(ban.n, x.bits, moves, configs)


def distance(ban, x, y):
    dist = _distances_to(ban, [y.bits])
    return dist.get(x.bits)


def reachable_set(ban, x):
    _check_cap(ban.n)
    seen = {x.bits}
    frontier = [x.bits]
    while frontier:
        bits = frontier.pop()
        mask = ban.unstable_bits(bits)
        k = 0
        while mask >> k:
            if (mask >> k) & 1:
                z = bits ^ (1 << k)
                if z not in seen:
                    seen.add(z)
                    frontier.append(z)
            k += 1
    return seen


def all_shortest_move_sequences(ban, x, y, cap=ENUMERATION_CAP):
    """All shortest move sequences from x to y (sorted lexicographically),
    truncated at `cap`; returns (sequences, truncated)."""
    dist = _distances_to(ban, [y.bits])
    if x.bits not in dist:
        raise Unreachable(f"{y} is not reachable from {x}")
    sequences = []
    truncated = False
    stack = [(x.bits, [])]
    while stack:
        bits, prefix = stack.pop()
        d = dist[bits]
        if d == 0:
            sequences.append(tuple(prefix))
            if len(sequences) >= cap:
                truncated = True
                break
            continue
        mask = ban.unstable_bits(bits)
        # push in reverse so the smallest automaton is explored first
        for k in range(ban.n - 1, -1, -1):
            if (mask >> k) & 1 and dist.get(bits ^ (1 << k), -1) == d - 1:
                stack.append((bits ^ (1 << k), prefix + [k + 1]))
    return sequences, truncated


def requires_reversibility(ban, x, y):
    """Distance plus whether shortest trajectories must revisit movers:
    `long` inspects the lexicographically smallest shortest trajectory,
    `all_shortest_long` enumerates all of them."""
    dist = _distances_to(ban, [y.bits])
    if x.bits not in dist:
        raise Unreachable(f"{y} is not reachable from {x}")
    d = dist[x.bits]
    moves, _ = _lex_walk(ban, x.bits, dist)
    long = any(v >= 2 for v in _counts(moves).values())
    sequences, truncated = all_shortest_move_sequences(ban, x, y)
    all_long = all(any(v >= 2 for v in _counts(seq).values()) for seq in sequences)
    return {
        "distance": d,
        "long": long,
        "all_shortest_long": all_long,
        "shortest_count": len(sequences),
        "truncated": truncated,
    }


def _counts(moves):
    counts = {}
    for i in moves:
        counts[i] = counts.get(i, 0) + 1
    return counts


def attractors(ban):
    """Terminal strongly connected components of the transition graph.

    Returns a list of dicts {"configs": [Config...], "kind": "stable"|"cyclic"}
    sorted by the smallest member, so output order is reproducible.
    """
    _check_cap(ban.n)
    n = ban.n
    node_count = 1 << n

    def succs(bits):
        mask = ban.unstable_bits(bits)
        out = []
        k = 0
        while mask >> k:
            if (mask >> k) & 1:
                out.append(bits ^ (1 << k))
            k += 1
        return out

    sccs = tarjan_scc(range(node_count), succs)
    result = []
    for comp in sccs:
        members = set(comp)
        terminal = True
        for bits in comp:
            if any(z not in members for z in succs(bits)):
                terminal = False
                break
        if not terminal:
            continue
        ordered = sorted(members)
        kind = "stable" if len(ordered) == 1 and ban.unstable_bits(ordered[0]) == 0 else "cyclic"
        result.append({"configs": [Config(n, b) for b in ordered], "kind": kind})
    result.sort(key=lambda a: a["configs"][0].bits)
    return result


def recurrent_configs(ban):
    out = set()
    for a in attractors(ban):
        out.update(c.bits for c in a["configs"])
    return out


def attractor_of(ban, y):
    for a in attractors(ban):
        if any(c.bits == y.bits for c in a["configs"]):
            return a
    return None


def shortest_to_attractor(ban, x, attractor):
    """Shortest trajectory from x to the nearest member of the attractor
    (multi-target BFS, lexicographic tie-breaking)."""
    targets = [c.bits for c in attractor["configs"]]
    dist = _distances_to(ban, targets)
    if x.bits not in dist:
        raise Unreachable(f"attractor is not reachable from {x}")
    moves, configs = _lex_walk(ban, x.bits, dist)
    return Trajectory(ban.n, x.bits, moves, configs)


def hamiltonian_shortest(ban):
    """A shortest trajectory passing through every configuration, if one
    exists.  A shortest trajectory never revisits a configuration, so a
    source-destination pair at distance 2^n - 1 realizes one."""
    if ban.n > 4:
        raise TooLarge("whole-space trajectory search is capped at n = 4")
    size = 1 << ban.n
    for y_bits in range(size):
        dist = _distances_to(ban, [y_bits])
        for x_bits in range(size):
            if dist.get(x_bits) == size - 1:
                moves, configs = _lex_walk(ban, x_bits, dist)
                assert len(set(configs)) == size
                return Trajectory(ban.n, x_bits, moves, configs)
    return None
