"""Signed interaction graph and the static analyses built on it: walk
signs, niceness, totally-positive reformulation, depth levels, favour
sets and the favour graph."""

from .errors import (
    CyclicBeyondLoops,
    NonMonotoneArc,
    NonMonotoneGraph,
    NotNice,
    NotStronglyConnected,
)
from .core import bs

CONTRADICTORY = "contradictory"


class SignedDigraph:
    """Digraph on nodes 1..n with a frozenset of signs per arc.

    An arc labeled {1} or {-1} has a constant sign; {1, -1} marks an input
    whose punctual influence flips sign across configurations.
    """

    def __init__(self, n, sign_sets):
        self.n = n
        self.sign_sets = dict(sign_sets)
        self.out_adj = {i: [] for i in range(1, n + 1)}
        self.in_adj = {i: [] for i in range(1, n + 1)}
        for (j, i) in sorted(self.sign_sets):
            self.out_adj[j].append(i)
            self.in_adj[i].append(j)

    def arcs(self):
        return sorted(self.sign_sets)

    def has_ambivalent_arc(self):
        return any(len(s) == 2 for s in self.sign_sets.values())

    def sign(self, j, i):
        s = self.sign_sets.get((j, i))
        if s is None:
            return None
        if len(s) == 2:
            raise NonMonotoneArc(f"arc ({j}, {i}) carries both signs")
        return next(iter(s))

    def drop_loops(self):
        return SignedDigraph(
            self.n, {a: s for a, s in self.sign_sets.items() if a[0] != a[1]}
        )


def interaction_graph(ban):
    signs = {}
    for i in range(1, ban.n + 1):
        for j in ban.function(i).support:
            signs[(j, i)] = ban.arc_sign_set(j, i)
    return SignedDigraph(ban.n, signs)


def walk_sign_sets(g, j):
    """For each node i, the set of signs realized by walks of length >= 1
    from j to i, via reachability over (node, sign) pairs."""
    if g.has_ambivalent_arc():
        raise NonMonotoneGraph("walk signs need constant arc signs")
    reached = set()
    frontier = []
    for i in g.out_adj[j]:
        state = (i, g.sign(j, i))
        if state not in reached:
            reached.add(state)
            frontier.append(state)
    while frontier:
        node, s = frontier.pop()
        for k in g.out_adj[node]:
            state = (k, s * g.sign(node, k))
            if state not in reached:
                reached.add(state)
                frontier.append(state)
    out = {i: set() for i in range(1, g.n + 1)}
    for node, s in reached:
        out[node].add(s)
    return {i: frozenset(s) for i, s in out.items()}


def path_sign_star(g, j, i):
    """Summary of walk signs from j to i: 0 when no walk, +1/-1 when all
    walks agree, CONTRADICTORY otherwise."""
    signs = walk_sign_sets(g, j)[i]
    if not signs:
        return 0
    if len(signs) == 2:
        return CONTRADICTORY
    return next(iter(signs))


def all_walk_signs(g):
    """walk_sign_sets for every source node, as a dict of dicts."""
    return {j: walk_sign_sets(g, j) for j in range(1, g.n + 1)}


def classify(ban):
    """Monotone / nice / totally positive classification with a witness
    explaining the first failed level."""
    monotone, witness = ban.is_monotone()
    if not monotone:
        x, y, j, i = witness
        return {
            "monotone": False,
            "nice": False,
            "totally_positive": False,
            "witness": f"arc ({j}, {i}) has opposite punctual signs at {x} and {y}",
        }
    g = interaction_graph(ban)
    for j in range(1, ban.n + 1):
        signs = walk_sign_sets(g, j)
        for i in range(1, ban.n + 1):
            if len(signs[i]) == 2:
                return {
                    "monotone": True,
                    "nice": False,
                    "totally_positive": False,
                    "witness": f"contradictory walks from {j} to {i}",
                }
    for (j, i), s in sorted(g.sign_sets.items()):
        if s == frozenset({-1}):
            return {
                "monotone": True,
                "nice": True,
                "totally_positive": False,
                "witness": f"arc ({j}, {i}) is negative",
            }
    return {"monotone": True, "nice": True, "totally_positive": True, "witness": None}


def tarjan_scc(nodes, successors):
    """Iterative Tarjan; returns SCCs in reverse topological order."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    sccs = []
    counter = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


def is_strongly_connected(g):
    nodes = list(range(1, g.n + 1))
    sccs = tarjan_scc(nodes, lambda v: g.out_adj[v])
    return len(sccs) == 1


def reformulate_totally_positive(ban):
    """Relabel states so that every influence becomes positive; requires a
    nice, strongly connected network.  Returns (new_ban, flip_set)."""
    cls = classify(ban)
    if not cls["nice"]:
        raise NotNice(cls["witness"] or "network is not nice")
    g = interaction_graph(ban)
    if not is_strongly_connected(g):
        raise NotStronglyConnected("interaction graph is not strongly connected")
    base = 1
    signs = walk_sign_sets(g, base)
    flip_set = frozenset(i for i in range(1, ban.n + 1) if signs[i] == frozenset({-1}))
    return ban.flip_transform(flip_set), flip_set


def depths(g, grounds):
    """Depth of each node reachable from the grounds: length of the longest
    loop-free directed path from any ground node.  The graph with loops
    removed must be acyclic on the reachable part."""
    grounds = set(grounds)
    plain = g.drop_loops()
    reachable = set(grounds)
    frontier = list(grounds)
    while frontier:
        v = frontier.pop()
        for w in plain.out_adj[v]:
            if w not in reachable:
                reachable.add(w)
                frontier.append(w)
    order = []
    marks = {}
    for v in sorted(reachable):
        if v in marks:
            continue
        stack = [(v, iter(plain.out_adj[v]))]
        marks[v] = "open"
        while stack:
            node, it = stack[-1]
            advanced = False
            for w in it:
                if w not in reachable:
                    continue
                state = marks.get(w)
                if state == "open":
                    raise CyclicBeyondLoops(
                        f"cycle through {w} beyond loops prevents depth levels"
                    )
                if state is None:
                    marks[w] = "open"
                    stack.append((w, iter(plain.out_adj[w])))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            marks[node] = "done"
            order.append(node)
    order.reverse()
    omega = {v: 0 for v in grounds}
    for v in order:
        base = omega.get(v)
        if base is None:
            continue
        for w in plain.out_adj[v]:
            if w in reachable and omega.get(w, -1) < base + 1:
                omega[w] = base + 1
    return {"grounds": frozenset(grounds), "omega": omega}


def towards(y, i):
    """Sign of the move of automaton i towards configuration y."""
    return bs(y[i])


def favour_sets(ban, y):
    """Partition the arcs by whether the source sitting in its destination
    state pushes the sink towards its own destination state."""
    a_plus = set()
    a_minus = set()
    for i in range(1, ban.n + 1):
        for j in ban.function(i).support:
            sign = ban.arc_sign(j, i)
            if sign == towards(y, j) * towards(y, i):
                a_plus.add((j, i))
            else:
                a_minus.add((j, i))
    return {"a_plus": frozenset(a_plus), "a_minus": frozenset(a_minus)}


def favour_graph(ban, y):
    """The favour graph: keep favourable arcs, reverse disfavourable ones.

    Returns a dict with the graph's adjacency, the reversed arc set and the
    underlying favour partition.
    """
    fav = favour_sets(ban, y)
    arcs = set(fav["a_plus"])
    reversed_arcs = set()
    for (j, i) in fav["a_minus"]:
        arcs.add((i, j))
        reversed_arcs.add((i, j))
    out_adj = {i: [] for i in range(1, ban.n + 1)}
    for (j, i) in sorted(arcs):
        out_adj[j].append(i)
    return {
        "n": ban.n,
        "arcs": frozenset(arcs),
        "reversed_arcs": frozenset(reversed_arcs),
        "out_adj": out_adj,
        "a_plus": fav["a_plus"],
        "a_minus": fav["a_minus"],
    }


def simple_cycles(n, out_adj):
    """All simple directed cycles (as node tuples, smallest node first).
    Plain DFS enumeration; intended for small analysis graphs."""
    cycles = []
    for start in range(1, n + 1):
        stack = [(start, [start])]
        while stack:
            node, path = stack.pop()
            for w in out_adj[node]:
                if w < start:
                    continue
                if w == start:
                    cycles.append(tuple(path))
                elif w not in path:
                    stack.append((w, path + [w]))
    return sorted(cycles)


def favour_cycle_findings(ban, y):
    """Scan the cycles of the interaction graph against the favour
    partition: report cycles made solely of disfavourable arcs, and check
    that a cycle's sign equals the parity of its disfavourable arc count."""
    g = interaction_graph(ban)
    fav = favour_sets(ban, y)
    a_minus = fav["a_minus"]
    all_minus = []
    parity_mismatches = []
    for cyc in simple_cycles(g.n, g.out_adj):
        arcs = [(cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        minus_count = sum(1 for a in arcs if a in a_minus)
        sign = 1
        for a in arcs:
            sign *= g.sign(*a)
        if minus_count == len(arcs):
            all_minus.append(cyc)
        if sign != (-1) ** minus_count:
            parity_mismatches.append(cyc)
    return {"all_minus_cycles": all_minus, "parity_mismatches": parity_mismatches}


def graph_to_dot(g, name="G", dashed_arcs=()):
    dashed = set(dashed_arcs)
    lines = [f"digraph {name} {{"]
    for v in range(1, g.n + 1):
        lines.append(f"  {v};")
    for (j, i) in g.arcs():
        s = g.sign_sets[(j, i)]
        label = "+" if s == frozenset({1}) else "-" if s == frozenset({-1}) else "+/-"
        style = ', style=dashed' if (j, i) in dashed else ""
        lines.append(f'  {j} -> {i} [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def favour_graph_to_dot(ban, y, name="H"):
    h = favour_graph(ban, y)
    g = interaction_graph(ban)
    lines = [f"digraph {name} {{"]
    for v in range(1, h["n"] + 1):
        lines.append(f"  {v};")
    for (j, i) in sorted(h["arcs"]):
        if (j, i) in h["reversed_arcs"]:
            sign = g.sign(i, j)
            label = "+" if sign == 1 else "-"
            lines.append(f'  {j} -> {i} [label="{label}", style=dashed];')
        else:
            sign = g.sign(j, i)
            label = "+" if sign == 1 else "-"
            lines.append(f'  {j} -> {i} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
