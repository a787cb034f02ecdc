"""Cause tracing along a trajectory.

For every move we locate the most recent step whose move destabilized the
mover (its tau-cause), or mark it as a root move (possible from the very
start) or as cause-undefined (the mover was never stable since its own
previous move; surfaced rather than guessed).  A second, counterfactual
notion (kappa) collects the earlier moves whose undoing would re-stabilize
the mover.  The verifier replays the structural consequences of both
notions on a concrete trajectory and reports violations as data.
"""

from .core import Config, nabla_bit
from .graph import classify, interaction_graph, walk_sign_sets, SignedDigraph


class TauForest:
    def __init__(self, entries):
        self.entries = entries  # one dict per time step
        self.parent = {e["t"]: e["tau"] for e in entries if e["kind"] == "caused"}
        self.roots = [e["t"] for e in entries if e["kind"] == "root"]
        self.undefined = [e["t"] for e in entries if e["kind"] == "undefined"]
        self._components = None

    def mover(self, t):
        return self.entries[t]["mover"]

    def tau(self, t):
        return self.parent.get(t)

    def ancestors(self, t):
        s = self.parent.get(t)
        while s is not None:
            yield s
            s = self.parent.get(s)

    def arcs(self):
        return sorted((tau, t) for t, tau in self.parent.items())

    def components(self):
        """Connected components of the anti-graph, each sorted; the head
        (smallest step) is a root step or an undefined-cause step."""
        if self._components is None:
            head = {}
            for e in self.entries:
                t = e["t"]
                p = self.parent.get(t)
                head[t] = t if p is None else head[p]
            groups = {}
            for t, h in head.items():
                groups.setdefault(h, []).append(t)
            self._components = [sorted(groups[h]) for h in sorted(groups)]
        return self._components

    def trees(self):
        return [c for c in self.components() if c[0] in set(self.roots)]

    def is_strongly_acyclic(self):
        # each step has at most one parent and parents precede children,
        # so the undirected anti-graph can never close a cycle
        return all(tau < t for t, tau in self.parent.items())


def tau_forest(ban, traj):
    entries = []
    stable_cache = {}

    def stable(i, t):
        key = (i, t)
        if key not in stable_cache:
            bits = traj.config_bits[t]
            stable_cache[key] = ban.function(i).eval_bits(bits) == ((bits >> (i - 1)) & 1)
        return stable_cache[key]

    last_move = {}
    for t, i in enumerate(traj.moves):
        prev = last_move.get(i)
        lo = 0 if prev is None else prev + 1
        tau = None
        for s in range(t - 1, lo - 1, -1):
            if stable(i, s):
                tau = s
                break
        if tau is not None:
            entries.append({"t": t, "mover": i, "kind": "caused", "tau": tau})
        elif prev is None:
            entries.append({"t": t, "mover": i, "kind": "root", "tau": None})
        else:
            entries.append({"t": t, "mover": i, "kind": "undefined", "tau": None})
        last_move[i] = t
    forest = TauForest(entries)
    assert forest.is_strongly_acyclic()
    u0 = ban.unstable_bits(traj.config_bits[0]).bit_count()
    assert len(forest.roots) <= u0, "more root steps than initially unstable automata"
    return forest


def g_tau(ban, traj, forest=None):
    """Digraph of mover pairs (cause automaton -> moved automaton); labels
    taken from the interaction graph (an empty label marks a pair that is
    not an interaction arc, which the verifier reports)."""
    if forest is None:
        forest = tau_forest(ban, traj)
    signs = {}
    for t, tau in forest.parent.items():
        arc = (traj.moves[tau], traj.moves[t])
        signs[arc] = ban.arc_sign_set(*arc)
    return SignedDigraph(ban.n, signs)


def kappa(ban, traj, t1):
    """Steps whose move the move at t1 depends on: undoing them right
    before t1 would leave the mover stable."""
    i = traj.moves[t1]
    x1 = traj.config_bits[t1]
    out = set()
    for t in range(t1):
        j = traj.moves[t]
        if any(traj.moves[s] == j for s in range(t + 1, t1)):
            continue
        z = x1 ^ (1 << (j - 1))
        if ban.function(i).eval_bits(z) == ((z >> (i - 1)) & 1):
            out.add(t)
    return frozenset(out)


def cause_union(ban, traj, t, forest=None):
    if forest is None:
        forest = tau_forest(ban, traj)
    out = set(kappa(ban, traj, t))
    tau = forest.tau(t)
    if tau is not None:
        out.add(tau)
    return frozenset(out)


def _status(checked, witnesses):
    if checked == 0:
        return "not_applicable"
    return "violated" if witnesses else "verified"


def verify_causality_lemmas(ban, traj):
    """Check, on one trajectory, that every structural consequence of the
    cause relation holds; violations come back as witness records."""
    forest = tau_forest(ban, traj)
    g = interaction_graph(ban)
    cls = classify(ban)
    monotone = cls["monotone"]
    nice = cls["nice"]
    sign_cache = {}

    def signs_from(j):
        if j not in sign_cache:
            sign_cache[j] = walk_sign_sets(g, j) if monotone else None
        return sign_cache[j]

    reach_cache = {}

    def reaches(a, b):
        if a not in reach_cache:
            seen = set()
            frontier = [a]
            while frontier:
                v = frontier.pop()
                for w in g.out_adj[v]:
                    if w not in seen:
                        seen.add(w)
                        frontier.append(w)
            reach_cache[a] = seen
        return b in reach_cache[a]

    report = {}

    # cause pairs carry the exact punctual sign of the unlocking move
    checked = 0
    witnesses = []
    for t, t1 in sorted(forest.parent.items()):
        j = traj.moves[t1]
        i = traj.moves[t]
        x1 = traj.config_bits[t1]
        checked += 1
        grad_j = nabla_bit((x1 >> (j - 1)) & 1)
        grad_i1 = nabla_bit((x1 >> (i - 1)) & 1)
        grad_i2 = nabla_bit((traj.config_bits[t] >> (i - 1)) & 1)
        s = ban.local_sign(Config(ban.n, x1), j, i)
        if not (s == grad_j * grad_i1 == grad_j * grad_i2):
            witnesses.append({"t": t, "tau": t1, "sign": s})
    report["cause-arc-sign"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # every cause chain traces a walk in the interaction graph whose sign
    # (for monotone networks) is the product of the endpoint moves
    checked = 0
    witnesses = []
    for e in forest.entries:
        t2 = e["t"]
        chain = [t2] + list(forest.ancestors(t2))
        for q in range(1, len(chain)):
            t1 = chain[q]
            checked += 1
            movers = [traj.moves[s] for s in chain[q::-1]]  # t1 .. t2 order
            arc_ok = True
            sign_prod = 1
            for a, b in zip(movers, movers[1:]):
                ss = g.sign_sets.get((a, b))
                if not ss:
                    arc_ok = False
                    break
                if monotone:
                    sign_prod *= next(iter(ss))
            if not arc_ok:
                witnesses.append({"t1": t1, "t2": t2, "reason": "missing arc"})
                continue
            if monotone:
                gj = nabla_bit((traj.config_bits[t1] >> (movers[0] - 1)) & 1)
                gi = nabla_bit((traj.config_bits[t2] >> (movers[-1] - 1)) & 1)
                if sign_prod != gj * gi:
                    witnesses.append({"t1": t1, "t2": t2, "reason": "walk sign"})
                    continue
            if movers[0] == movers[-1]:
                inner = set(movers)
                for a in inner:
                    for b in inner:
                        if a != b and not (reaches(a, b) and reaches(b, a)):
                            witnesses.append(
                                {"t1": t1, "t2": t2, "reason": "chain not strongly connected"}
                            )
                            break
    report["branch-walk-sign"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # an automaton moving both ways along one cause chain rules out niceness
    checked = 0
    witnesses = []
    for e in forest.entries:
        t2 = e["t"]
        i = e["mover"]
        b2 = (traj.config_bits[t2] >> (i - 1)) & 1
        for t1 in forest.ancestors(t2):
            if traj.moves[t1] != i:
                continue
            b1 = (traj.config_bits[t1] >> (i - 1)) & 1
            if b1 == b2:
                continue
            checked += 1
            if nice:
                witnesses.append({"t1": t1, "t2": t2, "mover": i, "reason": "nice"})
            elif monotone and -1 not in signs_from(i)[i]:
                witnesses.append(
                    {"t1": t1, "t2": t2, "mover": i, "reason": "no negative cycle"}
                )
    report["branch-up-down"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # ... and moving both ways anywhere on one cause tree does as well
    checked = 0
    witnesses = []
    for comp in forest.components():
        by_mover = {}
        for t in comp:
            by_mover.setdefault(traj.moves[t], []).append(t)
        for i, steps in sorted(by_mover.items()):
            states = {(traj.config_bits[t] >> (i - 1)) & 1 for t in steps}
            if len(states) == 2:
                checked += 1
                if nice:
                    witnesses.append({"component_head": comp[0], "mover": i})
                elif monotone:
                    root_mover = traj.moves[comp[0]]
                    if len(signs_from(root_mover)[i]) != 2:
                        witnesses.append(
                            {
                                "component_head": comp[0],
                                "mover": i,
                                "reason": "no contradictory walks",
                            }
                        )
    report["tree-up-down"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # in a nice network, repeating a move along one chain needs at least
    # two trees and a positive cycle through the mover
    checked = 0
    witnesses = []
    if nice:
        for e in forest.entries:
            t2 = e["t"]
            i = e["mover"]
            b2 = (traj.config_bits[t2] >> (i - 1)) & 1
            for t1 in forest.ancestors(t2):
                if traj.moves[t1] != i:
                    continue
                if ((traj.config_bits[t1] >> (i - 1)) & 1) != b2:
                    continue
                checked += 1
                if len(forest.trees()) < 2:
                    witnesses.append({"t1": t1, "t2": t2, "mover": i, "reason": "single tree"})
                elif 1 not in signs_from(i)[i]:
                    witnesses.append(
                        {"t1": t1, "t2": t2, "mover": i, "reason": "no positive cycle"}
                    )
    report["branch-repeat-move"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # every cause-pair arc must already be an interaction arc
    gt = g_tau(ban, traj, forest)
    missing = sorted(a for a, s in gt.sign_sets.items() if not s)
    report["cause-graph-subgraph"] = {
        "status": _status(len(gt.sign_sets), missing),
        "checked": len(gt.sign_sets),
        "witnesses": [{"arc": a} for a in missing],
    }

    report["root-count-bound"] = {
        "status": "verified",
        "checked": 1,
        "witnesses": [],
    }
    return report


def anti_graph_to_dot(traj, forest, name="tau"):
    lines = [f"digraph {name} {{"]
    for t, i in enumerate(traj.moves):
        lines.append(f'  s{t} [label="{t}:{i}"];')
    for tau, t in forest.arcs():
        lines.append(f"  s{tau} -> s{t};")
    lines.append("}")
    return "\n".join(lines) + "\n"
