"""Constructive update schedulers.

Each scheduler follows one constructive argument: check its hypotheses,
emit the update order the argument prescribes, and validate every expected
instability before moving.  A failed expectation never falls back silently;
it aborts with a structured finding in the report, because those failures
are themselves results worth surfacing.
"""

import json

from .core import Config, hd, source_automata
from .dynamics import (
    Trajectory,
    _distances_to,
    attractors,
    shortest_to_attractor,
)
from .errors import ConstantFunctionPresent, ShapeNotRecognized, TooLarge
from .graph import (
    classify,
    favour_graph,
    favour_sets,
    interaction_graph,
    is_strongly_connected,
    tarjan_scc,
    walk_sign_sets,
)

BOUNDS_CAP = 12


def _report(name, **kw):
    base = {
        "scheduler": name,
        "hypothesis_ok": True,
        "reasons": [],
        "trajectory": None,
        "bound": None,
        "achieved": None,
        "findings": [],
        "retarget_log": [],
        "extras": {},
    }
    base.update(kw)
    return base


def report_to_json(report):
    data = dict(report)
    if data["trajectory"] is not None:
        data["trajectory"] = json.loads(data["trajectory"].to_json())
    data["retarget_log"] = [
        {"step": t, "old": str(a), "new": str(b)} for (t, a, b) in data["retarget_log"]
    ]
    return json.dumps(data, sort_keys=True)


def _fail(report, reason):
    report["hypothesis_ok"] = False
    report["reasons"].append(reason)
    return report


def _reachable(ban, x, y_bits_list):
    dist = _distances_to(ban, y_bits_list)
    return x.bits in dist, dist


def _sources_or_none(ban):
    try:
        return source_automata(ban)
    except ConstantFunctionPresent:
        return None


def _acyclic_order(h):
    """Topological (depth, id) order of a favour graph, loops ignored.
    Returns (grounds, omega, order) or None when a non-loop cycle exists."""
    n = h["n"]
    plain = {v: [w for w in h["out_adj"][v] if w != v] for v in range(1, n + 1)}
    indeg = {v: 0 for v in range(1, n + 1)}
    for v in range(1, n + 1):
        for w in plain[v]:
            indeg[w] += 1
    grounds = frozenset(v for v in range(1, n + 1) if indeg[v] == 0)
    omega = {v: 0 for v in grounds}
    queue = sorted(grounds)
    seen = 0
    while queue:
        v = queue.pop(0)
        seen += 1
        for w in plain[v]:
            if omega.get(w, -1) < omega[v] + 1:
                omega[w] = omega[v] + 1
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if seen != n:
        return None
    order = sorted(range(1, n + 1), key=lambda v: (omega[v], v))
    return grounds, omega, order


def lemma14_check(ban, y):
    """With every favourable in-neighbour at its destination state, every
    disfavourable one away from it, and the automaton itself not yet there,
    the automaton must be unstable.  Returns witness list (empty = holds).
    Automata whose positive self-loop contradicts the pre-move state are
    skipped: no configuration satisfies the premise."""
    fav = favour_sets(ban, y)
    witnesses = []
    n = ban.n
    for i in range(1, n + 1):
        forced = {i: 1 - y[i]}
        consistent = True
        for j in ban.function(i).support:
            want = y[j] if (j, i) in fav["a_plus"] else 1 - y[j]
            if forced.get(j, want) != want:
                consistent = False
                break
            forced[j] = want
        if not consistent:
            continue
        free = [j for j in range(1, n + 1) if j not in forced]
        for a in range(1 << len(free)):
            bits = 0
            for j, v in forced.items():
                bits |= v << (j - 1)
            for k, j in enumerate(free):
                bits |= ((a >> k) & 1) << (j - 1)
            if ban.function(i).eval_bits(bits) == ((bits >> (i - 1)) & 1):
                witnesses.append({"automaton": i, "config": str(Config(n, bits))})
                break
    return witnesses


def _greedy_towards(ban, x, y, allowed_first, allowed_second, bound):
    """Move differing automata towards y, preferring the first kind;
    returns (moves, final_bits, findings)."""
    bits = x.bits
    moves = []
    findings = []
    while bits != y.bits:
        if len(moves) > bound:
            findings.append({"kind": "bound-exceeded", "at": len(moves)})
            break
        unstable = ban.unstable_bits(bits)
        diff = bits ^ y.bits
        pick = None
        for pool in (allowed_first, allowed_second):
            for i in pool:
                k = i - 1
                if (unstable >> k) & 1 and (diff >> k) & 1:
                    pick = i
                    break
            if pick:
                break
        if pick is None:
            findings.append(
                {"kind": "stalled", "config": str(Config(ban.n, bits)), "moves": len(moves)}
            )
            break
        moves.append(pick)
        bits ^= 1 << (pick - 1)
    return moves, bits, findings


def schedule_uniform_favour(ban, x, y):
    """Order for networks where each automaton favours all of its
    out-neighbours or disfavours them all: first movers of the favouring
    kind, then the rest; at most n moves."""
    report = _report("uniform-favour", bound=ban.n)
    if not ban.is_monotone()[0]:
        return _fail(report, "network is not monotone")
    fav = favour_sets(ban, y)
    favouring = []
    disfavouring = []
    for i in range(1, ban.n + 1):
        out = [(i, k) for k in ban.out_neighbours(i)]
        minus = [a for a in out if a in fav["a_minus"]]
        if not minus:
            favouring.append(i)  # no out-arcs counts as favouring
        elif len(minus) == len(out):
            disfavouring.append(i)
        else:
            return _fail(report, f"automaton {i} favours only part of its out-neighbours")
    ok, _ = _reachable(ban, x, [y.bits])
    if not ok:
        return _fail(report, "destination is not reachable")
    moves, bits, findings = _greedy_towards(ban, x, y, favouring, disfavouring, ban.n)
    report["findings"] = findings
    if bits == y.bits and not findings:
        report["trajectory"] = Trajectory.from_moves(ban, x, moves)
        report["achieved"] = len(moves)
    return report


def schedule_all_positive(ban, x, y):
    """Order for an empty disfavour set: every needed move can be made
    directly; at most n moves.  On strongly connected networks the report
    also carries the attractor census (all stable, at most two)."""
    report = _report("all-positive", bound=ban.n)
    if not ban.is_monotone()[0]:
        return _fail(report, "network is not monotone")
    fav = favour_sets(ban, y)
    if fav["a_minus"]:
        return _fail(report, f"disfavourable arcs present: {sorted(fav['a_minus'])}")
    ok, _ = _reachable(ban, x, [y.bits])
    if not ok:
        return _fail(report, "destination is not reachable")
    everyone = list(range(1, ban.n + 1))
    moves, bits, findings = _greedy_towards(ban, x, y, everyone, [], ban.n)
    report["findings"] = findings
    if bits == y.bits and not findings:
        report["trajectory"] = Trajectory.from_moves(ban, x, moves)
        report["achieved"] = len(moves)
    g = interaction_graph(ban)
    if is_strongly_connected(g):
        atts = attractors(ban)
        report["extras"]["attractors"] = [
            [str(c) for c in a["configs"]] for a in atts
        ]
        if len(atts) > 2 or any(a["kind"] != "stable" for a in atts):
            report["findings"].append({"kind": "attractor-census", "count": len(atts)})
    return report


def _depth_schedule(ban, x, y, report, require_all_differ):
    sources = _sources_or_none(ban)
    if sources is None:
        return _fail(report, "constant local functions present; split real sources first")
    h = favour_graph(ban, y)
    ordering = _acyclic_order(h)
    if ordering is None:
        return _fail(report, "favour graph has a cycle beyond loops")
    grounds, omega, order = ordering
    for s in sorted(sources):
        if x[s] != y[s]:
            return _fail(report, f"source automaton {s} differs from its destination state")
    if require_all_differ:
        for i in range(1, ban.n + 1):
            if i not in sources and x[i] == y[i]:
                return _fail(report, f"automaton {i} already in its destination state")
    ok, _ = _reachable(ban, x, [y.bits])
    if not ok:
        return _fail(report, "destination is not reachable")
    report["bound"] = ban.n - len(sources)
    report["extras"]["order"] = order
    report["extras"]["grounds"] = sorted(grounds)
    bits = x.bits
    moves = []
    for i in order:
        k = i - 1
        if ((bits >> k) & 1) == y[i]:
            continue
        if ban.function(i).eval_bits(bits) == ((bits >> k) & 1):
            report["findings"].append(
                {
                    "kind": "condition-lost",
                    "automaton": i,
                    "config": str(Config(ban.n, bits)),
                }
            )
            return report
        moves.append(i)
        bits ^= 1 << k
    if bits != y.bits:
        report["findings"].append({"kind": "missed-target", "config": str(Config(ban.n, bits))})
        return report
    report["trajectory"] = Trajectory.from_moves(ban, x, moves)
    report["achieved"] = len(moves)
    return report


def schedule_acyclic_favour(ban, x, y):
    """Shallowest-to-deepest order along an acyclic favour graph, all
    non-source automata starting away from their destination state."""
    report = _report("acyclic-favour")
    if not ban.is_monotone()[0]:
        return _fail(report, "network is not monotone")
    return _depth_schedule(ban, x, y, report, require_all_differ=True)


def schedule_to_stable(ban, x, y):
    """Same order as acyclic-favour, with stability of the destination
    replacing the initial-state requirement."""
    report = _report("to-stable")
    if not ban.is_monotone()[0]:
        return _fail(report, "network is not monotone")
    if ban.unstable_bits(y.bits):
        return _fail(report, "destination is not a stable configuration")
    return _depth_schedule(ban, x, y, report, require_all_differ=False)


def schedule_to_attractor(ban, x, attractor):
    """Depth-ordered walk towards the attractor member nearest to x,
    retargeting inside the attractor whenever the considered automaton is
    stable but not yet in its target state."""
    report = _report("to-attractor", bound=ban.n)
    if not ban.is_monotone()[0]:
        return _fail(report, "network is not monotone")
    sources = _sources_or_none(ban)
    if sources is None:
        return _fail(report, "constant local functions present; split real sources first")
    members = {c.bits for c in attractor["configs"]}
    best = min(members, key=lambda b: ((x.bits ^ b).bit_count(), str(Config(ban.n, b))))
    y = Config(ban.n, best)
    h = favour_graph(ban, y)
    ordering = _acyclic_order(h)
    if ordering is None:
        return _fail(report, "favour graph has a cycle beyond loops")
    _, _, order = ordering
    ok, _ = _reachable(ban, x, sorted(members))
    if not ok:
        return _fail(report, "attractor is not reachable")
    report["extras"]["initial_target"] = str(y)
    bits = x.bits
    moves = []
    initial_hd = (x.bits ^ y.bits).bit_count()
    for step_no, i in enumerate(order):
        k = i - 1
        unstable = ban.function(i).eval_bits(bits) != ((bits >> k) & 1)
        differs = ((bits >> k) & 1) != y[i]
        if not differs:
            continue
        if unstable:
            moves.append(i)
            bits ^= 1 << k
            continue
        # stable but off target: the target itself must be able to move here
        if ban.function(i).eval_bits(y.bits) == y[i]:
            report["findings"].append(
                {"kind": "retarget-blocked", "automaton": i, "target": str(y)}
            )
            return report
        new_y = y.flip(i)
        if new_y.bits not in members:
            report["findings"].append(
                {"kind": "retarget-escaped-attractor", "automaton": i, "target": str(new_y)}
            )
            return report
        report["retarget_log"].append((step_no, y, new_y))
        y = new_y
    if bits != y.bits:
        report["findings"].append({"kind": "missed-target", "config": str(Config(ban.n, bits))})
        return report
    report["trajectory"] = Trajectory.from_moves(ban, x, moves)
    report["achieved"] = len(moves)
    report["extras"]["final_target"] = str(y)
    final_hd = (x.bits ^ y.bits).bit_count()
    if len(moves) != final_hd:
        report["findings"].append(
            {"kind": "count-mismatch", "moves": len(moves), "hd": final_hd}
        )
    report["extras"]["initial_hd"] = initial_hd
    return report


def schedule_nice_scc(ban, x, y):
    """Contract the all-favourable strongly connected components of the
    favour graph, order the condensation by depth, and empty each component
    with the all-positive discipline."""
    report = _report("nice-scc", bound=ban.n)
    cls = classify(ban)
    if not cls["nice"]:
        return _fail(report, f"network is not nice: {cls['witness']}")
    h = favour_graph(ban, y)
    plain = {v: [w for w in h["out_adj"][v] if w != v] for v in range(1, ban.n + 1)}
    sccs = tarjan_scc(range(1, ban.n + 1), lambda v: plain[v])
    comp_of = {}
    for idx, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = idx
    for (j, i) in h["arcs"]:
        if j != i and comp_of[j] == comp_of[i] and (j, i) in h["reversed_arcs"]:
            return _fail(
                report, f"disfavourable arc ({i}, {j}) inside a strongly connected component"
            )
    if ban.unstable_bits(y.bits):
        return _fail(report, "destination is not a stable configuration")
    sources = _sources_or_none(ban)
    if sources is None:
        return _fail(report, "constant local functions present; split real sources first")
    for s in sorted(sources):
        if x[s] != y[s]:
            return _fail(report, f"source automaton {s} differs from its destination state")
    ok, _ = _reachable(ban, x, [y.bits])
    if not ok:
        return _fail(report, "destination is not reachable")
    # condensation depths (sccs come out of tarjan in reverse topo order)
    comp_succ = {idx: set() for idx in range(len(sccs))}
    for (j, i) in h["arcs"]:
        if comp_of[j] != comp_of[i]:
            comp_succ[comp_of[j]].add(comp_of[i])
    depth = {}
    for idx in range(len(sccs) - 1, -1, -1):  # topological order
        depth.setdefault(idx, 0)
        for succ in comp_succ[idx]:
            depth[succ] = max(depth.get(succ, 0), depth[idx] + 1)
    comp_order = sorted(range(len(sccs)), key=lambda c: (depth[c], min(sccs[c])))
    bits = x.bits
    moves = []
    for cidx in comp_order:
        members = sorted(sccs[cidx])
        while True:
            pick = None
            unstable = ban.unstable_bits(bits)
            for i in members:
                k = i - 1
                if ((bits >> k) & 1) != y[i] and (unstable >> k) & 1:
                    pick = i
                    break
            if pick is None:
                break
            moves.append(pick)
            bits ^= 1 << (pick - 1)
        if any(((bits >> (i - 1)) & 1) != y[i] for i in members):
            report["findings"].append(
                {"kind": "condition-lost", "component": members, "config": str(Config(ban.n, bits))}
            )
            return report
    if bits != y.bits:
        report["findings"].append({"kind": "missed-target", "config": str(Config(ban.n, bits))})
        return report
    report["trajectory"] = Trajectory.from_moves(ban, x, moves)
    report["achieved"] = len(moves)
    return report


SCHEDULERS = {
    "uniform-favour": schedule_uniform_favour,
    "all-positive": schedule_all_positive,
    "acyclic-favour": schedule_acyclic_favour,
    "to-stable": schedule_to_stable,
    "to-attractor": schedule_to_attractor,
    "nice-scc": schedule_nice_scc,
}


# -- structural shape bounds -------------------------------------------------


def detect_shape(ban):
    """path / positive_cycle / negative_cycle / acyclic, per the structure
    of the interaction graph (source loops allowed where noted)."""
    g = interaction_graph(ban)
    n = ban.n
    sources = _sources_or_none(ban)
    if sources is None:
        raise ShapeNotRecognized("constant local functions present")
    loops = [(j, i) for (j, i) in g.arcs() if j == i]
    chain = [(j, i) for (j, i) in g.arcs() if j != i]
    indeg = {v: 0 for v in range(1, n + 1)}
    outdeg = {v: 0 for v in range(1, n + 1)}
    for (j, i) in chain:
        outdeg[j] += 1
        indeg[i] += 1
    if len(sources) == 1 and len(loops) == 1 and loops[0][0] in sources:
        s = next(iter(sources))
        node = s
        seen = [s]
        while outdeg[node] == 1:
            node = next(i for (j, i) in chain if j == node)
            if node in seen:
                break
            seen.append(node)
        if len(seen) == n and all(indeg[v] == 1 for v in seen if v != s) and indeg[s] == 0:
            if all(outdeg[v] <= 1 for v in seen):
                return "path"
    if not loops and all(indeg[v] == 1 and outdeg[v] == 1 for v in range(1, n + 1)):
        node = 1
        seen = [1]
        for _ in range(n):
            node = next(i for (j, i) in chain if j == node)
            if node == 1:
                break
            seen.append(node)
        if len(seen) == n:
            sign = 1
            for a in chain:
                sign *= g.sign(*a)
            return "positive_cycle" if sign == 1 else "negative_cycle"
    if all(j in sources for (j, j2) in loops if j == j2) and all(
        (j, j) not in g.sign_sets or j in sources for j in range(1, n + 1)
    ):
        plain_adj = {v: [i for (j, i) in chain if j == v] for v in range(1, n + 1)}
        sccs = tarjan_scc(range(1, n + 1), lambda v: plain_adj[v])
        if all(len(c) == 1 for c in sccs):
            return "acyclic"
    raise ShapeNotRecognized("interaction graph is not a path, cycle or acyclic shape")


def bounds_suite(ban):
    """Exhaustive distance and attractor census checks for path, cycle and
    acyclic networks."""
    if ban.n > BOUNDS_CAP:
        raise TooLarge(f"bounds suite is capped at n = {BOUNDS_CAP}")
    shape = detect_shape(ban)
    n = ban.n
    atts = attractors(ban)
    report = {
        "shape": shape,
        "n": n,
        "attractors": [[str(c) for c in a["configs"]] for a in atts],
        "kinds": [a["kind"] for a in atts],
        "checks": {},
        "findings": [],
    }
    size = 1 << n
    member_sets = [{c.bits for c in a["configs"]} for a in atts]
    dist_to_att = [_distances_to(ban, sorted(m)) for m in member_sets]

    max_att_dist = 0
    unique_reachable_stable = True
    for bits in range(size):
        reach = [idx for idx, d in enumerate(dist_to_att) if bits in d]
        for idx in reach:
            max_att_dist = max(max_att_dist, dist_to_att[idx][bits])
        if len(reach) != 1 or atts[reach[0]]["kind"] != "stable":
            unique_reachable_stable = False
    report["checks"]["max_config_attractor_distance"] = max_att_dist
    report["checks"]["config_attractor_within_n"] = max_att_dist <= n

    # largest shortest-trajectory length over reachable ordered pairs
    max_cc = 0
    for bits in range(size):
        dist = _distances_to(ban, [bits])
        max_cc = max(max_cc, max(dist.values()))
    report["checks"]["max_config_config_distance"] = max_cc
    report["checks"]["config_config_within_n_squared"] = max_cc <= n * n

    if shape in ("path", "acyclic"):
        report["checks"]["unique_reachable_stable_attractor"] = unique_reachable_stable
        if not unique_reachable_stable:
            report["findings"].append({"kind": "attractor-uniqueness"})
    if shape == "path":
        report["checks"]["census_two_stable"] = (
            len(atts) == 2 and all(a["kind"] == "stable" for a in atts)
        )
        report["checks"]["update-profile"] = _path_profile(ban, atts)
    if shape == "positive_cycle":
        report["checks"]["census_two_stable"] = (
            len(atts) == 2 and all(a["kind"] == "stable" for a in atts)
        )
        if not report["checks"]["census_two_stable"]:
            report["findings"].append({"kind": "positive-cycle-census", "count": len(atts)})
    if shape == "negative_cycle":
        report["checks"]["single_cyclic_attractor"] = (
            len(atts) == 1 and atts[0]["kind"] == "cyclic"
        )
        recurrent = sorted(member_sets[0]) if len(member_sets) == 1 else []
        worst = 0
        for r in recurrent:
            dist = _distances_to(ban, [r])
            worst = max(worst, max(dist.values()))
        report["checks"]["max_recurrent_reach_distance"] = worst
        report["checks"]["recurrent_within_2n"] = worst <= 2 * n
    return report


def _path_profile(ban, atts):
    """On a path, every shortest run to the attractor updates exactly the
    automata whose straightened state differs from the source's, once each."""
    g = interaction_graph(ban)
    s = next(iter(source_automata(ban)))
    signs = walk_sign_sets(g, s)
    flip_mask = 0
    for i in range(1, ban.n + 1):
        if signs[i] == frozenset({-1}):
            flip_mask |= 1 << (i - 1)
    ok = True
    size = 1 << ban.n
    member_sets = [{c.bits for c in a["configs"]} for a in atts]
    dist_to_att = [_distances_to(ban, sorted(m)) for m in member_sets]
    for bits in range(size):
        reach = [idx for idx, d in enumerate(dist_to_att) if bits in d]
        if len(reach) != 1:
            return False
        x = Config(ban.n, bits)
        traj = shortest_to_attractor(ban, x, atts[reach[0]])
        counts = traj.mover_counts()
        straight = bits ^ flip_mask
        src_bit = (straight >> (s - 1)) & 1
        expected = {
            i
            for i in range(1, ban.n + 1)
            if ((straight >> (i - 1)) & 1) != src_bit
        }
        if set(counts) != expected or any(v != 1 for v in counts.values()):
            ok = False
    return ok
