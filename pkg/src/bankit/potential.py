"""Potential transmission along update sequences.

The pair (t, j) stands for the fact that automaton j holds its time-t
state.  While j is not updated the fact persists; when an automaton k is
updated, k inherits exactly the potentials carried by in-neighbours whose
current state pushes k towards its new state (arc sign equal to the
product of the sender's move away from its state and the receiver's move
away from its new state).  An updated automaton keeps nothing it is not
re-transmitted, which is how an ineffective update can drop a potential.

Carrier sets are stored as bit masks per tracked potential and time step.
A potential whose carrier set empties can never come back; survivors are
the potentials still carried at the end, and super-survivors those that
no continuation of updates can ever erase.
"""

import csv
import io
import json

from .core import Config, nabla_bit, step_bits
from .dynamics import (
    Streamline,
    Trajectory,
    attractor_of,
    streamline_of,
    _distances_to,
)
from .errors import NonMonotoneArc, NotRecurrentDestination, TooLarge, Unreachable
from .graph import interaction_graph, walk_sign_sets, classify

SUPER_SURVIVOR_CAP = 12


def transmits(ban, x, j, i):
    """Does j pass its time-t potential to i when i is updated at x?"""
    sign = ban.arc_sign(j, i)
    if sign is None:
        return False
    new_bit = ban.function(i).eval_bits(x.bits)
    return sign == nabla_bit(x[j]) * nabla_bit(new_bit)


def _as_streamline(ban, line):
    if isinstance(line, Trajectory):
        return streamline_of(ban, line)
    return line


class PotentialTracker:
    """Carrier masks for every original potential (and optionally every
    update-born potential) along a streamline."""

    def __init__(self, ban, line, track_general=False):
        ok, witness = ban.is_monotone()
        if not ok:
            raise NonMonotoneArc(f"network is not monotone: {witness}")
        line = _as_streamline(ban, line)
        self.ban = ban
        self.line = line
        self.n = ban.n
        self.T = line.length
        self.track_general = track_general

        # masks[(b, a)][t - b] = carrier mask of the potential born on a at b
        self.masks = {(0, i): [1 << (i - 1)] for i in range(1, self.n + 1)}
        self.parents = []  # per step: tuple of parent potentials (b, a)
        self.senders = []  # per step: tuple of sender automata
        self.inheritance_gaps = []  # effective moves that inherited nothing

        birth = {i: 0 for i in range(1, self.n + 1)}
        arc_sign = ban.arc_sign
        for t in range(self.T):
            k = line.updates[t]
            xt = line.config_bits[t]
            xt1 = line.config_bits[t + 1]
            gk = nabla_bit((xt1 >> (k - 1)) & 1)
            senders = tuple(
                j
                for j in ban.function(k).support
                if arc_sign(j, k) == nabla_bit((xt >> (j - 1)) & 1) * gk
            )
            self.senders.append(senders)
            sender_mask = 0
            for j in senders:
                sender_mask |= 1 << (j - 1)
            kbit = 1 << (k - 1)
            for hist in self.masks.values():
                m = hist[-1]
                gained = kbit if (m & sender_mask) else 0
                hist.append((m & ~kbit) | gained)
            self.parents.append(tuple(sorted((birth[j], j) for j in senders)))
            effective = xt != xt1
            if effective and not senders:
                self.inheritance_gaps.append(t)
            birth[k] = t + 1
            if track_general:
                self.masks[(t + 1, k)] = [kbit]
        self._birth_trace = birth

    # -- carrier queries -------------------------------------------------

    def carrier_mask(self, potential, t):
        b, _ = potential
        hist = self.masks.get(potential)
        if hist is None or t < b:
            return 0
        return hist[t - b]

    def carrier_set(self, potential, t):
        m = self.carrier_mask(potential, t)
        return frozenset(k + 1 for k in range(self.n) if (m >> k) & 1)

    def original_mask(self, i, t):
        return self.masks[(0, i)][t]

    def potentials(self):
        return sorted(self.masks)

    def birth_at(self, i, t):
        """Birth time of the potential automaton i carries at time t."""
        b = 0
        for s in range(t):
            if self.line.updates[s] == i:
                b = s + 1
        return b

    def direct_parents(self, i, t):
        """Potentials transmitted into the potential i carries at time t."""
        b = self.birth_at(i, t)
        if b == 0:
            return frozenset()
        return frozenset(self.parents[b - 1])

    def charge(self, i, t):
        p = self.direct_parents(i, t)
        p_star = frozenset(
            key for key in self.masks if (self.carrier_mask(key, t) >> (i - 1)) & 1
        )
        return {
            "P": p,
            "P_star": p_star,
            "P0": frozenset(k for k in p if k[0] == 0),
            "P0_star": frozenset(k for k in p_star if k[0] == 0),
        }


def carrier_tables(ban, line):
    """Carrier sets of every original potential at every time step."""
    tracker = PotentialTracker(ban, line, track_general=False)
    rows = {}
    for i in range(1, ban.n + 1):
        rows[i] = [tracker.carrier_set((0, i), t) for t in range(tracker.T + 1)]
    return {"T": tracker.T, "rows": rows, "tracker": tracker}


def carrier_tables_to_csv(tables):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["potential"] + [f"t{t}" for t in range(tables["T"] + 1)])
    for i in sorted(tables["rows"]):
        cells = [
            "{" + ",".join(str(a) for a in sorted(cell)) + "}"
            for cell in tables["rows"][i]
        ]
        writer.writerow([f"<0,{i}>"] + cells)
    return buf.getvalue()


def carrier_tables_to_json(tables):
    return json.dumps(
        {
            "T": tables["T"],
            "rows": {
                str(i): [sorted(cell) for cell in tables["rows"][i]]
                for i in sorted(tables["rows"])
            },
        },
        sort_keys=True,
    )


def charge(ban, line, i, t):
    tracker = PotentialTracker(ban, line, track_general=True)
    return tracker.charge(i, t)


def survivors(ban, line):
    """Original potentials still carried at the end, plus the first time
    each lost potential emptied out."""
    tracker = PotentialTracker(ban, line, track_general=False)
    alive = set()
    lost = {}
    for i in range(1, ban.n + 1):
        hist = tracker.masks[(0, i)]
        if hist[-1]:
            alive.add(i)
        else:
            lost[i] = next(t for t, m in enumerate(hist) if m == 0)
    return {"survivors": frozenset(alive), "lost": lost, "tracker": tracker}


class _EmptiableSearch:
    """Reachability of an empty carrier set over (configuration, carriers)
    pairs under arbitrary further updates; memoized per network."""

    def __init__(self, ban):
        self.ban = ban
        self.cache = {}

    def senders_mask(self, bits, k):
        ban = self.ban
        new_bit = ban.function(k).eval_bits(bits)
        gk = nabla_bit(new_bit)
        m = 0
        for j in ban.function(k).support:
            if ban.arc_sign(j, k) == nabla_bit((bits >> (j - 1)) & 1) * gk:
                m |= 1 << (j - 1)
        return m

    def emptiable(self, bits, mask):
        if mask == 0:
            return True
        start = (bits, mask)
        cached = self.cache.get(start)
        if cached is not None:
            return cached
        seen = {start}
        frontier = [start]
        result = False
        while frontier:
            b, m = frontier.pop()
            for k in range(1, self.ban.n + 1):
                kbit = 1 << (k - 1)
                b2 = step_bits(self.ban, b, k)
                gained = kbit if (m & self.senders_mask(b, k)) else 0
                m2 = (m & ~kbit) | gained
                if m2 == 0:
                    result = True
                    frontier = []
                    break
                state = (b2, m2)
                if state not in seen:
                    seen.add(state)
                    frontier.append(state)
        self.cache[start] = result
        return result


def super_survivors(ban, line):
    """Survivor potentials that no continuation of updates from the final
    configuration can ever erase."""
    if ban.n > SUPER_SURVIVOR_CAP:
        raise TooLarge(f"super-survivor search is capped at n = {SUPER_SURVIVOR_CAP}")
    line = _as_streamline(ban, line)
    y = line.destination()
    att = attractor_of(ban, y)
    if att is None:
        raise NotRecurrentDestination(f"{y} is not a recurrent configuration")
    surv = survivors(ban, line)
    tracker = surv["tracker"]
    search = _EmptiableSearch(ban)
    out = set()
    for i in sorted(surv["survivors"]):
        mask = tracker.original_mask(i, tracker.T)
        if not search.emptiable(y.bits, mask):
            out.add(i)
    return frozenset(out)


def _status(checked, witnesses):
    if checked == 0:
        return "not_applicable"
    return "violated" if witnesses else "verified"


def _pot(p):
    return f"<{p[0]},{p[1]}>"


def verify_potential_lemmas(ban, traj, check_shortest=True):
    """Replay the potential-flow consequences on one trajectory; every
    check reports verified / violated(witnesses) / not_applicable."""
    cls = classify(ban)
    if not cls["monotone"]:
        raise NonMonotoneArc("potential flow is defined for monotone networks only")
    nice = cls["nice"]
    g = interaction_graph(ban)
    line = streamline_of(ban, traj)
    tracker = PotentialTracker(ban, line, track_general=True)
    T = tracker.T
    report = {}
    sign_cache = {}

    def signs_from(a):
        if a not in sign_cache:
            sign_cache[a] = walk_sign_sets(g, a)
        return sign_cache[a]

    # every update inherits from at least one in-neighbour
    witnesses = [{"t": t} for t in range(T) if not tracker.parents[t]]
    report["update-inheritance"] = {
        "status": _status(T, witnesses),
        "checked": T,
        "witnesses": witnesses,
    }

    # carrier sets never grow back from empty
    checked = 0
    witnesses = []
    for key, hist in tracker.masks.items():
        dead = False
        for t, m in enumerate(hist):
            checked += 1
            if dead and m:
                witnesses.append({"potential": _pot(key), "t": t + key[0]})
            dead = dead or m == 0
    report["carrier-monotone-loss"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # carried potential traces a walk whose sign links both states
    checked = 0
    witnesses = []
    for (b, a), hist in tracker.masks.items():
        ga = nabla_bit((line.config_bits[b] >> (a - 1)) & 1)
        for off, m in enumerate(hist):
            t = b + off
            for k in range(tracker.n):
                if not (m >> k) & 1:
                    continue
                i = k + 1
                checked += 1
                s = ga * nabla_bit((line.config_bits[t] >> k) & 1)
                if i == a and s == 1:
                    continue
                if s not in signs_from(a)[i]:
                    witnesses.append({"potential": _pot((b, a)), "t": t, "carrier": i})
    report["lineage-walk-sign"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # from its first update onwards an automaton always carries something
    checked = 0
    witnesses = []
    first_update = {}
    for t, k in enumerate(line.updates):
        first_update.setdefault(k, t)
    for i, u in sorted(first_update.items()):
        for t in range(u + 1, T + 1):
            checked += 1
            if not tracker.direct_parents(i, t):
                witnesses.append({"automaton": i, "t": t})
    report["charge-nonempty"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # nice networks: carrying the same potential twice means the same state
    checked = 0
    witnesses = []
    if nice:
        for key, hist in tracker.masks.items():
            b = key[0]
            for k in range(tracker.n):
                states = set()
                for off, m in enumerate(hist):
                    if (m >> k) & 1:
                        states.add((line.config_bits[b + off] >> k) & 1)
                if states:
                    checked += 1
                if len(states) == 2:
                    witnesses.append({"potential": _pot(key), "carrier": k + 1})
    report["same-potential-same-move"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # each move brings in a potential never carried before by the mover
    checked = 0
    witnesses = []
    seen_parents = {}
    for t, k in enumerate(line.updates):
        effective = line.config_bits[t] != line.config_bits[t + 1]
        if not effective:
            seen_parents.setdefault(k, set()).update(tracker.parents[t])
            continue
        checked += 1
        old = seen_parents.setdefault(k, set())
        if not (set(tracker.parents[t]) - old):
            witnesses.append({"t": t, "mover": k})
        old.update(tracker.parents[t])
    report["fresh-potential-per-move"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # on a shortest trajectory only surviving potential is ever transmitted
    checked = 0
    witnesses = []
    if check_shortest and T > 0:
        dist = _distances_to(ban, [line.config_bits[-1]])
        if dist.get(line.config_bits[0]) == T:
            for t in range(T):
                for p in tracker.parents[t]:
                    checked += 1
                    if tracker.carrier_mask(p, T) == 0:
                        witnesses.append({"t": t, "potential": _pot(p)})
    report["shortest-transmits-survivors"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # at a stable destination of a nice network, carried potential pushes
    # its carrier towards the state it already has
    checked = 0
    witnesses = []
    y_bits = line.config_bits[-1]
    destination_stable = ban.unstable_bits(y_bits) == 0
    if nice and destination_stable:
        for (b, a), hist in tracker.masks.items():
            m = hist[-1]
            ga = nabla_bit((line.config_bits[b] >> (a - 1)) & 1)
            for k in range(tracker.n):
                if not (m >> k) & 1:
                    continue
                i = k + 1
                checked += 1
                want = (-ga) * nabla_bit(1 - ((y_bits >> k) & 1))
                signs = set(signs_from(a)[i])
                if i == a:
                    signs.add(1)
                if signs != {want}:
                    witnesses.append({"potential": _pot((b, a)), "carrier": i})
    report["destination-favourable-carriers"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }

    # unless the first mover sits on a negative loop, its original potential
    # dies with its first move, leaving at most n-1 original survivors
    checked = 0
    witnesses = []
    if T > 0:
        k0 = line.updates[0]
        effective0 = line.config_bits[0] != line.config_bits[1]
        if effective0 and ban.arc_sign_set(k0, k0) != frozenset({-1}):
            checked = 1
            alive = sum(1 for i in range(1, ban.n + 1) if tracker.original_mask(i, T))
            if tracker.original_mask(k0, T) or alive > ban.n - 1:
                witnesses.append({"first_mover": k0, "alive": alive})
    report["first-move-loses-potential"] = {
        "status": _status(checked, witnesses),
        "checked": checked,
        "witnesses": witnesses,
    }
    return report


def conjecture_only_super_transmitted(ban, x, attractor, cap=10**6):
    """Search the shortest trajectories from x to the attractor for one in
    which every transmitted original potential is a super-survivor of that
    trajectory.  Returns a verdict record; HOLDS carries the witness."""
    if ban.n > SUPER_SURVIVOR_CAP:
        raise TooLarge(f"search is capped at n = {SUPER_SURVIVOR_CAP}")
    targets = [c.bits for c in attractor["configs"]]
    dist = _distances_to(ban, targets)
    if x.bits not in dist:
        raise Unreachable(f"attractor is not reachable from {x}")
    d = dist[x.bits]
    if d == 0:
        return {"verdict": "HOLDS", "witness": Trajectory(ban.n, x.bits, (), (x.bits,)),
                "examined": 0, "truncated": False}
    search = _EmptiableSearch(ban)
    examined = 0
    truncated = False
    stack = [(x.bits, [])]
    while stack:
        bits, prefix = stack.pop()
        dd = dist[bits]
        if dd == 0:
            examined += 1
            traj = Trajectory.from_moves(ban, Config(ban.n, x.bits), prefix)
            if _only_super_transmitted(ban, traj, search):
                return {
                    "verdict": "HOLDS",
                    "witness": traj,
                    "examined": examined,
                    "truncated": False,
                }
            if examined >= cap:
                truncated = True
                break
            continue
        mask = ban.unstable_bits(bits)
        for k in range(ban.n - 1, -1, -1):
            if (mask >> k) & 1 and dist.get(bits ^ (1 << k), -1) == dd - 1:
                stack.append((bits ^ (1 << k), prefix + [k + 1]))
    return {
        "verdict": "INCONCLUSIVE" if truncated else "COUNTEREXAMPLE",
        "witness": None,
        "examined": examined,
        "truncated": truncated,
    }


def _only_super_transmitted(ban, traj, search):
    tracker = PotentialTracker(ban, traj, track_general=False)
    T = tracker.T
    if T == 0:
        return True
    y_bits = traj.config_bits[-1]
    super_cache = {}

    def is_super(i):
        if i not in super_cache:
            final = tracker.original_mask(i, T)
            super_cache[i] = final != 0 and not search.emptiable(y_bits, final)
        return super_cache[i]

    for t in range(T):
        sender_mask = 0
        for j in tracker.senders[t]:
            sender_mask |= 1 << (j - 1)
        if not sender_mask:
            continue
        for i in range(1, ban.n + 1):
            if tracker.original_mask(i, t) & sender_mask and not is_super(i):
                return False
    return True
