"""Seeded generators for networks and trajectories.

Random functions are sampled as truth tables, rejected until they are
monotone (unate in every input) and depend on every chosen input, then
written back to an expression so the rest of the package sees ordinary
networks.  All randomness flows through an explicit random.Random.
"""

import itertools

from . import expr as ex
from .core import BAN, Config, LocalFunction
from .graph import classify


def _table_is_unate(table, arity):
    for k in range(arity):
        seen = 0
        for a in range(1 << arity):
            if (a >> k) & 1:
                continue
            lo = (table >> a) & 1
            hi = (table >> (a | (1 << k))) & 1
            if lo != hi:
                seen |= 1 if hi > lo else 2
        if seen == 3:
            return False
        if seen == 0:
            return False  # input is not essential
    return True


def _table_is_increasing(table, arity):
    for k in range(arity):
        essential = False
        for a in range(1 << arity):
            if (a >> k) & 1:
                continue
            lo = (table >> a) & 1
            hi = (table >> (a | (1 << k))) & 1
            if hi < lo:
                return False
            if hi > lo:
                essential = True
        if not essential:
            return False
    return True


def random_monotone_table(rng, arity, positive_only=False):
    rows = 1 << arity
    while True:
        table = rng.getrandbits(rows)
        if positive_only:
            if _table_is_increasing(table, arity):
                return table
        elif _table_is_unate(table, arity):
            return table


def table_to_ast(table, support):
    """Disjunctive normal form of a (non-constant) truth table."""
    arity = len(support)
    terms = []
    for a in range(1 << arity):
        if not (table >> a) & 1:
            continue
        literals = []
        for k, v in enumerate(support):
            var = ex.Variable(v)
            literals.append(var if (a >> k) & 1 else ex.Negation(var))
        terms.append(literals[0] if len(literals) == 1 else ex.Conjunction(literals))
    if not terms:
        raise ValueError("constant-false table has no normal form here")
    return terms[0] if len(terms) == 1 else ex.Disjunction(terms)


def _function_from_table(table, support):
    return LocalFunction(table_to_ast(table, support), support, table)


def random_monotone_ban(rng, n, max_arity=3, positive_only=False):
    functions = []
    for _ in range(n):
        arity = rng.randint(1, min(max_arity, n))
        support = tuple(sorted(rng.sample(range(1, n + 1), arity)))
        table = random_monotone_table(rng, arity, positive_only=positive_only)
        functions.append(_function_from_table(table, support))
    return BAN(functions)


def random_nice_ban(rng, n, max_arity=3, tries=40):
    """A monotone network without contradictory walks; falls back to an
    all-positive sample, which cannot have any."""
    for _ in range(tries):
        ban = random_monotone_ban(rng, n, max_arity)
        if classify(ban)["nice"]:
            return ban
    return random_monotone_ban(rng, n, max_arity, positive_only=True)


def random_acyclic_source_loop_ban(rng, n, max_arity=2):
    """Interaction graph acyclic apart from the positive loops of its
    source automata; at least one source."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    k = rng.randint(1, n)
    position = {v: idx for idx, v in enumerate(order)}
    functions = [None] * n
    for idx, v in enumerate(order):
        if idx < k:
            functions[v - 1] = _function_from_table(0b10, (v,))  # source: f = x_v
            continue
        earlier = order[:idx]
        arity = rng.randint(1, min(max_arity, len(earlier)))
        support = tuple(sorted(rng.sample(earlier, arity)))
        table = random_monotone_table(rng, arity)
        functions[v - 1] = _function_from_table(table, support)
    del position
    return BAN(functions)


def _catalog(support):
    """Every monotone function with full dependence on one or two inputs."""
    if len(support) == 1:
        (v,) = support
        yield _function_from_table(0b10, (v,))  # x
        yield _function_from_table(0b01, (v,))  # !x
        return
    for table in range(1 << 4):
        if _table_is_unate(table, 2):
            yield _function_from_table(table, support)


def structured_acyclic_bans(n_max=4):
    """Deterministic enumeration of small acyclic-with-source-loops
    networks: sources take the lowest ids, every non-source reads one or
    two strictly smaller ids."""
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            non_sources = list(range(k + 1, n + 1))
            choice_lists = []
            for i in non_sources:
                opts = []
                earlier = list(range(1, i))
                for v in earlier:
                    opts.extend(_catalog((v,)))
                for pair in itertools.combinations(earlier, 2):
                    opts.extend(_catalog(pair))
                choice_lists.append(opts)
            for combo in itertools.product(*choice_lists):
                functions = []
                for s in range(1, k + 1):
                    functions.append(_function_from_table(0b10, (s,)))
                functions.extend(combo)
                yield BAN(functions)


def random_config(rng, n):
    return Config(n, rng.getrandbits(n))


def random_trajectory(rng, ban, x, max_len=30):
    """Random walk over effective moves, stopping at stability or max_len."""
    from .dynamics import Trajectory

    bits = x.bits
    moves = []
    configs = [bits]
    for _ in range(max_len):
        mask = ban.unstable_bits(bits)
        if not mask:
            break
        candidates = [k + 1 for k in range(ban.n) if (mask >> k) & 1]
        i = rng.choice(candidates)
        moves.append(i)
        bits ^= 1 << (i - 1)
        configs.append(bits)
    return Trajectory(ban.n, x.bits, moves, configs)
