"""Network core: configurations, moves, instability, influence signs,
straight functions and the state-relabeling / source-splitting transforms.

Automata ids are 1-based in every public interface.  Internally a
configuration is an int whose bit i-1 holds the state of automaton i,
and each local function is compiled to a truth table over its *semantic*
support (inputs with a punctual influence for at least one configuration).
"""

from .errors import (
    BadCharacter,
    ConstantFunctionPresent,
    DuplicateAutomaton,
    LengthMismatch,
    MissingAutomaton,
    NonMonotoneArc,
)
from . import expr as ex


def sb(s):
    """Sign to Boolean: -1 -> 0, +1 -> 1."""
    return (s + 1) // 2


def bs(b):
    """Boolean to sign: 0 -> -1, 1 -> +1."""
    return 2 * b - 1


class Config:
    """Immutable configuration of n automata."""

    __slots__ = ("n", "bits")

    def __init__(self, n, bits):
        if bits < 0 or bits >> n:
            raise ValueError(f"bits {bits:#x} out of range for n={n}")
        self.n = n
        self.bits = bits

    @classmethod
    def from_str(cls, text, n):
        if len(text) != n:
            raise LengthMismatch(f"expected {n} characters, got {len(text)}")
        bits = 0
        for k, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << k
            elif ch != "0":
                raise BadCharacter(f"bad character {ch!r} at position {k + 1}")
        return cls(n, bits)

    def __getitem__(self, i):
        return (self.bits >> (i - 1)) & 1

    def flip(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"automaton {i} out of range 1..{self.n}")
        return Config(self.n, self.bits ^ (1 << (i - 1)))

    def xor_mask(self, mask):
        return Config(self.n, self.bits ^ mask)

    def __str__(self):
        return "".join("1" if (self.bits >> k) & 1 else "0" for k in range(self.n))

    def __repr__(self):
        return f"Config({str(self)})"

    def __eq__(self, other):
        return isinstance(other, Config) and self.n == other.n and self.bits == other.bits

    def __hash__(self):
        return hash((self.n, self.bits))


def parse_config(text, n):
    return Config.from_str(text, n)


def nabla(x, i):
    """Move of automaton i away from x: +1 when x_i = 0, -1 when x_i = 1."""
    if not 1 <= i <= x.n:
        raise IndexError(f"automaton {i} out of range 1..{x.n}")
    return 1 - 2 * x[i]


def nabla_bit(bit):
    return 1 - 2 * bit


def flip(x, i):
    return x.flip(i)


def hd(x, y):
    """Set of automata where x and y differ."""
    if x.n != y.n:
        raise LengthMismatch(f"configurations of lengths {x.n} and {y.n}")
    d = x.bits ^ y.bits
    return frozenset(k + 1 for k in range(x.n) if (d >> k) & 1)


class LocalFunction:
    """One local transition function, compiled to a truth table.

    `support` holds the semantic input ids sorted ascending; `table` is an
    int whose bit a gives the value at the support assignment a (bit k of a
    = value of support[k]).
    """

    __slots__ = ("ast", "support", "table", "_shifts")

    def __init__(self, ast, support, table):
        self.ast = ast
        self.support = tuple(support)
        self.table = table
        self._shifts = tuple(v - 1 for v in self.support)

    @classmethod
    def compile(cls, ast):
        syntactic = sorted(ex.variables_of(ast))
        table = 0
        for a in range(1 << len(syntactic)):
            bits = 0
            for k, v in enumerate(syntactic):
                if (a >> k) & 1:
                    bits |= 1 << (v - 1)
            if ex.eval_expr_bits(ast, bits):
                table |= 1 << a
        support, table = _reduce_support(syntactic, table)
        return cls(ast, support, table)

    def index_of(self, bits):
        idx = 0
        for k, sh in enumerate(self._shifts):
            idx |= ((bits >> sh) & 1) << k
        return idx

    def eval_bits(self, bits):
        return (self.table >> self.index_of(bits)) & 1

    def is_constant(self):
        return not self.support

    def constant_value(self):
        return self.table & 1


def _reduce_support(support, table):
    """Drop inputs the table does not actually depend on."""
    support = list(support)
    k = 0
    while k < len(support):
        m = len(support)
        lo = 0
        hi = 0
        lo_i = 0
        for a in range(1 << m):
            if (a >> k) & 1:
                continue
            lo |= ((table >> a) & 1) << lo_i
            hi |= ((table >> (a | (1 << k))) & 1) << lo_i
            lo_i += 1
        if lo == hi:
            support.pop(k)
            table = lo
        else:
            k += 1
    return tuple(support), table


class BAN:
    """A Boolean automata network: n compiled local functions."""

    def __init__(self, functions):
        self.functions = list(functions)
        self.n = len(self.functions)
        self._sign_sets = {}

    @property
    def asts(self):
        return [f.ast for f in self.functions]

    def function(self, i):
        return self.functions[i - 1]

    def eval_function(self, i, x):
        return self.function(i).eval_bits(x.bits if isinstance(x, Config) else x)

    def in_neighbours(self, i):
        """Semantic support of f_i (ids with punctual influence somewhere)."""
        return self.function(i).support

    def out_neighbours(self, j):
        return tuple(i for i in range(1, self.n + 1) if j in self.function(i).support)

    # -- instability ---------------------------------------------------

    def unstable_bits(self, bits):
        mask = 0
        for k, f in enumerate(self.functions):
            if f.eval_bits(bits) != ((bits >> k) & 1):
                mask |= 1 << k
        return mask

    def unstable_set(self, x):
        mask = self.unstable_bits(x.bits)
        return frozenset(k + 1 for k in range(self.n) if (mask >> k) & 1)

    def stable_set(self, x):
        return frozenset(range(1, self.n + 1)) - self.unstable_set(x)

    # -- influence signs ------------------------------------------------

    def local_sign(self, x, j, i):
        """Punctual influence of j on i at x: (f_i(x flip j) - f_i(x)) * nabla(x, j)."""
        bits = x.bits if isinstance(x, Config) else x
        f = self.function(i)
        here = f.eval_bits(bits)
        there = f.eval_bits(bits ^ (1 << (j - 1)))
        return (there - here) * nabla_bit((bits >> (j - 1)) & 1)

    def arc_sign_set(self, j, i):
        """Punctual signs of arc (j, i) over all inputs: a frozenset of
        nonzero values; empty means no arc, {1,-1} means sign-ambivalent."""
        key = (j, i)
        cached = self._sign_sets.get(key)
        if cached is not None:
            return cached
        f = self.function(i)
        signs = set()
        if j in f.support:
            k = f.support.index(j)
            m = len(f.support)
            for a in range(1 << m):
                if (a >> k) & 1:
                    continue
                lo = (f.table >> a) & 1
                hi = (f.table >> (a | (1 << k))) & 1
                if lo != hi:
                    signs.add(hi - lo)  # nabla of input k at a is +1
                    if len(signs) == 2:
                        break
        result = frozenset(signs)
        self._sign_sets[key] = result
        return result

    def arc_sign(self, j, i):
        """Constant sign of arc (j, i): +1/-1, None when absent; raises
        NonMonotoneArc when both signs occur."""
        signs = self.arc_sign_set(j, i)
        if not signs:
            return None
        if len(signs) == 2:
            raise NonMonotoneArc(f"arc ({j}, {i}) carries both signs")
        return next(iter(signs))

    def arcs(self):
        out = []
        for i in range(1, self.n + 1):
            for j in self.function(i).support:
                out.append((j, i))
        return sorted(out)

    def is_monotone(self):
        """True plus None, or False plus a witness (x, y, j, i) of two
        configurations with contradicting punctual signs."""
        for i in range(1, self.n + 1):
            f = self.function(i)
            for j in f.support:
                if len(self.arc_sign_set(j, i)) == 2:
                    pos = neg = None
                    k = f.support.index(j)
                    for a in range(1 << len(f.support)):
                        if (a >> k) & 1:
                            continue
                        lo = (f.table >> a) & 1
                        hi = (f.table >> (a | (1 << k))) & 1
                        if hi > lo and pos is None:
                            pos = a
                        elif hi < lo and neg is None:
                            neg = a
                    x = Config(self.n, _assignment_bits(f.support, pos))
                    y = Config(self.n, _assignment_bits(f.support, neg))
                    return False, (x, y, j, i)
        return True, None

    # -- straightened inputs ---------------------------------------------

    def neighbour_input(self, x, j, i):
        """Input that i reads from j at x: x_j through the arc sign, or x_j
        itself when there is no arc (j, i)."""
        sign = self.arc_sign(j, i)
        if sign is None:
            return x[j]
        return sb(sign * bs(x[j]))

    def straight_function(self, i):
        """Truth table of f_i over straightened inputs; nondecreasing in
        every input for a monotone network."""
        f = self.function(i)
        neg_mask = 0
        for k, j in enumerate(f.support):
            if self.arc_sign(j, i) == -1:
                neg_mask |= 1 << k
        table = 0
        for a in range(1 << len(f.support)):
            table |= ((f.table >> (a ^ neg_mask)) & 1) << a
        return LocalFunction(None, f.support, table)

    # -- transforms -------------------------------------------------------

    def flip_transform(self, flip_set):
        """Exchange the two state labels of every automaton in flip_set.

        The result computes f'_j(x) = f_j(x xor F) xor [j in F]; its
        dynamics are those of the original under the renaming x -> x xor F.
        """
        flip_set = frozenset(flip_set)
        new_asts = []
        for i in range(1, self.n + 1):
            ast = ex.substitute_flips(self.function(i).ast, flip_set)
            if i in flip_set:
                ast = ex.negate(ast)
            new_asts.append(ast)
        return BAN([LocalFunction.compile(a) for a in new_asts])

    def semantically_equal(self, other):
        if self.n != other.n:
            return False
        return all(
            a.support == b.support and a.table == b.table
            for a, b in zip(self.functions, other.functions)
        )

    def render(self):
        return "\n".join(
            f"{i}: {ex.render(self.function(i).ast)}" for i in range(1, self.n + 1)
        )


def _assignment_bits(support, a):
    bits = 0
    for k, v in enumerate(support):
        if (a >> k) & 1:
            bits |= 1 << (v - 1)
    return bits


def ban_from_asts(asts):
    return BAN([LocalFunction.compile(a) for a in asts])


def ban_from_texts(texts):
    n = len(texts)
    return ban_from_asts([ex.parse_expr(t, n) for t in texts])


def parse_ban(text):
    """Parse the .ban file format: `id: expression` lines, `#` comments,
    ids 1..n in any order."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ex.ExprSyntaxError(f"line {lineno}: missing ':'", 0)
        try:
            ident = int(head.strip())
        except ValueError:
            raise ex.ExprSyntaxError(f"line {lineno}: bad automaton id {head.strip()!r}", 0)
        if ident in entries:
            raise DuplicateAutomaton(f"automaton {ident} defined twice")
        entries[ident] = (lineno, body.strip())
    if not entries:
        raise MissingAutomaton("no automata defined")
    n = max(entries)
    missing = [i for i in range(1, n + 1) if i not in entries]
    if missing:
        raise MissingAutomaton(f"missing automata: {missing}")
    asts = [ex.parse_expr(entries[i][1], n) for i in range(1, n + 1)]
    return ban_from_asts(asts)


def step_bits(ban, bits, i):
    """One asynchronous update of automaton i (identity when i is stable)."""
    f = ban.function(i)
    k = i - 1
    if f.eval_bits(bits) != ((bits >> k) & 1):
        return bits ^ (1 << k)
    return bits


def eliminate_real_sources(ban):
    """Split every constant automaton i into a frozen positive source (kept
    in slot i) plus a companion automaton appended at the end that carries
    i's old state; references to x_i in other functions move to the
    companion.  Returns (new_ban, lift, companions) where lift maps an old
    configuration to its counterpart and companions maps old id -> new id
    of the automaton playing its role.
    """
    constants = [i for i in range(1, ban.n + 1) if ban.function(i).is_constant()]
    if not constants:
        return ban, lambda x: x, {}
    n = ban.n
    companions = {s: n + k + 1 for k, s in enumerate(constants)}
    new_n = n + len(constants)
    asts = []
    for i in range(1, n + 1):
        if i in companions:
            asts.append(ex.Variable(i))  # frozen positive source loop
        else:
            asts.append(ex.rename_variables(ban.function(i).ast, companions))
    for s in constants:
        asts.append(ex.Variable(s))  # companion reads the frozen source
    new_ban = BAN([LocalFunction.compile(a) for a in asts])

    const_bits = {s: ban.function(s).constant_value() for s in constants}

    def lift(x):
        bits = x.bits
        out = 0
        for i in range(1, n + 1):
            if i in companions:
                out |= const_bits[i] << (i - 1)
                out |= ((bits >> (i - 1)) & 1) << (companions[i] - 1)
            else:
                out |= ((bits >> (i - 1)) & 1) << (i - 1)
        return Config(new_n, out)

    return new_ban, lift, companions


def source_automata(ban):
    """Automata whose only input is their own positive loop; they never
    change state."""
    for i in range(1, ban.n + 1):
        if ban.function(i).is_constant():
            raise ConstantFunctionPresent(
                f"automaton {i} has a constant function; split real sources first"
            )
    out = set()
    for i in range(1, ban.n + 1):
        f = ban.function(i)
        if f.support == (i,) and f.table == 0b10:  # f_i = x_i
            out.add(i)
    return frozenset(out)
