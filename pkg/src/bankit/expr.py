"""Boolean expression language for local transition functions.

Grammar (precedence low to high, `!` binds tightest):

    expr  := or
    or    := and  (('|' | OR)  and)*
    and   := not  (('&' | AND) not)*
    not   := ('!' | NOT) not | atom
    atom  := '0' | '1' | x<digits> | '(' expr ')'

Operator words are case-insensitive.  Chains of the same binary operator
are flattened into a single n-ary node, so `x1 & x2 & x3` parses to one
conjunction with three children.
"""

import re

from .errors import ExprSyntaxError, UnknownVariable


class Constant:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = bool(value)

    def __eq__(self, other):
        return isinstance(other, Constant) and self.value == other.value

    def __hash__(self):
        return hash(("const", self.value))

    def __repr__(self):
        return f"Constant({self.value})"


class Variable:
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index  # automaton id, 1-based

    def __eq__(self, other):
        return isinstance(other, Variable) and self.index == other.index

    def __hash__(self):
        return hash(("var", self.index))

    def __repr__(self):
        return f"Variable({self.index})"


class Negation:
    __slots__ = ("child",)

    def __init__(self, child):
        self.child = child

    def __eq__(self, other):
        return isinstance(other, Negation) and self.child == other.child

    def __hash__(self):
        return hash(("not", self.child))

    def __repr__(self):
        return f"Negation({self.child!r})"


class Conjunction:
    __slots__ = ("children",)

    def __init__(self, children):
        children = tuple(children)
        if len(children) < 2:
            raise ValueError("conjunction needs at least 2 children")
        self.children = children

    def __eq__(self, other):
        return isinstance(other, Conjunction) and self.children == other.children

    def __hash__(self):
        return hash(("and", self.children))

    def __repr__(self):
        return f"Conjunction({list(self.children)!r})"


class Disjunction:
    __slots__ = ("children",)

    def __init__(self, children):
        children = tuple(children)
        if len(children) < 2:
            raise ValueError("disjunction needs at least 2 children")
        self.children = children

    def __eq__(self, other):
        return isinstance(other, Disjunction) and self.children == other.children

    def __hash__(self):
        return hash(("or", self.children))

    def __repr__(self):
        return f"Disjunction({list(self.children)!r})"


_TOKEN = re.compile(
    r"\s*(?:(?P<var>[xX]\d+)|(?P<const>[01])|(?P<not>!|\bnot\b)"
    r"|(?P<and>&|\band\b)|(?P<or>\||\bor\b)|(?P<lpar>\()|(?P<rpar>\)))",
    re.IGNORECASE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ExprSyntaxError(f"unexpected input {rest[:10]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, n):
        self.tokens = tokens
        self.n = n
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        e = self.parse_or()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return e

    def parse_or(self):
        parts = [self.parse_and()]
        while self.peek()[0] == "or":
            self.take()
            parts.append(self.parse_and())
        if len(parts) == 1:
            return parts[0]
        return Disjunction(parts)

    def parse_and(self):
        parts = [self.parse_not()]
        while self.peek()[0] == "and":
            self.take()
            parts.append(self.parse_not())
        if len(parts) == 1:
            return parts[0]
        return Conjunction(parts)

    def parse_not(self):
        kind, _, _ = self.peek()
        if kind == "not":
            self.take()
            return Negation(self.parse_not())
        return self.parse_atom()

    def parse_atom(self):
        kind, text, pos = self.take()
        if kind == "const":
            return Constant(text == "1")
        if kind == "var":
            index = int(text[1:])
            if index < 1 or index > self.n:
                raise UnknownVariable(index, self.n)
            return Variable(index)
        if kind == "lpar":
            e = self.parse_or()
            kind2, text2, pos2 = self.take()
            if kind2 != "rpar":
                raise ExprSyntaxError(f"expected ')', got {text2!r}", pos2)
            return e
        raise ExprSyntaxError(f"expected expression, got {text!r}", pos)


def parse_expr(text, n):
    """Parse `text` into an AST; variables must lie in x1..xn."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(_tokenize(text), n).parse()


def render(e):
    """Render an AST back to source text; reparses to an equal AST."""
    if isinstance(e, Constant):
        return "1" if e.value else "0"
    if isinstance(e, Variable):
        return f"x{e.index}"
    if isinstance(e, Negation):
        return "!" + _render_child(e.child, 3)
    if isinstance(e, Conjunction):
        return " & ".join(_render_child(c, 2) for c in e.children)
    if isinstance(e, Disjunction):
        return " | ".join(_render_child(c, 1) for c in e.children)
    raise TypeError(f"not an expression node: {e!r}")


def _level(e):
    if isinstance(e, Disjunction):
        return 1
    if isinstance(e, Conjunction):
        return 2
    return 4  # atoms and negations never need parentheses


def _render_child(e, parent_level):
    text = render(e)
    if _level(e) <= parent_level:
        return "(" + text + ")"
    return text


def eval_expr_bits(e, bits):
    """Evaluate over a configuration packed as an int (bit i-1 = x_i)."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        return bool((bits >> (e.index - 1)) & 1)
    if isinstance(e, Negation):
        return not eval_expr_bits(e.child, bits)
    if isinstance(e, Conjunction):
        return all(eval_expr_bits(c, bits) for c in e.children)
    if isinstance(e, Disjunction):
        return any(eval_expr_bits(c, bits) for c in e.children)
    raise TypeError(f"not an expression node: {e!r}")


def variables_of(e):
    """Set of variable indices appearing syntactically in the AST."""
    if isinstance(e, Constant):
        return set()
    if isinstance(e, Variable):
        return {e.index}
    if isinstance(e, Negation):
        return variables_of(e.child)
    return set().union(*(variables_of(c) for c in e.children))


def negate(e):
    """Logical negation, collapsing double negations structurally."""
    if isinstance(e, Negation):
        return e.child
    if isinstance(e, Constant):
        return Constant(not e.value)
    return Negation(e)


def substitute_flips(e, flip_set):
    """Replace every occurrence of x_i, i in flip_set, by !x_i."""
    if isinstance(e, Constant):
        return e
    if isinstance(e, Variable):
        if e.index in flip_set:
            return Negation(e)
        return e
    if isinstance(e, Negation):
        return negate(substitute_flips(e.child, flip_set))
    if isinstance(e, Conjunction):
        return Conjunction([substitute_flips(c, flip_set) for c in e.children])
    return Disjunction([substitute_flips(c, flip_set) for c in e.children])


def rename_variables(e, mapping):
    """Rename variable indices via `mapping` (ids not in it are unchanged)."""
    if isinstance(e, Constant):
        return e
    if isinstance(e, Variable):
        return Variable(mapping.get(e.index, e.index))
    if isinstance(e, Negation):
        return Negation(rename_variables(e.child, mapping))
    if isinstance(e, Conjunction):
        return Conjunction([rename_variables(c, mapping) for c in e.children])
    return Disjunction([rename_variables(c, mapping) for c in e.children])
