"""Boolean decision functions over subtask outputs.

Grammar (keywords case-insensitive, identifiers case-sensitive)::

    expr    := and_expr ("OR" and_expr)*
    and_expr:= unary ("AND" unary)*
    unary   := "NOT" unary | atom
    atom    := IDENT | "(" expr ")"

The same AST evaluates either on bits (plain boolean logic) or on reals in
[0, 1] through the product substitution ``A AND B -> A*B``,
``A OR B -> 1-(1-A)(1-B)``, ``NOT A -> 1-A``. The numeric form comes with
exact reverse-mode partial derivatives per subtask.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import EmptyExpression, ExpressionSyntaxError, UnknownSubtask


@dataclass(frozen=True)
class Leaf:
    index: int
    name: str = ""

    def __str__(self):
        return self.name or f"s{self.index}"


@dataclass(frozen=True)
class Not:
    child: "Expr"

    def __str__(self):
        return f"NOT {_wrap(self.child)}"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return f"{_wrap(self.left, Or)} AND {_wrap(self.right, Or, And)}"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return f"{self.left} OR {_wrap(self.right, Or)}"


Expr = Union[Leaf, Not, And, Or]


def _wrap(node, *kinds):
    kinds = kinds or (And, Or)
    return f"({node})" if isinstance(node, kinds) else str(node)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()])|(?P<bad>\S))")
_KEYWORDS = {"and", "or", "not"}


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastgroup)
        if m.lastgroup == "bad":
            raise ExpressionSyntaxError(f"unexpected character {m.group('bad')!r}", start,
                                        ("identifier", "NOT", "("))
        word = m.group(m.lastgroup)
        if m.lastgroup == "ident" and word.lower() in _KEYWORDS:
            tokens.append((word.upper(), word, start))
        elif m.lastgroup == "ident":
            tokens.append(("IDENT", word, start))
        else:
            tokens.append((word, word, start))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, names):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.index = {name: i for i, name in enumerate(names)}

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, word, at = self.peek()
        found = "end of input" if kind == "EOF" else repr(word)
        raise ExpressionSyntaxError(f"unexpected {found}", at, expected)

    def expression(self):
        node = self.conjunction()
        while self.peek()[0] == "OR":
            self.advance()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self):
        node = self.unary()
        while self.peek()[0] == "AND":
            self.advance()
            node = And(node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "NOT":
            self.advance()
            return Not(self.unary())
        return self.atom()

    def atom(self):
        kind, word, _ = self.peek()
        if kind == "IDENT":
            self.advance()
            if word not in self.index:
                raise UnknownSubtask(word)
            return Leaf(self.index[word], word)
        if kind == "(":
            self.advance()
            node = self.expression()
            if self.peek()[0] != ")":
                self.fail(("AND", "OR", ")"))
            self.advance()
            return node
        self.fail(("identifier", "NOT", "("))


def parse_and_bind(text: str, subtask_names: Sequence[str]) -> Expr:
    """Parse ``text`` and resolve identifiers to column indices of ``subtask_names``."""
    if not text or not text.strip():
        raise EmptyExpression("decision expression is empty")
    parser = _Parser(text, subtask_names)
    node = parser.expression()
    if parser.peek()[0] != "EOF":
        parser.fail(("AND", "OR", "end of input"))
    return node


def or_chain(subtask_names: Sequence[str]) -> Expr:
    """``s1 OR s2 OR ... OR sn``: flag content if any subtask fires."""
    return parse_and_bind(" OR ".join(subtask_names), subtask_names)


def nor_chain(subtask_names: Sequence[str]) -> Expr:
    """``NOT s1 AND NOT s2 AND ... AND NOT sn``: pass content only if no subtask fires."""
    return parse_and_bind(" AND ".join(f"NOT {s}" for s in subtask_names), subtask_names)


PRESETS = {"or-chain": or_chain, "nor-chain": nor_chain}


def leaves(expr: Expr) -> list[Leaf]:
    if isinstance(expr, Leaf):
        return [expr]
    if isinstance(expr, Not):
        return leaves(expr.child)
    return leaves(expr.left) + leaves(expr.right)


def max_index(expr: Expr) -> int:
    return max(leaf.index for leaf in leaves(expr))


# ------------------------------------------------------------- evaluation

def eval_boolean(expr: Expr, bits):
    """Boolean value of ``expr``.

    ``bits`` is a length-n 0/1 vector (returns an int) or an (N, n) matrix
    (returns a length-N int8 vector).
    """
    bits = np.asarray(bits).astype(bool)
    out = _eval_bool(expr, bits)
    if out.ndim == 0:
        return int(out)
    return out.astype(np.int8)


def _eval_bool(node, bits):
    if isinstance(node, Leaf):
        return bits[..., node.index]
    if isinstance(node, Not):
        return ~_eval_bool(node.child, bits)
    if isinstance(node, And):
        return _eval_bool(node.left, bits) & _eval_bool(node.right, bits)
    return _eval_bool(node.left, bits) | _eval_bool(node.right, bits)


def eval_numeric(expr: Expr, values):
    values = np.asarray(values, dtype=np.float64)
    return _forward(expr, values, {})


def eval_numeric_with_partials(expr: Expr, values):
    """Product-form value of ``expr`` and its gradient with respect to ``values``.

    ``values`` may be a length-n vector or an (N, n) matrix of rows; the
    partials have the same shape as ``values``. Subtasks that appear in
    several leaves get the sum of their contributions; subtasks absent from
    the expression get zero.
    """
    values = np.asarray(values, dtype=np.float64)
    cache = {}
    value = _forward(expr, values, cache)
    partials = np.zeros_like(values)
    _backward(expr, np.ones_like(value), cache, partials)
    if np.ndim(value) == 0:
        value = float(value)
    return value, partials


def _forward(node, x, cache):
    if isinstance(node, Leaf):
        v = x[..., node.index]
    elif isinstance(node, Not):
        v = 1.0 - _forward(node.child, x, cache)
    elif isinstance(node, And):
        v = _forward(node.left, x, cache) * _forward(node.right, x, cache)
    else:
        a = _forward(node.left, x, cache)
        b = _forward(node.right, x, cache)
        v = 1.0 - (1.0 - a) * (1.0 - b)
    cache[id(node)] = v
    return v


def _backward(node, adj, cache, grads):
    if isinstance(node, Leaf):
        grads[..., node.index] += adj
    elif isinstance(node, Not):
        _backward(node.child, -adj, cache, grads)
    elif isinstance(node, And):
        a, b = cache[id(node.left)], cache[id(node.right)]
        _backward(node.left, adj * b, cache, grads)
        _backward(node.right, adj * a, cache, grads)
    else:
        a, b = cache[id(node.left)], cache[id(node.right)]
        _backward(node.left, adj * (1.0 - b), cache, grads)
        _backward(node.right, adj * (1.0 - a), cache, grads)
