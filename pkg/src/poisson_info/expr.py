"""Tokenizer, AST and recursive-descent parser for set and quantity expressions.

Set expressions::

    set    := diff ('|' diff)*
    diff   := inter ('\\' inter)*
    inter  := unary ('&' unary)*
    unary  := '~' unary | atom
    atom   := 'rv' '(' NAME (',' NAME)* ')'
            | 'ev' '(' event ')'
            | 'cross' '(' event ',' event ')'
            | 'rel' '(' event ',' event ')'
            | 'multi' '(' event (';' event)* ')'
            | 'full' | 'empty' | '(' set ')'

Events use the same operators; ``Omega`` names the whole space.

Quantities are linear combinations::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := NUMBER | '-' factor | '(' expr ')'
            | 'H' '(' names ['|' context] ')'
            | 'I' '(' names (';' names)+ ['|' context] ')'
            | 'm' '(' set ')'
            | 'P' '(' event ')'
    context := item (',' item)*   with item NAME or '@' event

and a relation is ``expr op expr`` with ``op`` one of ``<= >= = < >``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError

__all__ = [
    "Token",
    "tokenize",
    "parse_set",
    "parse_event",
    "parse_quantity",
    "parse_relation",
    "Relation",
]

OMEGA = "Omega"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|[-+*()=<>,;|&\\~@])
    """,
    re.VERBOSE,
)

RELATIONS = ("<=", ">=", "=", "<", ">")


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    """Split ``text`` into tokens; ``line``/``col`` give the position of its
    first character in the enclosing document (1-based)."""
    out = []
    pos = 0
    start = pos - col + 1  # offset of column 1 on the current line
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - start + 1))
        else:
            nl = m.group().rfind("\n")
            if nl >= 0:
                line += m.group().count("\n")
                start = pos + nl + 1
        pos = m.end()
    out.append(Token("end", "", line, pos - start + 1))
    return out


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class EvName:
    name: str


@dataclass(frozen=True)
class EvOp:
    op: str  # '&', '|', '\\'
    left: object
    right: object


@dataclass(frozen=True)
class EvNot:
    arg: object


@dataclass(frozen=True)
class SetRV:
    names: tuple[str, ...]


@dataclass(frozen=True)
class SetEv:
    event: object


@dataclass(frozen=True)
class SetCross:
    kind: str  # 'cross' or 'rel'
    first: object
    rest: object


@dataclass(frozen=True)
class SetMulti:
    blocks: tuple


@dataclass(frozen=True)
class SetConst:
    full: bool


@dataclass(frozen=True)
class SetOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class SetNot:
    arg: object


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Context:
    rvs: tuple[str, ...] = ()
    events: tuple = ()


@dataclass(frozen=True)
class QH:
    names: tuple[str, ...]
    ctx: Context


@dataclass(frozen=True)
class QI:
    groups: tuple[tuple[str, ...], ...]
    ctx: Context


@dataclass(frozen=True)
class QM:
    region: object


@dataclass(frozen=True)
class QP:
    event: object


@dataclass(frozen=True)
class QBin:
    op: str  # '+', '-', '*'
    left: object
    right: object


@dataclass(frozen=True)
class QNeg:
    arg: object


@dataclass(frozen=True)
class Relation:
    lhs: object
    op: str
    rhs: object


# ------------------------------------------------------------------ parser

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text == text

    def take(self, text: str | None = None, kind: str | None = None) -> Token:
        tok = self.tok
        if text is not None and not (tok.kind in ("op", "name") and tok.text == text):
            self.error(f"expected {text!r}")
        if kind is not None and tok.kind != kind:
            self.error(f"expected {'a name' if kind == 'name' else kind}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def finish(self):
        if self.tok.kind != "end":
            self.error("unexpected trailing input")

    # events ------------------------------------------------------------
    def event(self):
        node = self.ev_diff()
        while self.at("|"):
            self.take()
            node = EvOp("|", node, self.ev_diff())
        return node

    def ev_diff(self):
        node = self.ev_inter()
        while self.at("\\"):
            self.take()
            node = EvOp("\\", node, self.ev_inter())
        return node

    def ev_inter(self):
        node = self.ev_unary()
        while self.at("&"):
            self.take()
            node = EvOp("&", node, self.ev_unary())
        return node

    def ev_unary(self):
        if self.accept("~"):
            return EvNot(self.ev_unary())
        if self.accept("("):
            node = self.event()
            self.take(")")
            return node
        return EvName(self.take(kind="name").text)

    # sets ----------------------------------------------------------------
    def set_expr(self):
        node = self.set_diff()
        while self.at("|"):
            self.take()
            node = SetOp("|", node, self.set_diff())
        return node

    def set_diff(self):
        node = self.set_inter()
        while self.at("\\"):
            self.take()
            node = SetOp("\\", node, self.set_inter())
        return node

    def set_inter(self):
        node = self.set_unary()
        while self.at("&"):
            self.take()
            node = SetOp("&", node, self.set_unary())
        return node

    def set_unary(self):
        if self.accept("~"):
            return SetNot(self.set_unary())
        return self.set_atom()

    def set_atom(self):
        if self.accept("("):
            node = self.set_expr()
            self.take(")")
            return node
        tok = self.tok
        if tok.kind != "name":
            self.error("expected a set expression")
        word = tok.text
        self.i += 1
        if word == "full":
            return SetConst(True)
        if word == "empty":
            return SetConst(False)
        if word == "rv":
            self.take("(")
            names = self.names()
            self.take(")")
            return SetRV(names)
        if word == "ev":
            self.take("(")
            e = self.event()
            self.take(")")
            return SetEv(e)
        if word in ("cross", "rel"):
            self.take("(")
            a = self.event()
            self.take(",")
            b = self.event()
            self.take(")")
            return SetCross(word, a, b)
        if word == "multi":
            self.take("(")
            blocks = [self.event()]
            while self.accept(";"):
                blocks.append(self.event())
            self.take(")")
            return SetMulti(tuple(blocks))
        self.error("expected rv(), ev(), cross(), rel(), multi(), full or empty", tok)

    # quantities ----------------------------------------------------------
    def quantity(self):
        node = self.q_term()
        while self.at("+") or self.at("-"):
            op = self.take().text
            node = QBin(op, node, self.q_term())
        return node

    def q_term(self):
        node = self.q_factor()
        while self.at("*"):
            self.take()
            node = QBin("*", node, self.q_factor())
        return node

    def q_factor(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(Fraction(tok.text))
        if self.accept("-"):
            return QNeg(self.q_factor())
        if self.accept("+"):
            return self.q_factor()
        if self.accept("("):
            node = self.quantity()
            self.take(")")
            return node
        if tok.kind == "name" and tok.text in ("H", "I", "m", "P"):
            self.i += 1
            self.take("(")
            if tok.text == "H":
                names = self.names()
                node = QH(names, self.context())
            elif tok.text == "I":
                groups = [self.names()]
                while self.accept(";"):
                    groups.append(self.names())
                if len(groups) < 2:
                    self.error("I() needs at least two groups separated by ';'")
                node = QI(tuple(groups), self.context())
            elif tok.text == "m":
                node = QM(self.set_expr())
            else:
                node = QP(self.event())
            self.take(")")
            return node
        self.error("expected a number, H(), I(), m() or P()")

    def names(self) -> tuple[str, ...]:
        out = [self.take(kind="name").text]
        while True:
            if self.accept(","):
                out.append(self.take(kind="name").text)
            elif self.tok.kind == "name":
                out.append(self.take().text)
            else:
                return tuple(out)

    def context(self) -> Context:
        if not self.accept("|"):
            return Context()
        rvs, events = [], []
        while True:
            if self.accept("@"):
                events.append(self.ev_unary())
            else:
                rvs.append(self.take(kind="name").text)
            if not self.accept(","):
                break
        return Context(tuple(rvs), tuple(events))

    def relation(self) -> Relation:
        lhs = self.quantity()
        tok = self.tok
        if not (tok.kind == "op" and tok.text in RELATIONS):
            self.error("expected a relation (<=, >=, =, <, >)")
        self.i += 1
        rhs = self.quantity()
        return Relation(lhs, tok.text, rhs)


def _run(method: str, text: str, line: int, col: int):
    p = _Parser(tokenize(text, line, col))
    node = getattr(p, method)()
    p.finish()
    return node


def parse_set(text: str, line: int = 1, col: int = 1):
    return _run("set_expr", text, line, col)


def parse_event(text: str, line: int = 1, col: int = 1):
    return _run("event", text, line, col)


def parse_quantity(text: str, line: int = 1, col: int = 1):
    return _run("quantity", text, line, col)


def parse_relation(text: str, line: int = 1, col: int = 1) -> Relation:
    return _run("relation", text, line, col)


# ------------------------------------------------------------- utilities

def names_in(node) -> tuple[set, set]:
    """``(rv names, event names)`` referenced anywhere in ``node``."""
    rvs: set = set()
    evs: set = set()

    def walk(x):
        if isinstance(x, EvName):
            if x.name != OMEGA:
                evs.add(x.name)
        elif isinstance(x, SetRV):
            rvs.update(x.names)
        elif isinstance(x, QH):
            rvs.update(x.names)
            walk(x.ctx)
        elif isinstance(x, QI):
            for g in x.groups:
                rvs.update(g)
            walk(x.ctx)
        elif isinstance(x, Context):
            rvs.update(x.rvs)
            for e in x.events:
                walk(e)
        elif hasattr(x, "__dataclass_fields__"):
            for f in x.__dataclass_fields__:
                v = getattr(x, f)
                if isinstance(v, tuple):
                    for y in v:
                        walk(y)
                else:
                    walk(v)

    walk(node)
    return rvs, evs
