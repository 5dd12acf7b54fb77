"""Abstract syntax, parsing, printing and structural queries.

The parser accepts the base sabotage modal language only.  The expanded
constructors (nominals, labeled modalities, inverses, global modalities,
nominal quantifiers) are produced internally by the rewrite engine and are
printable but not parseable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# An EdgeLabelSet is a frozenset of (nominal, nominal) pairs.  Order inside a
# pair is significant (directed edge); distinct pairs may denote the same
# concrete edge.
EdgeLabelSet = frozenset

EMPTY_EDGES: EdgeLabelSet = frozenset()

_NOMINAL_RE = re.compile(r"i[0-9]+$")


class Formula:
    """Base class for all formula constructors."""

    __slots__ = ()


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Nom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    child: Formula


@dataclass(frozen=True)
class Dia(Formula):
    child: Formula


@dataclass(frozen=True)
class SBox(Formula):
    """[!] : after every single deletion of a current edge."""

    child: Formula


@dataclass(frozen=True)
class SDia(Formula):
    """<!> : after some single deletion of a current edge."""

    child: Formula


@dataclass(frozen=True)
class LBox(Formula):
    """box^S : universal over r0 minus the edges labeled by S."""

    s: EdgeLabelSet
    child: Formula


@dataclass(frozen=True)
class LDia(Formula):
    s: EdgeLabelSet
    child: Formula


@dataclass(frozen=True)
class InvLBox(Formula):
    """inv-box^S : universal over the converse of r0 minus S."""

    s: EdgeLabelSet
    child: Formula


@dataclass(frozen=True)
class InvLDia(Formula):
    s: EdgeLabelSet
    child: Formula


@dataclass(frozen=True)
class GBox(Formula):
    """A : global universal modality."""

    child: Formula


@dataclass(frozen=True)
class GDia(Formula):
    """E : global existential modality."""

    child: Formula


@dataclass(frozen=True)
class ForallNom(Formula):
    nom: str
    child: Formula


@dataclass(frozen=True)
class ExistsNom(Formula):
    nom: str
    child: Formula


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected=()):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.expected = tuple(expected)


_SYMBOLS = ["<->", "<=", "<!>", "<>", "[!]", "[]", "->", "~", "&", "|", "(", ")"]
_IDENT_RE = re.compile(r"[a-z][A-Za-z0-9]*")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, pos):
                tokens.append((sym, pos))
                pos += len(sym)
                break
        else:
            m = _IDENT_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {ch!r}", pos)
            tokens.append(("ident:" + m.group(), pos))
            pos = m.end()
    tokens.append(("$end", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.idx = 0

    def peek(self) -> str:
        return self.tokens[self.idx][0]

    def pos(self) -> int:
        return self.tokens[self.idx][1]

    def advance(self) -> str:
        tok = self.tokens[self.idx][0]
        self.idx += 1
        return tok

    def expect(self, tok: str):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}",
                             self.pos(), expected=(tok,))
        self.advance()

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "<->":
            self.advance()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.advance()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.advance()
            return Not(self.unary())
        if tok == "<>":
            self.advance()
            return Dia(self.unary())
        if tok == "[]":
            self.advance()
            return Box(self.unary())
        if tok == "<!>":
            self.advance()
            return SDia(self.unary())
        if tok == "[!]":
            self.advance()
            return SBox(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if tok.startswith("ident:"):
            name = tok[len("ident:"):]
            if name == "bot":
                self.advance()
                return Bot()
            if name == "top":
                self.advance()
                return Top()
            if name[0] == "i" and len(name) > 1 and name[1].isdigit():
                raise ParseError(
                    f"identifier {name!r} is reserved for nominals", self.pos())
            self.advance()
            return Prop(name)
        raise ParseError(f"unexpected token {tok!r}", self.pos(),
                         expected=("bot", "top", "ident", "(", "~"))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.expect("$end")
    return f


def parse_inequality(text: str):
    """Parse `phi <= psi`, or a bare `phi -> psi` read as phi <= psi.

    A bare formula phi without a top-level implication is read as top <= phi.
    Returns a (lhs, rhs) pair of formulas.
    """
    p = _Parser(text)
    lhs = p.formula()
    if p.peek() == "<=":
        p.advance()
        rhs = p.formula()
        p.expect("$end")
        return lhs, rhs
    p.expect("$end")
    if isinstance(lhs, Imp):
        return lhs.left, lhs.right
    return Top(), lhs


# ---------------------------------------------------------------------------
# printing

def print_edge_set(s: EdgeLabelSet) -> str:
    pairs = ",".join(f"({a},{b})" for a, b in sorted(s))
    return "{" + pairs + "}"


# precedence levels: iff=0, imp=1, or=2, and=3, unary=4, atom=5
def _print(f: Formula, prec: int) -> str:
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Top):
        return "top"
    if isinstance(f, (Prop, Nom)):
        return f.name
    if isinstance(f, Iff):
        text = f"{_print(f.left, 1)} <-> {_print(f.right, 0)}"
        return f"({text})" if prec > 0 else text
    if isinstance(f, Imp):
        text = f"{_print(f.left, 2)} -> {_print(f.right, 1)}"
        return f"({text})" if prec > 1 else text
    if isinstance(f, Or):
        text = f"{_print(f.left, 2)} | {_print(f.right, 3)}"
        return f"({text})" if prec > 2 else text
    if isinstance(f, And):
        text = f"{_print(f.left, 3)} & {_print(f.right, 4)}"
        return f"({text})" if prec > 3 else text
    if isinstance(f, Not):
        return f"~{_print(f.child, 4)}"
    if isinstance(f, Dia):
        return f"<>{_print(f.child, 4)}"
    if isinstance(f, Box):
        return f"[]{_print(f.child, 4)}"
    if isinstance(f, SDia):
        return f"<!>{_print(f.child, 4)}"
    if isinstance(f, SBox):
        return f"[!]{_print(f.child, 4)}"
    if isinstance(f, LDia):
        return f"dia^{print_edge_set(f.s)} {_print(f.child, 4)}"
    if isinstance(f, LBox):
        return f"box^{print_edge_set(f.s)} {_print(f.child, 4)}"
    if isinstance(f, InvLDia):
        return f"inv-dia^{print_edge_set(f.s)} {_print(f.child, 4)}"
    if isinstance(f, InvLBox):
        return f"inv-box^{print_edge_set(f.s)} {_print(f.child, 4)}"
    if isinstance(f, GBox):
        return f"A {_print(f.child, 4)}"
    if isinstance(f, GDia):
        return f"E {_print(f.child, 4)}"
    if isinstance(f, ForallNom):
        return f"forall {f.nom}. {_print(f.child, 4)}"
    if isinstance(f, ExistsNom):
        return f"exists {f.nom}. {_print(f.child, 4)}"
    msg = f"cannot print {f!r}"
    raise ValueError(msg)


def print_formula(f: Formula) -> str:
    return _print(f, 0)


# ---------------------------------------------------------------------------
# structural queries

def children(f: Formula):
    if isinstance(f, (Not, Box, Dia, SBox, SDia, LBox, LDia, InvLBox, InvLDia,
                      GBox, GDia, ForallNom, ExistsNom)):
        return (f.child,)
    if isinstance(f, (And, Or, Imp, Iff)):
        return (f.left, f.right)
    return ()


def props_of(f: Formula) -> frozenset:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Prop):
            out.add(g.name)
        stack.extend(children(g))
    return frozenset(out)


def nominals_of(f: Formula) -> frozenset:
    """Free nominal names of f, including those inside edge labels."""
    if isinstance(f, Nom):
        return frozenset({f.name})
    if isinstance(f, (LBox, LDia, InvLBox, InvLDia)):
        names = {n for pair in f.s for n in pair}
        return frozenset(names) | nominals_of(f.child)
    if isinstance(f, (ForallNom, ExistsNom)):
        return nominals_of(f.child) - {f.nom}
    out = frozenset()
    for g in children(f):
        out |= nominals_of(g)
    return out


def all_names_of(f: Formula) -> frozenset:
    """Every nominal name appearing in f, bound or free."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Nom):
            out.add(g.name)
        elif isinstance(g, (LBox, LDia, InvLBox, InvLDia)):
            out.update(n for pair in g.s for n in pair)
        elif isinstance(g, (ForallNom, ExistsNom)):
            out.add(g.nom)
        stack.extend(children(g))
    return frozenset(out)


def is_pure(f: Formula) -> bool:
    """A formula is pure iff it contains no propositional variables."""
    return not props_of(f)


def is_static(f: Formula) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (SBox, SDia)):
            return False
        stack.extend(children(g))
    return True


def is_context_free(f: Formula) -> bool:
    """True iff f contains none of the contextual connectives [] <> [!] <!>.

    Such formulas are insensitive to the accumulated deletion context.
    """
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Box, Dia, SBox, SDia)):
            return False
        stack.extend(children(g))
    return True


def is_base(f: Formula) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if not isinstance(g, (Bot, Top, Prop, Not, And, Or, Imp, Iff,
                              Box, Dia, SBox, SDia)):
            return False
        stack.extend(children(g))
    return True


def eliminate_iff(f: Formula) -> Formula:
    if isinstance(f, Iff):
        left = eliminate_iff(f.left)
        right = eliminate_iff(f.right)
        return And(Imp(left, right), Imp(right, left))
    return _rebuild(f, tuple(eliminate_iff(c) for c in children(f)))


def substitute_prop(f: Formula, name: str, g: Formula) -> Formula:
    if isinstance(f, Prop) and f.name == name:
        return g
    kids = children(f)
    if not kids:
        return f
    return _rebuild(f, tuple(substitute_prop(c, name, g) for c in kids))


def _rebuild(f: Formula, kids: tuple) -> Formula:
    if not kids:
        return f
    if isinstance(f, (And, Or, Imp, Iff)):
        return type(f)(kids[0], kids[1])
    if isinstance(f, (LBox, LDia, InvLBox, InvLDia)):
        return type(f)(f.s, kids[0])
    if isinstance(f, (ForallNom, ExistsNom)):
        return type(f)(f.nom, kids[0])
    return type(f)(kids[0])


# ---------------------------------------------------------------------------
# polarity

def occurrence_signs(f: Formula, name: str, sign: str = "+"):
    """Yield the sign of every occurrence of Prop(name) in f.

    Signs follow negation counting: flip under Not, flip in the antecedent of
    Imp; each occurrence under Iff is reported with both signs.
    """
    if isinstance(f, Prop):
        if f.name == name:
            yield sign
        return
    flip = "-" if sign == "+" else "+"
    if isinstance(f, Not):
        yield from occurrence_signs(f.child, name, flip)
    elif isinstance(f, Imp):
        yield from occurrence_signs(f.left, name, flip)
        yield from occurrence_signs(f.right, name, sign)
    elif isinstance(f, Iff):
        for side in (f.left, f.right):
            yield from occurrence_signs(side, name, sign)
            yield from occurrence_signs(side, name, flip)
    else:
        for g in children(f):
            yield from occurrence_signs(g, name, sign)


def polarity(f: Formula, name: str) -> str:
    signs = set(occurrence_signs(f, name))
    if not signs:
        return "absent"
    if signs == {"+"}:
        return "positive"
    if signs == {"-"}:
        return "negative"
    return "both"


# ---------------------------------------------------------------------------
# fresh nominals

class FreshNominals:
    """Monotone counter i0, i1, i2, ... skipping reserved names."""

    def __init__(self, reserved=()):
        self.reserved = set(reserved)
        self.issued = []
        self._next = 0

    def fresh(self) -> str:
        while True:
            name = f"i{self._next}"
            self._next += 1
            if name not in self.reserved:
                self.reserved.add(name)
                self.issued.append(name)
                return name


def is_nominal_name(name: str) -> bool:
    return bool(_NOMINAL_RE.match(name))
