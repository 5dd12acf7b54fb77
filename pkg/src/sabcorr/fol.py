"""First-order correspondence language: standard translation, evaluation
over finite frames, equivalence checking, and text/JSON/TPTP emission.

Terms are plain strings: domain variables (x, y0, y1, ...) and nominal
names (i0, i1, ...), which are treated as quantifiable variables so the
frame-validity harness can close them universally.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .syntax import (
    And, Bot, Box, Dia, ExistsNom, ForallNom, Formula, GBox, GDia, Iff, Imp,
    InvLBox, InvLDia, LBox, LDia, Nom, Not, Or, Prop, SBox, SDia, Top,
)
from .semantics import (
    Ineq, KripkeFrame, MegaAnd, MegaGuard, QuasiUQ, Statement, UQIneq,
    Valuation, enumerate_frames,
)


class FOFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Eq(FOFormula):
    a: str
    b: str


@dataclass(frozen=True)
class Rel(FOFormula):
    a: str
    b: str


@dataclass(frozen=True)
class Pred(FOFormula):
    name: str
    t: str


@dataclass(frozen=True)
class FONot(FOFormula):
    child: FOFormula


@dataclass(frozen=True)
class FOAnd(FOFormula):
    parts: tuple


@dataclass(frozen=True)
class FOOr(FOFormula):
    parts: tuple


@dataclass(frozen=True)
class FOImp(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOForall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class FOExists(FOFormula):
    var: str
    body: FOFormula


def fo_and(parts) -> FOFormula:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return FOAnd(parts)


def fo_or(parts) -> FOFormula:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return FOOr(parts)


class _VarGen:
    def __init__(self):
        self.count = 0

    def fresh(self) -> str:
        name = f"y{self.count}"
        self.count += 1
        return name


def _exclusions(e, a: str, b: str):
    """One conjunct per pair in e: the edge (a,b) is not that deleted pair."""
    return [FONot(FOAnd((Eq(a, v), Eq(b, w)))) for (v, w) in e]


def _label_pairs(s) -> tuple:
    return tuple(sorted(s))


def st_formula(f: Formula, x: str, e: tuple, gen: _VarGen) -> FOFormula:
    if isinstance(f, Bot):
        return FONot(Eq(x, x))
    if isinstance(f, Top):
        return Eq(x, x)
    if isinstance(f, Prop):
        return Pred(f.name, x)
    if isinstance(f, Nom):
        return Eq(x, f.name)
    if isinstance(f, Not):
        return FONot(st_formula(f.child, x, e, gen))
    if isinstance(f, And):
        return FOAnd((st_formula(f.left, x, e, gen),
                      st_formula(f.right, x, e, gen)))
    if isinstance(f, Or):
        return FOOr((st_formula(f.left, x, e, gen),
                     st_formula(f.right, x, e, gen)))
    if isinstance(f, Imp):
        return FOImp(st_formula(f.left, x, e, gen),
                     st_formula(f.right, x, e, gen))
    if isinstance(f, Iff):
        a = st_formula(f.left, x, e, gen)
        b = st_formula(f.right, x, e, gen)
        c = st_formula(f.left, x, e, gen)
        d = st_formula(f.right, x, e, gen)
        return FOAnd((FOImp(a, b), FOImp(d, c)))
    if isinstance(f, Dia):
        y = gen.fresh()
        return FOExists(y, fo_and([Rel(x, y), *_exclusions(e, x, y),
                                   st_formula(f.child, y, e, gen)]))
    if isinstance(f, Box):
        y = gen.fresh()
        return FOForall(y, FOImp(fo_and([Rel(x, y), *_exclusions(e, x, y)]),
                                 st_formula(f.child, y, e, gen)))
    if isinstance(f, SDia):
        y, z = gen.fresh(), gen.fresh()
        return FOExists(y, FOExists(z, fo_and(
            [Rel(y, z), *_exclusions(e, y, z),
             st_formula(f.child, x, e + ((y, z),), gen)])))
    if isinstance(f, SBox):
        y, z = gen.fresh(), gen.fresh()
        return FOForall(y, FOForall(z, FOImp(
            fo_and([Rel(y, z), *_exclusions(e, y, z)]),
            st_formula(f.child, x, e + ((y, z),), gen))))
    if isinstance(f, LDia):
        y = gen.fresh()
        return FOExists(y, fo_and(
            [Rel(x, y), *_exclusions(_label_pairs(f.s), x, y),
             st_formula(f.child, y, e, gen)]))
    if isinstance(f, LBox):
        y = gen.fresh()
        return FOForall(y, FOImp(
            fo_and([Rel(x, y), *_exclusions(_label_pairs(f.s), x, y)]),
            st_formula(f.child, y, e, gen)))
    if isinstance(f, InvLDia):
        y = gen.fresh()
        return FOExists(y, fo_and(
            [Rel(y, x), *_exclusions(_label_pairs(f.s), y, x),
             st_formula(f.child, y, e, gen)]))
    if isinstance(f, InvLBox):
        y = gen.fresh()
        return FOForall(y, FOImp(
            fo_and([Rel(y, x), *_exclusions(_label_pairs(f.s), y, x)]),
            st_formula(f.child, y, e, gen)))
    if isinstance(f, GDia):
        y = gen.fresh()
        return FOExists(y, st_formula(f.child, y, e, gen))
    if isinstance(f, GBox):
        y = gen.fresh()
        return FOForall(y, st_formula(f.child, y, e, gen))
    if isinstance(f, ForallNom):
        return FOForall(f.nom, st_formula(f.child, x, e, gen))
    if isinstance(f, ExistsNom):
        return FOExists(f.nom, st_formula(f.child, x, e, gen))
    msg = f"cannot translate {f!r}"
    raise ValueError(msg)


def translate_formula(f: Formula, x: str = "x", e: tuple = ()) -> FOFormula:
    return st_formula(f, x, e, _VarGen())


def _st_statement(s: Statement, gen: _VarGen) -> FOFormula:
    if isinstance(s, Ineq):
        return FOForall("x", FOImp(
            st_formula(s.lhs, "x", _label_pairs(s.sup), gen),
            st_formula(s.rhs, "x", _label_pairs(s.sub), gen)))
    if isinstance(s, MegaAnd):
        return fo_and([_st_statement(p, gen) for p in s.parts])
    if isinstance(s, MegaGuard):
        guard = fo_and([Rel(s.m0, s.m1),
                        *_exclusions(_label_pairs(s.s), s.m0, s.m1)])
        return FOForall(s.m0, FOForall(
            s.m1, FOImp(guard, _st_statement(s.body, gen))))
    if isinstance(s, UQIneq):
        out = _st_statement(s.body, gen)
        for b in reversed(s.binders):
            out = FOForall(b, out)
        return out
    if isinstance(s, QuasiUQ):
        prems = fo_and([_st_statement(p, gen) for p in s.premises])
        return FOImp(prems, _st_statement(s.conclusion, gen))
    msg = f"cannot translate statement {s!r}"
    raise ValueError(msg)


def st_statement(s: Statement) -> FOFormula:
    return _st_statement(s, _VarGen())


def correspondent(quasis) -> FOFormula:
    return fo_and([st_statement(q) for q in quasis])


# ---------------------------------------------------------------------------
# evaluation

class FOEvalError(ValueError):
    pass


def _term(env: dict, val: Valuation, t: str) -> int:
    if t in env:
        return env[t]
    for name, w in val.noms:
        if name == t:
            return w
    msg = f"unbound name {t!r}"
    raise FOEvalError(msg)


def eval_fo(frame: KripkeFrame, val: Valuation, assignment: dict,
            f: FOFormula) -> bool:
    env = dict(assignment)

    def ev(g: FOFormula, env: dict) -> bool:
        if isinstance(g, Eq):
            return _term(env, val, g.a) == _term(env, val, g.b)
        if isinstance(g, Rel):
            return (_term(env, val, g.a), _term(env, val, g.b)) in frame.r0
        if isinstance(g, Pred):
            return _term(env, val, g.t) in val.prop(g.name)
        if isinstance(g, FONot):
            return not ev(g.child, env)
        if isinstance(g, FOAnd):
            return all(ev(p, env) for p in g.parts)
        if isinstance(g, FOOr):
            return any(ev(p, env) for p in g.parts)
        if isinstance(g, FOImp):
            return not ev(g.left, env) or ev(g.right, env)
        if isinstance(g, FOForall):
            return all(ev(g.body, {**env, g.var: w}) for w in frame.worlds)
        if isinstance(g, FOExists):
            return any(ev(g.body, {**env, g.var: w}) for w in frame.worlds)
        msg = f"cannot evaluate {g!r}"
        raise FOEvalError(msg)

    return ev(f, env)


def free_names(f: FOFormula) -> frozenset:
    if isinstance(f, Eq):
        return frozenset({f.a, f.b})
    if isinstance(f, Rel):
        return frozenset({f.a, f.b})
    if isinstance(f, Pred):
        return frozenset({f.t})
    if isinstance(f, FONot):
        return free_names(f.child)
    if isinstance(f, (FOAnd, FOOr)):
        out = frozenset()
        for p in f.parts:
            out |= free_names(p)
        return out
    if isinstance(f, FOImp):
        return free_names(f.left) | free_names(f.right)
    if isinstance(f, (FOForall, FOExists)):
        return free_names(f.body) - {f.var}
    msg = f"not a formula: {f!r}"
    raise FOEvalError(msg)


def pred_names(f: FOFormula) -> frozenset:
    if isinstance(f, Pred):
        return frozenset({f.name})
    if isinstance(f, FONot):
        return pred_names(f.child)
    if isinstance(f, (FOAnd, FOOr)):
        out = frozenset()
        for p in f.parts:
            out |= pred_names(p)
        return out
    if isinstance(f, FOImp):
        return pred_names(f.left) | pred_names(f.right)
    if isinstance(f, (FOForall, FOExists)):
        return pred_names(f.body)
    return frozenset()


def holds_on_frame(frame: KripkeFrame, f: FOFormula, vars=None) -> bool:
    """Truth of f on the frame, universally closing free names and
    quantifying predicate valuations universally."""
    if vars is None:
        vars = sorted(pred_names(f))
    else:
        vars = sorted(vars)
    names = sorted(free_names(f))
    worlds = list(frame.worlds)
    subsets = [frozenset(ws) for r in range(len(worlds) + 1)
               for ws in itertools.combinations(worlds, r)]
    for assignment in itertools.product(subsets, repeat=len(vars)):
        val = Valuation.make(dict(zip(vars, assignment)), {})
        for picks in itertools.product(worlds, repeat=len(names)):
            if not eval_fo(frame, val, dict(zip(names, picks)), f):
                return False
    return True


def fo_equiv_on_small_frames(f1: FOFormula, f2: FOFormula, max_n: int = 3,
                             vars=()) -> bool:
    """True iff f1 and f2 agree on every frame with 1..max_n worlds, every
    valuation of vars, and every assignment of their free names."""
    vars = sorted(set(vars) | set(pred_names(f1)) | set(pred_names(f2)))
    names = sorted(free_names(f1) | free_names(f2))
    for n in range(1, max_n + 1):
        for frame in enumerate_frames(n):
            worlds = list(frame.worlds)
            subsets = [frozenset(ws) for r in range(len(worlds) + 1)
                       for ws in itertools.combinations(worlds, r)]
            for assignment in itertools.product(subsets, repeat=len(vars)):
                val = Valuation.make(dict(zip(vars, assignment)), {})
                for picks in itertools.product(worlds, repeat=len(names)):
                    env = dict(zip(names, picks))
                    if eval_fo(frame, val, env, f1) != eval_fo(frame, val, env, f2):
                        return False
    return True


# ---------------------------------------------------------------------------
# emission

def _emit_text(f: FOFormula) -> str:
    if isinstance(f, Eq):
        return f"{f.a} = {f.b}"
    if isinstance(f, Rel):
        return f"R({f.a},{f.b})"
    if isinstance(f, Pred):
        return f"P_{f.name}({f.t})"
    if isinstance(f, FONot):
        if isinstance(f.child, Eq):
            return f"{f.child.a} != {f.child.b}"
        return f"~{_emit_text(f.child)}"
    if isinstance(f, FOAnd):
        if not f.parts:
            return "true"
        return "(" + " & ".join(_emit_text(p) for p in f.parts) + ")"
    if isinstance(f, FOOr):
        if not f.parts:
            return "false"
        return "(" + " | ".join(_emit_text(p) for p in f.parts) + ")"
    if isinstance(f, FOImp):
        return f"({_emit_text(f.left)} -> {_emit_text(f.right)})"
    if isinstance(f, FOForall):
        return f"forall {f.var}. {_emit_text(f.body)}"
    if isinstance(f, FOExists):
        return f"exists {f.var}. {_emit_text(f.body)}"
    msg = f"cannot emit {f!r}"
    raise ValueError(msg)


def _as_json(f: FOFormula):
    if isinstance(f, Eq):
        return {"eq": [f.a, f.b]}
    if isinstance(f, Rel):
        return {"r": [f.a, f.b]}
    if isinstance(f, Pred):
        return {"pred": [f.name, f.t]}
    if isinstance(f, FONot):
        return {"not": [_as_json(f.child)]}
    if isinstance(f, FOAnd):
        return {"and": [_as_json(p) for p in f.parts]}
    if isinstance(f, FOOr):
        return {"or": [_as_json(p) for p in f.parts]}
    if isinstance(f, FOImp):
        return {"imp": [_as_json(f.left), _as_json(f.right)]}
    if isinstance(f, FOForall):
        return {"forall": [f.var, _as_json(f.body)]}
    if isinstance(f, FOExists):
        return {"exists": [f.var, _as_json(f.body)]}
    msg = f"cannot emit {f!r}"
    raise ValueError(msg)


def _tv(name: str) -> str:
    return name.upper()


def _emit_tptp(f: FOFormula) -> str:
    if isinstance(f, Eq):
        return f"{_tv(f.a)} = {_tv(f.b)}"
    if isinstance(f, Rel):
        return f"r({_tv(f.a)},{_tv(f.b)})"
    if isinstance(f, Pred):
        return f"p_{f.name}({_tv(f.t)})"
    if isinstance(f, FONot):
        if isinstance(f.child, Eq):
            return f"{_tv(f.child.a)} != {_tv(f.child.b)}"
        return f"~({_emit_tptp(f.child)})"
    if isinstance(f, FOAnd):
        if not f.parts:
            return "$true"
        return "(" + " & ".join(_emit_tptp(p) for p in f.parts) + ")"
    if isinstance(f, FOOr):
        if not f.parts:
            return "$false"
        return "(" + " | ".join(_emit_tptp(p) for p in f.parts) + ")"
    if isinstance(f, FOImp):
        return f"({_emit_tptp(f.left)} => {_emit_tptp(f.right)})"
    if isinstance(f, FOForall):
        return f"![{_tv(f.var)}]: {_emit_tptp(f.body)}"
    if isinstance(f, FOExists):
        return f"?[{_tv(f.var)}]: {_emit_tptp(f.body)}"
    msg = f"cannot emit {f!r}"
    raise ValueError(msg)


def emit_fo(f: FOFormula, format: str = "text") -> str:
    if format == "text":
        return _emit_text(f)
    if format == "json":
        return json.dumps(_as_json(f))
    if format == "tptp":
        return f"fof(corr, axiom, {_emit_tptp(f)})."
    msg = f"unknown format {format!r}"
    raise ValueError(msg)
