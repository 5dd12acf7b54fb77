"""Variable-elimination rewrite engine for sabotage modal inequalities.

Pipeline: order-type search -> preprocessing (distribution, splitting,
monotone variable elimination) -> first approximation -> outer decomposition
-> inner decomposition -> packing -> Ackermann elimination -> assembly of
pure quasi-inequalities.  Every rewrite is recorded as a DerivationStep.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And, Bot, Box, Dia, ExistsNom, ForallNom, Formula, GBox, Imp, InvLBox,
    InvLDia, LBox, LDia, Nom, Not, Or, Prop, SBox, SDia, Top,
    EMPTY_EDGES, FreshNominals, all_names_of, eliminate_iff, is_context_free,
    is_pure, occurrence_signs, polarity, props_of, substitute_prop,
)
from .semantics import (
    Ineq, MegaGuard, QuasiUQ, Statement, UQIneq, print_statement,
    statement_props,
)
from .sahlqvist import (
    build_signed_tree, find_order_type, has_critical_occurrence, is_definite,
    is_epsilon_sahlqvist, is_inner_sahlqvist,
)


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class PreconditionError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class DerivationStep:
    stage: str
    rule: str
    consumed: tuple
    produced: tuple

    def as_dict(self) -> dict:
        return {"stage": self.stage, "rule": self.rule,
                "consumed": list(self.consumed),
                "produced": list(self.produced)}


@dataclass(frozen=True)
class Guard:
    m0: str
    m1: str
    s: frozenset


@dataclass(frozen=True)
class WorkItem:
    guards: tuple
    ineq: Ineq
    active: str  # 'lhs', 'rhs' or 'none' (parked)

    def statement(self) -> Statement:
        body: Statement = self.ineq
        for g in reversed(self.guards):
            body = MegaGuard(g.m0, g.m1, g.s, body)
        return body


def _mk(guards: tuple, ineq: Ineq, active: str) -> WorkItem:
    if (not guards
            and is_pure(ineq.lhs) and is_pure(ineq.rhs)
            and is_context_free(ineq.lhs) and is_context_free(ineq.rhs)):
        active = "none"
    return WorkItem(guards, ineq, active)


def _show(item) -> str:
    if isinstance(item, WorkItem):
        return print_statement(item.statement())
    return print_statement(item)


@dataclass
class System:
    items: list
    goal: Ineq
    gen: FreshNominals
    eps: dict
    trace: list

    def record(self, stage, rule, consumed, produced):
        self.trace.append(DerivationStep(
            stage, rule,
            tuple(_show(c) for c in consumed),
            tuple(_show(p) for p in produced)))


def _record(trace, stage, rule, consumed, produced):
    if trace is not None:
        trace.append(DerivationStep(
            stage, rule,
            tuple(_show(c) for c in consumed),
            tuple(_show(p) for p in produced)))


# ---------------------------------------------------------------------------
# stage 1: preprocessing

def _child_signs(f: Formula, sign: str):
    flip = "-" if sign == "+" else "+"
    if isinstance(f, Not):
        return (flip,)
    if isinstance(f, Imp):
        return (flip, sign)
    return tuple(sign for _ in range(2 if isinstance(f, (And, Or)) else 1))


def distribute(f: Formula, sign: str) -> Formula:
    """Push +dia,+sdia,+and,+not,-imp over +or and -box,-sbox,-or,-not,-imp
    over -and, to fixpoint."""
    flip = "-" if sign == "+" else "+"
    if isinstance(f, Not):
        f = Not(distribute(f.child, flip))
    elif isinstance(f, Imp):
        f = Imp(distribute(f.left, flip), distribute(f.right, sign))
    elif isinstance(f, (And, Or)):
        f = type(f)(distribute(f.left, sign), distribute(f.right, sign))
    elif isinstance(f, (Box, Dia, SBox, SDia)):
        f = type(f)(distribute(f.child, sign))
    if sign == "+":
        if isinstance(f, Dia) and isinstance(f.child, Or):
            return distribute(Or(Dia(f.child.left), Dia(f.child.right)), sign)
        if isinstance(f, SDia) and isinstance(f.child, Or):
            return distribute(Or(SDia(f.child.left), SDia(f.child.right)), sign)
        if isinstance(f, Not) and isinstance(f.child, And):
            return distribute(Or(Not(f.child.left), Not(f.child.right)), sign)
        if isinstance(f, And) and isinstance(f.left, Or):
            return distribute(Or(And(f.left.left, f.right),
                                 And(f.left.right, f.right)), sign)
        if isinstance(f, And) and isinstance(f.right, Or):
            return distribute(Or(And(f.left, f.right.left),
                                 And(f.left, f.right.right)), sign)
    else:
        if isinstance(f, Box) and isinstance(f.child, And):
            return distribute(And(Box(f.child.left), Box(f.child.right)), sign)
        if isinstance(f, SBox) and isinstance(f.child, And):
            return distribute(And(SBox(f.child.left), SBox(f.child.right)), sign)
        if isinstance(f, Not) and isinstance(f.child, Or):
            return distribute(And(Not(f.child.left), Not(f.child.right)), sign)
        if isinstance(f, Or) and isinstance(f.left, And):
            return distribute(And(Or(f.left.left, f.right),
                                  Or(f.left.right, f.right)), sign)
        if isinstance(f, Or) and isinstance(f.right, And):
            return distribute(And(Or(f.left, f.right.left),
                                  Or(f.left, f.right.right)), sign)
        if isinstance(f, Imp) and isinstance(f.left, Or):
            return distribute(And(Imp(f.left.left, f.right),
                                  Imp(f.left.right, f.right)), sign)
        if isinstance(f, Imp) and isinstance(f.right, And):
            return distribute(And(Imp(f.left, f.right.left),
                                  Imp(f.left, f.right.right)), sign)
    return f


def _simplify_bool(f: Formula) -> Formula:
    from .syntax import children, _rebuild
    kids = tuple(_simplify_bool(c) for c in children(f))
    f = _rebuild(f, kids)
    if isinstance(f, Not):
        if isinstance(f.child, Bot):
            return Top()
        if isinstance(f.child, Top):
            return Bot()
    if isinstance(f, And):
        if isinstance(f.left, Bot) or isinstance(f.right, Bot):
            return Bot()
        if isinstance(f.left, Top):
            return f.right
        if isinstance(f.right, Top):
            return f.left
    if isinstance(f, Or):
        if isinstance(f.left, Top) or isinstance(f.right, Top):
            return Top()
        if isinstance(f.left, Bot):
            return f.right
        if isinstance(f.right, Bot):
            return f.left
    return f


def preprocess(ineq: Ineq, trace=None) -> list:
    """Stage 1: distribution, splitting and monotone variable elimination,
    exhaustively.  Returns the list of resulting inequalities."""
    pending = [ineq]
    out = []
    while pending:
        cur = pending.pop(0)
        dl = distribute(cur.lhs, "+")
        dr = distribute(cur.rhs, "-")
        if dl != cur.lhs or dr != cur.rhs:
            new = Ineq(dl, dr)
            _record(trace, "preprocess", "distribute", [cur], [new])
            cur = new
        if isinstance(cur.rhs, And):
            a = Ineq(cur.lhs, cur.rhs.left)
            b = Ineq(cur.lhs, cur.rhs.right)
            _record(trace, "preprocess", "split", [cur], [a, b])
            pending[:0] = [a, b]
            continue
        if isinstance(cur.lhs, Or):
            a = Ineq(cur.lhs.left, cur.rhs)
            b = Ineq(cur.lhs.right, cur.rhs)
            _record(trace, "preprocess", "split", [cur], [a, b])
            pending[:0] = [a, b]
            continue
        eliminated = False
        for p in sorted(props_of(cur.lhs) & props_of(cur.rhs)):
            signs = set(occurrence_signs(cur.lhs, p, "+"))
            signs |= set(occurrence_signs(cur.rhs, p, "-"))
            if signs == {"-"}:
                repl: Formula = Bot()
            elif signs == {"+"}:
                repl = Top()
            else:
                continue
            new = Ineq(_simplify_bool(substitute_prop(cur.lhs, p, repl)),
                       _simplify_bool(substitute_prop(cur.rhs, p, repl)))
            _record(trace, "preprocess", "eliminate-uniform", [cur], [new])
            pending.insert(0, new)
            eliminated = True
            break
        if not eliminated:
            out.append(cur)
    seen = set()
    unique = []
    for q in out:
        if q not in seen:
            seen.add(q)
            unique.append(q)
    return unique


# ---------------------------------------------------------------------------
# first approximation

def first_approximation(pre: Ineq, gen: FreshNominals, eps: dict,
                        i0: str, i1: str, trace: list) -> System:
    a = _mk((), Ineq(Nom(i0), pre.lhs), "rhs")
    b = _mk((), Ineq(pre.rhs, Not(Nom(i1))), "lhs")
    sys = System([a, b], Ineq(Nom(i0), Not(Nom(i1))), gen, eps, trace)
    sys.record("first-approximation", "first-approx", [pre], [a, b])
    return sys


# ---------------------------------------------------------------------------
# substage 1: outer decomposition

def _outer_step(item: WorkItem, gen: FreshNominals):
    q = item.ineq
    s, s2 = q.sup, q.sub
    if item.active == "rhs":
        f = q.rhs
        if isinstance(f, And):
            return "split", [_mk(item.guards, Ineq(q.lhs, f.left, s, s2), "rhs"),
                             _mk(item.guards, Ineq(q.lhs, f.right, s, s2), "rhs")]
        if isinstance(q.lhs, Nom):
            i = q.lhs
            if isinstance(f, Dia):
                j = gen.fresh()
                return "approx-dia", [
                    _mk((), Ineq(Nom(j), f.child, s2, s2), "rhs"),
                    _mk((), Ineq(i, LDia(s2, Nom(j)), s, s2), "rhs")]
            if isinstance(f, SDia):
                m0, m1 = gen.fresh(), gen.fresh()
                return "approx-sdia", [
                    _mk((), Ineq(Nom(m0), LDia(s2, Nom(m1)), s2, s2), "rhs"),
                    _mk((), Ineq(i, f.child, s, s2 | {(m0, m1)}), "rhs")]
            if isinstance(f, Not):
                return "res-not", [_mk((), Ineq(f.child, Not(i), s2, s), "lhs")]
    elif item.active == "lhs":
        f = q.lhs
        if isinstance(f, Or):
            return "split", [_mk(item.guards, Ineq(f.left, q.rhs, s, s2), "lhs"),
                             _mk(item.guards, Ineq(f.right, q.rhs, s, s2), "lhs")]
        if isinstance(q.rhs, Not) and isinstance(q.rhs.child, Nom):
            ni = q.rhs
            if isinstance(f, Box):
                j = gen.fresh()
                return "approx-box", [
                    _mk((), Ineq(f.child, Not(Nom(j)), s, s), "lhs"),
                    _mk((), Ineq(LBox(s, Not(Nom(j))), ni, s, s2), "lhs")]
            if isinstance(f, SBox):
                m0, m1 = gen.fresh(), gen.fresh()
                return "approx-sbox", [
                    _mk((), Ineq(Nom(m0), LDia(s, Nom(m1)), s, s), "rhs"),
                    _mk((), Ineq(f.child, ni, s | {(m0, m1)}, s2), "lhs")]
            if isinstance(f, Imp):
                j, k = gen.fresh(), gen.fresh()
                return "approx-imp", [
                    _mk((), Ineq(Nom(j), f.left, s, s), "rhs"),
                    _mk((), Ineq(f.right, Not(Nom(k)), s, s), "lhs"),
                    _mk((), Ineq(Imp(Nom(j), Not(Nom(k))), ni, s, s2), "lhs")]
            if isinstance(f, Not):
                return "res-not", [
                    _mk((), Ineq(ni.child, f.child, s2, s), "rhs")]
    return None


def reduce_outer(sys: System) -> System:
    changed = True
    while changed:
        changed = False
        for idx, item in enumerate(sys.items):
            if item.active == "none":
                continue
            step = _outer_step(item, sys.gen)
            if step is None:
                continue
            rule, new_items = step
            sys.items[idx:idx + 1] = new_items
            sys.record("substage-1", rule, [item], new_items)
            changed = True
            break
    _check_substage1(sys)
    return sys


def _check_substage1(sys: System):
    for item in sys.items:
        if item.active == "none":
            continue
        q = item.ineq
        if item.active == "rhs":
            tree = build_signed_tree(q.rhs, "+")
            ok = isinstance(q.lhs, Nom) and is_inner_sahlqvist(tree, sys.eps)
        else:
            tree = build_signed_tree(q.lhs, "-")
            ok = (isinstance(q.rhs, Not) and isinstance(q.rhs.child, Nom)
                  and is_inner_sahlqvist(tree, sys.eps))
        if not ok:
            raise StageError("substage 1",
                             f"stuck item {print_statement(item.statement())}")


# ---------------------------------------------------------------------------
# substage 2: inner decomposition

def _inner_step(item: WorkItem, gen: FreshNominals):
    q = item.ineq
    s, s2 = q.sup, q.sub
    g = item.guards
    if item.active == "rhs":
        f = q.rhs
        if isinstance(f, And):
            return "split", [_mk(g, Ineq(q.lhs, f.left, s, s2), "rhs"),
                             _mk(g, Ineq(q.lhs, f.right, s, s2), "rhs")]
        if isinstance(f, Not):
            return "res-not", [_mk(g, Ineq(f.child, Not(q.lhs), s2, s), "lhs")]
        if isinstance(f, Box):
            return "res-box", [
                _mk(g, Ineq(InvLDia(s2, q.lhs), f.child, s, s2), "rhs")]
        if isinstance(f, SBox):
            m0, m1 = gen.fresh(), gen.fresh()
            return "res-sbox", [
                _mk(g + (Guard(m0, m1, s2),),
                    Ineq(q.lhs, f.child, s, s2 | {(m0, m1)}), "rhs")]
    else:
        f = q.lhs
        if isinstance(f, Or):
            return "split", [_mk(g, Ineq(f.left, q.rhs, s, s2), "lhs"),
                             _mk(g, Ineq(f.right, q.rhs, s, s2), "lhs")]
        if isinstance(f, Not):
            return "res-not", [_mk(g, Ineq(Not(q.rhs), f.child, s2, s), "rhs")]
        if isinstance(f, Dia):
            return "res-dia", [
                _mk(g, Ineq(f.child, InvLBox(s, q.rhs), s, s2), "lhs")]
        if isinstance(f, SDia):
            m0, m1 = gen.fresh(), gen.fresh()
            return "res-sdia", [
                _mk(g + (Guard(m0, m1, s),),
                    Ineq(f.child, q.rhs, s | {(m0, m1)}, s2), "lhs")]
    return None


def reduce_inner(sys: System) -> System:
    changed = True
    while changed:
        changed = False
        for idx, item in enumerate(sys.items):
            if item.active == "none":
                continue
            step = _inner_step(item, sys.gen)
            if step is None:
                continue
            rule, new_items = step
            sys.items[idx:idx + 1] = new_items
            sys.record("substage-2", rule, [item], new_items)
            changed = True
            break
    _check_substage2(sys)
    return sys


def _is_critical_prop(f: Formula, sign: str, eps: dict) -> bool:
    return (isinstance(f, Prop)
            and eps.get(f.name) == ("1" if sign == "+" else "d"))


def _check_substage2(sys: System):
    for item in sys.items:
        if item.active == "none":
            continue
        q = item.ineq
        f = q.rhs if item.active == "rhs" else q.lhs
        sign = "+" if item.active == "rhs" else "-"
        if _is_critical_prop(f, sign, sys.eps):
            continue
        if not has_critical_occurrence(f, sign, sys.eps):
            continue
        raise StageError("substage 2",
                         f"non-reducible head {print_statement(item.statement())}")


# ---------------------------------------------------------------------------
# substage 3: packing

def _and_chain(parts):
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = And(part, out)
    return out


def pack(sys: System) -> System:
    eps = sys.eps
    packed = []
    for item in sys.items:
        if item.active == "none" and not item.guards:
            packed.append(item.ineq)
            continue
        q = item.ineq
        guard_fs = [GBox(Imp(Nom(g.m0), LDia(g.s, Nom(g.m1))))
                    for g in item.guards]
        binders = [n for g in item.guards for n in (g.m0, g.m1)]
        if isinstance(q.rhs, Prop) and eps.get(q.rhs.name) == "1":
            if not (is_pure(q.lhs) and is_context_free(q.lhs)):
                raise StageError("substage 3",
                                 f"impure minimal bound in "
                                 f"{print_statement(item.statement())}")
            form: Formula = _and_chain(guard_fs + [q.lhs])
            for b in reversed(binders):
                form = ExistsNom(b, form)
            out: Statement = Ineq(form, q.rhs)
            rule = "pack-1"
        elif isinstance(q.lhs, Prop) and eps.get(q.lhs.name) == "d":
            if not (is_pure(q.rhs) and is_context_free(q.rhs)):
                raise StageError("substage 3",
                                 f"impure maximal bound in "
                                 f"{print_statement(item.statement())}")
            if guard_fs:
                form = Imp(_and_chain(guard_fs), q.rhs)
                for b in reversed(binders):
                    form = ForallNom(b, form)
            else:
                form = q.rhs
            out = Ineq(q.lhs, form)
            rule = "pack-2"
        elif is_pure(q.lhs) and is_context_free(q.lhs):
            body = Ineq(Top(), Imp(_and_chain(guard_fs + [q.lhs]), q.rhs),
                        EMPTY_EDGES, q.sub)
            out = UQIneq(tuple(binders), body) if binders else body
            rule = "pack-3"
        elif is_pure(q.rhs) and is_context_free(q.rhs):
            body = Ineq(Top(), Imp(_and_chain(guard_fs + [q.lhs]), q.rhs),
                        EMPTY_EDGES, q.sup)
            out = UQIneq(tuple(binders), body) if binders else body
            rule = "pack-4"
        else:
            raise StageError("substage 3",
                             f"head fails purity side condition in "
                             f"{print_statement(item.statement())}")
        sys.record("substage-3", rule, [item], [out])
        packed.append(out)
    sys.items = packed
    return sys


# ---------------------------------------------------------------------------
# substage 4: Ackermann elimination

def _subst_statement(st: Statement, p: str, repl: Formula) -> Statement:
    if isinstance(st, Ineq):
        return Ineq(substitute_prop(st.lhs, p, repl),
                    substitute_prop(st.rhs, p, repl), st.sup, st.sub)
    if isinstance(st, UQIneq):
        return UQIneq(st.binders, _subst_statement(st.body, p, repl))
    msg = f"cannot substitute into {st!r}"
    raise PreconditionError("substage 4", msg)


def _body_of(st: Statement) -> Ineq:
    return st.body if isinstance(st, UQIneq) else st


def ackermann_eliminate(sys: System, p: str, handedness: str) -> System:
    """Eliminate p from the packed system.  Right-handed collects items
    alpha <= p and substitutes their join; left-handed is the dual."""
    alphas = []
    rest = []
    for st in sys.items:
        if (handedness == "right" and isinstance(st, Ineq)
                and st.rhs == Prop(p) and not st.sup and not st.sub):
            alphas.append(st)
        elif (handedness == "left" and isinstance(st, Ineq)
                and st.lhs == Prop(p) and not st.sup and not st.sub):
            alphas.append(st)
        else:
            rest.append(st)
    bounds = [(st.lhs if handedness == "right" else st.rhs) for st in alphas]
    for b in bounds:
        if not (is_pure(b) and is_context_free(b)):
            raise PreconditionError(
                "substage 4", f"bound {print_statement(Ineq(b, Prop(p)))} "
                f"is not pure and context-free")
    if bounds:
        repl = bounds[0]
        for b in bounds[1:]:
            repl = Or(repl, b) if handedness == "right" else And(repl, b)
    else:
        repl = Bot() if handedness == "right" else Top()
    new_items = []
    changed_from = []
    changed_to = []
    for st in rest:
        q = _body_of(st)
        pol_l, pol_r = polarity(q.lhs, p), polarity(q.rhs, p)
        if handedness == "right":
            ok = pol_l in ("positive", "absent") and pol_r in ("negative", "absent")
        else:
            ok = pol_l in ("negative", "absent") and pol_r in ("positive", "absent")
        if not ok:
            raise PreconditionError(
                "substage 4",
                f"{p} occurs with the wrong polarity in {_show(st)}")
        new = _subst_statement(st, p, repl)
        if new != st:
            changed_from.append(st)
            changed_to.append(new)
        new_items.append(new)
    sys.record("substage-4", f"ackermann-{handedness}",
               alphas + changed_from, changed_to)
    sys.items = new_items
    return sys


# ---------------------------------------------------------------------------
# the full run

@dataclass(frozen=True)
class AlbaSuccess:
    order_type: dict
    preprocessed: tuple
    quasis: tuple
    trace: tuple


@dataclass(frozen=True)
class AlbaFailure:
    reason: str
    stage: str
    trace: tuple


def run_alba(ineq: Ineq, order_type=None):
    ineq = Ineq(eliminate_iff(ineq.lhs), eliminate_iff(ineq.rhs))
    trace: list = []
    eps = dict(order_type) if order_type is not None else find_order_type(ineq)
    if eps is None:
        return AlbaFailure("no order type makes the input Sahlqvist",
                           "classify", tuple(trace))
    missing = (props_of(ineq.lhs) | props_of(ineq.rhs)) - set(eps)
    if missing:
        return AlbaFailure(f"order type misses variables {sorted(missing)}",
                           "classify", tuple(trace))
    reserved = set(all_names_of(ineq.lhs)) | set(all_names_of(ineq.rhs))
    gen = FreshNominals(reserved)
    i0, i1 = gen.fresh(), gen.fresh()
    goal = Ineq(Nom(i0), Not(Nom(i1)))
    pre = preprocess(ineq, trace)
    try:
        for q in pre:
            if not is_epsilon_sahlqvist(q, eps):
                raise StageError("stage 1",
                                 f"{print_statement(q)} is not Sahlqvist "
                                 f"for the chosen order type")
            for tree in (build_signed_tree(q.lhs, "+"),
                         build_signed_tree(q.rhs, "-")):
                if not is_definite(tree, eps):
                    raise StageError("stage 1",
                                     f"{print_statement(q)} is not definite")
        quasis = []
        for q in pre:
            sys = first_approximation(q, gen, eps, i0, i1, trace)
            reduce_outer(sys)
            reduce_inner(sys)
            pack(sys)
            for p in sorted({v for st in sys.items
                             for v in statement_props(st)}):
                handed = "right" if eps[p] == "1" else "left"
                ackermann_eliminate(sys, p, handed)
            for st in sys.items:
                if statement_props(st):
                    raise StageError("output", f"impure item {_show(st)}")
            quasis.append(QuasiUQ(tuple(sys.items), goal))
    except (StageError, PreconditionError) as exc:
        return AlbaFailure(str(exc), exc.stage, tuple(trace))
    return AlbaSuccess(eps, tuple(pre), tuple(quasis), tuple(trace))
