"""Abstract syntax of the actor calculus.

Expressions, values, types, actors and heaps, together with the structural
helpers (free variables, substitution, location scanning) shared by the
typechecker, the evaluator and the well-formedness checker.

Every node renders to a one-line s-expression via ``str()``; the exact
grammar is documented in the README and is stable, so renderings can be
used as golden values and as heap canonicalization keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Union


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------


class Type:
    """Base class for calculus types."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_type(self)


@dataclass(frozen=True)
class Passive(Type):
    """The (single) type of passive heap objects."""


@dataclass(frozen=True)
class ActorType(Type):
    """The (single) type of actors."""


@dataclass(frozen=True)
class Bestowed(Type):
    """The type of a bestowed passive object; always wraps the passive type."""


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class UnitType(Type):
    pass


def is_active(t: Type) -> bool:
    """Active types are exactly the actor type and the bestowed type."""
    return isinstance(t, (ActorType, Bestowed))


# --------------------------------------------------------------------------
# Expressions and values
# --------------------------------------------------------------------------


class Expr:
    """Base class for expressions."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_expr(self)


class Value:
    """Base class for values.

    ``Lambda`` and ``UnitVal`` may appear in source programs; ``ActorId``,
    ``Loc`` and ``BestowedLoc`` arise only at run time.
    """

    __slots__ = ()

    def __str__(self) -> str:
        return render_value(self)


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class App(Expr):
    fun: Expr
    arg: Expr


@dataclass(frozen=True)
class Send(Expr):
    """A message send.  The message position holds a syntactic value."""

    target: Expr
    msg: Value


@dataclass(frozen=True)
class Mutate(Expr):
    target: Expr


@dataclass(frozen=True)
class NewPassive(Expr):
    pass


@dataclass(frozen=True)
class NewActor(Expr):
    pass


@dataclass(frozen=True)
class Bestow(Expr):
    inner: Expr


@dataclass(frozen=True)
class Val(Expr):
    value: Value


@dataclass(frozen=True)
class Lambda(Value):
    param: str
    param_type: Type
    body: Expr


@dataclass(frozen=True)
class UnitVal(Value):
    pass


@dataclass(frozen=True)
class ActorId(Value):
    ident: int


@dataclass(frozen=True)
class Loc(Value):
    loc: int


@dataclass(frozen=True)
class BestowedLoc(Value):
    loc: int
    owner: int


def is_value(e: Expr) -> bool:
    return isinstance(e, Val)


# --------------------------------------------------------------------------
# Free variables, renaming, substitution
# --------------------------------------------------------------------------


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Var(name):
            return frozenset({name})
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case Send(target, msg):
            return free_vars(target) | free_vars_value(msg)
        case Mutate(target) | Bestow(inner=target):
            return free_vars(target)
        case NewPassive() | NewActor():
            return frozenset()
        case Val(value):
            return free_vars_value(value)
    raise TypeError(f"not an expression: {e!r}")


def free_vars_value(v: Value) -> frozenset[str]:
    if isinstance(v, Lambda):
        return free_vars(v.body) - {v.param}
    return frozenset()


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """A name not in ``avoid``, derived from ``base``."""
    if base not in avoid:
        return base
    k = 1
    while f"{base}_{k}" in avoid:
        k += 1
    return f"{base}_{k}"


def rename_var(e: Expr, old: str, new: str) -> Expr:
    """Rename free occurrences of variable ``old`` to ``new``."""
    match e:
        case Var(name):
            return Var(new) if name == old else e
        case App(fun, arg):
            return App(rename_var(fun, old, new), rename_var(arg, old, new))
        case Send(target, msg):
            return Send(rename_var(target, old, new), _rename_in_value(msg, old, new))
        case Mutate(target):
            return Mutate(rename_var(target, old, new))
        case Bestow(inner):
            return Bestow(rename_var(inner, old, new))
        case NewPassive() | NewActor():
            return e
        case Val(value):
            return Val(_rename_in_value(value, old, new))
    raise TypeError(f"not an expression: {e!r}")


def _rename_in_value(v: Value, old: str, new: str) -> Value:
    if isinstance(v, Lambda) and v.param != old:
        # Renaming is only ever used with a fresh `new`, so no capture check.
        return Lambda(v.param, v.param_type, rename_var(v.body, old, new))
    return v


def subst(e: Expr, name: str, v: Value) -> Expr:
    """Capture-avoiding substitution of value ``v`` for ``name`` in ``e``.

    Values flowing through the evaluator are closed, so the capture case is
    unreachable in practice; it is handled anyway by renaming the binder.
    """
    match e:
        case Var(n):
            return Val(v) if n == name else e
        case App(fun, arg):
            return App(subst(fun, name, v), subst(arg, name, v))
        case Send(target, msg):
            return Send(subst(target, name, v), subst_value(msg, name, v))
        case Mutate(target):
            return Mutate(subst(target, name, v))
        case Bestow(inner):
            return Bestow(subst(inner, name, v))
        case NewPassive() | NewActor():
            return e
        case Val(value):
            return Val(subst_value(value, name, v))
    raise TypeError(f"not an expression: {e!r}")


def subst_value(val: Value, name: str, v: Value) -> Value:
    if not isinstance(val, Lambda):
        return val
    if val.param == name:
        return val
    if val.param in free_vars_value(v) and name in free_vars(val.body):
        avoid = free_vars(val.body) | free_vars_value(v) | {name}
        q = fresh_name(val.param, avoid)
        body = rename_var(val.body, val.param, q)
        return Lambda(q, val.param_type, subst(body, name, v))
    return Lambda(val.param, val.param_type, subst(val.body, name, v))


# --------------------------------------------------------------------------
# Scanning for embedded dynamic values
# --------------------------------------------------------------------------


def iter_values(e: Expr) -> Iterator[Value]:
    """All value nodes in ``e``, descending into lambda bodies and messages."""
    match e:
        case Var(_) | NewPassive() | NewActor():
            return
        case App(fun, arg):
            yield from iter_values(fun)
            yield from iter_values(arg)
        case Send(target, msg):
            yield from iter_values(target)
            yield from _iter_values_of(msg)
        case Mutate(target) | Bestow(inner=target):
            yield from iter_values(target)
        case Val(value):
            yield from _iter_values_of(value)
        case _:
            raise TypeError(f"not an expression: {e!r}")


def _iter_values_of(v: Value) -> Iterator[Value]:
    yield v
    if isinstance(v, Lambda):
        yield from iter_values(v.body)


def map_values(e: Expr, f: "Callable[[Value], Value]") -> Expr:
    """Rewrite every leaf value in ``e`` with ``f``, descending into lambdas.

    ``f`` is applied to non-lambda values only (locations, actor ids,
    bestowed locations, unit); lambdas are rebuilt around their rewritten
    bodies.  Used for renaming runtime names, which never touches binders.
    """
    match e:
        case Var(_) | NewPassive() | NewActor():
            return e
        case App(fun, arg):
            return App(map_values(fun, f), map_values(arg, f))
        case Send(target, msg):
            return Send(map_values(target, f), _map_value(msg, f))
        case Mutate(target):
            return Mutate(map_values(target, f))
        case Bestow(inner):
            return Bestow(map_values(inner, f))
        case Val(value):
            return Val(_map_value(value, f))
    raise TypeError(f"not an expression: {e!r}")


def _map_value(v: Value, f: "Callable[[Value], Value]") -> Value:
    if isinstance(v, Lambda):
        return Lambda(v.param, v.param_type, map_values(v.body, f))
    return f(v)


def contains_loc(e: Expr) -> bool:
    """True iff a bare location occurs anywhere in ``e``.

    Bestowed locations do not count: only plain ``Loc`` values betray a
    passive object.
    """
    return any(isinstance(v, Loc) for v in iter_values(e))


def locs_in(e: Expr) -> frozenset[int]:
    return frozenset(v.loc for v in iter_values(e) if isinstance(v, Loc))


def actor_ids_in(e: Expr) -> frozenset[int]:
    return frozenset(v.ident for v in iter_values(e) if isinstance(v, ActorId))


def bestowed_in(e: Expr) -> frozenset[tuple[int, int]]:
    """All ``(loc, owner)`` pairs of bestowed locations occurring in ``e``."""
    return frozenset(
        (v.loc, v.owner) for v in iter_values(e) if isinstance(v, BestowedLoc)
    )


# --------------------------------------------------------------------------
# Actors and heaps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Actor:
    """An actor quadruple: its own location, local heap, queue and expression.

    The queue holds lambda values in arrival order; delivery order is chosen
    by the evaluator (FIFO by default, LIFO under the literal-prepend mode).
    """

    this_loc: int
    local_heap: frozenset[int]
    queue: tuple[Lambda, ...]
    current: Expr


@dataclass(frozen=True)
class Heap:
    """Maps actor identifiers to actors, plus monotone fresh-name counters.

    Treated as an immutable value: all update helpers return a new heap and
    never alias mutable state, so heaps can be copied freely between a
    deterministic scheduler and the explorer.
    """

    actors: dict[int, Actor]
    next_loc: int = 0
    next_id: int = 0

    def with_actor(self, ident: int, actor: Actor) -> Heap:
        return Heap({**self.actors, ident: actor}, self.next_loc, self.next_id)

    def alloc_loc(self) -> tuple[Heap, int]:
        return Heap(self.actors, self.next_loc + 1, self.next_id), self.next_loc

    def alloc_id(self) -> tuple[Heap, int]:
        return Heap(self.actors, self.next_loc, self.next_id + 1), self.next_id


# --------------------------------------------------------------------------
# Rendering (one-line s-expressions)
# --------------------------------------------------------------------------


def render_type(t: Type) -> str:
    match t:
        case Passive():
            return "p"
        case ActorType():
            return "c"
        case Bestowed():
            return "(B p)"
        case Arrow(dom, cod):
            return f"(-> {render_type(dom)} {render_type(cod)})"
        case UnitType():
            return "Unit"
    raise TypeError(f"not a type: {t!r}")


def render_expr(e: Expr) -> str:
    match e:
        case Var(name):
            return name
        case App(fun, arg):
            return f"(app {render_expr(fun)} {render_expr(arg)})"
        case Send(target, msg):
            return f"(send {render_expr(target)} {render_value(msg)})"
        case Mutate(target):
            return f"(mutate {render_expr(target)})"
        case NewPassive():
            return "(new p)"
        case NewActor():
            return "(new c)"
        case Bestow(inner):
            return f"(bestow {render_expr(inner)})"
        case Val(value):
            return render_value(value)
    raise TypeError(f"not an expression: {e!r}")


def render_value(v: Value) -> str:
    match v:
        case Lambda(param, param_type, body):
            return f"(fn ({param} : {render_type(param_type)}) {render_expr(body)})"
        case UnitVal():
            return "unit"
        case ActorId(ident):
            return f"(id {ident})"
        case Loc(loc):
            return f"(loc {loc})"
        case BestowedLoc(loc, owner):
            return f"(bloc {loc} {owner})"
    raise TypeError(f"not a value: {v!r}")


def render_actor(ident: int, a: Actor) -> str:
    lh = " ".join(str(loc) for loc in sorted(a.local_heap))
    q = " ".join(render_value(m) for m in a.queue)
    return f"(actor {ident} {a.this_loc} (lh {lh}) (q {q}) {render_expr(a.current)})"


def render_heap(h: Heap, include_counters: bool = False) -> str:
    actors = " ".join(render_actor(i, h.actors[i]) for i in sorted(h.actors))
    if include_counters:
        return f"(heap [{h.next_loc} {h.next_id}] {actors})"
    return f"(heap {actors})"


SourceExpr = Union[Var, App, Send, Mutate, NewPassive, NewActor, Bestow, Val]
