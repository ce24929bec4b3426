"""Typechecker for the actor calculus.

Twelve syntax-directed rules, one per expression/value form (sends are the
interesting case: the message body is checked in an environment stripped of
passive-typed bindings, and may not mention a bare heap location).

``check`` raises :class:`TypeCheckError` carrying the name of the violated
rule; ``type_of`` is the total-function wrapper used by tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    ActorId,
    ActorType,
    App,
    Arrow,
    Bestow,
    Bestowed,
    BestowedLoc,
    Expr,
    Lambda,
    Loc,
    Mutate,
    NewActor,
    NewPassive,
    Passive,
    Send,
    Type,
    UnitType,
    UnitVal,
    Val,
    Value,
    Var,
    contains_loc,
    is_active,
    render_expr,
    render_type,
)


class TypeCheckError(Exception):
    """A static typing failure, tagged with the rule whose premise broke."""

    def __init__(self, rule: str, expr: Expr | Value, message: str) -> None:
        self.rule = rule
        self.expr = expr
        self.message = message
        super().__init__(f"[{rule}] {message}")


@dataclass(frozen=True)
class TypeEnv:
    """An immutable typing environment (variable name -> type)."""

    bindings: tuple[tuple[str, Type], ...] = field(default=())

    @staticmethod
    def of(**kwargs: Type) -> TypeEnv:
        return TypeEnv(tuple(kwargs.items()))

    def extend(self, name: str, t: Type) -> TypeEnv:
        return TypeEnv(self.bindings + ((name, t),))

    def lookup(self, name: str) -> Type | None:
        for n, t in reversed(self.bindings):
            if n == name:
                return t
        return None

    def restrict_active(self) -> TypeEnv:
        """Keep only bindings at an active type (actor or bestowed).

        This is the environment a message body is checked under: a message
        runs on the receiving actor, so the sender's passive bindings must
        not leak into it.
        """
        return TypeEnv(tuple((n, t) for n, t in self.bindings if is_active(t)))

    def __str__(self) -> str:
        inner = ", ".join(f"{n}:{render_type(t)}" for n, t in self.bindings)
        return "{" + inner + "}"


def check(env: TypeEnv, e: Expr) -> Type:
    """Type of ``e`` under ``env``; raises :class:`TypeCheckError` if none."""
    match e:
        case Var(name):
            t = env.lookup(name)
            if t is None:
                raise TypeCheckError("e-var", e, f"unbound variable {name}")
            return t

        case App(fun, arg):
            tf = check(env, fun)
            ta = check(env, arg)
            if not isinstance(tf, Arrow):
                raise TypeCheckError(
                    "e-apply",
                    e,
                    f"applied a non-function of type {render_type(tf)}",
                )
            if tf.dom != ta:
                raise TypeCheckError(
                    "e-apply",
                    e,
                    f"argument type {render_type(ta)} does not match "
                    f"parameter type {render_type(tf.dom)}",
                )
            return tf.cod

        case NewPassive():
            return Passive()

        case NewActor():
            return ActorType()

        case Mutate(target):
            tt = check(env, target)
            if not isinstance(tt, Passive):
                raise TypeCheckError(
                    "e-mutate",
                    e,
                    f"mutate target has type {render_type(tt)}, expected p",
                )
            return UnitType()

        case Bestow(inner):
            ti = check(env, inner)
            if not isinstance(ti, Passive):
                raise TypeCheckError(
                    "e-bestow",
                    e,
                    f"bestow argument has type {render_type(ti)}, expected p",
                )
            return Bestowed()

        case Send(target, msg):
            tt = check(env, target)
            if not is_active(tt):
                raise TypeCheckError(
                    "e-send",
                    e,
                    f"send target has type {render_type(tt)}, "
                    "expected an active type (c or (B p))",
                )
            if not isinstance(msg, Lambda) or not isinstance(msg.param_type, Passive):
                raise TypeCheckError(
                    "e-send",
                    e,
                    "message must be a function over the passive type",
                )
            if contains_loc(msg.body):
                raise TypeCheckError(
                    "e-send",
                    e,
                    "message body mentions a bare heap location",
                )
            body_env = env.restrict_active().extend(msg.param, Passive())
            try:
                check(body_env, msg.body)
            except TypeCheckError as err:
                # The message body is a premise of the send rule: a failure
                # inside it (typically a passive binding that was stripped
                # from the environment) is reported against the send itself.
                raise TypeCheckError(
                    "e-send",
                    e,
                    f"message body is not typable on the receiver: {err.message}",
                ) from err
            return UnitType()

        case Val(value):
            return check_value(env, value)

    raise TypeError(f"not an expression: {e!r}")


def check_value(env: TypeEnv, v: Value) -> Type:
    match v:
        case Lambda(param, param_type, body):
            tb = check(env.extend(param, param_type), body)
            return Arrow(param_type, tb)
        case UnitVal():
            return UnitType()
        case Loc(_):
            return Passive()
        case ActorId(_):
            return ActorType()
        case BestowedLoc(_, _):
            return Bestowed()
    raise TypeError(f"not a value: {v!r}")


def type_of(e: Expr, env: TypeEnv | None = None) -> Type:
    """Type of ``e`` in the given (default empty) environment."""
    return check(env if env is not None else TypeEnv(), e)


def is_well_typed(e: Expr, env: TypeEnv | None = None) -> bool:
    try:
        type_of(e, env)
        return True
    except TypeCheckError:
        return False


def describe_failure(e: Expr, env: TypeEnv | None = None) -> str | None:
    """Human-readable failure report, or None if ``e`` typechecks."""
    try:
        type_of(e, env)
        return None
    except TypeCheckError as err:
        return f"{err.rule}: {err.message} (in {render_expr(e)})"
