"""Surface language: parser, desugarer and pretty-printer.

The surface syntax adds the conveniences the core calculus lacks —
``val`` bindings, ``;`` sequencing, blocks, and the ``atomic`` batching
form — and elaborates everything into core expressions:

* ``val x = e; rest``  becomes  ``(\\x:T. rest) e``  (T inferred);
* ``e; rest``          becomes  ``(\\_:T. rest) e``;
* ``t ! m`` with a literal message stays a send; any other message is
  eta-expanded to ``t ! (\\z:p. m z)``;
* ``atomic x <- t { x ! m1; ...; x ! mk }`` becomes a single send
  ``t ! (\\x:p. m1 x; ...; mk x)`` so the whole batch is delivered and run
  as one message on the target's owner.

Elaboration never rejects a program for type reasons — that is the
typechecker's job — but the ``atomic`` form has shape requirements
(non-nested, target bound to an active value, at most 64 statements, the
alias used only as a send target) enforced here via :class:`DesugarError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .syntax import (
    ActorType,
    App,
    Arrow,
    Bestow,
    Bestowed,
    Expr,
    Lambda,
    Mutate,
    NewActor,
    NewPassive,
    Passive,
    Send,
    Type,
    UnitType,
    UnitVal,
    Val,
    Var,
    free_vars,
    fresh_name,
    is_active,
    render_type,
)
from .typecheck import TypeCheckError, TypeEnv, check

MAX_BATCH = 64

Pos = tuple[int, int]


class ParseError(Exception):
    def __init__(self, message: str, pos: Pos) -> None:
        self.pos = pos
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")


class DesugarError(Exception):
    """A malformed use of surface-only forms (currently: atomic blocks)."""

    def __init__(self, code: str, message: str, pos: Pos | None = None) -> None:
        self.code = code
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(f"{where}{message} [{code}]")


# --------------------------------------------------------------------------
# Tokens
# --------------------------------------------------------------------------

_KEYWORDS = {"val", "new", "bestow", "atomic", "mutate", "p", "c", "B", "Unit"}
_PUNCT = ["<-", "->", "\\", ":", ".", ";", "!", "=", "(", ")", "{", "}"]
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<nl>\n)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>" + "|".join(re.escape(p) for p in _PUNCT) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "eof", or the punct/keyword text itself
    text: str
    pos: Pos


def tokenize(src: str) -> list[Token]:
    out: list[Token] = []
    line, col, i = 1, 1, 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", (line, col))
        text = m.group(0)
        if m.lastgroup == "nl":
            line, col = line + 1, 1
        elif m.lastgroup in ("ws", "comment"):
            col += len(text)
        elif m.lastgroup == "ident":
            kind = text if text in _KEYWORDS else "ident"
            out.append(Token(kind, text, (line, col)))
            col += len(text)
        else:
            out.append(Token(text, text, (line, col)))
            col += len(text)
        i = m.end()
    out.append(Token("eof", "", (line, col)))
    return out


# --------------------------------------------------------------------------
# Surface AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SNode:
    pass


@dataclass(frozen=True)
class SVar(SNode):
    name: str
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SUnit(SNode):
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SNew(SNode):
    active: bool
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SLambda(SNode):
    param: str
    param_type: Type
    body: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SApp(SNode):
    fun: SNode
    arg: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SSend(SNode):
    target: SNode
    msg: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SMutate(SNode):
    target: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SBestow(SNode):
    inner: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SBind(SNode):
    """A ``val`` statement; only meaningful inside a block."""

    name: str
    expr: SNode
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SBlock(SNode):
    stmts: tuple[SNode, ...]
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SAtomic(SNode):
    alias: str
    target: SNode
    stmts: tuple[SNode, ...]
    pos: Pos | None = field(default=None, compare=False)


# --------------------------------------------------------------------------
# Parser (recursive descent)
# --------------------------------------------------------------------------

_ATOM_START = {"ident", "(", "{", "new"}


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            shown = t.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {shown!r}", t.pos)
        return self.next()

    # -- types ------------------------------------------------------------

    def parse_type(self) -> Type:
        left = self.parse_atom_type()
        if self.peek().kind == "->":
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def parse_atom_type(self) -> Type:
        t = self.peek()
        match t.kind:
            case "p":
                self.next()
                return Passive()
            case "c":
                self.next()
                return ActorType()
            case "Unit":
                self.next()
                return UnitType()
            case "B":
                self.next()
                self.expect("(")
                self.expect("p")
                self.expect(")")
                return Bestowed()
            case "(":
                self.next()
                inner = self.parse_type()
                self.expect(")")
                return inner
        raise ParseError(f"expected a type, found {t.text!r}", t.pos)

    # -- expressions ------------------------------------------------------

    def parse_expr(self) -> SNode:
        t = self.peek()
        if t.kind == "\\":
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            body = self.parse_expr()
            return SLambda(name, ty, body, pos=t.pos)
        if t.kind == "atomic":
            return self.parse_atomic()
        return self.parse_send()

    def parse_atomic(self) -> SNode:
        t = self.expect("atomic")
        alias = self.expect("ident").text
        self.expect("<-")
        # Postfix level: a `{` after the target always opens the batch body,
        # never a block-argument application.
        target = self.parse_postfix()
        self.expect("{")
        stmts = self.parse_stmts(end="}")
        self.expect("}")
        return SAtomic(alias, target, tuple(stmts), pos=t.pos)

    def parse_send(self) -> SNode:
        lhs = self.parse_prefix()
        if self.peek().kind == "!":
            bang = self.next()
            rhs = self.parse_expr()
            return SSend(lhs, rhs, pos=bang.pos)
        return lhs

    def parse_prefix(self) -> SNode:
        t = self.peek()
        if t.kind == "bestow":
            self.next()
            return SBestow(self.parse_prefix(), pos=t.pos)
        return self.parse_app()

    def parse_app(self) -> SNode:
        e = self.parse_postfix()
        while self.peek().kind in _ATOM_START:
            arg = self.parse_postfix()
            e = SApp(e, arg, pos=t_pos(arg) or t_pos(e))
        return e

    def parse_postfix(self) -> SNode:
        e = self.parse_atom()
        while self.peek().kind == ".":
            dot = self.next()
            self.expect("mutate")
            self.expect("(")
            self.expect(")")
            e = SMutate(e, pos=dot.pos)
        return e

    def parse_atom(self) -> SNode:
        t = self.peek()
        match t.kind:
            case "ident":
                self.next()
                return SVar(t.text, pos=t.pos)
            case "(":
                self.next()
                if self.peek().kind == ")":
                    self.next()
                    return SUnit(pos=t.pos)
                inner = self.parse_expr()
                self.expect(")")
                return inner
            case "{":
                self.next()
                stmts = self.parse_stmts(end="}")
                self.expect("}")
                return SBlock(tuple(stmts), pos=t.pos)
            case "new":
                self.next()
                k = self.peek()
                if k.kind == "p":
                    self.next()
                    return SNew(False, pos=t.pos)
                if k.kind == "c":
                    self.next()
                    return SNew(True, pos=t.pos)
                raise ParseError("expected 'p' or 'c' after 'new'", k.pos)
        shown = t.text or "end of input"
        raise ParseError(f"expected an expression, found {shown!r}", t.pos)

    # -- statements -------------------------------------------------------

    def parse_stmt(self) -> SNode:
        t = self.peek()
        if t.kind == "val":
            self.next()
            name = self.expect("ident").text
            self.expect("=")
            e = self.parse_expr()
            return SBind(name, e, pos=t.pos)
        return self.parse_expr()

    def parse_stmts(self, end: str) -> list[SNode]:
        stmts: list[SNode] = []
        while self.peek().kind != end:
            stmts.append(self.parse_stmt())
            if self.peek().kind == ";":
                self.next()
            else:
                break
        return stmts


def t_pos(n: SNode) -> Pos | None:
    return getattr(n, "pos", None)


def parse_program(src: str) -> SBlock:
    p = _Parser(tokenize(src))
    stmts = p.parse_stmts(end="eof")
    p.expect("eof")
    return SBlock(tuple(stmts))


# --------------------------------------------------------------------------
# Elaboration to the core calculus
# --------------------------------------------------------------------------


def _try_type(e: Expr, env: TypeEnv) -> Type:
    """Best-effort type for binder annotations; the final check is elsewhere.

    If the bound expression does not typecheck, fall back to Unit — the
    whole program will then fail the real typecheck with an error placed at
    the offending expression, which beats failing here with less context.
    """
    try:
        return check(env, e)
    except TypeCheckError:
        return UnitType()


def desugar(node: SNode, env: TypeEnv | None = None) -> Expr:
    return _elab(node, env if env is not None else TypeEnv(), in_atomic=False)


def compile_program(src: str, env: TypeEnv | None = None) -> Expr:
    return desugar(parse_program(src), env)


def _elab(node: SNode, env: TypeEnv, in_atomic: bool) -> Expr:
    match node:
        case SVar(name):
            return Var(name)
        case SUnit():
            return Val(UnitVal())
        case SNew(active):
            return NewActor() if active else NewPassive()
        case SLambda(param, param_type, body):
            core = _elab(body, env.extend(param, param_type), in_atomic)
            return Val(Lambda(param, param_type, core))
        case SApp(fun, arg):
            return App(_elab(fun, env, in_atomic), _elab(arg, env, in_atomic))
        case SMutate(target):
            return Mutate(_elab(target, env, in_atomic))
        case SBestow(inner):
            return Bestow(_elab(inner, env, in_atomic))
        case SSend():
            return _elab_send(node, env, in_atomic)
        case SBlock(stmts):
            return _elab_block(list(stmts), env, in_atomic)
        case SBind(_, expr):
            # A trailing `val` has nothing to bind; its value stands alone.
            return _elab(expr, env, in_atomic)
        case SAtomic():
            return _elab_atomic(node, env, in_atomic)
    raise TypeError(f"not a surface node: {node!r}")


def _elab_send(node: SSend, env: TypeEnv, in_atomic: bool) -> Expr:
    target = _elab(node.target, env, in_atomic)
    msg = _elab(node.msg, env, in_atomic)
    if isinstance(msg, Val) and isinstance(msg.value, Lambda):
        return Send(target, msg.value)
    # The core only sends literal functions; wrap anything else so the
    # function position is evaluated on the receiver.
    z = fresh_name("z", free_vars(msg))
    return Send(target, Lambda(z, Passive(), App(msg, Var(z))))


def _elab_block(stmts: list[SNode], env: TypeEnv, in_atomic: bool) -> Expr:
    if not stmts:
        return Val(UnitVal())
    head, rest = stmts[0], stmts[1:]
    if not rest:
        return _elab(head, env, in_atomic)
    if isinstance(head, SBind):
        bound = _elab(head.expr, env, in_atomic)
        t = _try_type(bound, env)
        body = _elab_block(rest, env.extend(head.name, t), in_atomic)
        return App(Val(Lambda(head.name, t, body)), bound)
    first = _elab(head, env, in_atomic)
    t = _try_type(first, env)
    body = _elab_block(rest, env, in_atomic)
    x = fresh_name("_seq", free_vars(body))
    return App(Val(Lambda(x, t, body)), first)


def _surface_uses(node: SNode, name: str) -> bool:
    """Does ``name`` occur free in the surface term?"""
    match node:
        case SVar(n):
            return n == name
        case SUnit() | SNew(_):
            return False
        case SLambda(param, _, body):
            return param != name and _surface_uses(body, name)
        case SApp(fun, arg):
            return _surface_uses(fun, name) or _surface_uses(arg, name)
        case SSend(target, msg):
            return _surface_uses(target, name) or _surface_uses(msg, name)
        case SMutate(target) | SBestow(inner=target):
            return _surface_uses(target, name)
        case SBind(_, expr):
            return _surface_uses(expr, name)
        case SBlock(stmts):
            shadowed = False
            for s in stmts:
                if not shadowed and _surface_uses(s, name):
                    return True
                if isinstance(s, SBind) and s.name == name:
                    shadowed = True
            return False
        case SAtomic(alias, target, stmts):
            if _surface_uses(target, name):
                return True
            if alias == name:
                return False
            return any(_surface_uses(s, name) for s in stmts)
    raise TypeError(f"not a surface node: {node!r}")


def _elab_atomic(node: SAtomic, env: TypeEnv, in_atomic: bool) -> Expr:
    if in_atomic:
        raise DesugarError(
            "nested-atomic", "atomic blocks cannot be nested", node.pos
        )
    if not isinstance(node.target, SVar):
        raise DesugarError(
            "non-active-target",
            "atomic target must be a bound name",
            node.pos,
        )
    t = env.lookup(node.target.name)
    if t is None or not is_active(t):
        found = render_type(t) if t is not None else "nothing"
        raise DesugarError(
            "non-active-target",
            f"atomic target {node.target.name!r} must name an actor or "
            f"bestowed reference (found {found})",
            node.pos,
        )
    if len(node.stmts) > MAX_BATCH:
        raise DesugarError(
            "batch-too-large",
            f"atomic block has {len(node.stmts)} statements; the cap is {MAX_BATCH}",
            node.pos,
        )

    alias = node.alias
    parts: list[Expr] = []
    body_env = env.restrict_active().extend(alias, Passive())
    for s in node.stmts:
        if not (isinstance(s, SSend) and s.target == SVar(alias)):
            if _surface_uses(s, alias):
                raise DesugarError(
                    "alias-misuse",
                    f"inside an atomic block, {alias!r} may only be used as "
                    "the target of a send",
                    t_pos(s) or node.pos,
                )
            raise DesugarError(
                "batch-shape",
                f"every statement in an atomic block must send to {alias!r}",
                t_pos(s) or node.pos,
            )
        if _surface_uses(s.msg, alias):
            raise DesugarError(
                "alias-misuse",
                f"inside an atomic block, {alias!r} may only be used as "
                "the target of a send",
                t_pos(s.msg) or node.pos,
            )
        msg_core = _elab(s.msg, body_env, in_atomic=True)
        # Each `alias ! m` runs m directly on the underlying object.
        parts.append(App(msg_core, Var(alias)))

    body: Expr = Val(UnitVal())
    if parts:
        body = parts[-1]
        for part in reversed(parts[:-1]):
            t_part = _try_type(part, body_env)
            x = fresh_name("_seq", free_vars(body))
            body = App(Val(Lambda(x, t_part, body)), part)
    return Send(Var(node.target.name), Lambda(alias, Passive(), body))


# --------------------------------------------------------------------------
# Pretty-printing core expressions back to surface syntax
# --------------------------------------------------------------------------

_LEVEL_EXPR = 0
_LEVEL_SEND = 1
_LEVEL_PREFIX = 2
_LEVEL_APP = 3
_LEVEL_POSTFIX = 4


def format_core(e: Expr) -> str:
    """Valid surface syntax for a core expression.

    Only source forms are printable; runtime values (locations, actor ids,
    bestowed references) raise ``ValueError``.
    """
    return _fmt(e, _LEVEL_EXPR)


def _fmt(e: Expr, level: int) -> str:
    match e:
        case Var(name):
            return name
        case Val(UnitVal()):
            return "()"
        case NewPassive():
            return "new p"
        case NewActor():
            return "new c"
        case Val(Lambda(param, param_type, body)):
            s = f"\\{param}:{_fmt_type(param_type)}. {_fmt(body, _LEVEL_EXPR)}"
            return _wrap(s, _LEVEL_EXPR, level)
        case Send(target, msg):
            s = f"{_fmt(target, _LEVEL_PREFIX)} ! {_fmt(Val(msg), _LEVEL_EXPR)}"
            return _wrap(s, _LEVEL_SEND, level)
        case Bestow(inner):
            s = f"bestow {_fmt(inner, _LEVEL_PREFIX)}"
            return _wrap(s, _LEVEL_PREFIX, level)
        case App(fun, arg):
            s = f"{_fmt(fun, _LEVEL_APP)} {_fmt(arg, _LEVEL_POSTFIX)}"
            return _wrap(s, _LEVEL_APP, level)
        case Mutate(target):
            s = f"{_fmt(target, _LEVEL_POSTFIX)}.mutate()"
            return _wrap(s, _LEVEL_POSTFIX, level)
    raise ValueError(f"expression has no surface form: {e}")


def _wrap(s: str, have: int, want: int) -> str:
    return f"({s})" if have < want else s


def _fmt_type(t: Type) -> str:
    match t:
        case Passive():
            return "p"
        case ActorType():
            return "c"
        case Bestowed():
            return "B(p)"
        case UnitType():
            return "Unit"
        case Arrow(dom, cod):
            left = _fmt_type(dom)
            if isinstance(dom, Arrow):
                left = f"({left})"
            return f"{left} -> {_fmt_type(cod)}"
    raise TypeError(f"not a type: {t!r}")
