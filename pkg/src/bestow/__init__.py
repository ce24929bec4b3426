"""An actor calculus with bestowed references, and tools around it.

The package splits into a static side and a dynamic side:

* :mod:`bestow.syntax`, :mod:`bestow.typecheck` — terms, types and the
  twelve-rule checker;
* :mod:`bestow.semantics`, :mod:`bestow.wellformed`, :mod:`bestow.explore`
  — the small-step machine, heap invariants, and a bounded model checker
  for progress, preservation and race freedom;
* :mod:`bestow.gen` — random well-typed programs for soundness sweeps;
* :mod:`bestow.surface`, :mod:`bestow.cli` — a small surface language
  (with ``atomic`` batching) and the command-line front end;
* :mod:`bestow.runtime` — a genuinely concurrent actor library realizing
  the same ideas with Python threads.
"""

from __future__ import annotations

from .syntax import (
    Actor,
    ActorId,
    ActorType,
    App,
    Arrow,
    Bestow,
    Bestowed,
    BestowedLoc,
    Expr,
    Heap,
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
)
from .typecheck import TypeCheckError, TypeEnv, type_of
from .semantics import (
    SchedulerChoice,
    TraceEvent,
    enabled_choices,
    initial_heap,
    run_program,
    run_to_quiescence,
    step_system,
)
from .wellformed import WfReport, WfViolation, wf_heap
from .explore import (
    StateSpace,
    canonicalize,
    check_preservation,
    check_progress,
    check_race_freedom,
    explore,
)
from .gen import GenConfig, generate_well_typed
from .surface import compile_program, desugar, format_core, parse_program

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "ActorId",
    "ActorType",
    "App",
    "Arrow",
    "Bestow",
    "Bestowed",
    "BestowedLoc",
    "Expr",
    "GenConfig",
    "Heap",
    "Lambda",
    "Loc",
    "Mutate",
    "NewActor",
    "NewPassive",
    "Passive",
    "SchedulerChoice",
    "Send",
    "StateSpace",
    "TraceEvent",
    "Type",
    "TypeCheckError",
    "TypeEnv",
    "UnitType",
    "UnitVal",
    "Val",
    "Value",
    "Var",
    "WfReport",
    "WfViolation",
    "canonicalize",
    "check_preservation",
    "check_progress",
    "check_race_freedom",
    "compile_program",
    "desugar",
    "enabled_choices",
    "explore",
    "format_core",
    "generate_well_typed",
    "initial_heap",
    "parse_program",
    "run_program",
    "run_to_quiescence",
    "step_system",
    "type_of",
    "wf_heap",
]
