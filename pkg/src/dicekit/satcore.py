"""Ground propositional satisfiability by truth-table enumeration.

Every formula the rest of the package deals in is ground; anything that is
not a boolean connective (attitudes, generics, defeasible conditionals,
site/info/relation tokens, yields-atoms, plain atoms) is one opaque boolean
variable, keyed by its canonical printed form.  Formulas compile to small RPN
programs which a kernel evaluates over all assignments at once.

Two interchangeable kernels: a compiled Cython extension (dicekit._ttable)
and a pure-Python bignum fallback (dicekit._ttable_py).  Selection happens at
import; set DICEKIT_SAT_BACKEND=pure or =compiled to force one.
"""

from __future__ import annotations

import os
from typing import Iterable

from .errors import SatTooLarge, ValidationError
from .formulas import And, Formula, Iff, Implies, Not, Or, is_ground, print_formula, sat_atomic

OP_VAR = 0
OP_NOT = 1
OP_AND = 2
OP_OR = 3
OP_TRUE = 4
OP_FALSE = 5

#: enumeration cap; every scenario in the corpus stays well under this
MAX_VARS = 25

from . import _ttable_py as _pure

_compiled = None
try:
    from . import _ttable as _compiled  # type: ignore[no-redef]
except ImportError:
    _compiled = None

_forced = os.environ.get("DICEKIT_SAT_BACKEND")
if _forced == "pure":
    _backend = _pure
elif _forced == "compiled":
    if _compiled is None:
        raise ImportError(
            "DICEKIT_SAT_BACKEND=compiled but the dicekit._ttable extension is not built"
        )
    _backend = _compiled
elif _forced:
    raise ImportError(f"unknown DICEKIT_SAT_BACKEND value {_forced!r}")
else:
    _backend = _compiled if _compiled is not None else _pure


def backend_name() -> str:
    return "compiled" if _backend is _compiled and _compiled is not None else "pure"


def use_backend(name: str) -> None:
    """Force a kernel at runtime; "pure" always works, "compiled" needs the
    built extension."""
    global _backend
    if name == "pure":
        _backend = _pure
    elif name == "compiled":
        if _compiled is None:
            raise ValidationError("the compiled kernel is not available (extension not built)")
        _backend = _compiled
    else:
        raise ValidationError(f"unknown backend {name!r}")


def available_backends() -> dict:
    out = {"pure": _pure}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def _atoms_of(f: Formula, out: dict[str, int]) -> None:
    if sat_atomic(f):
        key = print_formula(f)
        if key not in out:
            out[key] = len(out)
        return
    if isinstance(f, Not):
        _atoms_of(f.body, out)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            _atoms_of(p, out)
    else:  # Implies | Iff
        _atoms_of(f.left, out)  # type: ignore[union-attr]
        _atoms_of(f.right, out)  # type: ignore[union-attr]


def atom_index(formulas: Iterable[Formula]) -> dict[str, int]:
    """Opaque-variable index (canonical key -> variable number)."""
    out: dict[str, int] = {}
    for f in formulas:
        _atoms_of(f, out)
    return out


def compile_program(f: Formula, index: dict[str, int]) -> list[int]:
    prog: list[int] = []

    def emit(g: Formula) -> None:
        if sat_atomic(g):
            prog.append(OP_VAR)
            prog.append(index[print_formula(g)])
        elif isinstance(g, Not):
            emit(g.body)
            prog.append(OP_NOT)
        elif isinstance(g, And):
            emit(g.parts[0])
            for p in g.parts[1:]:
                emit(p)
                prog.append(OP_AND)
        elif isinstance(g, Or):
            emit(g.parts[0])
            for p in g.parts[1:]:
                emit(p)
                prog.append(OP_OR)
        elif isinstance(g, Implies):
            emit(g.left)
            prog.append(OP_NOT)
            emit(g.right)
            prog.append(OP_OR)
        elif isinstance(g, Iff):
            emit(g.left)
            emit(g.right)
            prog.append(OP_AND)
            emit(g.left)
            prog.append(OP_NOT)
            emit(g.right)
            prog.append(OP_NOT)
            prog.append(OP_AND)
            prog.append(OP_OR)
        else:
            raise ValidationError(f"cannot compile {g!r}")

    emit(f)
    return prog


def satisfiable(formulas: Iterable[Formula]) -> bool:
    fs = tuple(formulas)
    for f in fs:
        if not is_ground(f):
            raise ValidationError(f"satisfiability needs ground formulas, got {print_formula(f)}")
    index = atom_index(fs)
    if len(index) > MAX_VARS:
        raise SatTooLarge(f"{len(index)} variables exceeds the cap of {MAX_VARS}")
    if not fs:
        return True
    programs = [compile_program(f, index) for f in fs]
    return _backend.any_model(programs, len(index))


def entailed_by(store: Iterable[Formula], query: Formula) -> bool:
    """Classical entailment: store plus the query's negation is unsatisfiable."""
    return not satisfiable(tuple(store) + (Not(query),))
