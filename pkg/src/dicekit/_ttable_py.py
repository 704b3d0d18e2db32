"""Pure-Python truth-table kernel.

A truth table over n variables is a single bignum of 2**n bits: bit j holds a
formula's value under assignment j (variable i true in assignment j iff bit i
of j is set).  Formulas arrive as RPN programs (see satcore for the opcodes);
evaluating one program is a handful of bigint bitwise operations however many
assignments there are.
"""

from __future__ import annotations

OP_VAR = 0
OP_NOT = 1
OP_AND = 2
OP_OR = 3
OP_TRUE = 4
OP_FALSE = 5

_mask_cache: dict[tuple[int, int], int] = {}


def _var_mask(i: int, n_vars: int) -> int:
    """Bignum whose bit j is the value of variable i in assignment j."""
    key = (i, n_vars)
    m = _mask_cache.get(key)
    if m is None:
        width = 1 << n_vars
        unit = 1 << i  # run length of equal bits
        m = ((1 << unit) - 1) << unit  # one period: `unit` zeros then `unit` ones
        span = unit << 1
        while span < width:  # replicate by doubling
            m |= m << span
            span <<= 1
        _mask_cache[key] = m
    return m


def _eval(prog: list[int], masks: list[int], full: int) -> int:
    stack: list[int] = []
    i = 0
    n = len(prog)
    while i < n:
        op = prog[i]
        if op == OP_VAR:
            i += 1
            stack.append(masks[prog[i]])
        elif op == OP_NOT:
            stack[-1] = full ^ stack[-1]
        elif op == OP_AND:
            r = stack.pop()
            stack[-1] &= r
        elif op == OP_OR:
            r = stack.pop()
            stack[-1] |= r
        elif op == OP_TRUE:
            stack.append(full)
        else:
            stack.append(0)
        i += 1
    return stack[-1]


def any_model(programs: list[list[int]], n_vars: int) -> bool:
    """True iff some assignment satisfies every program."""
    width = 1 << n_vars
    full = (1 << width) - 1
    masks = [_var_mask(i, n_vars) for i in range(n_vars)]
    acc = full
    for prog in programs:
        acc &= _eval(prog, masks, full)
        if not acc:
            return False
    return True
