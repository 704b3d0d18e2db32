# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled truth-table kernel.

Enumerates assignments in blocks of 64: one uint64 word holds a formula's
value under 64 consecutive assignments.  Variables 0..5 vary within a block
(fixed bit patterns); variable i >= 6 is constant per block, given by bit
i-6 of the block index.  Early exit on the first satisfying block.

Opcode layout matches dicekit._ttable_py.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef enum:
    OP_VAR = 0
    OP_NOT = 1
    OP_AND = 2
    OP_OR = 3
    OP_TRUE = 4
    OP_FALSE = 5

# value of variable i (< 6) across the 64 assignments of any block
cdef uint64_t _PAT[6]
_PAT[0] = 0xAAAAAAAAAAAAAAAAUL
_PAT[1] = 0xCCCCCCCCCCCCCCCCUL
_PAT[2] = 0xF0F0F0F0F0F0F0F0UL
_PAT[3] = 0xFF00FF00FF00FF00UL
_PAT[4] = 0xFFFF0000FFFF0000UL
_PAT[5] = 0xFFFFFFFF00000000UL


cdef uint64_t _eval(long* prog, Py_ssize_t n, uint64_t* words, uint64_t* stack):
    cdef Py_ssize_t i = 0, sp = 0
    cdef long op
    while i < n:
        op = prog[i]
        if op == OP_VAR:
            i += 1
            stack[sp] = words[prog[i]]
            sp += 1
        elif op == OP_NOT:
            stack[sp - 1] = ~stack[sp - 1]
        elif op == OP_AND:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] & stack[sp]
        elif op == OP_OR:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] | stack[sp]
        elif op == OP_TRUE:
            stack[sp] = ~(<uint64_t>0)
            sp += 1
        else:
            stack[sp] = 0
            sp += 1
        i += 1
    return stack[sp - 1]


def any_model(programs, int n_vars):
    """True iff some assignment satisfies every program."""
    cdef Py_ssize_t n_progs = len(programs)
    cdef Py_ssize_t i, j, k
    cdef uint64_t acc, valid
    cdef unsigned long long block, n_blocks

    # flatten the Python program lists into C arrays
    cdef long** progs = <long**>malloc(n_progs * sizeof(long*))
    cdef Py_ssize_t* lens = <Py_ssize_t*>malloc(n_progs * sizeof(Py_ssize_t))
    if progs == NULL or lens == NULL:
        free(progs); free(lens)
        raise MemoryError()
    cdef Py_ssize_t max_len = 1
    for i in range(n_progs):
        prog = programs[i]
        lens[i] = len(prog)
        if lens[i] > max_len:
            max_len = lens[i]
        progs[i] = <long*>malloc(lens[i] * sizeof(long))
        if progs[i] == NULL:
            for j in range(i):
                free(progs[j])
            free(progs); free(lens)
            raise MemoryError()
        for j in range(lens[i]):
            progs[i][j] = programs[i][j]

    cdef uint64_t* words = <uint64_t*>malloc((n_vars if n_vars > 0 else 1) * sizeof(uint64_t))
    cdef uint64_t* stack = <uint64_t*>malloc(max_len * sizeof(uint64_t))
    cdef bint found = False

    try:
        if words == NULL or stack == NULL:
            raise MemoryError()
        if n_vars >= 6:
            valid = ~(<uint64_t>0)
            n_blocks = (<unsigned long long>1) << (n_vars - 6)
        else:
            valid = ((<uint64_t>1) << (1 << n_vars)) - 1
            n_blocks = 1
        for i in range(n_vars):
            if i < 6:
                words[i] = _PAT[i]
        block = 0
        while block < n_blocks:
            for i in range(6, n_vars):
                if (block >> (i - 6)) & 1:
                    words[i] = ~(<uint64_t>0)
                else:
                    words[i] = 0
            acc = valid
            for k in range(n_progs):
                acc = acc & _eval(progs[k], lens[k], words, stack)
                if acc == 0:
                    break
            if acc != 0:
                found = True
                break
            block += 1
    finally:
        for i in range(n_progs):
            free(progs[i])
        free(progs)
        free(lens)
        free(words)
        free(stack)
    return found
