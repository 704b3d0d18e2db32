"""Compare the satisfiability kernels (compiled extension vs pure-Python).

Generates random ground stores, then times `satcore.satisfiable` and
`satcore.entailed_by` under each available backend on identical inputs:

    python3 benchmarks/bench_sat.py
    python3 benchmarks/bench_sat.py --atoms 20 --formulas 8 --iterations 50

The sweep covers several variable counts because the kernels scale
differently: the pure kernel works on 2**n-bit bignums, the compiled one on
flat byte tables.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from dicekit import satcore
from dicekit.formulas import And, Atom, Iff, Implies, Not, Or


def random_formula(rng: random.Random, names: tuple[str, ...], depth: int):
    if depth <= 0 or rng.random() < 0.3:
        return Atom(rng.choice(names))
    shape = rng.choice(("not", "and", "or", "->", "<->"))
    if shape == "not":
        return Not(random_formula(rng, names, depth - 1))
    if shape in ("and", "or"):
        parts = tuple(random_formula(rng, names, depth - 1) for _ in range(rng.randint(2, 3)))
        return And(parts) if shape == "and" else Or(parts)
    left = random_formula(rng, names, depth - 1)
    right = random_formula(rng, names, depth - 1)
    return Implies(left, right) if shape == "->" else Iff(left, right)


def make_cases(rng: random.Random, n_atoms: int, n_formulas: int, iterations: int):
    names = tuple(f"v{i}" for i in range(n_atoms))
    cases = []
    for _ in range(iterations):
        store = [random_formula(rng, names, 3) for _ in range(n_formulas)]
        # pin a few atoms so the store looks like a knowledge-base context
        for i in rng.sample(range(n_atoms), k=min(3, n_atoms)):
            atom = Atom(names[i])
            store.append(atom if rng.random() < 0.5 else Not(atom))
        query = random_formula(rng, names, 2)
        cases.append((store, query))
    return cases


def time_backend(name: str, cases, repeats: int) -> tuple[float, list]:
    satcore.use_backend(name)
    answers = []
    runs = []
    for _ in range(repeats):
        answers = []
        t0 = time.perf_counter()
        for store, query in cases:
            answers.append((satcore.satisfiable(store), satcore.entailed_by(store, query)))
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), answers


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=20519)
    parser.add_argument("--atoms", type=int, action="append",
                        help="variable count to sweep (repeatable; default 8 12 16 20)")
    parser.add_argument("--formulas", type=int, default=6, help="formulas per store")
    parser.add_argument("--iterations", type=int, default=100, help="stores per sweep point")
    parser.add_argument("--repeats", type=int, default=3, help="timed passes; median reported")
    args = parser.parse_args(argv)

    backends = sorted(satcore.available_backends())
    if "compiled" not in backends:
        print("note: compiled kernel not built; timing the pure kernel only")
    sweep = args.atoms or [8, 12, 16, 20]
    previous = satcore.backend_name()

    print(f"{args.iterations} stores x ({args.formulas} formulas + 3 pins), "
          f"satisfiable + entailed_by per store, median of {args.repeats}")
    header = f"{'atoms':>6} " + "".join(f"{b:>12} " for b in backends)
    print(header + ("speedup" if len(backends) > 1 else ""))
    try:
        for n_atoms in sweep:
            cases = make_cases(random.Random(args.seed), n_atoms, args.formulas, args.iterations)
            row = f"{n_atoms:>6} "
            timings = {}
            results = {}
            for b in backends:
                timings[b], results[b] = time_backend(b, cases, args.repeats)
                row += f"{timings[b] * 1e3:>10.2f}ms "
            if len(backends) > 1:
                first, *others = backends
                for b in others:
                    if results[b] != results[first]:
                        raise SystemExit(f"kernel disagreement at {n_atoms} atoms")
                row += f"{timings['pure'] / timings['compiled']:>6.1f}x"
            print(row)
    finally:
        satcore.use_backend(previous)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
