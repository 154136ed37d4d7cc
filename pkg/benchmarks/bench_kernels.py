"""Compare the compiled and pure-Python kernels.

Kernel timings call both modules directly; the end-to-end timing runs a
Monte-Carlo job in a subprocess per backend (the backend is fixed at import).

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit

from gdlog.kernels import OP_BIND, OP_CHECK, available_backends

END_TO_END = """
import time
from gdlog import kernels
from gdlog.engine import monte_carlo
from gdlog.parser import parse_facts, parse_program
prog = parse_program("intensional R(x: int).\\nR(ShiftedDirac[i]) :- R(i).\\n")
d0 = parse_facts("R(0).", prog)
t = time.perf_counter()
monte_carlo(prog, d0, n=40, budget=400)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def rng_draws(mod, n=200_000):
    r = mod.Rng(1, 2)
    for _ in range(n):
        r.random()


def join(mod, size=300):
    # path query H(x, z) :- E(x, y), E(y, z) on a ring with chords
    edges = {(i, (i + 1) % size) for i in range(size)} | {(i, (i * 7) % size) for i in range(size)}
    plan = (("E", (OP_BIND, OP_BIND), (0, 1)), ("E", (OP_CHECK, OP_BIND), (1, 2)))
    for _ in range(20):
        mod.match_rule(plan, 3, (1, 1), (0, 2), {"E": edges}, ())


def end_to_end(backend):
    env = dict(os.environ)
    if backend == "python":
        env["GDLOG_PURE_PYTHON"] = "1"
    else:
        env.pop("GDLOG_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    rows = []
    for label, fn in [("rng 200k draws", rng_draws), ("join 20x path query", join)]:
        times = {name: min(timeit.repeat(lambda m=mod: fn(m), number=1, repeat=args.repeat))
                 for name, mod in backends.items()}
        rows.append((label, times))
    e2e = {}
    for name in backends:
        got, secs = end_to_end(name)
        assert got == name, (got, name)
        e2e[name] = secs
    rows.append(("chase 40 runs x 400 steps", e2e))
    print(f"{'benchmark':<28}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for label, t in rows:
        py, cy = t.get("python"), t.get("cython")
        speed = f"{py / cy:9.1f}x" if py and cy else "      n/a"
        print(f"{label:<28}{py:>12.4f}{(cy or float('nan')):>12.4f}{speed:>10}")


if __name__ == "__main__":
    main()
