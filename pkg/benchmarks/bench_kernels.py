"""Compiled (numba) versus interpreted kernels.

Each backend runs in its own interpreter because the switch is read at import
time.  Usage::

    python benchmarks/bench_kernels.py [--delta 0.01] [--repeat 3]

Prints one line per workload with the best wall time for each backend, the
speedup, and whether the two backends produced identical results.
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from isscert import DeclineBudget, build_mapping, cp_lower
from isscert._jit import backend

delta, repeat = float(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(7)
ks = rng.integers(1000, 100001, 2000)
kas = np.floor(ks * rng.uniform(0.5, 1.0, ks.size)).astype(int)

def mapping():
    return build_mapping(delta, DeclineBudget.parse("ad:0.05"), 100000, 1.0, 0.001).sizes.tolist()

def bounds():
    return [cp_lower(0.001, int(a), int(k)) for a, k in zip(kas, ks)]

# warm-up triggers compilation (or loads the on-disk cache)
build_mapping(0.5, DeclineBudget.parse("ad:0.05"), 1000, 1.0, 0.001)
cp_lower(0.001, 10, 20)

out = {"backend": backend()}
for name, fn in (("build_mapping", mapping), ("cp_lower x2000", bounds)):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = {"seconds": best, "result": res}
print(json.dumps(out))
"""


def run(disable, delta, repeat):
    env = dict(os.environ)
    env["ISSCERT_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run([sys.executable, "-c", CHILD, str(delta), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.01, help="grid step for the mapping build")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = run(False, args.delta, args.repeat)
    slow = run(True, args.delta, args.repeat)
    print(f"{'workload':<16} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}  same")
    for name in ("build_mapping", "cp_lower x2000"):
        a, b = fast[name], slow[name]
        same = a["result"] == b["result"]
        print(f"{name:<16} {a['seconds']:>9.3f}s {b['seconds']:>9.3f}s "
              f"{b['seconds'] / a['seconds']:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
