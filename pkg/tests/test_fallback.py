"""The interpreted kernels must agree bit for bit with the compiled ones."""

import json
import os
import subprocess
import sys

from isscert import DeclineBudget, build_mapping, certify_iss, cp_lower, gen_population
from isscert._jit import backend

PROBE = r"""
import json
from isscert import DeclineBudget, build_mapping, certify_iss, cp_lower, gen_population
from isscert._jit import backend
t = build_mapping(0.02, DeclineBudget.parse("rd:0.05"), 5000, 1.0, 0.001)
pop = gen_population("concentrated_high", 8, seed=3)
outs = [certify_iss(pop.stream(1), i, t, 50, 0.001, 1.0) for i in range(8)]
print(json.dumps({
    "backend": backend(),
    "sizes": t.sizes.tolist(),
    "cp": [cp_lower(0.001, ka, 1000) for ka in (1, 500, 990.5, 1000)],
    "radii": [o.radius for o in outs],
}))
"""


def _local():
    t = build_mapping(0.02, DeclineBudget.parse("rd:0.05"), 5000, 1.0, 0.001)
    pop = gen_population("concentrated_high", 8, seed=3)
    outs = [certify_iss(pop.stream(1), i, t, 50, 0.001, 1.0) for i in range(8)]
    return {
        "sizes": t.sizes.tolist(),
        "cp": [cp_lower(0.001, ka, 1000) for ka in (1, 500, 990.5, 1000)],
        "radii": [o.radius for o in outs],
    }


def test_fallback_matches_compiled():
    env = dict(os.environ, ISSCERT_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True,
                          text=True, check=True)
    remote = json.loads(proc.stdout)
    assert remote.pop("backend") == "python"
    assert remote == _local()


def test_backend_reported():
    expected = "python" if os.environ.get("ISSCERT_DISABLE_NUMBA") == "1" else "numba"
    assert backend() == expected
