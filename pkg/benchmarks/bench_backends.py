"""Compare the numba kernels against the numpy fallback.

Kernel timings run in-process. End-to-end solver timings run in fresh
interpreters, one per backend, because the backend is fixed at import
time by OQSIM_DISABLE_NUMBA.

    python3 benchmarks/bench_backends.py [--out report.json]
"""
import argparse
import json
import os
import subprocess
import sys

from oqsim.bench import bench_kernels

SOLVE = r"""
import json, time
import numpy as np
from oqsim import _kernels
from oqsim.bench import MODELS
from oqsim.mesolve import odesolve
from oqsim.mcsolve import mcsolve

out = {"backend": _kernels.BACKEND_NAME}
H, psi0, c_ops, e_ops, tlist, D = MODELS["coupled-oscillators"](2)
odesolve(H, psi0, tlist[:3], c_ops, e_ops)
mcsolve(H, psi0, tlist[:3], 2, c_ops, e_ops, seed=0, workers=1)

H, psi0, c_ops, e_ops, tlist, D = MODELS["coupled-oscillators"](12)
t = time.perf_counter()
odesolve(H, psi0, tlist, c_ops, e_ops)
out["me_coupled_N12_s"] = time.perf_counter() - t
t = time.perf_counter()
mcsolve(H, psi0, tlist, 50, c_ops, e_ops, seed=0, workers=1)
out["mc_coupled_N12_50traj_s"] = time.perf_counter() - t
print(json.dumps(out))
"""


def solve_times(disable):
    env = dict(os.environ, OQSIM_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", SOLVE], env=env, check=True,
                          capture_output=True, text=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    args = ap.parse_args()
    report = {"kernels": bench_kernels(),
              "solvers": {"numba": solve_times(False), "numpy": solve_times(True)}}
    s = report["solvers"]
    report["solver_speedup"] = {k: s["numpy"][k] / s["numba"][k]
                                for k in s["numpy"] if k.endswith("_s")}
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


if __name__ == "__main__":
    main()
