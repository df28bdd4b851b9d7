"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--count 512] [--repeat 20]

Times each kernel on a default-sized state and a full fig2 sweep per backend.
"""

import argparse
import timeit

import numpy as np

from seqweak import _kernels_py, kernels
from seqweak.polarization import PI_D
from seqweak.scenarios import ScenarioConfig, run_scenario

try:
    from seqweak import _kernels as compiled
except ImportError:
    compiled = None


def use(impl):
    kernels.couple_axis = impl.couple_axis
    kernels.joint_moment = impl.joint_moment


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n = args.count
    amp = rng.normal(size=(2, n, n)) + 1j * rng.normal(size=(2, n, n))
    amp = np.ascontiguousarray(amp / np.linalg.norm(amp))
    xs = np.arange(n, dtype=float)
    proj = np.ascontiguousarray(PI_D.entries)

    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    print(f"state 2x{n}x{n} complex128, best of {args.repeat}")
    print(f"{'backend':<8} {'couple_axis x':>14} {'couple_axis y':>14} {'joint_moment':>13} {'fig2 sweep':>11}")
    for name, impl in backends:
        cx = min(timeit.repeat(lambda: impl.couple_axis(amp, proj, 8, 0), number=1, repeat=args.repeat))
        cy = min(timeit.repeat(lambda: impl.couple_axis(amp, proj, 8, 1), number=1, repeat=args.repeat))
        jm = min(timeit.repeat(lambda: impl.joint_moment(amp, xs, xs, 1, 1), number=1, repeat=args.repeat))
        use(impl)
        sweep = min(timeit.repeat(lambda: run_scenario(ScenarioConfig(scenario="fig2")), number=1, repeat=3))
        print(f"{name:<8} {cx * 1e3:>11.2f} ms {cy * 1e3:>11.2f} ms {jm * 1e3:>10.2f} ms {sweep:>9.2f} s")
    if compiled is None:
        print("compiled kernels not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
