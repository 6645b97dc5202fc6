"""Time the compiled sweep kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--max-n 6] [--repeat 3]

Both backends run on the same prepared integer inputs (worth evaluation and
scaling are excluded), and their results are compared before timing is printed.
"""

import argparse
import hashlib
import time
from fractions import Fraction

from bcenet import sweep
from bcenet.axioms import adversarial_rule
from bcenet.games import FunctionWorth


def worth(n):
    def f(C, g):
        h = hashlib.sha256(repr((sorted(C), g.mask)).encode()).digest()
        return Fraction(h[0] % 21 - 10, h[1] % 10 + 1)

    return FunctionWorth(n, f)


def best_of(repeat, fn):
    times, out = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if sweep.backend_name() != "compiled":
        raise SystemExit("compiled kernels are not built; reinstall without BCENET_PURE")

    compiled, python = sweep._compiled, sweep._kernels_py
    print(f"{'kernel':<10} {'n':>2} {'networks':>9} {'compiled s':>11} {'python s':>9} {'speed-up':>9}")
    for n in range(3, args.max_n + 1):
        call, _ = sweep.cycle_sum_call(sweep.tabulate(adversarial_rule(n).bind(None), n), n)
        tc, rc = best_of(args.repeat, lambda: call.run(compiled))
        tp, rp = best_of(1, lambda: call.run(python))
        assert tuple(rc) == tuple(rp)
        print(f"{'cycle-sum':<10} {n:>2} {1 << len(sweep.layout(n).pairs):>9} {tc:>11.4f} {tp:>9.3f} {tp / tc:>8.1f}x")

        call, _ = sweep.fce_call(worth(n), n)
        tc, fc = best_of(args.repeat, lambda: sweep.run_fce_call(call, compiled))
        tp, fp = best_of(1, lambda: sweep.run_fce_call(call, python))
        assert fc == fp
        print(f"{'fce':<10} {n:>2} {len(fc):>9} {tc:>11.4f} {tp:>9.3f} {tp / tc:>8.1f}x")

if __name__ == "__main__":
    main()
