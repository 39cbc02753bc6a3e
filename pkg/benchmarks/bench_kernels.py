"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 4096]

Kernel timings run in this process against both modules directly. The
end-to-end inference timing runs once per backend in a child process,
with COHNET_PURE_PYTHON selecting the fallback.
"""
import argparse
import json
import os
import random
import subprocess
import sys
import timeit

from cohnet import kernels

END_TO_END = """
import json, random, time
from cohnet import kernels, nn
from cohnet.minifloat import FloatFormat
arch = nn.Architecture.parse({arch!r}, FloatFormat.parse({fmt!r}))
params = nn.ParamAssignment.random(arch, random.Random(0))
G, iota = nn.architecture_theory(arch)
M = nn.build_model(G, arch, params)
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    nn.infer(G, iota, M)
    best = min(best, time.perf_counter() - t0)
print(json.dumps({{"backend": kernels.BACKEND, "seconds": best}}))
"""


def kernel_cases(size: int, rng: random.Random):
    f = tuple(rng.randrange(size) for _ in range(size))
    g = tuple(rng.randrange(size) for _ in range(size))
    a = tuple(sorted(rng.sample(range(size), size // 2)))
    b = tuple(sorted(rng.sample(range(size), size // 2)))
    side = int(size ** 0.5)
    sizes = (side, side)
    return {
        "compose": lambda k: k.compose(f, g),
        "pair_tables": lambda k: k.pair_tables((f, g), sizes, size),
        "projection": lambda k: k.projection(sizes, 1),
        "equalizer": lambda k: k.equalizer(f, g),
        "pullback": lambda k: k.pullback(f[:side], g[:side]),
        "image": lambda k: k.image(f, size),
        "preimage": lambda k: k.preimage(f, a, size),
        "meet": lambda k: k.meet(a, b),
        "join": lambda k: k.join(a, b),
    }


def time_call(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def end_to_end(pure: bool, arch: str, fmt: str, repeat: int) -> dict:
    env = dict(os.environ, COHNET_PURE_PYTHON="1" if pure else "0")
    code = END_TO_END.format(arch=arch, fmt=fmt, repeat=repeat)
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                         capture_output=True, text=True).stdout
    return json.loads(out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=4096)
    ap.add_argument("--arch", default="2-relu-3-id-1")
    ap.add_argument("--float", dest="fmt", default="s1e3m2")
    args = ap.parse_args(argv)

    if kernels.compiled is None:
        print("compiled backend not built; only the fallback is timed")
    backends = [("python", kernels.pure)]
    if kernels.compiled is not None:
        backends.append(("cython", kernels.compiled))

    cases = kernel_cases(args.size, random.Random(0))
    print(f"{'kernel':<14}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        times = [time_call(lambda: fn(mod), args.repeat) for _, mod in backends]
        row = f"{name:<14}" + "".join(f"{t * 1e6:>11.1f} us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    print(f"\nend-to-end inference, {args.arch} over {args.fmt}")
    results = [end_to_end(True, args.arch, args.fmt, args.repeat)]
    if kernels.compiled is not None:
        results.append(end_to_end(False, args.arch, args.fmt, args.repeat))
    for r in results:
        print(f"  {r['backend']:<8}{r['seconds'] * 1e3:>10.1f} ms")
    if len(results) == 2:
        print(f"  speedup {results[0]['seconds'] / results[1]['seconds']:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
