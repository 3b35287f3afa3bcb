"""Subject-reduction sweep over generated programs.

Each program is generated against a random type, checked, evaluated under a
random grounding of its index context, value-checked at the grounded type and
compared with the naive reference evaluator.

    python scripts/sr_sweep.py [--count N] [--seed S] [--depth D]
"""

import argparse
import collections
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from gen import generate  # noqa: E402
from oracle import Oracle, OutOfSteps, data, machine_data  # noqa: E402
from tores.errors import FuelExhausted  # noqa: E402
from tores.frontend.printer import print_term, print_type  # noqa: E402
from tores.index import NAT, numeral  # noqa: E402
from tores.machine import Machine, deep_call, value_check  # noqa: E402
from tores.syntax import TERM_CLASSES, type_apply_isubst  # noqa: E402
from tores.typecheck import check  # noqa: E402

DELTAS = ((), (("u", NAT),), (("u", NAT), ("v", NAT)))


def forms(t, counter):
    counter[type(t).__name__] += 1
    for name in t.__dataclass_fields__:
        value = getattr(t, name)
        if name not in ("ann", "type", "span") and isinstance(value, TERM_CLASSES):
            forms(value, counter)


def sweep(count, seed, depth):
    rng = random.Random(seed)
    stats = collections.Counter()
    coverage = collections.Counter()
    for i in range(count):
        delta = rng.choice(DELTAS)
        t, ty = generate(rng, delta, depth)
        theta = tuple((u, numeral(rng.randint(0, 3))) for u, _ in delta)
        t = check(delta, (), (), t, ty)
        forms(t, coverage)
        try:
            v = Machine(10**6).eval(t, theta, ())
        except FuelExhausted:
            stats["out of fuel"] += 1
            continue
        if not value_check(v, type_apply_isubst(ty, theta)):
            stats["value_check failures"] += 1
            print(f"FAIL #{i}: {print_term(t)}\n  : {print_type(ty)}")
        try:
            w = Oracle(10**6).run(t, dict(theta))
            stats["oracle agrees" if data(w) == machine_data(v) else "oracle disagrees"] += 1
        except OutOfSteps:
            stats["oracle out of steps"] += 1
        stats["evaluated"] += 1
    return stats, coverage


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args()
    start = time.perf_counter()
    stats, coverage = deep_call(lambda: sweep(args.count, args.seed, args.depth))
    print(f"{args.count} programs in {time.perf_counter() - start:.1f}s")
    for key, value in sorted(stats.items()):
        print(f"  {key}: {value}")
    print("term forms:", ", ".join(f"{k} {v}" for k, v in coverage.most_common()))
    return 1 if stats["value_check failures"] or stats["oracle disagrees"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
