"""Check every corpus file, evaluate each definition and print its value.

Stream-valued definitions are observed a few times instead of printed.

    python scripts/run_corpus.py [--take K] [--fuel N]
"""

import argparse
import time

from tores.frontend.driver import corpus_files, load_file, observe, run_definition
from tores.errors import EvalError
from tores.frontend.printer import print_value
from tores.machine import CorecThunk, deep_call


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--take", type=int, default=6)
    ap.add_argument("--fuel", type=int, default=10**6)
    args = ap.parse_args()
    status = 0
    for path in corpus_files():
        start = time.perf_counter()
        mod = load_file(path)
        print(f"== {path.name}: {'ok' if mod.ok else 'FAILED'} ({time.perf_counter() - start:.3f}s)")
        for d in mod.diagnostics:
            print("  " + d.render())
            status = 1
        for name in mod.defs:
            def go(name=name):
                value, machine = run_definition(mod, name, args.fuel)
                heads = None
                if isinstance(value, CorecThunk):
                    try:
                        heads = observe(value, args.take, machine)
                    except EvalError:
                        pass  # observations are not <head, rest> pairs
                return value, heads, machine.steps

            try:
                value, heads, steps = deep_call(go)
            except Exception as err:  # report and keep going
                print(f"  {name}: {type(err).__name__}: {err}")
                status = 1
                continue
            shown = ", ".join(map(print_value, heads)) if heads else print_value(value)
            print(f"  {name} [{steps} steps] = {shown}")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
