"""Run both engines and the exhaustive model oracle over a list of formulas, one per line.

    python3 scripts/sat_suite.py formulas.txt --timeout 10
    python3 scripts/sat_suite.py --builtin
"""
import argparse
import time

from bapal.decide import Budget, bounded_model_search, satisfiable
from bapal.syntax import parse, quantifier_depth

BUILTIN = [
    "p & ~p",
    "p & ~K a p",
    "K a p & ~p",
    "K a p & Khat b ~p",
    "K a (p | q) & Khat a (~p & ~q)",
    "[p] ~K a p",
    "[true] box p & p",
    "box p & ~p",
]


def run(text, timeout, oracle):
    f = parse(text)
    row = {"formula": text}
    for engine in ("pruned", "faithful"):
        start = time.monotonic()
        row[engine] = satisfiable(f, Budget(timeout=timeout), engine=engine).outcome
        row[engine + "_s"] = time.monotonic() - start
    if oracle and quantifier_depth(f) == 0:
        row["oracle"] = "sat" if bounded_model_search(f) else "unsat"
    else:
        row["oracle"] = "-"
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path", nargs="?")
    ap.add_argument("--builtin", action="store_true")
    ap.add_argument("--timeout", type=float, default=10.0)
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()
    if args.builtin or not args.path:
        lines = BUILTIN
    else:
        with open(args.path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]

    print(f"{'formula':40} {'pruned':>27} {'faithful':>27} {'oracle':>7}")
    for text in lines:
        r = run(text, args.timeout, not args.no_oracle)
        print(f"{text:40} {r['pruned']:>18} {r['pruned_s']:6.2f}s "
              f"{r['faithful']:>18} {r['faithful_s']:6.2f}s {r['oracle']:>7}")


if __name__ == "__main__":
    main()
