"""Search every two-agent S5 model over x, y up to a size bound for a model of the fmp formula.

    python3 scripts/fmp_search.py --max-worlds 4
"""
import argparse
import json
import time

from bapal import fmp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-worlds", type=int, default=4)
    ap.add_argument("--truncation", type=int, default=3, help="copies in the truncated chain model")
    args = ap.parse_args()

    start = time.monotonic()
    report = fmp.finite_search(args.max_worlds)
    out = report.to_json()
    out["seconds"] = round(time.monotonic() - start, 2)
    out["fig1_failing_conjuncts"] = fmp.failing_conjuncts(fmp.fig1_model(), "A")
    out["fig1_literal_failing_conjuncts"] = fmp.failing_conjuncts(fmp.fig1_model(literal=True), "A")
    out["truncation_failing_conjuncts"] = fmp.failing_conjuncts(fmp.fig2_truncation(args.truncation), "A0")
    print(json.dumps(out, indent=2, sort_keys=True, default=str))


if __name__ == "__main__":
    main()
