"""Run the acceptance criteria and print one PASS/FAIL line each.

    python scripts/run_acceptance.py            # all eleven
    python scripts/run_acceptance.py 6 7 10     # a subset
"""
import argparse
import json
import sys

from saddleorder.acceptance import run_all


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("only", type=int, nargs="*")
    ap.add_argument("--json", help="also write the results to this file")
    args = ap.parse_args(argv)
    results = run_all(set(args.only) or None, echo=print)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([{"number": r.number, "title": r.title, "ok": r.ok, "detail": r.detail,
                        "seconds": round(r.seconds, 3)} for r in results], fh, indent=2)
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
