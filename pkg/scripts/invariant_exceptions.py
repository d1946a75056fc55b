"""List every (p, q, n) where the p = 1 identity N2 = N1 - d fails, next to the brute-force N2.

    python scripts/invariant_exceptions.py --max-sum 7 --max-n 20
"""
import argparse
from math import gcd

from saddleorder.resonance import resonance_data


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-sum", type=int, default=7)
    ap.add_argument("--max-n", type=int, default=20)
    args = ap.parse_args(argv)
    count = 0
    print("p q n d N1 N2 N1-d max(N1-d,d,2d%N1)")
    for q in range(1, args.max_sum):
        if 1 + q > args.max_sum:
            break
        for n in range(q + 4, args.max_n + 1):
            rd = resonance_data(1, q, n)
            if rd.N2 != rd.N1 - rd.d:
                count += 1
                alt = max(rd.N1 - rd.d, rd.d, 2 * rd.d % rd.N1)
                print(1, q, n, rd.d, rd.N1, rd.N2, rd.N1 - rd.d, alt)
    print(f"{count} exceptions")


if __name__ == "__main__":
    main()
