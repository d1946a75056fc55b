"""Survey the rank of A(mu) over a grid of (p, q, n) and write one CSV row per triple.

    python scripts/rank_survey.py --max-sum 5 --max-n 14 --out rank_survey.csv
"""
import argparse
import csv
import sys
import time
from dataclasses import dataclass
from math import gcd

from saddleorder.resonance import resonance_data
from saddleorder.witness import WitnessError, build_matrix_A, find_unit, rank_exact


@dataclass
class SurveyConfig:
    max_sum: int = 5
    max_n: int = 14
    seed: int = 0
    max_attempts: int = 200
    out: str = "-"


def triples(cfg):
    for s in range(2, cfg.max_sum + 1):
        for p in range(1, s // 2 + 1):
            q = s - p
            if gcd(p, q) == 1:
                for n in range(p + q + 3, cfg.max_n + 1):
                    yield p, q, n


def survey(cfg):
    for p, q, n in triples(cfg):
        rd = resonance_data(p, q, n)
        t0 = time.perf_counter()
        try:
            ch = find_unit(rd, seed=cfg.seed, max_attempts=cfg.max_attempts)
            rank = rank_exact(build_matrix_A(rd, ch.pencil)).rank
            branch, fb_seed, attempts = ch.pencil.branch, ch.pencil.seed, len(ch.attempts)
        except WitnessError:
            rank, branch, fb_seed, attempts = None, "none", None, cfg.max_attempts
        yield {"p": p, "q": q, "n": n, "d": rd.d, "N1": rd.N1, "rank": rank, "full": rank == n + 1,
               "branch": branch, "fallback_seed": fb_seed, "attempts": attempts,
               "seconds": round(time.perf_counter() - t0, 3)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(SurveyConfig()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    cfg = SurveyConfig(**vars(ap.parse_args(argv)))
    out = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    w = None
    deficient = 0
    for row in survey(cfg):
        if w is None:
            w = csv.DictWriter(out, fieldnames=list(row))
            w.writeheader()
        w.writerow(row)
        out.flush()
        deficient += not row["full"]
    print(f"rank deficient or no unit: {deficient}", file=sys.stderr)
    return 2 if deficient else 0


if __name__ == "__main__":
    raise SystemExit(main())
