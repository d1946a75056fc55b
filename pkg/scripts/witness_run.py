"""Synthesize witnesses for a list of (p, q, n) and write one JSON report per case.

    python scripts/witness_run.py 1,1,6 1,2,9 --jet 1 --out-dir witnesses
"""
import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from saddleorder.witness import WitnessError, synth_theorem1


@dataclass
class WitnessConfig:
    cases: list = field(default_factory=lambda: [(1, 1, 6)])
    jet: int = 1
    eps: str = "1/1000"
    seed: int = 0
    gate: int | None = None
    out_dir: str = "witnesses"


def write_atomic(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_case(cfg, p, q, n):
    t0 = time.perf_counter()
    try:
        rep = synth_theorem1(p, q, n, epsilon=cfg.eps, J=cfg.jet, gate=cfg.gate, seed=cfg.seed)
        body, ok = rep.as_dict(), rep.ok
    except WitnessError as exc:
        body, ok = {"p": p, "q": q, "n": n, "error": str(exc)}, False
    body["wall_time"] = round(time.perf_counter() - t0, 3)
    return body, ok


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("cases", nargs="+", help="triples written p,q,n")
    ap.add_argument("--jet", type=int, default=1)
    ap.add_argument("--eps", default="1/1000")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--gate", type=int)
    ap.add_argument("--out-dir", default="witnesses")
    args = ap.parse_args(argv)
    cases = [tuple(int(v) for v in c.split(",")) for c in args.cases]
    cfg = WitnessConfig(cases, args.jet, args.eps, args.seed, args.gate, args.out_dir)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for p, q, n in cfg.cases:
        body, ok = run_case(cfg, p, q, n)
        write_atomic(out / f"witness_{p}_{q}_{n}.json", json.dumps(body, indent=2, sort_keys=True))
        failed += not ok
        print(f"({p},{q},{n}) order {body.get('claimed_order')} {'ok' if ok else 'FAILED'} "
              f"({body['wall_time']}s)")
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
