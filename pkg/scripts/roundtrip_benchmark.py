"""Time spans -> adjacency -> spans over a batch of synthetic tables and count mismatches.

    python3 scripts/roundtrip_benchmark.py --tables 1000 --max-dim 10
"""

import argparse
import time
from dataclasses import dataclass

from tsrkit.rng import SplitMix64
from tsrkit.structure import adjacency_to_spans, compact_spans, spans_to_adjacency
from tsrkit.synth import generate


@dataclass
class BenchConfig:
    tables: int = 1000
    max_dim: int = 10
    max_merge: float = 0.3
    jitter: float = 3.0


def run(cfg: BenchConfig) -> tuple[int, float, int]:
    bad, cells = 0, 0
    start = time.perf_counter()
    for seed in range(cfg.tables):
        r = SplitMix64(seed)
        t = generate(seed, 1 + r.below(cfg.max_dim), 1 + r.below(cfg.max_dim),
                     cfg.max_merge * r.uniform(), 0.2, cfg.jitter)
        cells += len(t)
        back = adjacency_to_spans(t.without_spans().cells, spans_to_adjacency(t))
        bad += [c.spans for c in back] != compact_spans([c.spans for c in t])
    return bad, time.perf_counter() - start, cells


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tables", type=int, default=BenchConfig.tables)
    ap.add_argument("--max-dim", type=int, default=BenchConfig.max_dim)
    a = ap.parse_args()
    bad, secs, cells = run(BenchConfig(tables=a.tables, max_dim=a.max_dim))
    print(f"tables={a.tables} cells={cells} mismatches={bad} seconds={secs:.2f}")


if __name__ == "__main__":
    main()
