"""Label mix of the pair sampler against uniform pair draws.

For each table, draws k pairs with sample_pairs and reports the pooled share
of (same-row, same-col) label combinations next to their share among all pairs.

    python3 scripts/sampler_balance.py --tables 100 --k 400
"""

import argparse
from collections import Counter
from dataclasses import dataclass

import numpy as np

from tsrkit.structure import sample_pairs, spans_to_adjacency
from tsrkit.synth import generate


@dataclass
class BalanceConfig:
    tables: int = 100
    rows: int = 8
    cols: int = 6
    merge_prob: float = 0.2
    k: int = 400


def run(cfg: BalanceConfig):
    drawn, population = Counter(), Counter()
    for seed in range(cfg.tables):
        adj = spans_to_adjacency(generate(seed, cfg.rows, cfg.cols, cfg.merge_prob))
        iu = np.triu_indices(adj.n, 1)
        population.update(zip(adj.row[iu].tolist(), adj.col[iu].tolist()))
        drawn.update((r, c) for _, _, r, c in sample_pairs(adj, cfg.k, seed))
    return drawn, population


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tables", type=int, default=BalanceConfig.tables)
    ap.add_argument("--k", type=int, default=BalanceConfig.k)
    a = ap.parse_args()
    drawn, pop = run(BalanceConfig(tables=a.tables, k=a.k))
    nd, npop = sum(drawn.values()), sum(pop.values())
    print("row\tcol\tsampled\tall_pairs")
    for key in [(1, 1), (1, 0), (0, 1), (0, 0)]:
        print(f"{key[0]}\t{key[1]}\t{drawn[key] / nd:.3f}\t{pop[key] / npop:.3f}")


if __name__ == "__main__":
    main()
