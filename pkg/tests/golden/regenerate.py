"""Rebuild oracle.jsonl from the brute-force oracles (not the DP solver).

Run from the repository root:  python3 tests/golden/regenerate.py
"""

from pathlib import Path

import numpy as np

from ladflsa.oracle import (brute_force_lad_flsa, brute_force_ls_flsa, golden_record,
                            write_golden)

FIXED = [
    ("lad", (1.0, 1.0, -1.0), 0.1, 0.3),
    ("lad", (0.0, 0.0, 5.0, 5.0), 0.1, 0.3),
    ("ls", (0.0, 0.0, 5.0, 5.0), 0.1, 0.3),
    ("lad", (1.0, 1.0, -1.0, -1.0), 0.0, 0.4),
    ("lad", (5.0,), 2.0, 0.0),
    ("lad", (1.0, 1.0), 0.0, 10.0),
    ("ls", (2.0, 2.0, 2.0), 0.0, 5.0),
]


def main():
    rng = np.random.default_rng(20240611)
    records = []
    for loss, y, l1, l2 in FIXED:
        oracle = brute_force_lad_flsa if loss == "lad" else brute_force_ls_flsa
        records.append(golden_record(y, oracle(y, (l1, l2))))
    for _ in range(40):
        n = int(rng.integers(2, 9))
        y = np.round(rng.normal(0, 2, n), 2)
        l1 = float(rng.choice([0.0, 0.05, 0.3, 0.8]))
        l2 = float(rng.choice([0.0, 0.2, 0.7, 2.5]))
        for oracle in (brute_force_lad_flsa, brute_force_ls_flsa):
            records.append(golden_record(y, oracle(y, (l1, l2))))
    write_golden(Path(__file__).with_name("oracle.jsonl"), records)


if __name__ == "__main__":
    main()
