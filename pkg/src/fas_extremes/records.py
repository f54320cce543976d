"""Fixture records: committed Monte Carlo oracle outputs for regression.

A fixture row freezes one oracle run: a hash of the generating
configuration, the seed/worker/trial triple, and the estimate with its
standard error. Re-running the suite recomputes the estimate and
compares bit-for-bit against the stored value, which catches any change
to the sampler, the RNG streaming, or the linear algebra path.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

__all__ = ["FixtureRow", "config_hash", "write_fixtures", "read_fixtures"]

_FIELDS = ["label", "config_hash", "seed", "workers", "trials", "estimate", "std_err"]


@dataclass(frozen=True)
class FixtureRow:
    label: str
    config_hash: str
    seed: int
    workers: int
    trials: int
    estimate: float
    std_err: float


def config_hash(**kwargs) -> str:
    """Stable short hash of a keyword configuration.

    Keys are sorted and values rendered with repr, so any difference in
    model, geometry, threshold, or engine parameters changes the hash.
    """
    canon = ";".join(f"{k}={kwargs[k]!r}" for k in sorted(kwargs))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def write_fixtures(path: str, rows: list[FixtureRow]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(_FIELDS)
        for r in rows:
            writer.writerow(
                [
                    r.label,
                    r.config_hash,
                    r.seed,
                    r.workers,
                    r.trials,
                    f"{r.estimate:.17g}",
                    f"{r.std_err:.17g}",
                ]
            )


def read_fixtures(path: str) -> dict[str, FixtureRow]:
    out: dict[str, FixtureRow] = {}
    with open(path, newline="", encoding="ascii") as fh:
        for rec in csv.DictReader(fh):
            row = FixtureRow(
                label=rec["label"],
                config_hash=rec["config_hash"],
                seed=int(rec["seed"]),
                workers=int(rec["workers"]),
                trials=int(rec["trials"]),
                estimate=float(rec["estimate"]),
                std_err=float(rec["std_err"]),
            )
            if row.label in out:
                raise ValueError(f"duplicate fixture label {row.label!r} in {path}")
            out[row.label] = row
    return out
