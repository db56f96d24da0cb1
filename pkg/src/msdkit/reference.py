"""Published reference values the toolkit reproduces, with their tolerances.

Used by the `tables` subcommand and the acceptance tests.  Values the
artifact's own enumeration contradicts are still listed as published; the
comparison machinery reports the mismatch rather than adjusting the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

__all__ = [
    "GRID_ORDER_ROWS",
    "INNER_CODE_ROWS",
    "PROTOCOL_ROWS",
    "CHAIN_ROWS",
    "TOLERANCES",
    "Cell",
    "check_cell",
]

# order of error reduction for the D-dimensional simple grid:
# (inner distances, expected order)
GRID_ORDER_ROWS: Tuple[Tuple[Tuple[int, ...], int], ...] = (
    ((2,), 2),
    ((2, 4), 4),
    ((3, 5, 7), 7),
    ((3, 5, 6), 6),   # third-round distance below 2j+1 drops the order
)

# (name, n, k, d, c_log(d))
INNER_CODE_ROWS: Tuple[Tuple[str, int, int, int, int], ...] = (
    ("31-21-3", 31, 21, 3, 155),
    ("31-11-5", 31, 11, 5, 186),
    ("63-45-4", 63, 45, 4, 1260),
    ("63-39-5", 63, 39, 5, 1890),
    ("63-27-7", 63, 27, 7, 3411),
)

# spec file stem -> (n_out, n_out_bar, eps_out_bar, n_T_bar / n_out_bar)
PROTOCOL_ROWS: Dict[str, Tuple[int, float, float, float]] = {
    "mek-63-45-4":              (45,   4.0e1, 2.9e-9,  8.9),
    "grid-31-11-5":             (121,  9.6e1, 3.2e-11, 16.0),
    "grid-31-21-3-pipe":        (231,  1.6e2, 7.5e-11, 14.0),
    "mek-grid-31-11-5":         (121,  1.1e2, 2.8e-13, 19.0),
    "mek-grid-31-11-5-mek":     (121,  1.2e2, 8.9e-19, 40.0),
    "mekx-grid-63-39-5":        (1521, 1.5e3, 2.4e-18, 37.0),
    "mek-grid-63-39-5-mek":     (1521, 1.1e3, 7.6e-18, 28.0),
    "mek-grid-63-27-7-restart": (729,  3.9e2, 1.9e-17, 37.0),
    "mekx-grid-63-27-7":        (729,  7.2e2, 8.2e-30, 75.0),
}

# chain name -> (n_out, marginal error, T per output, space)
CHAIN_ROWS: Dict[str, Tuple[int, float, float, float]] = {
    "6-22-54":     (7128,    1.0e-13, 47.0,  3.3e5),
    "15-5":        (2,       1.1e-14, 76.0,  1.5e2),
    "5-34-46":     (3128,    9.8e-15, 52.0,  1.6e5),
    "5-5-54":      (216,     8.7e-17, 80.0,  1.7e4),
    "5-5-5":       (8,       4.8e-18, 126.0, 1.0e3),
    "22-46-54-54": (2950992, 8.1e-19, 115.0, 3.1e8),
    "15-15":       (1,       1.5e-21, 228.0, 2.3e2),
}

#: the caption's worked space product for 6-22-54, matched exactly
CHAIN_SPACE_EXACT: Dict[str, int] = {"6-22-54": 26 * 74 * 170}

TOLERANCES: Dict[str, float] = {
    "eps_out_bar": 0.25,     # relative
    "n_out_bar": 0.10,
    "t_ratio": 0.15,
    "marginal_factor": 1.05,  # multiplicative, either direction
    "marginal_factor_outlier": 1.30,
    "t_per_output": 0.05,
}

#: the one chain whose leading-order fold is known to sit beyond 1.05x
CHAIN_MARGINAL_OUTLIERS = ("22-46-54-54",)


@dataclass(frozen=True)
class Cell:
    table: str
    row: str
    column: str
    computed: float
    expected: float
    tolerance: str
    passed: bool


def check_cell(table: str, row: str, column: str, computed: float, expected: float,
               kind: str, tolerances: Optional[Dict[str, float]] = None) -> Cell:
    tol = dict(TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    if kind == "exact":
        passed = computed == expected
    elif kind in ("eps_out_bar", "n_out_bar", "t_ratio", "t_per_output"):
        passed = abs(computed - expected) <= tol[kind] * abs(expected)
    elif kind in ("marginal_factor", "marginal_factor_outlier"):
        factor = tol[kind]
        ratio = computed / expected
        passed = 1.0 / factor <= ratio <= factor
    else:
        raise ValueError(f"unknown tolerance kind {kind!r}")
    return Cell(table, row, column, computed, expected, kind, passed)
