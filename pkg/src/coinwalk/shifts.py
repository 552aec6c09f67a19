"""Coin-conditioned lattice translations.

Shifts are cyclic index permutations of amplitude sub-slices, never matrices.
"""

from __future__ import annotations

import enum

import numpy as np

from .backend import kernels


class ShiftKind(enum.Enum):
    FULL = "full"                      # up -> x+a, down -> x-a
    HALF_PLUS = "half_plus"            # up -> x+a, down stays
    HALF_MINUS = "half_minus"          # up stays, down -> x-a
    SECTORED_PLUS = "sectored_plus"    # odd zeta components move +a
    SECTORED_MINUS = "sectored_minus"  # even zeta components move -a
    TWO_PLUS = "two_plus"
    TWO_MINUS = "two_minus"


_FULLLIKE = "two_level"
_FAMILY = {
    ShiftKind.FULL: _FULLLIKE,
    ShiftKind.HALF_PLUS: _FULLLIKE,
    ShiftKind.HALF_MINUS: _FULLLIKE,
    ShiftKind.SECTORED_PLUS: "sector",
    ShiftKind.SECTORED_MINUS: "sector",
    ShiftKind.TWO_PLUS: "two",
    ShiftKind.TWO_MINUS: "two",
}

# per coin row: lattice displacement in units of a
_ROW_SHIFTS = {
    ShiftKind.FULL: (1, -1),
    ShiftKind.HALF_PLUS: (1, 0),
    ShiftKind.HALF_MINUS: (0, -1),
    ShiftKind.SECTORED_PLUS: (1, 0, 1, 0, 1, 0),
    ShiftKind.SECTORED_MINUS: (0, -1, 0, -1, 0, -1),
}

# per two-particle coin row (uu, ud, du, dd): displacement of (x1, x2)
_TWO_ROW_SHIFTS = {
    ShiftKind.TWO_PLUS: ((1, 1), (1, 0), (0, 1), (0, 0)),
    ShiftKind.TWO_MINUS: ((0, 0), (0, -1), (-1, 0), (-1, -1)),
}


def apply_shift(kind: ShiftKind, grid: np.ndarray, inverse: bool = False) -> None:
    """Permute amplitudes of a (d, N) or (d, N, N) grid in place."""
    sign = -1 if inverse else 1
    if kind in _ROW_SHIFTS:
        for row, s in enumerate(_ROW_SHIFTS[kind]):
            kernels.roll(grid[row], sign * s)
    else:
        for row, (s1, s2) in enumerate(_TWO_ROW_SHIFTS[kind]):
            kernels.roll2d(grid[row], sign * s1, 0)
            kernels.roll2d(grid[row], sign * s2, 1)


class StepOperator:
    """A shift as an applicable operator bound to a coin dimension and lattice."""

    def __init__(self, kind: ShiftKind, coin_dim: int, lattice):
        expected = 6 if _FAMILY[kind] == "sector" else (4 if _FAMILY[kind] == "two" else 2)
        if coin_dim != expected:
            raise ValueError(
                f"shift {kind.value} needs coin dimension {expected}, got {coin_dim}")
        self.kind = kind
        self.coin_dim = coin_dim
        self.lattice = lattice

    def apply(self, state) -> None:
        apply_shift(self.kind, state.grid)

    def apply_inverse(self, state) -> None:
        apply_shift(self.kind, state.grid, inverse=True)


def shift(kind: ShiftKind, coin_dim: int, lattice) -> StepOperator:
    return StepOperator(kind, coin_dim, lattice)
