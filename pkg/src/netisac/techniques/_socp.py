"""Helpers for expressing complex beamforming problems as real SOCPs.

Complex decision vectors are stacked as [Re; Im] blocks inside one real
decision vector; rows for inner products and matrix products follow the
receive-scalar convention h^H z.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np

from ..solvers import SecondOrderCone


class Layout:
    """Index bookkeeping for a mixed real/complex decision vector."""

    def __init__(self):
        self.n = 0
        self._complex: Dict[str, Tuple[int, int]] = {}  # name -> (start, dim)
        self._real: Dict[str, Tuple[int, int]] = {}

    # -- declaration ------------------------------------------------------
    def add_complex(self, name: str, dim: int) -> str:
        if name in self._complex or name in self._real:
            raise ValueError(f"duplicate variable {name}")
        self._complex[name] = (self.n, dim)
        self.n += 2 * dim
        return name

    def add_real(self, name: str, dim: int = 1) -> str:
        if name in self._complex or name in self._real:
            raise ValueError(f"duplicate variable {name}")
        self._real[name] = (self.n, dim)
        self.n += dim
        return name

    def has(self, name: str) -> bool:
        return name in self._complex or name in self._real

    # -- rows ---------------------------------------------------------------
    def _cx(self, name: str) -> Tuple[int, int]:
        return self._complex[name]

    def row_inner_re(self, name: str, h: np.ndarray) -> np.ndarray:
        """Row r with r @ x = Re(h^H z_name)."""
        start, dim = self._cx(name)
        r = np.zeros(self.n)
        r[start : start + dim] = h.real
        r[start + dim : start + 2 * dim] = h.imag
        return r

    def row_inner_im(self, name: str, h: np.ndarray) -> np.ndarray:
        """Row r with r @ x = Im(h^H z_name)."""
        start, dim = self._cx(name)
        r = np.zeros(self.n)
        r[start : start + dim] = -h.imag
        r[start + dim : start + 2 * dim] = h.real
        return r

    def rows_inner(self, name: str, h: np.ndarray) -> np.ndarray:
        """Two rows [Re; Im] of h^H z_name, for magnitude stacking."""
        return np.vstack([self.row_inner_re(name, h), self.row_inner_im(name, h)])

    def rows_matrix(self, name: str, g: np.ndarray) -> np.ndarray:
        """2m rows [Re(G z); Im(G z)] for a complex m x dim matrix G."""
        start, dim = self._cx(name)
        if g.shape[1] != dim:
            raise ValueError("matrix width does not match variable dimension")
        m = g.shape[0]
        rows = np.zeros((2 * m, self.n))
        rows[:m, start : start + dim] = g.real
        rows[:m, start + dim : start + 2 * dim] = -g.imag
        rows[m:, start : start + dim] = g.imag
        rows[m:, start + dim : start + 2 * dim] = g.real
        return rows

    def rows_identity(self, name: str) -> np.ndarray:
        """Rows selecting every real component of z_name (for ||z||)."""
        start, dim = self._cx(name)
        rows = np.zeros((2 * dim, self.n))
        rows[:, start : start + 2 * dim] = np.eye(2 * dim)
        return rows

    def row_real(self, name: str, idx: int = 0, coeff: float = 1.0) -> np.ndarray:
        start, dim = self._real[name]
        if not 0 <= idx < dim:
            raise IndexError(name)
        r = np.zeros(self.n)
        r[start + idx] = coeff
        return r

    def real_index(self, name: str, idx: int = 0) -> int:
        start, dim = self._real[name]
        if not 0 <= idx < dim:
            raise IndexError(name)
        return start + idx

    # -- values -------------------------------------------------------------
    def complex_value(self, x: np.ndarray, name: str) -> np.ndarray:
        start, dim = self._cx(name)
        return x[start : start + dim] + 1j * x[start + dim : start + 2 * dim]

    def real_value(self, x: np.ndarray, name: str) -> np.ndarray:
        start, dim = self._real[name]
        return x[start : start + dim]

    def set_complex(self, x: np.ndarray, name: str, value: np.ndarray) -> None:
        start, dim = self._cx(name)
        x[start : start + dim] = np.asarray(value).real
        x[start + dim : start + 2 * dim] = np.asarray(value).imag

    def set_real(self, x: np.ndarray, name: str, value) -> None:
        start, dim = self._real[name]
        x[start : start + dim] = value


def soc_norm_le_affine(
    rows: np.ndarray,
    offsets: np.ndarray,
    affine_row: np.ndarray,
    affine_const: float = 0.0,
) -> SecondOrderCone:
    """||rows @ x + offsets|| <= affine_row @ x + affine_const."""
    return SecondOrderCone(A=rows, b=np.asarray(offsets, dtype=float), c=affine_row, d=affine_const)


def soc_sumsq_le_affine(
    rows: np.ndarray,
    offsets: np.ndarray,
    affine_row: np.ndarray,
    affine_const: float = 0.0,
) -> SecondOrderCone:
    """sum((rows @ x + offsets)^2) <= affine_row @ x + affine_const.

    Rotated-cone identity: ||[2r; a-1]|| <= a+1  <=>  ||r||^2 <= a.
    """
    a_mat = np.vstack([2.0 * rows, affine_row])
    b_vec = np.concatenate([2.0 * np.asarray(offsets, dtype=float), [affine_const - 1.0]])
    return SecondOrderCone(A=a_mat, b=b_vec, c=affine_row.copy(), d=affine_const + 1.0)
