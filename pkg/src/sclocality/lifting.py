"""Array-based circulant lifting and the terminated coupled parity-check matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sympy import isprime

from .protograph import PartitionMatrix, Protograph, X, split_by_partition

__all__ = [
    "LiftedCode",
    "ab_exponents",
    "ab_lift",
    "build_coupled",
    "extract_local_code",
    "lifted_components",
    "partition_for",
]


@dataclass(frozen=True, eq=False)
class LiftedCode:
    """Sparse parity-check matrix plus the block geometry it was built with.

    ``lcn_rows[i]`` is the half-open row range of the local check rows of
    sub-block ``i``; ``m == 0`` marks a single uncoupled block.
    """

    h: sp.csr_matrix
    p: int
    gamma_c: int
    gamma_l: int
    kappa: int
    l: int = 1
    m: int = 0
    lcn_rows: tuple[tuple[int, int], ...] = ()
    code_id: str = ""

    @property
    def gamma(self) -> int:
        return self.gamma_c + self.gamma_l

    @property
    def subblock_len(self) -> int:
        return self.kappa * self.p

    @property
    def shape(self) -> tuple[int, int]:
        return self.h.shape

    @property
    def design_rate(self) -> float:
        n_checks, n = self.h.shape
        return 1.0 - n_checks / n

    def geometry(self) -> dict:
        return {"p": self.p, "gamma_c": self.gamma_c, "gamma_l": self.gamma_l,
                "kappa": self.kappa, "L": self.l, "m": self.m,
                "rows": self.h.shape[0], "cols": self.h.shape[1],
                "lcn_row_ranges": [list(r) for r in self.lcn_rows]}


def _check_prime(p: int) -> None:
    if not isprime(int(p)):
        raise ValueError(f"circulant size must be prime, got {p}")


def _check_size(shape, p: int) -> None:
    # i*j mod p separates rows and columns only when both indices stay below p
    if p < max(shape):
        raise ValueError(f"circulant size {p} must be at least max(gamma, kappa) = {max(shape)}")


def ab_exponents(shape: tuple[int, int], p: int) -> np.ndarray:
    """Array-based shift map: block (i, j) is the identity shifted by i*j mod p."""
    i, j = np.indices(shape)
    return (i * j) % p


def _lift(mask: np.ndarray, p: int) -> sp.csr_matrix:
    g, k = mask.shape
    shifts = ab_exponents((g, k), p)
    rows, cols = [], []
    base = np.arange(p)
    for i, j in zip(*np.nonzero(mask)):
        rows.append(i * p + base)
        cols.append(j * p + (base + shifts[i, j]) % p)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    h = sp.csr_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(g * p, k * p))
    h.sort_indices()
    return h


def ab_lift(proto, p: int) -> LiftedCode:
    """Replace each protograph 1 by a p x p shifted identity (AB lifting)."""
    _check_prime(p)
    b = np.asarray(getattr(proto, "entries", proto))
    if not np.isin(b, (0, 1)).all():
        raise ValueError("AB lifting expects a binary protograph")
    g, k = b.shape
    _check_size(b.shape, p)
    gamma_c = getattr(proto, "gamma_c", 0)
    h = _lift(b == 1, p)
    lcn = ((gamma_c * p, g * p),) if g > gamma_c else ()
    return LiftedCode(h, p, gamma_c, g - gamma_c, k, l=1, m=0, lcn_rows=lcn)


def lifted_components(b, part, p: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Lifted ``H_0`` and ``H_1``: the AB lifting of ``b`` split by ``part``."""
    _check_prime(p)
    bm = np.asarray(getattr(b, "entries", b))
    pm = np.asarray(getattr(part, "entries", part))
    b0, b1 = split_by_partition(bm, pm)
    _check_size(bm.shape, p)
    return _lift(b0 == 1, p), _lift(b1 == 1, p)


def build_coupled(b, part, p: int, l: int, code_id: str = "") -> LiftedCode:
    """Lift ``b``, split by ``part`` and tile [H_0; H_1] down the diagonal.

    The chain is terminated: ``(l + 1) * gamma * p`` rows and
    ``l * kappa * p`` columns; the last row group holds only H_1 blocks.
    """
    if l < 1:
        raise ValueError("coupling length must be at least 1")
    h0, h1 = lifted_components(b, part, p)
    bm = np.asarray(getattr(b, "entries", b))
    gamma_c = getattr(part, "gamma_c", getattr(b, "gamma_c", 0))
    g, k = bm.shape
    blocks = [[None] * l for _ in range(l + 1)]
    for t in range(l):
        blocks[t][t] = h0
        blocks[t + 1][t] = h1
    # bmat needs every block row/column to be sized
    for t in range(l + 1):
        for u in range(l):
            if blocks[t][u] is None:
                blocks[t][u] = sp.csr_matrix((g * p, k * p), dtype=np.int8)
    h = sp.bmat(blocks, format="csr", dtype=np.int8)
    h.sort_indices()
    lcn = tuple((t * g * p + gamma_c * p, (t + 1) * g * p) for t in range(l)) if g > gamma_c else ()
    return LiftedCode(h, p, gamma_c, g - gamma_c, k, l=l, m=1, lcn_rows=lcn, code_id=code_id)


def extract_local_code(code: LiftedCode, subblock_index: int) -> sp.csr_matrix:
    """Local check rows of one sub-block, restricted to that sub-block's columns."""
    if not 0 <= subblock_index < max(code.l, 1):
        raise IndexError(f"sub-block {subblock_index} outside [0, {code.l})")
    if not code.lcn_rows:
        raise ValueError("code has no local check rows")
    r0, r1 = code.lcn_rows[subblock_index]
    c0 = subblock_index * code.subblock_len
    return code.h[r0:r1, c0 : c0 + code.subblock_len].tocsr()


def partition_for(b: Protograph, p_c, p_l=None) -> PartitionMatrix:
    """Full partition ``[P_C; P_L]``; a missing P_L is taken from ``b``'s local rows."""
    p_c = np.asarray(p_c, dtype=np.int8).reshape(-1, b.cols)
    if p_l is None:
        loc = b.local_rows()
        p_l = np.where(loc == 1, 0, X).astype(np.int8)
    return PartitionMatrix.stack(p_c, p_l)
