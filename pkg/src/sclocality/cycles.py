"""Short-cycle counts for protographs, coupled protographs and lifted graphs.

Two independent routes are provided:

* closed forms in the overlap parameters (``a_function`` and friends),
  valid for cycles of length 6;
* ``enumerate_cycles``, an exact enumerator for lengths 4, 6 and 8 that
  works on any binary matrix and serves as the oracle for the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from . import _cycle_kernel
from .protograph import couple_protograph

SCOPES = ("local-protograph", "coupled-protograph", "lifted-local", "lifted-coupled")

__all__ = [
    "SCOPES",
    "CycleCount",
    "CoupledCycleDecomposition",
    "a_function",
    "count_cycles6_closed_gamma3",
    "count_cycles6_closed_gamma4",
    "count_cycles6_triples",
    "cycles6_balanced_formula",
    "cycles6_unbalanced_formula",
    "enumerate_cycles",
    "count_coupled_cycles",
    "closed_form_cycles6",
]


@dataclass(frozen=True)
class CycleCount:
    length: int
    scope: str
    count: int

    def __post_init__(self):
        if self.length not in (4, 6, 8):
            raise ValueError(f"unsupported cycle length {self.length}")
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")
        if self.count < 0:
            raise ValueError("cycle count must be nonnegative")


@dataclass(frozen=True)
class CoupledCycleDecomposition:
    """Cycles of a terminated m=1 chain split by how many replicas they span.

    ``f3`` is only nonzero for length 8: an 8-cycle can visit three
    consecutive column groups, shorter cycles at most two.
    """

    f1: int
    f2: int
    l: int
    f3: int = 0
    length: int = 6

    @property
    def total(self) -> int:
        return self.l * self.f1 + (self.l - 1) * self.f2 + max(self.l - 2, 0) * self.f3

    def as_dict(self) -> dict:
        return {"length": self.length, "f1": self.f1, "f2": self.f2, "f3": self.f3,
                "l": self.l, "count": self.total}


def _pos(x: int) -> int:
    return x if x > 0 else 0


def a_function(t123: int, t12: int, t13: int, t23: int) -> int:
    """Number of 6-cycles through three fixed check rows, from their overlaps."""
    vals = (t123, t12, t13, t23)
    if any(v < 0 for v in vals):
        raise ValueError("overlap parameters must be nonnegative")
    if t123 > min(t12, t13, t23):
        raise ValueError("the triple overlap cannot exceed a pair overlap")
    return (
        t123 * _pos(t123 - 1) * _pos(t23 - 2)
        + t123 * (t13 - t123) * _pos(t23 - 1)
        + (t12 - t123) * t123 * _pos(t23 - 1)
        + (t12 - t123) * (t13 - t123) * t23
    )


def _entries(proto) -> np.ndarray:
    return np.asarray(getattr(proto, "entries", proto))


def _triple_sum(b: np.ndarray, triples) -> int:
    m = np.asarray(b, dtype=np.int64)
    pair = m @ m.T
    total = 0
    for i, j, k in triples:
        t123 = int((m[i] * m[j] * m[k]).sum())
        total += a_function(t123, int(pair[i, j]), int(pair[i, k]), int(pair[j, k]))
    return total


def count_cycles6_closed_gamma3(proto) -> int:
    b = _entries(proto)
    if b.shape[0] != 3:
        raise ValueError(f"expected 3 rows, got {b.shape[0]}")
    return _triple_sum(b, [(0, 1, 2)])


def count_cycles6_closed_gamma4(proto) -> int:
    b = _entries(proto)
    if b.shape[0] != 4:
        raise ValueError(f"expected 4 rows, got {b.shape[0]}")
    return _triple_sum(b, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def count_cycles6_triples(matrix) -> int:
    """6-cycles of any binary matrix, summed over all check-row triples.

    For distinct rows i, j, k the cycles through them are the choices of
    three distinct columns, one per row pair; inclusion-exclusion on
    coinciding columns gives
    ``t_ij t_ik t_jk - t_ijk (t_ij + t_ik + t_jk) + 2 t_ijk``.
    Dense numpy, so keep it to protograph-sized inputs.
    """
    m = _entries(matrix)
    if sp.issparse(m):
        m = m.toarray()
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if n < 3:
        return 0
    pair = m @ m.T
    triple = np.einsum("ic,jc,kc->ijk", m, m, m, optimize=True)
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    mask = (i < j) & (j < k)
    tij = pair[i, j][mask]
    tik = pair[i, k][mask]
    tjk = pair[j, k][mask]
    tijk = triple[mask]
    return int((tij * tik * tjk - tijk * (tij + tik + tjk) + 2 * tijk).sum())


def cycles6_balanced_formula(gamma_l: int, kappa: int, nu: int, as_printed: bool = False) -> int:
    """Closed-form 6-cycle count of the balanced local protograph.

    Available for gamma_l = 3 (any nu) and gamma_l = 4 with nu divisible by 4.

    For gamma_l = 3 this is A(t_012, t_01, t_02, t_12) with
    t_012 = kappa - nu, t_01 = kappa - 2a - b, t_02 = kappa - 2a - (b > 0)
    and t_12 = kappa - 2a - (b > 1).  The last term is
    ``(t_01 - t_012)(t_02 - t_012) t_12 = a (a + b - (b > 0)) t_12``.
    ``as_printed=True`` uses the alternative term ``a (kappa - nu) t_12``,
    kept for comparison; it agrees with enumeration only when ``kappa - nu`` equals
    ``a + b - (b > 0)`` (for example kappa = 13, nu = 10) or ``a == 0``.
    """
    a, b = divmod(nu, gamma_l)
    k = kappa
    if gamma_l == 3:
        g = int(b > 1)
        w = k - nu
        last = w if as_printed else a + b - int(b > 0)
        return (w * _pos(w - 1) * _pos(k - 2 * a - g - 2)
                + w * (a + g) * (k - 2 * a - g - 1)
                + a * w * (k - 2 * a - g - 1)
                + a * last * (k - 2 * a - g))
    if gamma_l == 4:
        if b:
            raise ValueError("the gamma_l = 4 balanced formula needs nu divisible by 4")
        t3 = k - 3 * a
        t2 = k - 2 * a
        return (4 * t3 * (t3 - 1) * (t2 - 2)
                + 4 * t3 * a * (t2 - 1)
                + 4 * a * t3 * (t2 - 1)
                + 4 * a * a * t2)
    raise ValueError("closed forms exist for gamma_l in {3, 4} only")


def cycles6_unbalanced_formula(gamma_l: int, kappa: int, nu: int) -> int:
    k = kappa
    if gamma_l == 3:
        return (k - nu) * (k - nu - 1) * (k - 2)
    if gamma_l == 4:
        return 3 * (k - nu) * (k - nu - 1) * (k - 2) + k * (k - 1) * (k - 2)
    raise ValueError("closed forms exist for gamma_l in {3, 4} only")


def _csr_arrays(graph):
    if hasattr(graph, "h"):
        graph = graph.h
    if sp.issparse(graph):
        h = sp.csr_matrix(graph)
    else:
        h = sp.csr_matrix(np.asarray(getattr(graph, "entries", graph)))
    h.eliminate_zeros()
    h.data = np.ones_like(h.data)
    h.sort_indices()
    hc = h.tocsc()
    hc.sort_indices()
    return (h.shape[0], h.indptr.astype(np.int64), h.indices.astype(np.int64),
            hc.indptr.astype(np.int64), hc.indices.astype(np.int64))


def enumerate_cycles(graph, length: int) -> int:
    """Exact number of cycles of ``length`` in the Tanner graph of ``graph``.

    ``graph`` may be a dense 0/1 array, a scipy sparse matrix, a Protograph
    or a LiftedCode.  A cycle is an edge set traversed once, without
    orientation or starting point.
    """
    if length not in (4, 6, 8):
        raise ValueError(f"unsupported cycle length {length}; use 4, 6 or 8")
    n, rowptr, rowidx, colptr, colidx = _csr_arrays(graph)
    if n == 0:
        return 0
    return int(_cycle_kernel.count_cycles_csr(n, rowptr, rowidx, colptr, colidx, length // 2))


def _window_counts(b0, b1, length: int, widths, method: str) -> list[int]:
    counts = []
    for w in widths:
        h = couple_protograph(b0, b1, w)
        if method == "enumerate":
            counts.append(enumerate_cycles(h, length))
        elif method == "overlap":
            if length != 6:
                raise ValueError("the overlap method only covers length 6")
            counts.append(count_cycles6_triples(h))
        else:
            raise ValueError(f"unknown method {method!r}")
    return counts


def count_coupled_cycles(b0, b1, l: int, length: int = 6,
                         method: str = "enumerate") -> CoupledCycleDecomposition:
    """Cycle count of the L-replica coupled protograph from small windows.

    ``f1`` counts cycles inside one replica window ``[B_0; B_1]``; ``f2``
    those spanning exactly two consecutive replicas (and ``f3`` three, for
    length 8).  Windows of width w contain every cycle spanning at most w
    replicas, so ``C(w) = sum_k (w - k + 1) f_k`` is inverted directly.
    """
    if l < 2:
        raise ValueError("coupling length must be at least 2")
    if length not in (4, 6, 8):
        raise ValueError("coupled decomposition supports lengths 4, 6 and 8")
    b0 = np.asarray(b0, dtype=np.int8)
    b1 = np.asarray(b1, dtype=np.int8)
    if b0.shape != b1.shape:
        raise ValueError("B_0 and B_1 must have the same shape")
    if ((b0 == 1) & (b1 == 1)).any():
        raise ValueError("B_0 and B_1 supports overlap")
    if length in (4, 6):
        c1, c2 = _window_counts(b0, b1, length, (1, 2), method)
        return CoupledCycleDecomposition(f1=c1, f2=c2 - 2 * c1, l=l, length=length)
    c1, c2, c3 = _window_counts(b0, b1, 8, (1, 2, 3), method)
    f1 = c1
    f2 = c2 - 2 * f1
    f3 = c3 - 3 * f1 - 2 * f2
    return CoupledCycleDecomposition(f1=f1, f2=f2, f3=f3, l=l, length=8)


def closed_form_cycles6(proto) -> int:
    """Dispatch to the 3- or 4-row closed form, else sum A over all triples."""
    b = _entries(proto)
    if b.shape[0] == 3:
        return count_cycles6_closed_gamma3(b)
    if b.shape[0] == 4:
        return count_cycles6_closed_gamma4(b)
    return _triple_sum(b, combinations(range(b.shape[0]), 3))
