"""Protographs, ternary partition matrices and replica overlap parameters.

Matrices are plain numpy arrays.  A partition entry equal to ``X`` (stored
as ``-1``) removes the circulant; ``0`` and ``1`` assign it to ``H_0`` and
``H_1`` respectively.  Row 0 is always the top row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

X = -1

__all__ = [
    "X",
    "Protograph",
    "PartitionMatrix",
    "OverlapSet",
    "q_block",
    "s_block",
    "build_regular",
    "build_balanced",
    "build_unbalanced",
    "partition_from_local",
    "split_by_partition",
    "replica_matrix",
    "overlap_parameters",
    "replica_overlaps",
    "independent_overlap_set",
    "couple_protograph",
]


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Protograph:
    """Binary bi-adjacency matrix with the coupling/local row split.

    The first ``gamma_c`` rows are coupling check nodes, the remaining
    ``gamma_l`` rows are local check nodes.
    """

    entries: np.ndarray
    gamma_c: int = 0
    gamma_l: int | None = None

    def __post_init__(self):
        b = _frozen(self.entries, np.int8)
        object.__setattr__(self, "entries", b)
        if self.gamma_l is None:
            object.__setattr__(self, "gamma_l", b.shape[0] - self.gamma_c)
        if self.gamma_c < 0 or self.gamma_l < 0:
            raise ValueError("gamma_c and gamma_l must be nonnegative")
        if self.gamma_c + self.gamma_l != b.shape[0]:
            raise ValueError(
                f"gamma_c + gamma_l = {self.gamma_c + self.gamma_l} != rows = {b.shape[0]}"
            )
        if not np.isin(b, (0, 1)).all():
            raise ValueError("protograph entries must be 0 or 1")
        if (b.sum(axis=1) == 0).any():
            raise ValueError("protograph has an all-zero row")
        if (b.sum(axis=0) == 0).any():
            raise ValueError("protograph has an all-zero column (unprotected VN)")

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def edges(self) -> int:
        return int(self.entries.sum())

    @property
    def design_rate(self) -> float:
        return 1.0 - self.rows / self.cols

    def local_rows(self) -> np.ndarray:
        return self.entries[self.gamma_c :]

    def __eq__(self, other):
        if not isinstance(other, Protograph):
            return NotImplemented
        return (
            self.gamma_c == other.gamma_c
            and self.gamma_l == other.gamma_l
            and np.array_equal(self.entries, other.entries)
        )

    def __repr__(self):
        return f"Protograph({self.rows}x{self.cols}, gamma_c={self.gamma_c}, gamma_l={self.gamma_l})"


@dataclass(frozen=True, eq=False)
class PartitionMatrix:
    """Ternary matrix over {0, 1, X}; local rows may not contain a 1."""

    entries: np.ndarray
    gamma_c: int = 0
    gamma_l: int | None = None

    def __post_init__(self):
        p = _frozen(self.entries, np.int8)
        object.__setattr__(self, "entries", p)
        if self.gamma_l is None:
            object.__setattr__(self, "gamma_l", p.shape[0] - self.gamma_c)
        if self.gamma_c < 0 or self.gamma_l < 0:
            raise ValueError("gamma_c and gamma_l must be nonnegative")
        if self.gamma_c + self.gamma_l != p.shape[0]:
            raise ValueError("gamma_c + gamma_l must equal the row count")
        if not np.isin(p, (0, 1, X)).all():
            raise ValueError("partition entries must be 0, 1 or X")
        if (p[self.gamma_c :] == 1).any():
            raise ValueError("a local row assigns an entry to H_1; it would become a coupling row")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def coupling_rows(self) -> np.ndarray:
        return self.entries[: self.gamma_c]

    @property
    def local_rows(self) -> np.ndarray:
        return self.entries[self.gamma_c :]

    @classmethod
    def stack(cls, p_c, p_l) -> "PartitionMatrix":
        p_c = np.asarray(p_c, dtype=np.int8).reshape(-1, np.shape(p_l)[1])
        p_l = np.asarray(p_l, dtype=np.int8)
        return cls(np.vstack([p_c, p_l]), gamma_c=p_c.shape[0], gamma_l=p_l.shape[0])

    def __eq__(self, other):
        if not isinstance(other, PartitionMatrix):
            return NotImplemented
        return (
            self.gamma_c == other.gamma_c
            and self.gamma_l == other.gamma_l
            and np.array_equal(self.entries, other.entries)
        )

    def __repr__(self):
        return f"PartitionMatrix({self.shape[0]}x{self.shape[1]}, gamma_c={self.gamma_c})"


@dataclass(frozen=True)
class OverlapSet:
    """Overlap parameters t_S keyed by sorted row-index tuples.

    ``degree_map`` holds every subset S of ``[0, n_rows)`` of size
    ``1..max_degree``.  For a replica (``n_rows == 2 * gamma``) the subsets
    that contain two rows congruent mod gamma are listed in ``structural_zeros``.
    """

    degree_map: dict[tuple[int, ...], int]
    gamma: int
    kappa: int
    n_rows: int
    structural_zeros: frozenset = field(default_factory=frozenset)

    def __getitem__(self, rows: Sequence[int]) -> int:
        key = tuple(sorted(rows))
        if not key:
            return self.kappa
        return self.degree_map[key]

    t = __getitem__

    def __len__(self):
        return len(self.degree_map)

    def nonzero(self) -> dict[tuple[int, ...], int]:
        return {s: v for s, v in self.degree_map.items() if s not in self.structural_zeros}

    def vector(self, subsets: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
        return tuple(self[s] for s in subsets)


def q_block(l: int, k: int, i: int) -> np.ndarray:
    """l x k all-ones block whose row ``i`` is zero (empty when k == 0)."""
    if not 0 <= i < l:
        raise ValueError(f"row index {i} outside [0, {l})")
    q = np.ones((l, k), dtype=np.int8)
    q[i, :] = 0
    return q


def s_block(l: int, k: int) -> np.ndarray:
    """l x k all-ones block with a zero anti-diagonal in its first k rows."""
    if k > l:
        raise ValueError("S(l, k) needs k <= l")
    s = np.ones((l, k), dtype=np.int8)
    for r in range(k):
        s[r, k - r - 1] = 0
    return s


def _check_local_args(gamma_l: int, kappa: int, nu: int) -> None:
    if gamma_l < 1:
        raise ValueError("gamma_l must be at least 1")
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if not 0 <= nu < kappa:
        raise ValueError(f"nu must satisfy 0 <= nu < kappa, got nu={nu}, kappa={kappa}")


def build_regular(gamma_l: int, kappa: int) -> Protograph:
    _check_local_args(gamma_l, kappa, 0)
    return Protograph(np.ones((gamma_l, kappa), dtype=np.int8), gamma_c=0)


def build_balanced(gamma_l: int, kappa: int, nu: int) -> Protograph:
    """Local protograph with the nu zeros spread evenly over the rows.

    With ``nu = a * gamma_l + b`` the matrix is ``[1 | S(b) | Q(a; gamma_l-1) | ... | Q(a; 0)]``.
    """
    _check_local_args(gamma_l, kappa, nu)
    a, b = divmod(nu, gamma_l)
    blocks = [np.ones((gamma_l, kappa - nu), dtype=np.int8), s_block(gamma_l, b)]
    blocks += [q_block(gamma_l, a, i) for i in range(gamma_l - 1, -1, -1)]
    return Protograph(np.hstack(blocks), gamma_c=0)


def build_unbalanced(gamma_l: int, kappa: int, nu: int) -> Protograph:
    """Local protograph with all nu zeros in row 0."""
    _check_local_args(gamma_l, kappa, nu)
    b = np.hstack([np.ones((gamma_l, kappa - nu), dtype=np.int8), q_block(gamma_l, nu, 0)])
    return Protograph(b, gamma_c=0)


def partition_from_local(local) -> np.ndarray:
    """P_L rows for a local protograph: X where the local entry is 0, else 0."""
    b = np.asarray(getattr(local, "entries", local))
    return np.where(b == 1, 0, X).astype(np.int8)


def split_by_partition(b, p) -> tuple[np.ndarray, np.ndarray]:
    """Split protograph ``b`` into its ``B_0`` and ``B_1`` components."""
    bm = np.asarray(getattr(b, "entries", b))
    pm = np.asarray(getattr(p, "entries", p))
    if bm.shape != pm.shape:
        raise ValueError(f"shape mismatch: protograph {bm.shape} vs partition {pm.shape}")
    assigned = pm != X
    bad = assigned & (bm == 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(f"partition assigns entry ({i}, {j}) but the protograph has no edge there")
    b0 = (pm == 0).astype(np.int8)
    b1 = (pm == 1).astype(np.int8)
    return b0, b1


def replica_matrix(b0, b1, b=None) -> np.ndarray:
    """Stack ``B_0`` over ``B_1`` (the 2γ x κ replica)."""
    b0 = np.asarray(b0, dtype=np.int8)
    b1 = np.asarray(b1, dtype=np.int8)
    if b0.shape != b1.shape:
        raise ValueError(f"shape mismatch: {b0.shape} vs {b1.shape}")
    if ((b0 == 1) & (b1 == 1)).any():
        raise ValueError("B_0 and B_1 supports overlap")
    if b is not None:
        bm = np.asarray(getattr(b, "entries", b))
        if ((b0 + b1) > bm).any():
            raise ValueError("B_0 + B_1 exceeds the protograph")
    return np.vstack([b0, b1])


def _subsets(n: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    for d in range(1, max_degree + 1):
        yield from combinations(range(n), d)


def overlap_parameters(r, gamma: int | None = None) -> OverlapSet:
    """All overlap parameters of a binary matrix up to degree gamma.

    Pass ``gamma`` for a replica of shape (2γ, κ); omit it to treat ``r`` as
    a standalone protograph (degrees up to its row count).
    """
    m = np.asarray(r, dtype=bool)
    n_rows, kappa = m.shape
    if gamma is None:
        gamma, modulus = n_rows, None
    else:
        if n_rows != 2 * gamma:
            raise ValueError(f"replica must have 2*gamma = {2 * gamma} rows, got {n_rows}")
        modulus = gamma
    degree_map: dict[tuple[int, ...], int] = {}
    zeros = set()
    # columns shared by a subset, built incrementally from its prefix
    cols: dict[tuple[int, ...], np.ndarray] = {(): np.ones(kappa, dtype=bool)}
    for s in _subsets(n_rows, gamma):
        c = cols[s[:-1]] & m[s[-1]]
        if len(s) < gamma:
            cols[s] = c
        degree_map[s] = int(c.sum())
        if modulus is not None and len({i % modulus for i in s}) < len(s):
            zeros.add(s)
    return OverlapSet(degree_map, gamma=gamma, kappa=kappa, n_rows=n_rows,
                      structural_zeros=frozenset(zeros))


def replica_overlaps(b0, b1) -> OverlapSet:
    r = replica_matrix(b0, b1)
    return overlap_parameters(r, gamma=r.shape[0] // 2)


def independent_overlap_set(gamma_c: int, gamma_l: int = 0) -> list[tuple[int, ...]]:
    """Row subsets indexing the independent overlap parameters.

    For a regular local part (all-zero P_L) only the coupling rows matter,
    so the family depends on ``gamma_c`` alone.
    """
    if gamma_c < 1:
        raise ValueError("gamma_c must be at least 1")
    if gamma_l < 0:
        raise ValueError("gamma_l must be nonnegative")
    return list(_subsets(gamma_c, gamma_c))


def couple_protograph(b0, b1, l: int) -> np.ndarray:
    """Terminated m=1 chain: ``[B_0; B_1]`` placed l times down the diagonal.

    The result has ``(l + 1) * γ`` rows and ``l * κ`` columns.
    """
    b0 = np.asarray(b0, dtype=np.int8)
    b1 = np.asarray(b1, dtype=np.int8)
    if b0.shape != b1.shape:
        raise ValueError("B_0 and B_1 must have the same shape")
    if l < 1:
        raise ValueError("coupling length must be at least 1")
    g, k = b0.shape
    h = np.zeros(((l + 1) * g, l * k), dtype=np.int8)
    for t in range(l):
        h[t * g : (t + 1) * g, t * k : (t + 1) * k] = b0
        h[(t + 1) * g : (t + 2) * g, t * k : (t + 1) * k] = b1
    return h
