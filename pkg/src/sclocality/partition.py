"""Coupling partitions P_C: cutting vector, locality-blind and locality-aware.

With a regular local part (all-zero P_L) over an all-ones protograph, the
columns of P_C are interchangeable, so a partition is determined up to a
column permutation by how many columns carry each *type*: the set of
coupling rows that send that column's edge to H_1.  The type counts and the
independent overlap parameters determine each other (Moebius inversion), so
searching over type-count compositions of kappa is the same as searching
over feasible independent overlap vectors, without any infeasible points.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np

from .cycles import CoupledCycleDecomposition, count_coupled_cycles
from .protograph import (
    X,
    OverlapSet,
    PartitionMatrix,
    independent_overlap_set,
    overlap_parameters,
    split_by_partition,
)

__all__ = [
    "PartitionCandidate",
    "cutting_vector_candidate",
    "cutting_vector_partition",
    "optimize_locality_blind",
    "optimize_locality_aware",
    "overlaps_to_partition",
    "partition_overlap_vector",
    "score_partition",
]


@dataclass(frozen=True)
class PartitionCandidate:
    method: str
    p_c: np.ndarray
    partition: PartitionMatrix
    objective: int
    decomposition: CoupledCycleDecomposition
    overlaps: OverlapSet
    blind_objective: int | None = None
    evaluated: int = 0
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def f1(self) -> int:
        return self.decomposition.f1

    @property
    def f2(self) -> int:
        return self.decomposition.f2

    def report(self) -> dict:
        out = {"method": self.method, "objective_f": self.objective, "f1": self.f1,
               "f2": self.f2, "l": self.decomposition.l, "runtime": self.runtime,
               "evaluated": self.evaluated}
        if self.blind_objective is not None:
            out["blind_objective_f"] = self.blind_objective
        out.update(self.extra)
        return out


def _protograph_of(p: np.ndarray) -> np.ndarray:
    return (p != X).astype(np.int8)


def score_partition(p_c, p_l, l: int, length: int = 6,
                    method: str = "overlap") -> CoupledCycleDecomposition:
    """Coupled cycle count of the code whose partition is ``[P_C; P_L]``.

    The protograph is implied: an edge wherever the partition is not X.
    """
    p_l = np.asarray(p_l, dtype=np.int8)
    p = np.vstack([np.asarray(p_c, dtype=np.int8).reshape(-1, p_l.shape[1]), p_l])
    b0, b1 = split_by_partition(_protograph_of(p), p)
    if length == 8:
        method = "enumerate"
    return count_coupled_cycles(b0, b1, l, length=length, method=method)


def cutting_vector_partition(gamma_c: int, kappa: int) -> np.ndarray:
    """Staircase P_C with zeros left of cut ``zeta_i`` in row i.

    Cuts are ``zeta_i = floor((i + 1) * kappa / (gamma_c + 1))``, i.e.
    uniform spacing with the residue of kappa / (gamma_c + 1) pushed right;
    for (3, 13) this gives (3, 6, 9).
    """
    if gamma_c < 1:
        raise ValueError("gamma_c must be at least 1")
    if kappa < gamma_c:
        raise ValueError("kappa must be at least gamma_c")
    zeta = [max((i + 1) * kappa // (gamma_c + 1), i + 1) for i in range(gamma_c)]
    cols = np.arange(kappa)
    return np.array([(cols >= z).astype(np.int8) for z in zeta], dtype=np.int8)


def _types(gamma_c: int) -> list[tuple[int, ...]]:
    return list(product((0, 1), repeat=gamma_c))


def _compositions(n: int, parts: int):
    if parts == 0:
        if n == 0:
            yield ()
        return
    for bars in combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield tuple(out)


def _realize(types, counts) -> np.ndarray:
    cols = []
    for ty, n in zip(types, counts):
        cols.extend([ty] * n)
    # ascending column order gives the row-major lexicographically smallest matrix
    cols.sort()
    return np.array(cols, dtype=np.int8).T.reshape(len(types[0]), -1)


def partition_overlap_vector(p_c) -> tuple[int, ...]:
    """Independent overlap vector of P_C (B_0-side coupling-row overlaps)."""
    p_c = np.asarray(p_c)
    zero = p_c == 0
    return tuple(int(zero[list(s)].all(axis=0).sum())
                 for s in independent_overlap_set(p_c.shape[0]))


def _search(gamma_c: int, kappa: int, l: int, p_l: np.ndarray, method: str):
    types = _types(gamma_c)
    index = {t: i for i, t in enumerate(types)}
    perm_maps = [[index[tuple(t[q] for q in perm)] for t in types]
                 for perm in permutations(range(gamma_c))]

    def images(counts):
        for pm in perm_maps:
            img = [0] * len(types)
            for i, c in enumerate(counts):
                img[pm[i]] = c
            yield tuple(img)

    best = None
    optima = []
    evaluated = 0
    for counts in _compositions(kappa, len(types)):
        if any(img < counts for img in images(counts)):
            continue  # score once per coupling-row relabelling class
        p_c = _realize(types, counts)
        f = score_partition(p_c, p_l, l, method=method).total
        evaluated += 1
        if best is None or f < best:
            best, optima = f, [counts]
        elif f == best:
            optima.append(counts)
    tied = {img for counts in optima for img in images(counts)}
    ranked = sorted((partition_overlap_vector(_realize(types, c)), _realize(types, c).tobytes(), c)
                    for c in tied)
    chosen = _realize(types, ranked[0][2])
    return chosen, best, evaluated, len(tied)


def _candidate(method, p_c, p_l, l, evaluated, runtime, blind=None, extra=None):
    p = PartitionMatrix.stack(p_c, p_l)
    dec = score_partition(p_c, p_l, l)
    b0, b1 = split_by_partition(_protograph_of(p.entries), p)
    ov = overlap_parameters(np.vstack([b0, b1]), gamma=p.shape[0])
    return PartitionCandidate(method=method, p_c=np.asarray(p_c, dtype=np.int8), partition=p,
                              objective=dec.total, decomposition=dec, overlaps=ov,
                              blind_objective=blind, evaluated=evaluated, runtime=runtime,
                              extra=extra or {})


def _zero_local(gamma_l: int, kappa: int, p_l) -> np.ndarray:
    if p_l is None:
        return np.zeros((gamma_l, kappa), dtype=np.int8)
    p_l = np.asarray(getattr(p_l, "entries", p_l), dtype=np.int8).reshape(-1, kappa)
    if p_l.shape[0] != gamma_l:
        raise ValueError(f"P_L has {p_l.shape[0]} rows, expected gamma_l = {gamma_l}")
    return p_l


def optimize_locality_blind(gamma_c: int, kappa: int, l: int, gamma_l: int = 0,
                            method: str = "overlap") -> PartitionCandidate:
    """Optimal-overlap P_C for the gamma_c-row code alone, then embedded.

    The search ignores the local rows entirely; the reported ``objective``
    re-scores the chosen P_C on the full code with an all-zero P_L.
    """
    if gamma_c < 1 or kappa < gamma_c:
        raise ValueError("need gamma_c >= 1 and kappa >= gamma_c")
    if l < 2:
        raise ValueError("coupling length must be at least 2")
    t0 = time.perf_counter()
    empty = np.zeros((0, kappa), dtype=np.int8)
    p_c, blind, evaluated, ties = _search(gamma_c, kappa, l, empty, method)
    p_l = np.zeros((gamma_l, kappa), dtype=np.int8)
    return _candidate("lbo", p_c, p_l, l, evaluated, time.perf_counter() - t0,
                      blind=blind, extra={"optimal_ties": ties})


def optimize_locality_aware(gamma_c: int, gamma_l: int, kappa: int, l: int,
                            p_l=None, method: str = "overlap") -> PartitionCandidate:
    """Optimal-overlap P_C for the full code with the local rows fixed.

    Only a regular local part (all-zero P_L) is supported; irregularity is
    applied to the local rows after optimization.
    """
    if l < 2:
        raise ValueError("coupling length must be at least 2")
    p_l = _zero_local(gamma_l, kappa, p_l)
    if (p_l != 0).any():
        raise ValueError("locality-aware search requires an all-zero P_L")
    t0 = time.perf_counter()
    if gamma_c == 0:
        p_c = np.zeros((0, kappa), dtype=np.int8)
        return _candidate("lao", p_c, p_l, l, 1, time.perf_counter() - t0)
    if kappa < gamma_c:
        raise ValueError("kappa must be at least gamma_c")
    p_c, _, evaluated, ties = _search(gamma_c, kappa, l, p_l, method)
    return _candidate("lao", p_c, p_l, l, evaluated, time.perf_counter() - t0,
                      extra={"optimal_ties": ties})


def cutting_vector_candidate(gamma_c: int, gamma_l: int, kappa: int, l: int) -> PartitionCandidate:
    t0 = time.perf_counter()
    p_c = cutting_vector_partition(gamma_c, kappa)
    return _candidate("cv", p_c, np.zeros((gamma_l, kappa), dtype=np.int8), l, 1,
                      time.perf_counter() - t0)


def overlaps_to_partition(target, gamma_c: int, kappa: int) -> np.ndarray:
    """Realize a P_C whose B_0-side coupling-row overlaps equal ``target``.

    ``target`` is an OverlapSet (only subsets of the first gamma_c rows are
    read) or a mapping from row tuples to counts.  The number of columns
    whose H_0 rows are exactly Z follows by inclusion-exclusion over the
    supersets of Z.
    """
    subsets = independent_overlap_set(gamma_c)

    def t(s):
        if not s:
            return kappa
        return int(target[tuple(s)])

    counts = []
    types = _types(gamma_c)
    for ty in types:
        zero_rows = [i for i in range(gamma_c) if ty[i] == 0]
        free = [i for i in range(gamma_c) if ty[i] == 1]
        n = 0
        for d in range(len(free) + 1):
            for extra in combinations(free, d):
                n += (-1) ** d * t(sorted(zero_rows + list(extra)))
        if n < 0:
            raise ValueError(f"overlap target is not realizable (column type {ty} count {n})")
        counts.append(n)
    if sum(counts) != kappa:
        raise ValueError("overlap target is not realizable (column counts do not sum to kappa)")
    p_c = _realize(types, counts)
    if partition_overlap_vector(p_c) != tuple(t(s) for s in subsets):
        raise ValueError("overlap target is not realizable")
    return p_c
