"""Shared test oracles.

The oracles are deliberately independent of the package code paths they
check: cycle counts come from networkx, J values from adaptive quadrature,
partition minima from brute force over all 0/1 matrices.
"""

from __future__ import annotations

from itertools import product

import networkx as nx
import numpy as np
import pytest
from scipy import integrate


def tanner_graph(h) -> nx.Graph:
    h = np.asarray(h.toarray() if hasattr(h, "toarray") else h)
    g = nx.Graph()
    m, n = h.shape
    g.add_nodes_from((("c", i) for i in range(m)))
    g.add_nodes_from((("v", j) for j in range(n)))
    g.add_edges_from((("c", i), ("v", j)) for i, j in zip(*np.nonzero(h)))
    return g


def nx_cycle_count(h, length: int) -> int:
    """Number of simple cycles of exactly ``length`` edges (networkx oracle)."""
    g = tanner_graph(h)
    return sum(1 for c in nx.simple_cycles(g, length_bound=length) if len(c) == length)


def quad_j(s: float) -> float:
    """J(s) by adaptive quadrature of the consistent Gaussian LLR density."""
    if s == 0:
        return 0.0
    mu, var = s * s / 2, s * s

    def f(x):
        dens = np.exp(-((x - mu) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
        return dens * np.logaddexp(0.0, -x) / np.log(2)

    val, _ = integrate.quad(f, mu - 12 * s, mu + 12 * s, limit=200, epsabs=1e-13)
    return 1.0 - val


def brute_force_min_partition(gamma_c: int, kappa: int, l: int, gamma_l: int = 0):
    """Minimum coupled 6-cycle count over every binary P_C (with all-zero P_L)."""
    from sclocality.cycles import count_coupled_cycles

    best = None
    gamma = gamma_c + gamma_l
    for bits in product((0, 1), repeat=gamma_c * kappa):
        p_c = np.array(bits, dtype=np.int8).reshape(gamma_c, kappa)
        b1 = np.zeros((gamma, kappa), dtype=np.int8)
        b1[:gamma_c] = p_c
        b0 = 1 - b1
        f = count_coupled_cycles(b0, b1, l, method="enumerate").total
        best = f if best is None else min(best, f)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, ok: bool, detail: str) -> str:
    """Record one acceptance verdict; the lines are echoed in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
