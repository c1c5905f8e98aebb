"""EXIT analysis of protographs over the binary-input AWGN channel.

Messages are mutual-information values carried per protograph edge and
updated with a flooding schedule.  The channel enters through
``s_ch = 2 / sigma`` (so ``s_ch**2 = 4 / sigma**2``).

Two models of the J function are available:

``"exact"`` (default)
    The consistent-Gaussian mutual information, tabulated once by
    Gauss-Hermite quadrature on a fine grid and linearly interpolated.
    ``j_function`` and ``j_inverse`` are then exact inverses of each other.
``"curve-fit"``
    The widely used two-segment curve fit: cubic below s = 1.6363,
    ``1 - exp(cubic)`` above, with the matching closed-form inverse
    (switchover at I = 0.3646).  The pair is not mutually consistent,
    most visibly near 0 and 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "J_DOMAIN",
    "j_function",
    "j_inverse",
    "vn_update",
    "cn_update",
    "ExitState",
    "ExitRun",
    "ThresholdResult",
    "RegularOrdering",
    "run_exit",
    "exit_converges",
    "threshold",
    "threshold_ordering_regular",
]

J_MODELS = ("exact", "curve-fit")
J_DOMAIN = (0.0, 10.0)

_S_MAX = 24.0
_S_STEP = 1e-3
_GH_NODES = 120

DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITERS = 2000
DEFAULT_TOL = 1e-4
_STALL = 1e-12


@lru_cache(maxsize=1)
def _exact_table() -> tuple[np.ndarray, np.ndarray]:
    # 1 - J(s) = E[log2(1 + exp(-L))] with L ~ N(s^2/2, s^2)
    z, w = np.polynomial.hermite_e.hermegauss(_GH_NODES)
    w = w / np.sqrt(2 * np.pi)
    s = np.arange(0.0, _S_MAX + _S_STEP / 2, _S_STEP)
    tail = np.empty_like(s)
    for lo in range(0, s.size, 4096):
        blk = s[lo : lo + 4096, None]
        llr = blk * blk / 2 + blk * z[None, :]
        tail[lo : lo + 4096] = (np.logaddexp(0.0, -llr) / np.log(2)) @ w
    tail[0] = 1.0
    # enforce strict decrease where quadrature noise could flatten the tail
    tail = np.minimum.accumulate(tail)
    ok = np.r_[True, np.diff(tail) < 0]
    s, tail = s[ok], tail[ok]
    s.setflags(write=False)
    tail.setflags(write=False)
    return s, tail


def _j_exact(s):
    grid, tail = _exact_table()
    return 1.0 - np.interp(s, grid, tail)


def _jinv_exact(i):
    grid, tail = _exact_table()
    # tail is decreasing; interpolate on its negation
    return np.interp(-(1.0 - np.asarray(i, dtype=float)), -tail, grid)


def _j_fit(s):
    s = np.asarray(s, dtype=float)
    low = -0.0421061 * s**3 + 0.209252 * s**2 - 0.00640081 * s
    high = 1.0 - np.exp(0.00181491 * s**3 - 0.142675 * s**2 - 0.0822054 * s + 0.0549608)
    out = np.where(s <= 1.6363, low, np.where(s < 10.0, high, 1.0))
    return np.clip(out, 0.0, 1.0)


def _jinv_fit(i):
    i = np.clip(np.asarray(i, dtype=float), 0.0, 1.0 - 1e-15)
    low = 1.09542 * i**2 + 0.214217 * i + 2.33727 * np.sqrt(i)
    high = -0.706692 * np.log(0.386013 * (1.0 - i)) + 1.75017 * i
    return np.where(i <= 0.3646, low, high)


_MODELS = {"exact": (_j_exact, _jinv_exact), "curve-fit": (_j_fit, _jinv_fit)}


def _model(name: str):
    try:
        return _MODELS[name]
    except KeyError:
        raise ValueError(f"unknown J model {name!r}; choose from {J_MODELS}") from None


def j_function(s, model: str = "exact"):
    """Mutual information of a consistent Gaussian message with std ``s``."""
    arr = np.asarray(s, dtype=float)
    if (arr < 0).any() or np.isnan(arr).any():
        raise ValueError("J is defined for s >= 0")
    out = _model(model)[0](arr)
    return float(out) if np.ndim(s) == 0 else out


def j_inverse(i, model: str = "exact"):
    arr = np.asarray(i, dtype=float)
    if (arr < 0).any() or (arr > 1).any() or np.isnan(arr).any():
        raise ValueError("J^-1 is defined on [0, 1]")
    out = _model(model)[1](arr)
    return float(out) if np.ndim(i) == 0 else out


def _check_mi(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).reshape(-1)
    if ((v < 0) | (v >= 1)).any():
        raise ValueError("EXIT values must lie in [0, 1)")
    return v


def vn_update(s_ch: float, incoming, model: str = "exact") -> float:
    """Extrinsic VN->CN value from the channel and the other incoming edges."""
    if s_ch < 0:
        raise ValueError("s_ch must be nonnegative")
    v = _check_mi(incoming)
    j, jinv = _model(model)
    return float(j(np.sqrt(np.sum(jinv(v) ** 2) + s_ch**2)))


def cn_update(incoming, model: str = "exact") -> float:
    """Extrinsic CN->VN value, via the duality with the VN update."""
    v = _check_mi(incoming)
    j, jinv = _model(model)
    return float(1.0 - j(np.sqrt(np.sum(jinv(1.0 - v) ** 2))))


@dataclass
class ExitState:
    edge_messages_v2c: np.ndarray
    edge_messages_c2v: np.ndarray
    sigma_ch: float
    iteration: int = 0


@dataclass
class ExitRun:
    converged: bool
    iterations: int
    app: np.ndarray
    state: ExitState
    trajectory: list[tuple[float, float]] = field(default_factory=list)


def _edges(proto):
    b = np.asarray(getattr(proto, "entries", proto))
    if b.ndim != 2:
        raise ValueError("protograph must be a 2-D matrix")
    if not np.isin(b, (0, 1)).all():
        raise ValueError("EXIT analysis expects a binary protograph (no parallel edges)")
    rows, cols = np.nonzero(b)
    return b.shape, rows, cols


def run_exit(proto, sigma: float, max_iters: int = DEFAULT_MAX_ITERS,
             eps: float = DEFAULT_EPS, model: str = "exact",
             record: bool = False) -> ExitRun:
    """Flooding EXIT iteration at noise level ``sigma``.

    Stops when every a-posteriori VN value exceeds ``1 - eps`` (success),
    when the messages stop moving (a fixed point short of 1), or after
    ``max_iters`` iterations.  With ``record`` the per-iteration (min, mean)
    of the a-posteriori values is kept for plotting.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    j, jinv = _model(model)
    (n_c, n_v), r, c = _edges(proto)
    s_ch = 2.0 / sigma
    sch2 = s_ch * s_ch
    c2v = np.zeros(r.size)
    v2c = np.zeros(r.size)
    traj: list[tuple[float, float]] = []
    it = 0
    while True:
        su = jinv(c2v) ** 2
        tot = np.bincount(c, weights=su, minlength=n_v)
        app = j(np.sqrt(tot + sch2))
        if record:
            traj.append((float(app.min()), float(app.mean())))
        if (app > 1.0 - eps).all():
            converged = True
            break
        if it >= max_iters:
            converged = False
            break
        v2c = j(np.sqrt(np.maximum(tot[c] - su, 0.0) + sch2))
        sx = jinv(1.0 - v2c) ** 2
        totc = np.bincount(r, weights=sx, minlength=n_c)
        new = 1.0 - j(np.sqrt(np.maximum(totc[r] - sx, 0.0)))
        it += 1
        stalled = np.max(np.abs(new - c2v), initial=0.0) < _STALL
        c2v = new
        if stalled:
            su = jinv(c2v) ** 2
            tot = np.bincount(c, weights=su, minlength=n_v)
            app = j(np.sqrt(tot + sch2))
            converged = bool((app > 1.0 - eps).all())
            break
    state = ExitState(v2c, c2v, s_ch, it)
    return ExitRun(converged, it, app, state, traj)


def exit_converges(proto, sigma: float, max_iters: int = DEFAULT_MAX_ITERS,
                   eps: float = DEFAULT_EPS, model: str = "exact") -> bool:
    return run_exit(proto, sigma, max_iters, eps, model).converged


@dataclass(frozen=True)
class ThresholdResult:
    sigma_star: float
    tolerance: float
    converged_at: tuple[tuple[float, bool, int], ...]
    bracket: tuple[float, float]

    @property
    def iterations(self) -> int:
        return sum(p[2] for p in self.converged_at)

    def as_dict(self) -> dict:
        return {"sigma_star": self.sigma_star, "tol": self.tolerance,
                "iterations": self.iterations, "bracket": list(self.bracket),
                "probes": [list(p) for p in self.converged_at]}


def threshold(proto, tol: float = DEFAULT_TOL, lo: float = 0.01, hi: float = 3.0,
              max_iters: int = DEFAULT_MAX_ITERS, eps: float = DEFAULT_EPS,
              model: str = "exact") -> ThresholdResult:
    """Bisection for the largest sigma at which the EXIT iteration converges."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    probes = []

    def probe(sig):
        run = run_exit(proto, sig, max_iters, eps, model)
        probes.append((sig, run.converged, run.iterations))
        return run.converged

    if not probe(lo):
        raise RuntimeError(f"EXIT does not converge at the lower bracket sigma={lo}")
    if probe(hi):
        raise RuntimeError(f"EXIT still converges at the upper bracket sigma={hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), tol, tuple(probes), (lo, hi))


@dataclass(frozen=True)
class RegularOrdering:
    sigma1: float
    sigma2: float
    expected: str
    holds: bool


def threshold_ordering_regular(g1: int, k1: int, g2: int, k2: int,
                               tol: float = DEFAULT_TOL,
                               model: str = "exact") -> RegularOrdering:
    """Compare thresholds of two regular protographs against the known ordering.

    Equal kappa: more check rows cannot lower the threshold.  Equal gamma:
    more variable columns cannot raise it.  Other pairs are reported with
    ``expected == "incomparable"``.
    """
    s1 = threshold(np.ones((g1, k1), dtype=np.int8), tol=tol, model=model).sigma_star
    s2 = threshold(np.ones((g2, k2), dtype=np.int8), tol=tol, model=model).sigma_star
    # bisection slack: allow one tolerance width of disagreement
    if k1 == k2:
        expected = "<=" if g1 <= g2 else ">="
    elif g1 == g2:
        expected = ">=" if k1 <= k2 else "<="
    else:
        return RegularOrdering(s1, s2, "incomparable", True)
    holds = s1 <= s2 + tol if expected == "<=" else s1 >= s2 - tol
    return RegularOrdering(s1, s2, expected, holds)
