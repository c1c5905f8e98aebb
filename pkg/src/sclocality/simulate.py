"""BPSK/AWGN Monte Carlo with a flooding sum-product decoder.

The all-zero codeword is transmitted (0 -> +1); by channel and decoder
symmetry its error rates equal those of any codeword.  Every frame draws
its noise from its own stream keyed by (seed, snr index, frame index), and
frames are processed in fixed-size chunks whose results are consumed in
order, so the output does not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .lifting import LiftedCode, extract_local_code

__all__ = [
    "SNR_CONVENTIONS",
    "SimConfig",
    "BerPoint",
    "SumProductDecoder",
    "bp_decode",
    "snr_to_sigma",
    "simulate_ber",
    "decode_matrix",
]

SNR_CONVENTIONS = ("es", "ebn0")
DEFAULT_BP_ITERS = 50
_LLR_CLIP = 1e-12
_PHI_MAX_ARG = 40.0


def snr_to_sigma(snr_db: float, rate: float | None = None, convention: str = "es") -> float:
    """Noise standard deviation for unit-energy BPSK at ``snr_db``.

    ``"es"``: SNR = 1 / sigma^2.  ``"ebn0"``: SNR = Eb/N0 with
    sigma^2 = 1 / (2 * rate * 10^(snr/10)).
    """
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    if convention == "es":
        return 10.0 ** (-snr_db / 20.0)
    if convention == "ebn0":
        if rate is None or not 0 < rate <= 1:
            raise ValueError("the ebn0 convention needs a code rate in (0, 1]")
        return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0)))
    raise ValueError(f"unknown SNR convention {convention!r}; choose from {SNR_CONVENTIONS}")


def _phi(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, _LLR_CLIP, _PHI_MAX_ARG)
    return -np.log(np.tanh(0.5 * x))


class SumProductDecoder:
    """Flooding sum-product decoder for a fixed sparse parity-check matrix.

    Works on batches: LLR input of shape (n,) or (n, frames).  Positive LLR
    favours bit 0; a total LLR of exactly 0 is decided as 1.
    """

    def __init__(self, h):
        h = sp.csr_matrix(h)
        h.eliminate_zeros()
        h.data = np.ones_like(h.data)
        h.sort_indices()
        self.h = h.astype(np.int32)
        self.n_checks, self.n = h.shape
        coo = h.tocoo()
        order = np.lexsort((coo.col, coo.row))
        self.rows = coo.row[order].astype(np.int64)
        self.cols = coo.col[order].astype(np.int64)
        e = np.arange(self.rows.size)
        self.check_sum = sp.csr_matrix((np.ones(e.size), (self.rows, e)),
                                       shape=(self.n_checks, e.size))
        self.var_sum = sp.csr_matrix((np.ones(e.size), (self.cols, e)),
                                     shape=(self.n, e.size))

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        return (self.h @ bits.astype(np.int32)) % 2

    def decode(self, llr, max_iters: int = DEFAULT_BP_ITERS):
        """Return (hard bits, converged flags, iterations used) per frame."""
        llr = np.asarray(llr, dtype=float)
        single = llr.ndim == 1
        if single:
            llr = llr[:, None]
        if llr.shape[0] != self.n:
            raise ValueError(f"LLR length {llr.shape[0]} does not match {self.n} columns")
        frames = llr.shape[1]
        bits = np.zeros((self.n, frames), dtype=np.int8)
        converged = np.zeros(frames, dtype=bool)
        iters = np.full(frames, max_iters, dtype=np.int64)
        active = np.arange(frames)
        ll = llr
        v2c = ll[self.cols]
        tot = ll
        for it in range(1, max_iters + 1):
            mag = _phi(np.abs(v2c))
            neg = (v2c < 0).astype(float)
            smag = self.check_sum @ mag
            sneg = self.check_sum @ neg
            out = _phi(np.maximum(smag[self.rows] - mag, 0.0))
            flip = (sneg[self.rows] - neg) % 2 > 0.5
            c2v = np.where(flip, -out, out)
            tot = ll + self.var_sum @ c2v
            hard = (tot <= 0).astype(np.int8)
            ok = ~self.syndrome(hard).any(axis=0)
            if ok.any():
                done = active[ok]
                bits[:, done] = hard[:, ok]
                converged[done] = True
                iters[done] = it
                keep = ~ok
                active, ll, tot, c2v, hard = active[keep], ll[:, keep], tot[:, keep], c2v[:, keep], hard[:, keep]
                if active.size == 0:
                    break
            if it < max_iters:
                v2c = tot[self.cols] - c2v
        if active.size:
            bits[:, active] = (tot <= 0).astype(np.int8)
        if single:
            return bits[:, 0], bool(converged[0]), int(iters[0])
        return bits, converged, iters


def bp_decode(code, llr_in, max_iters: int = DEFAULT_BP_ITERS):
    """Decode one frame; returns (hard bits, converged)."""
    h = code.h if isinstance(code, LiftedCode) else code
    bits, ok, _ = SumProductDecoder(h).decode(np.asarray(llr_in, dtype=float), max_iters)
    return bits, ok


@dataclass(frozen=True)
class SimConfig:
    snr_db_points: tuple[float, ...]
    max_frames: int = 100_000
    min_frame_errors: int = 50
    max_bp_iters: int = DEFAULT_BP_ITERS
    decoder_mode: str = "global"
    rng_seed: int = 0
    snr_convention: str = "es"
    workers: int = 1
    chunk_frames: int = 256
    subblock_index: int = 0

    def __post_init__(self):
        pts = tuple(float(s) for s in self.snr_db_points)
        object.__setattr__(self, "snr_db_points", pts)
        if not pts:
            raise ValueError("at least one SNR point is required")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("SNR points must be strictly increasing")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be at least 1")
        if self.max_frames < 1 or self.chunk_frames < 1 or self.workers < 1:
            raise ValueError("max_frames, chunk_frames and workers must be positive")
        if self.max_bp_iters < 1:
            raise ValueError("max_bp_iters must be positive")
        if self.decoder_mode not in ("local", "global"):
            raise ValueError("decoder_mode must be 'local' or 'global'")
        if self.snr_convention not in SNR_CONVENTIONS:
            raise ValueError(f"snr_convention must be one of {SNR_CONVENTIONS}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bit_errors: int
    frame_errors: int
    frames: int
    block_len: int
    bit_errors_sq: int = 0
    sigma: float = float("nan")
    mode: str = "global"
    code_id: str = ""

    def __post_init__(self):
        if self.frame_errors > self.frames:
            raise ValueError("frame_errors cannot exceed frames")

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.block_len) if self.frames else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber_stderr(self) -> float:
        """Standard error of the BER estimate from per-frame error counts."""
        n = self.frames
        if n < 2:
            return float("inf")
        mean = self.bit_errors / n
        var = max(self.bit_errors_sq / n - mean * mean, 0.0) * n / (n - 1)
        return math.sqrt(var / n) / self.block_len

    def as_row(self) -> dict:
        return {"snr_db": self.snr_db, "ber": self.ber, "fer": self.fer,
                "frames": self.frames, "bit_errors": self.bit_errors,
                "frame_errors": self.frame_errors, "mode": self.mode, "code_id": self.code_id}


def decode_matrix(code, mode: str = "global", subblock_index: int = 0) -> sp.csr_matrix:
    """Parity-check matrix actually decoded in ``mode``."""
    if mode == "global":
        return code.h if isinstance(code, LiftedCode) else sp.csr_matrix(code)
    if not isinstance(code, LiftedCode):
        raise ValueError("local decoding needs a LiftedCode with sub-block geometry")
    return extract_local_code(code, subblock_index)


def _design_rate(h: sp.csr_matrix) -> float:
    used = int((np.diff(h.indptr) > 0).sum())
    return 1.0 - used / h.shape[1]


def _frame_noise(seed: int, snr_index: int, frame: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, snr_index, frame]))
    return rng.standard_normal(n)


def _run_chunk(decoder: SumProductDecoder, sigma: float, seed: int, snr_index: int,
               start: int, count: int, max_iters: int) -> tuple[int, int, int]:
    n = decoder.n
    noise = np.empty((n, count))
    for f in range(count):
        noise[:, f] = _frame_noise(seed, snr_index, start + f, n)
    llr = 2.0 * (1.0 + sigma * noise) / (sigma * sigma)
    bits, _, _ = decoder.decode(llr, max_iters)
    errs = bits.sum(axis=0, dtype=np.int64)
    return int(errs.sum()), int((errs > 0).sum()), int((errs * errs).sum())


_WORKER_DECODER: SumProductDecoder | None = None


def _init_worker(h):
    global _WORKER_DECODER
    _WORKER_DECODER = SumProductDecoder(h)


def _worker_chunk(args):
    return _run_chunk(_WORKER_DECODER, *args)


def _chunks(cfg: SimConfig):
    start = 0
    while start < cfg.max_frames:
        count = min(cfg.chunk_frames, cfg.max_frames - start)
        yield start, count
        start += count


def simulate_ber(code, cfg: SimConfig, code_id: str = "", progress=None) -> list[BerPoint]:
    """Accumulate errors per SNR point until ``min_frame_errors`` or ``max_frames``."""
    h = decode_matrix(code, cfg.decoder_mode, cfg.subblock_index)
    if not code_id and isinstance(code, LiftedCode):
        code_id = code.code_id
    rate = _design_rate(h)
    decoder = SumProductDecoder(h)
    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(h,))
    points = []
    try:
        for k, snr in enumerate(cfg.snr_db_points):
            sigma = snr_to_sigma(snr, rate, cfg.snr_convention)
            be = fe = sq = frames = 0
            chunks = list(_chunks(cfg))
            if pool is None:
                results = (_run_chunk(decoder, sigma, cfg.rng_seed, k, s, c, cfg.max_bp_iters)
                           for s, c in chunks)
            else:
                results = _ordered(pool, cfg, sigma, k, chunks)
            for (s, c), (b, f, q) in zip(chunks, results):
                be, fe, sq, frames = be + b, fe + f, sq + q, frames + c
                if fe >= cfg.min_frame_errors:
                    break
            pt = BerPoint(snr, be, fe, frames, h.shape[1], sq, sigma, cfg.decoder_mode, code_id)
            points.append(pt)
            if progress is not None:
                progress(pt)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return points


def _ordered(pool, cfg, sigma, k, chunks):
    # keep a bounded window of chunks in flight, yield strictly in order
    pending = []
    it = iter(chunks)
    for _ in range(2 * cfg.workers):
        nxt = next(it, None)
        if nxt is None:
            break
        pending.append(pool.submit(_worker_chunk, (sigma, cfg.rng_seed, k, nxt[0], nxt[1], cfg.max_bp_iters)))
    while pending:
        fut = pending.pop(0)
        yield fut.result()
        nxt = next(it, None)
        if nxt is not None:
            pending.append(pool.submit(_worker_chunk, (sigma, cfg.rng_seed, k, nxt[0], nxt[1], cfg.max_bp_iters)))


def run_metadata(cfg: SimConfig, code=None) -> dict:
    meta = {"config": asdict(cfg), "decoder": "sum-product, flooding, syndrome early exit",
            "transmission": "all-zero codeword, BPSK 0->+1, LLR = 2y/sigma^2",
            "rng": "per-frame SeedSequence([seed, snr_index, frame_index])"}
    if isinstance(code, LiftedCode):
        meta["geometry"] = code.geometry()
    return meta
