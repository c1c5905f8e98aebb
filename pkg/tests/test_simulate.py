from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.sparse as sp

from sclocality.lifting import ab_lift
from sclocality.presets import get_preset
from sclocality.simulate import (
    BerPoint,
    SimConfig,
    SumProductDecoder,
    bp_decode,
    decode_matrix,
    simulate_ber,
    snr_to_sigma,
)


@pytest.fixture(scope="module")
def lc2():
    return get_preset("lc2").lifted()


@pytest.fixture(scope="module")
def tiny():
    return get_preset("tiny").lifted()


class TestSnr:
    def test_zero_db(self):
        assert snr_to_sigma(0.0) == pytest.approx(1.0)

    def test_factor_two(self):
        assert snr_to_sigma(6.0206) == pytest.approx(0.5, abs=1e-5)

    def test_ebn0(self):
        # Eb/N0 = Es/N0 / R and sigma^2 = 1 / (2 Es/N0)
        assert snr_to_sigma(0.0, rate=0.5, convention="ebn0") == pytest.approx(1.0)
        assert snr_to_sigma(3.0, rate=1.0, convention="ebn0") == pytest.approx(math.sqrt(1 / (2 * 10**0.3)))

    def test_errors(self):
        with pytest.raises(ValueError):
            snr_to_sigma(float("inf"))
        with pytest.raises(ValueError):
            snr_to_sigma(1.0, convention="ebn0")
        with pytest.raises(ValueError):
            snr_to_sigma(1.0, convention="db")


class TestConfig:
    def test_increasing(self):
        with pytest.raises(ValueError):
            SimConfig((1.0, 1.0))
        with pytest.raises(ValueError):
            SimConfig((2.0, 1.0))

    def test_min_errors(self):
        with pytest.raises(ValueError):
            SimConfig((1.0,), min_frame_errors=0)

    def test_mode(self):
        with pytest.raises(ValueError):
            SimConfig((1.0,), decoder_mode="window")

    def test_defaults(self):
        cfg = SimConfig([1, 2])
        assert cfg.snr_db_points == (1.0, 2.0)
        assert cfg.min_frame_errors == 50 and cfg.max_bp_iters == 50


class TestBerPoint:
    def test_rates(self):
        p = BerPoint(5.0, bit_errors=10, frame_errors=2, frames=4, block_len=100, bit_errors_sq=100)
        assert p.ber == 10 / 400 and p.fer == 0.5
        assert 0 <= p.ber <= 1

    def test_invalid(self):
        with pytest.raises(ValueError):
            BerPoint(5.0, 1, 5, 4, 10)

    def test_stderr(self):
        # per-frame error counts 0, 0, 4, 6
        p = BerPoint(1.0, 10, 2, 4, 10, bit_errors_sq=16 + 36)
        per = np.array([0, 0, 4, 6]) / 10
        assert p.ber_stderr == pytest.approx(per.std(ddof=1) / 2)


class TestDecoder:
    def test_all_zero_is_codeword(self):
        for name in ("sc1", "sc4", "lc1"):
            h = get_preset(name).lifted().h
            assert not (h @ np.zeros(h.shape[1], dtype=np.int32)).any()

    def test_noiseless(self, lc2):
        dec = SumProductDecoder(lc2.h)
        bits, ok, iters = dec.decode(np.full(lc2.shape[1], 30.0))
        assert ok and iters == 1 and not bits.any()

    def test_single_weak_flip_corrected(self):
        code = ab_lift(np.ones((3, 7)), 7)
        llr = np.full(code.shape[1], 4.0)
        llr[10] = -0.5
        bits, ok = bp_decode(code, llr)
        assert ok and not bits.any()

    def test_zero_llr(self, lc2):
        bits, ok = bp_decode(lc2, np.zeros(lc2.shape[1]), max_iters=20)
        assert not ok
        assert (lc2.h @ bits.astype(int) % 2).any()

    def test_dimension_mismatch(self, lc2):
        with pytest.raises(ValueError):
            bp_decode(lc2, np.ones(5))

    def test_batch_matches_single(self, lc2, rng):
        dec = SumProductDecoder(lc2.h)
        llr = 2 * (1 + 0.7 * rng.standard_normal((lc2.shape[1], 16))) / 0.49
        bits, ok, _ = dec.decode(llr, 30)
        for f in range(16):
            b1, ok1, _ = dec.decode(llr[:, f], 30)
            assert np.array_equal(b1, bits[:, f]) and ok1 == ok[f]

    def test_converged_output_satisfies_checks(self, lc2, rng):
        dec = SumProductDecoder(lc2.h)
        llr = 2 * (1 + 0.6 * rng.standard_normal((lc2.shape[1], 64))) / 0.36
        bits, ok, _ = dec.decode(llr, 50)
        assert not dec.syndrome(bits[:, ok]).any()

    def test_accepts_plain_sparse(self):
        h = sp.csr_matrix(np.array([[1, 1, 0], [0, 1, 1]]))
        bits, ok = bp_decode(h, np.array([2.0, -0.1, 3.0]))
        assert ok and not bits.any()


class TestSimulate:
    def test_noiseless_limit(self, tiny):
        pts = simulate_ber(tiny, SimConfig((40.0,), max_frames=300, chunk_frames=64))
        assert pts[0].ber == 0 and pts[0].frames == 300

    def test_stops_at_frame_errors(self, lc2):
        cfg = SimConfig((0.0,), max_frames=10_000, min_frame_errors=20, chunk_frames=32)
        p = simulate_ber(lc2, cfg)[0]
        assert p.frame_errors >= 20 and p.frames < 10_000 and p.frames % 32 == 0

    def test_deterministic(self, lc2):
        cfg = SimConfig((2.0, 3.0), max_frames=400, min_frame_errors=10_000, rng_seed=7, chunk_frames=50)
        assert simulate_ber(lc2, cfg) == simulate_ber(lc2, cfg)

    def test_seed_matters(self, lc2):
        a = SimConfig((2.0,), max_frames=400, min_frame_errors=10_000, rng_seed=1)
        b = SimConfig((2.0,), max_frames=400, min_frame_errors=10_000, rng_seed=2)
        assert simulate_ber(lc2, a)[0].bit_errors != simulate_ber(lc2, b)[0].bit_errors

    def test_workers_agree(self, lc2):
        base = dict(snr_db_points=(2.5,), max_frames=600, min_frame_errors=30, rng_seed=3, chunk_frames=40)
        serial = simulate_ber(lc2, SimConfig(**base, workers=1))
        parallel = simulate_ber(lc2, SimConfig(**base, workers=2))
        assert serial == parallel

    def test_chunking_does_not_change_counts(self, lc2):
        base = dict(snr_db_points=(2.5,), max_frames=300, min_frame_errors=10_000, rng_seed=3)
        a = simulate_ber(lc2, SimConfig(**base, chunk_frames=300))[0]
        b = simulate_ber(lc2, SimConfig(**base, chunk_frames=7))[0]
        assert (a.bit_errors, a.frame_errors) == (b.bit_errors, b.frame_errors)

    def test_monotone_in_snr(self, lc2):
        cfg = SimConfig((1.0, 2.0, 3.0, 4.0), max_frames=3000, min_frame_errors=100, rng_seed=11)
        pts = simulate_ber(lc2, cfg)
        for a, b in zip(pts, pts[1:]):
            assert b.ber <= a.ber + 3 * math.hypot(a.ber_stderr, b.ber_stderr)

    def test_local_mode_uses_subblock(self):
        code = get_preset("sc4").lifted()
        h = decode_matrix(code, "local", 2)
        assert h.shape == (39, 169)
        p = simulate_ber(code, SimConfig((3.0,), max_frames=64, decoder_mode="local", subblock_index=2))[0]
        assert p.block_len == 169 and p.mode == "local"

    def test_local_mode_needs_geometry(self):
        with pytest.raises(ValueError):
            decode_matrix(sp.eye(4, format="csr"), "local")
