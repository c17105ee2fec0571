import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cachenet.errors import DecodeFailure, DegenerateChannel
from cachenet.model import distinct_demand
from cachenet.phy import (
    beamforming_plan,
    derived_rng,
    sample_channel,
    simulate_block,
    simulate_schedule,
    zf_vector,
    zf_vectors,
)
from cachenet.scheduler import Block, build_schedule

from oracles import null_vector, worked_step1


def _proportional(u, v, tol=1e-12):
    """u = c*v for some complex c."""
    c = np.vdot(v, u) / np.vdot(v, v)
    return np.linalg.norm(u - c * v) <= tol * np.linalg.norm(u)


def test_rng_streams():
    a = derived_rng(5, "channel").random(4)
    assert np.array_equal(a, derived_rng(5, "channel").random(4))
    assert not np.array_equal(a, derived_rng(5, "symbols").random(4))
    assert not np.array_equal(a, derived_rng(6, "channel").random(4))


def test_channel_statistics(worked):
    cfg = worked[0]
    h = np.concatenate([sample_channel(cfg, s).h.ravel() for s in range(625)])
    assert h.size == 10_000
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) <= 0.05
    assert abs(np.mean(h)) <= 0.05
    assert np.array_equal(sample_channel(cfg, 3).h, sample_channel(cfg, 3).h)


def test_step1_precoders_match_worked_example(worked):
    h = sample_channel(worked[0], 11).h
    written = {                     # coefficients from the worked example
        ((0, 2), (3,)): [h[3, 2], -h[3, 0]],
        ((1, 2), (0,)): [-h[0, 2], h[0, 1]],
        ((1, 3), (2,)): [h[2, 3], -h[2, 1]],
        ((0, 3), (1,)): [-h[1, 3], h[1, 0]],
    }
    for (T, Z), coeffs in written.items():
        assert _proportional(zf_vector(h, T, Z), np.array(coeffs))


def test_step1_received_gains(worked):
    h = sample_channel(worked[0], 12).h
    desired = {
        0: ((0, 2), (3,), h[3, 2] * h[0, 0] - h[3, 0] * h[0, 2]),
        1: ((1, 3), (2,), h[2, 3] * h[1, 1] - h[2, 1] * h[1, 3]),
        2: ((1, 2), (0,), h[0, 1] * h[2, 2] - h[0, 2] * h[2, 1]),
        3: ((0, 3), (1,), h[1, 0] * h[3, 3] - h[1, 3] * h[3, 0]),
    }
    for rx, (T, Z, expr) in desired.items():
        alpha = zf_vector(h, T, Z)
        norm = np.linalg.norm([h[Z[0], T[1]], h[Z[0], T[0]]])
        assert abs(abs(h[rx, list(T)] @ alpha) - abs(expr) / norm) <= 1e-12


def test_step1_block_decodes(worked):
    cfg = worked[0]
    for seed in range(20):
        res = simulate_block(sample_channel(cfg, seed), worked_step1(), rng=derived_rng(seed, "symbols"))
        assert max(r.residual for r in res) <= 1e-9
        assert max(r.error for r in res) <= 1e-9


def test_single_transmitter():
    assert np.array_equal(zf_vector(np.eye(3), [1], []), [1])
    assert zf_vectors(np.eye(3), np.array([[0], [2]]), np.zeros((2, 0), int)).shape == (2, 1)


def test_zf_argument_errors():
    with pytest.raises(ValueError):
        zf_vector(np.eye(3), [0, 1], [])
    h = np.ones((3, 3), dtype=complex)
    with pytest.raises(DegenerateChannel):
        zf_vector(h, [0, 1, 2], [0, 1])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.integers(2, 6))
def test_zf_matches_svd_null_space(seed, t):
    rng = np.random.default_rng(seed)
    h = (rng.standard_normal((t + 2, t + 1)) + 1j * rng.standard_normal((t + 2, t + 1))) / np.sqrt(2)
    T = sorted(rng.choice(t + 1, t, replace=False))
    Z = sorted(rng.choice(t + 2, t - 1, replace=False))
    alpha = zf_vector(h, T, Z)
    sub = h[np.ix_(Z, T)]
    assert np.linalg.norm(sub @ alpha) <= 1e-12
    assert abs(np.linalg.norm(alpha) - 1) <= 1e-12
    assert _proportional(alpha, null_vector(sub), tol=1e-9)
    batched = zf_vectors(h, np.array([T, T]), np.array([Z, Z]))
    assert np.allclose(batched[0], alpha, atol=1e-14)


def test_plan_nulls_every_target(cfg_2232):
    cfg, dims, pm = cfg_2232
    s = build_schedule(cfg, dims, pm, distinct_demand(cfg))
    h = sample_channel(cfg, 1).h
    for b in s.blocks[:10]:
        for beam in beamforming_plan(h, b):
            assert np.linalg.norm(h[np.ix_(beam.zf_targets, beam.transmitters)] @ beam.alpha) <= 1e-12


def test_schedule_simulation(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    rep = simulate_schedule(cfg, s, sample_channel(cfg, 0))
    assert rep.passed and rep.dof == 4
    assert len(rep.decodes) == 32
    assert rep.max_residual <= 1e-9 and rep.max_error <= 1e-9


def test_without_cache_cancellation_interference_remains(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    h = sample_channel(cfg, 4)
    res = simulate_block(h, s.blocks[0], cancel_cache=False)
    assert min(r.residual for r in res) > 1e-3
    with pytest.raises(DecodeFailure):
        simulate_block(h, s.blocks[0], cancel_cache=False, strict=True)


def test_broken_precoder_is_caught(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    b = s.blocks[0]
    # Null the wrong receiver: the intended target now hears the packet.
    a0 = b.assignments[0]
    wrong = tuple(m for m in b.members if m not in a0.zf_targets and m != a0.receiver)[:1]
    bad = Block(b.members, (a0._replace(zf_targets=wrong),) + b.assignments[1:])
    with pytest.raises(DecodeFailure) as err:
        simulate_block(sample_channel(cfg, 0), bad)
    assert err.value.failures


def test_noise_monotone(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    h = sample_channel(cfg, 2)
    errs = [simulate_schedule(cfg, s, h, noise_power=p, trials=200, seed=2).mean_error
            for p in (0.01, 1.0)]
    assert 0 < errs[0] < errs[1]


def test_min_gain_over_seeds(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    assert min(simulate_schedule(cfg, s, sample_channel(cfg, k), seed=k).min_gain
               for k in range(100)) > 1e-9


def test_power_constraint(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    h = sample_channel(cfg, 5)
    g1 = simulate_schedule(cfg, s, h, power=1.0).min_gain
    g4 = simulate_schedule(cfg, s, h, power=4.0).min_gain
    assert g4 == pytest.approx(2 * g1)


def test_channel_shape_checked(worked):
    cfg, dims, pm = worked
    s = build_schedule(cfg, dims, pm, (0, 1, 2, 3))
    with pytest.raises(ValueError):
        simulate_schedule(cfg, s, np.ones((3, 4)))


def test_simulation_deterministic(cfg_2232):
    cfg, dims, pm = cfg_2232
    s = build_schedule(cfg, dims, pm, distinct_demand(cfg))
    a = simulate_schedule(cfg, s, sample_channel(cfg, 9), noise_power=0.1, trials=3, seed=9)
    b = simulate_schedule(cfg, s, sample_channel(cfg, 9), noise_power=0.1, trials=3, seed=9)
    assert a.decodes == b.decodes
