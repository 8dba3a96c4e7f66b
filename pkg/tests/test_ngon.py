import math

import numpy as np
import pytest

from qutrit_kcbs.ngon import (
    NgonConfig, Order, SequenceMode, build_frame, compatibility_angle, pair_sequence,
    pulse_count, pulse_decomposition, transition_pulses, transition_unitary,
)
from qutrit_kcbs.qutrit import basis, compose as _compose, equal_up_to_phase, fidelity
from conftest import TABLE_S2_N, THETA5


def test_compatibility_angle_pentagon():
    assert compatibility_angle(5) == pytest.approx(math.acos(5 ** -0.25), abs=1e-15)
    assert math.degrees(compatibility_angle(5)) == pytest.approx(48.03, abs=0.01)


def test_compatibility_angle_limit_monotone():
    vals = [compatibility_angle(N) for N in range(5, 123, 2)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > math.pi / 4
    assert vals[-1] - math.pi / 4 < 1e-3


@pytest.mark.parametrize("bad", [3, 4, 6, 1, -5, 5.5, True])
def test_invalid_n(bad):
    with pytest.raises(ValueError):
        compatibility_angle(bad)


def test_config_validation():
    with pytest.raises(ValueError):
        NgonConfig(5, -0.01)
    with pytest.raises(ValueError):
        NgonConfig(5, math.pi / 2 + 0.01)
    assert NgonConfig(5, 0.1, "concatenated").mode is SequenceMode.CONCATENATED
    with pytest.raises(IndexError):
        NgonConfig(5, 0.1).check_index(6)


def test_index_wrapping_and_pairs():
    c = NgonConfig(5, 0.1)
    assert c.wrap(0) == 5 and c.wrap(6) == 1
    assert c.pairs(Order.NORMAL)[-1] == (5, 1)
    assert c.pairs(Order.REVERSE)[0] == (1, 5)
    assert [c.exponent(i) for i in range(1, 6)] == [0, 2, 4, 6, 8]


def test_theta_zero_all_states_ground():
    frame = build_frame(NgonConfig(5, 0.0))
    for s in frame.states:
        assert fidelity(s, basis(0)) == pytest.approx(1.0, abs=1e-15)


def test_pentagon_orthogonality_and_symmetry():
    frame = build_frame(NgonConfig.compatible(5))
    assert frame.overlaps(1).max() < 1e-12
    pops = [abs(s[0]) ** 2 for s in frame.states]
    assert np.allclose(pops, 1 / math.sqrt(5), atol=1e-12)


def test_n7_orthogonality_oracle():
    assert build_frame(NgonConfig(7, compatibility_angle(7))).overlaps(1).max() < 1e-10


def test_orthogonality_all_odd_n():
    for N in range(5, 123, 2):
        f = build_frame(NgonConfig.compatible(N))
        assert max(f.overlaps(1).max(), f.overlaps(-1).max()) < 1e-10, N


def test_cyclic_symmetry():
    for N in range(5, 33, 2):
        f = build_frame(NgonConfig(N, 0.61))
        for k in range(N):
            ov = f.overlaps(k)
            assert np.ptp(ov) < 1e-12, (N, k)


def test_first_decomposition_is_ry():
    for N in (5, 11, 121):
        c = NgonConfig(N, 0.7)
        seq = pulse_decomposition(c, 1)
        assert seq[2].repeat == 0
        assert equal_up_to_phase(_compose(seq), build_frame(c).unitary(1))


def test_pulse_matches_direct_pentagon_u3():
    c = NgonConfig.compatible(5)
    u = _compose(pulse_decomposition(c, 3))
    assert fidelity(u @ basis(0), build_frame(c).state(3)) > 1 - 1e-10


def test_pulse_matches_direct_random(rng):
    for _ in range(100):
        N = int(rng.choice(np.arange(5, 123, 2)))
        i = int(rng.integers(1, N + 1))
        c = NgonConfig(N, float(rng.uniform(0, math.pi / 2)))
        u_p = _compose(pulse_decomposition(c, i))
        u_d = build_frame(c).unitary(i)
        for k in range(3):
            assert fidelity(u_p @ basis(k), u_d @ basis(k)) > 1 - 1e-10


def _mean_block_sequence_pulses(N):
    c = NgonConfig.compatible(N)
    counts = [pulse_count(sum(pair_sequence(c, i, j), [])) for i, j in c.pairs(Order.NORMAL)]
    return sum(counts) / N


def test_block_pulse_count_grows_quadratically():
    # Per measured pair the sequence length grows as N^2, so a full N-pair
    # run grows as N^3 with unreduced R_z exponents.
    x = {N: _mean_block_sequence_pulses(N) for N in (21, 41, 81)}
    assert x[41] / x[21] == pytest.approx((41 / 21) ** 2, rel=0.1)
    assert x[81] / x[41] == pytest.approx((81 / 41) ** 2, rel=0.05)


def test_pentagon_pulses_per_unitary():
    c = NgonConfig.compatible(5)
    assert [pulse_count(pulse_decomposition(c, i)) for i in range(1, 6)] == [2 * i + 1 for i in range(1, 6)]


@pytest.mark.parametrize("mode", list(SequenceMode))
def test_transition_identity_for_same_index(mode):
    c = NgonConfig(7, 0.5, mode)
    for i in range(1, 8):
        assert equal_up_to_phase(transition_unitary(c, i, i), np.eye(3))


def test_transition_modes_agree():
    for N in (5, 7, 11, 31):
        for theta in (0.2, compatibility_angle(N), 1.3):
            b, cc = NgonConfig(N, theta), NgonConfig(N, theta, SequenceMode.CONCATENATED)
            frame = build_frame(b)
            for i, j in b.pairs(Order.NORMAL) + b.pairs(Order.REVERSE):
                lit = frame.unitary(j).conj().T @ frame.unitary(i)
                assert equal_up_to_phase(transition_unitary(b, i, j), lit)
                assert equal_up_to_phase(transition_unitary(cc, i, j), lit)


def test_pentagon_32_modes_act_alike_on_ground():
    b, c = NgonConfig(5, THETA5), NgonConfig(5, THETA5, SequenceMode.CONCATENATED)
    f = fidelity(transition_unitary(b, 3, 2) @ basis(0), transition_unitary(c, 3, 2) @ basis(0))
    assert f > 1 - 1e-10


def test_concatenated_shorter_for_n_ge_7():
    for N in (7, 11, 31, 121):
        b, c = NgonConfig(N, 0.8), NgonConfig(N, 0.8, SequenceMode.CONCATENATED)
        for order in Order:
            for i, j in b.pairs(order):
                assert pulse_count(transition_pulses(c, i, j)) < pulse_count(transition_pulses(b, i, j))


def test_pair_sequence_prepares_measurement_frames():
    # After the first segment |0> holds the overlap with psi_i; the second
    # segment maps the frame of M_i onto that of M_j.
    c = NgonConfig(7, 0.9)
    frame = build_frame(c)
    seg1, seg2 = pair_sequence(c, 3, 4)
    assert equal_up_to_phase(_compose(seg1), frame.unitary(3).conj().T)
    assert equal_up_to_phase(_compose(seg2), frame.unitary(4).conj().T @ frame.unitary(3))
