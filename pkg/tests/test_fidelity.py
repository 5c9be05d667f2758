import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psgsbell import oracle as fo
from psgsbell.fidelity import (
    best_approximation,
    fidelity,
    max_fidelity_curve,
    odd_cat_fock,
    optimal_r,
    psgs_fock_coeff,
)
from psgsbell.quasiprob import PurePsgs


def test_unsqueezed_single_photon_coefficients():
    assert psgs_fock_coeff(0.0, 0) == 1.0
    assert all(psgs_fock_coeff(0.0, n) == 0.0 for n in range(1, 6))


def test_coefficients_normalized():
    total = sum(psgs_fock_coeff(-0.313, n) ** 2 for n in range(30))  # levels up to 59
    assert total == pytest.approx(1.0, abs=1e-12)


def test_coefficient_matches_oracle_squeezing():
    st = fo.build_state(PurePsgs(-0.164), 60)
    ket = st.matrix[:, 1] / math.sqrt(st.matrix[1, 1].real)
    assert ket[3].real == pytest.approx(psgs_fock_coeff(-0.164, 1), abs=1e-12)


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        psgs_fock_coeff(0.1, -1)


def test_reported_fidelities():
    assert fidelity(-0.164, 1 / math.sqrt(2)) == pytest.approx(0.9998, abs=5e-4)
    assert fidelity(-0.313, 1.0) == pytest.approx(0.997, abs=1e-3)


def test_small_alpha_limit():
    assert fidelity(0.0, 1e-6) == pytest.approx(1.0, abs=1e-9)


def test_optimal_r_values():
    assert optimal_r(1e-8) == pytest.approx(0.0, abs=1e-6)
    assert optimal_r(1 / math.sqrt(2)) == pytest.approx(-0.164, abs=1e-3)
    assert optimal_r(1.0) <= 0


def test_optimal_r_beats_brute_force_scan():
    a = 0.9
    best = fidelity(optimal_r(a), a)
    rs = np.linspace(-1, 0, 1000)
    assert best >= max(fidelity(r, a) for r in rs) - 1e-15


@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.0, 1.5, 2.3])
def test_optimal_r_is_stationary(alpha):
    r, h = optimal_r(alpha), 1e-5
    deriv = (fidelity(r + h, alpha) - fidelity(r - h, alpha)) / (2 * h)
    assert abs(deriv) < 1e-6


def test_curve_values():
    curve = dict(max_fidelity_curve([0.1, 1.2]))
    assert curve[0.1] > 0.9999
    assert curve[1.2] == pytest.approx(0.99, abs=5e-3)


def test_curve_monotone_decreasing():
    alphas = np.linspace(0.2, 2.0, 91)
    f = np.array([v for _, v in max_fidelity_curve(alphas)])
    assert np.all(np.diff(f) < 0)


def test_best_approximation_fields():
    s = best_approximation(1.0)
    assert s.r_opt == optimal_r(1.0)
    assert s.fidelity == fidelity(s.r_opt, 1.0)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(-0.8, 0.3), alpha=st.floats(0.1, 2.0))
def test_closed_form_equals_fock_overlap(r, alpha):
    cat = odd_cat_fock(alpha, 60)
    psgs = np.zeros(61)
    for n in range(30):
        psgs[2 * n + 1] = psgs_fock_coeff(r, n)
    assert fidelity(r, alpha) == pytest.approx(float(cat @ psgs) ** 2, abs=1e-10)


def test_nonpositive_alpha_rejected():
    with pytest.raises(ValueError):
        fidelity(-0.1, 0.0)
    with pytest.raises(ValueError):
        optimal_r(-1.0)
