"""Closed-form constants against frozen independent oracles.

Oracle values were computed once with scipy.special.gammaln and
scipy.integrate.quad and are frozen here; the package itself never imports
them from scipy.
"""

import math

import pytest

from cheegerlab.special_constants import (
    SobolevParams,
    ball_cheeger,
    beta,
    gamma,
    i_sigma_q,
    log_beta,
    log_gamma,
    sobolev_constant,
    unit_ball_volume,
)

SQRT_PI = 1.7724538509055160273

# scipy.special.gammaln / exp thereof
GAMMA_ORACLE = {
    0.1: 9.51350769866873,
    0.5: SQRT_PI,
    1.0: 1.0,
    1.5: 0.8862269254527580,
    2.0: 1.0,
    3.7: 4.170651783796603,
    5.0: 24.0,
    7.5: 1871.254305797788,
    12.0: 39916800.0,
    50.0: 6.082818640342675e62,
}

# scipy evaluation of the closed-form product
SOBOLEV_ORACLE = {
    (2, 1.2): 4.608673628606793,
    (2, 1.5): 4.0151099784692015,
    (2, 1.8): 1.6933616835506284,
    (3, 2.0): 5.477904089531331,
    (3, 1.5): 7.519884823893005,
    (4, 2.5): 6.5304460327910165,
    (2, 1.001): 3.5679583072382597,
}

# scipy.integrate.quad on the defining integrals, both branches
I_SIGMA_ORACLE = {
    (1.0, 0.9, 1.1): 0.7023834192929911,
    (2.0, 1.2, 1.1): 0.7756410256410252,
    (2.0, 0.8, 1.05): 0.7225446334428944,
    (1.0, 1.0, 1.5): 0.6,  # exact: 1/(2(p-1)/p + 1) = 3/5
    (3.0, 2.5, 1.9): 0.2648262548262549,
}


def test_gamma_oracle_values():
    for t, ref in GAMMA_ORACLE.items():
        assert gamma(t) == pytest.approx(ref, rel=1e-12)


def test_gamma_classical_identities():
    assert abs(gamma(0.5) - math.sqrt(math.pi)) <= 1e-10 * math.sqrt(math.pi)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-13)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)
    # recurrence cross-check, independent of any table
    for t in (0.3, 1.7, 4.2):
        assert gamma(t + 1.0) == pytest.approx(t * gamma(t), rel=1e-12)


def test_log_gamma_consistency():
    for t in (0.2, 1.0, 3.5, 20.0, 80.0):
        assert math.exp(log_gamma(t)) == pytest.approx(gamma(t), rel=1e-12)


def test_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        gamma(0.0)
    with pytest.raises(ValueError):
        gamma(-1.3)
    with pytest.raises(ValueError):
        log_gamma(-0.5)


def test_beta_oracle():
    # scipy: exp(gammaln(2.5)+gammaln(1.5)-gammaln(4.0))
    assert beta(2.5, 1.5) == pytest.approx(0.19634954084936207, rel=1e-12)
    assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-13)
    assert beta(3.0, 4.0) == pytest.approx(beta(4.0, 3.0), rel=1e-13)
    assert math.exp(log_beta(6.0, 2.5)) == pytest.approx(beta(6.0, 2.5), rel=1e-12)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-12)
    assert abs(unit_ball_volume(2) - math.pi) <= 1e-12 * math.pi
    assert abs(unit_ball_volume(3) - 4.0 * math.pi / 3.0) <= 1e-12 * math.pi
    assert unit_ball_volume(4) == pytest.approx(math.pi**2 / 2.0, rel=1e-12)
    with pytest.raises(ValueError):
        unit_ball_volume(0)


def test_sobolev_params_validation():
    with pytest.raises(ValueError):
        SobolevParams(2, 1.0)
    with pytest.raises(ValueError):
        SobolevParams(2, 2.0)
    with pytest.raises(ValueError):
        SobolevParams(1, 0.5)


def test_sobolev_constant_oracle_values():
    for (n_dim, p), ref in SOBOLEV_ORACLE.items():
        assert sobolev_constant(SobolevParams(n_dim, p)) == pytest.approx(
            ref, rel=1e-12
        )


def test_sobolev_constant_limit_approach():
    # the limit is 2*sqrt(pi); the approach is monotone but logarithmically
    # slow, and at p = 1.001 the exact deviation is +0.650 percent
    ref = 2.0 * math.sqrt(math.pi)
    devs = [
        sobolev_constant(SobolevParams(2, p)) / ref - 1.0
        for p in (1.01, 1.001, 1.0001)
    ]
    assert all(d > 0.0 for d in devs)
    assert devs[0] > devs[1] > devs[2]
    assert 0.0060 <= devs[1] <= 0.0070
    assert devs[2] <= 0.005


def test_ball_cheeger():
    assert ball_cheeger(2, radius=1.0) == pytest.approx(2.0, rel=1e-13)
    assert ball_cheeger(3, radius=3.0) == pytest.approx(1.0, rel=1e-13)
    assert ball_cheeger(2, volume=math.pi) == pytest.approx(2.0, rel=1e-12)
    for n_dim in (1, 2, 3, 5):
        for radius in (0.25, 1.0, 7.0):
            assert ball_cheeger(n_dim, radius=radius) * radius == pytest.approx(
                n_dim, rel=1e-12
            )
            vol = unit_ball_volume(n_dim) * radius**n_dim
            assert ball_cheeger(n_dim, volume=vol) == pytest.approx(
                ball_cheeger(n_dim, radius=radius), rel=1e-12
            )


def test_ball_cheeger_validation():
    with pytest.raises(ValueError):
        ball_cheeger(2)
    with pytest.raises(ValueError):
        ball_cheeger(2, radius=1.0, volume=1.0)
    with pytest.raises(ValueError):
        ball_cheeger(2, radius=-1.0)
    with pytest.raises(ValueError):
        ball_cheeger(2, volume=0.0)


def test_i_sigma_q_oracle_values():
    for (sigma, q, p), ref in I_SIGMA_ORACLE.items():
        assert i_sigma_q(sigma, q, p) == pytest.approx(ref, rel=1e-12)


def test_i_sigma_q_branches_and_validation():
    # crossing q = 1 switches branches; both must stay positive and finite
    low = i_sigma_q(2.0, 0.99, 1.2)
    high = i_sigma_q(2.0, 1.01, 1.2)
    assert low > 0.0 and high > 0.0
    assert low == pytest.approx(high, rel=0.05)
    with pytest.raises(ValueError):
        i_sigma_q(0.5, 1.0, 1.5)
