import itertools
import math

import numpy as np
import pytest

from gaussfish.classical_stats import (
    Bernoulli,
    CustomScalar,
    Normal,
    NormalMean,
    attainment_check,
    cfi,
    crlb,
    mle_variance_study,
    unbiased_variance,
)


def test_bernoulli_information_and_bound():
    model = Bernoulli(0.3)
    assert cfi(model)[0, 0] == pytest.approx(1.0 / (0.3 * 0.7))
    bound = crlb(model.fim(100))
    assert bound[0, 0] == pytest.approx(2.1e-3)


def test_bernoulli_validation_and_mle():
    with pytest.raises(ValueError):
        Bernoulli(0.0)
    with pytest.raises(ValueError):
        Bernoulli(1.2)
    assert Bernoulli.mle([1, 1, 0, 1])[0] == pytest.approx(0.75)
    # boundary estimate is allowed even though the model parameter is interior
    assert Bernoulli.mle([1, 1, 1])[0] == pytest.approx(1.0)


def test_normal_mean_fim():
    model = NormalMean(0.0, 4.0)
    assert model.fim(10)[0, 0] == pytest.approx(2.5)
    with pytest.raises(ValueError):
        NormalMean(0.0, 0.0)


def test_normal_fim_and_mle():
    model = Normal(1.2, 2.0)
    assert np.allclose(model.fim(5), np.diag([2.5, 5 / 8.0]))
    est = Normal.mle([0.0, 2.0])
    assert np.allclose(est, [1.0, 1.0])  # biased 1/n variance
    assert unbiased_variance([0.0, 2.0]) == pytest.approx(2.0)


def test_score_vanishes_at_mle():
    x = np.array([0.3, 1.7, -0.4, 2.2, 0.9])
    mu, s2 = Normal.mle(x)
    model = Normal(mu, s2)
    assert np.allclose(model.score(x), 0.0, atol=1e-10)


def test_crlb_warns_on_singular_information():
    with pytest.warns(UserWarning, match="singular"):
        crlb(np.diag([1.0, 0.0]))


def test_bernoulli_mean_attains_exactly():
    model = Bernoulli(0.3)
    sets = [np.array(bits, dtype=float) for bits in itertools.product([0, 1], repeat=6)]
    attained, resid = attainment_check(model, Bernoulli.mle, sets)
    assert attained
    assert resid < 1e-12


def test_normal_known_variance_mean_attains():
    rng = np.random.default_rng(3)
    model = NormalMean(0.7, 2.5)
    sets = [model.sample(40, rng) for _ in range(25)]
    attained, _ = attainment_check(model, NormalMean.mle, sets)
    assert attained


def test_normal_two_parameter_mle_does_not_attain():
    rng = np.random.default_rng(4)
    model = Normal(0.7, 2.5)
    sets = [model.sample(40, rng) for _ in range(25)]
    attained, resid = attainment_check(model, Normal.mle, sets)
    assert not attained
    assert resid > 1e-3


def test_custom_scalar_newton_recovers_mean():
    model = CustomScalar(
        score_fn=lambda x, th: float(np.sum(x - th) / 2.0),
        dscore_fn=lambda x, th: -x.size / 2.0,
        fim_fn=lambda th: 0.5,
        theta=0.0,
    )
    est = model.mle(np.array([1.0, 2.0, 6.0]))
    assert est[0] == pytest.approx(3.0, abs=1e-9)
    assert model.fim(4)[0, 0] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        model.sample(3, np.random.default_rng(0))


def test_mle_variance_study_structure():
    out = mle_variance_study(Bernoulli(0.4), 2000, 50, seed=9)
    assert out["estimates"].shape == (50, 1)
    assert out["crlb"][0] == pytest.approx(0.4 * 0.6 / 2000)
    assert abs(out["ratio"][0] - 1.0) < 0.6  # loose: 50 repetitions only


def test_score_moments_match_information():
    # MC check of E[score] = 0 and Var[score] = n F on a modest sample
    rng = np.random.default_rng(21)
    model = Bernoulli(0.35)
    n = 50
    scores = np.array([model.score(model.sample(n, rng))[0] for _ in range(4000)])
    F = model.fim(n)[0, 0]
    assert abs(scores.mean()) < 3 * math.sqrt(F / 4000)
    assert abs(scores.var(ddof=1) - F) < 3 * F * math.sqrt(2.0 / 3999)
