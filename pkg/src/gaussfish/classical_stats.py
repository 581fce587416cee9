"""Classical estimation baselines: Fisher information, CRLB, MLE checks.

Small self-contained models used to demonstrate the classical Cramer-Rao
machinery that the quantum bounds generalize.  Each model exposes

    params            current parameter vector
    fim(n)            Fisher information matrix of n iid observations
    sample(n, rng)    n iid draws
    score(samples)    total score vector of a dataset at the current params
    mle(samples)      the maximum-likelihood estimate (static)

The CRLB is attained with equality at finite n iff the score factorizes as
score(X) = F_n (estimator(X) - theta); attainment_check tests that identity
on explicit datasets.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import numkit


@dataclass
class Bernoulli:
    """Coin with success probability theta in (0, 1): FI = 1/(theta(1-theta))."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly between 0 and 1")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.theta])

    def fim(self, n: int = 1) -> np.ndarray:
        return np.array([[n / (self.theta * (1.0 - self.theta))]])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(int(n)) < self.theta).astype(float)

    def score(self, samples) -> np.ndarray:
        x = np.asarray(samples, dtype=float)
        return np.array([np.sum(x - self.theta) / (self.theta * (1.0 - self.theta))])

    @staticmethod
    def mle(samples) -> np.ndarray:
        return np.array([float(np.mean(samples))])


@dataclass
class NormalMean:
    """Normal with known variance; only the mean is estimated."""

    mu: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.mu])

    def fim(self, n: int = 1) -> np.ndarray:
        return np.array([[n / self.sigma2]])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mu, np.sqrt(self.sigma2), size=int(n))

    def score(self, samples) -> np.ndarray:
        x = np.asarray(samples, dtype=float)
        return np.array([np.sum(x - self.mu) / self.sigma2])

    @staticmethod
    def mle(samples) -> np.ndarray:
        return np.array([float(np.mean(samples))])


@dataclass
class Normal:
    """Normal with unknown mean and variance, params (mu, sigma2).

    FIM of n observations is diag(n/sigma2, n/(2 sigma2^2)).  The MLE is the
    sample mean and the biased (1/n) variance: the mean attains the CRLB at
    every n, the variance component does not (its score involves (x - mu)^2
    around the true mean, not the sample mean).
    """

    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.mu, self.sigma2])

    def fim(self, n: int = 1) -> np.ndarray:
        return np.diag([n / self.sigma2, n / (2.0 * self.sigma2**2)])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mu, np.sqrt(self.sigma2), size=int(n))

    def score(self, samples) -> np.ndarray:
        x = np.asarray(samples, dtype=float)
        d = x - self.mu
        return np.array(
            [
                np.sum(d) / self.sigma2,
                np.sum(d**2 - self.sigma2) / (2.0 * self.sigma2**2),
            ]
        )

    @staticmethod
    def mle(samples) -> np.ndarray:
        x = np.asarray(samples, dtype=float)
        return np.array([float(np.mean(x)), float(np.var(x))])  # biased 1/n variance


@dataclass
class CustomScalar:
    """User-supplied scalar model; the MLE is found by Newton on the score."""

    score_fn: Callable[[np.ndarray, float], float]
    dscore_fn: Callable[[np.ndarray, float], float]
    fim_fn: Callable[[float], float]
    theta: float = 0.0
    sampler: Optional[Callable[[int, np.random.Generator, float], np.ndarray]] = None

    @property
    def params(self) -> np.ndarray:
        return np.array([self.theta])

    def fim(self, n: int = 1) -> np.ndarray:
        return np.array([[n * self.fim_fn(self.theta)]])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.sampler is None:
            raise ValueError("no sampler supplied")
        return self.sampler(int(n), rng, self.theta)

    def score(self, samples) -> np.ndarray:
        return np.array([self.score_fn(np.asarray(samples, dtype=float), self.theta)])

    def mle(self, samples, x0: Optional[float] = None, tol: float = 1e-10, max_iter: int = 100):
        x = np.asarray(samples, dtype=float)
        th = self.theta if x0 is None else float(x0)
        for _ in range(max_iter):
            g = self.score_fn(x, th)
            h = self.dscore_fn(x, th)
            if h == 0:
                raise RuntimeError("flat score derivative in Newton iteration")
            step = g / h
            th -= step
            if abs(step) < tol:
                return np.array([th])
        raise RuntimeError("Newton iteration did not converge")


def cfi(model, n: int = 1) -> np.ndarray:
    """Fisher information matrix of n iid observations."""
    return model.fim(n)


def crlb(fim) -> np.ndarray:
    """Cramer-Rao lower bound (inverse FIM); warns on singular directions."""
    fim = np.asarray(fim, dtype=float)
    s = np.linalg.svd(fim, compute_uv=False)
    if s.size and s[-1] <= 1e-12 * max(1.0, s[0]):
        warnings.warn("information matrix is singular; bound holds only on its range")
    return numkit.pinv(fim)


def unbiased_variance(samples) -> float:
    """Sample variance with the 1/(n-1) normalization."""
    return float(np.var(np.asarray(samples, dtype=float), ddof=1))


def attainment_check(model, estimator, sample_sets: Sequence) -> tuple:
    """Does score(X) = F_n (estimator(X) - theta) hold on the given datasets?

    Returns (attained, max_residual); the identity holding for all datasets is
    equivalent to the estimator attaining the CRLB with equality at finite n.
    """
    max_resid = 0.0
    for x in sample_sets:
        x = np.asarray(x, dtype=float)
        F = model.fim(x.size)
        resid = model.score(x) - F @ (np.atleast_1d(estimator(x)) - model.params)
        max_resid = max(max_resid, float(np.max(np.abs(resid))))
    return max_resid <= 1e-8, max_resid


def mle_variance_study(model, n: int, reps: int, seed: int) -> dict:
    """Empirical MLE variance over reps repetitions against the CRLB.

    Returns the per-component empirical variance (ddof=1 across repetitions),
    the CRLB diagonal at sample size n, and their ratio.
    """
    rng = np.random.default_rng(seed)
    ests = np.array([model.mle(model.sample(n, rng)) for _ in range(reps)])
    bound = np.diag(crlb(model.fim(n)))
    emp = np.var(ests, axis=0, ddof=1)
    return {
        "estimates": ests,
        "empirical_var": emp,
        "crlb": bound,
        "ratio": emp / bound,
    }
