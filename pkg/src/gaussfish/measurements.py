"""Gaussian measurements: general-dyne outcome statistics and classical FI.

A measurement assigns one MeasureMode per mode.  General-dyne modes project
onto Gaussian states with measurement covariance

    V_m = R_phi diag(s, 1/s) R_phi^T      (rotation R_phi)

heterodyne is s = 1 (V_m = I), and ideal homodyne is the s -> 0 limit, which
records a single quadrature with no added noise.  Outcomes are Gaussian with

    mu = selected components of d,   Sigma = (A + V_m) / 2

where A is the corresponding submatrix of V; a homodyne row contributes the
scalar A/2.  Detector inefficiency modeled as loss before an ideal detector
dresses V_m -> e^{gamma t} V_m + (e^{gamma t} - 1) I (homodyne scalars gain
e^{gamma t} - 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .gaussian_core import GaussianState, SymplecticOp, apply, beam_splitter_5050, rotation
from .qfi_gaussian import GaussianModel

_KINDS = ("general", "heterodyne", "homodyne_q", "homodyne_p")


@dataclass(frozen=True)
class MeasureMode:
    """Detection on one mode: general | heterodyne | homodyne_q | homodyne_p."""

    kind: str
    s: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError("unknown measurement kind %r" % (self.kind,))
        if self.kind == "general" and not self.s > 0:
            raise ValueError("squeezing parameter s must be positive")


@dataclass(frozen=True)
class GeneralDyne:
    """A tuple of per-mode measurements applied jointly."""

    modes: Tuple[MeasureMode, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("measurement needs at least one mode")

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def outcome_dim(self) -> int:
        return sum(1 if m.kind.startswith("homodyne") else 2 for m in self.modes)


def measurement_cov(mode: MeasureMode) -> np.ndarray:
    """2x2 measurement covariance of a finite general-dyne mode."""
    if mode.kind == "heterodyne":
        return np.eye(2)
    if mode.kind == "general":
        R = rotation(mode.phi).S
        return R @ np.diag([mode.s, 1.0 / mode.s]) @ R.T
    raise ValueError("homodyne is the s -> 0 limit and has no finite covariance")


def dress_inefficient(m_cov: np.ndarray, gamma: float, t: float) -> np.ndarray:
    """Measurement covariance of a lossy detector (loss gamma for time t)."""
    if gamma < 0 or t < 0:
        raise ValueError("gamma and t must be nonnegative")
    f = float(np.exp(gamma * t))
    m_cov = np.asarray(m_cov, dtype=float)
    return f * m_cov + (f - 1.0) * np.eye(m_cov.shape[0])


def _assemble(measurement: GeneralDyne, modes: int, dressing=None):
    """Selected phase-space rows and the stacked measurement covariance."""
    if measurement.n_modes != modes:
        raise ValueError(
            "measurement covers %d modes, state has %d" % (measurement.n_modes, modes)
        )
    factor = 1.0
    if dressing is not None:
        gamma, t = dressing
        if gamma < 0 or t < 0:
            raise ValueError("gamma and t must be nonnegative")
        factor = float(np.exp(gamma * t))
    rows = []
    blocks = []
    for i, m in enumerate(measurement.modes):
        if m.kind == "homodyne_q":
            rows.append(2 * i)
            blocks.append(np.array([[factor - 1.0]]))
        elif m.kind == "homodyne_p":
            rows.append(2 * i + 1)
            blocks.append(np.array([[factor - 1.0]]))
        else:
            rows.extend((2 * i, 2 * i + 1))
            vm = measurement_cov(m)
            blocks.append(factor * vm + (factor - 1.0) * np.eye(2))
    k = len(rows)
    Vm = np.zeros((k, k))
    at = 0
    for b in blocks:
        n = b.shape[0]
        Vm[at : at + n, at : at + n] = b
        at += n
    return np.asarray(rows, dtype=int), Vm


def outcome_mean_cov(state: GaussianState, measurement: GeneralDyne, dressing=None):
    """Mean and covariance of the outcome distribution."""
    rows, Vm = _assemble(measurement, state.modes, dressing)
    mu = state.d[rows]
    Sigma = 0.5 * (state.V[np.ix_(rows, rows)] + Vm)
    return mu, Sigma


def outcome_density(state: GaussianState, measurement: GeneralDyne, x, dressing=None) -> float:
    """Outcome probability density at the point x."""
    mu, Sigma = outcome_mean_cov(state, measurement, dressing)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != mu.size:
        raise ValueError("outcome has dimension %d, expected %d" % (x.size, mu.size))
    delta = x - mu
    k = mu.size
    norm = np.sqrt((2.0 * np.pi) ** k * np.linalg.det(Sigma))
    return float(np.exp(-0.5 * delta @ np.linalg.solve(Sigma, delta)) / norm)


def sample_outcomes(
    state: GaussianState,
    measurement: GeneralDyne,
    n: int,
    rng: np.random.Generator,
    dressing=None,
) -> np.ndarray:
    """Draw n outcome vectors, shape (n, outcome_dim)."""
    mu, Sigma = outcome_mean_cov(state, measurement, dressing)
    return rng.multivariate_normal(mu, Sigma, size=int(n))


def cfim_gaussian_outcomes(
    model: GaussianModel,
    measurement: GeneralDyne,
    theta,
    pre_op: Optional[SymplecticOp] = None,
    dressing=None,
) -> np.ndarray:
    """Classical Fisher information matrix of the outcome distribution.

    F = dmu^T Sigma^{-1} dmu + Tr[Sigma^{-1} dSigma Sigma^{-1} dSigma] / 2,
    with an optional symplectic pre_op applied between the model state and
    the detectors (its shift drops out of the derivatives).
    """
    st = model.state(theta)
    dds, dVs = model.derivatives(theta)
    if pre_op is not None:
        S = pre_op.S
        st = apply(pre_op, st)
        dds = [S @ dd for dd in dds]
        dVs = [S @ dV @ S.T for dV in dVs]
    rows, Vm = _assemble(measurement, st.modes, dressing)
    Sigma = 0.5 * (st.V[np.ix_(rows, rows)] + Vm)
    Sinv = np.linalg.inv(Sigma)
    dmus = [dd[rows] for dd in dds]
    dSigs = [0.5 * dV[np.ix_(rows, rows)] for dV in dVs]
    m = model.n_params
    F = np.zeros((m, m))
    for j in range(m):
        for k in range(j, m):
            val = float(dmus[j] @ Sinv @ dmus[k])
            val += 0.5 * float(np.trace(Sinv @ dSigs[j] @ Sinv @ dSigs[k]))
            F[j, k] = val
            F[k, j] = val
    return F


def epr_readout() -> Tuple[SymplecticOp, GeneralDyne]:
    """Balanced beam splitter followed by Q homodyne on one output, P on the other.

    On a two-mode squeezed input with the right phase, both recorded
    quadratures are squeezed combinations, which is what makes this readout
    competitive for joint displacement sensing.
    """
    gd = GeneralDyne((MeasureMode("homodyne_q"), MeasureMode("homodyne_p")))
    return beam_splitter_5050(), gd
