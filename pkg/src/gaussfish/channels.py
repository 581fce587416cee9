"""Single-mode thermal/squeezed reservoir damping, applied mode-by-mode.

Each mode i relaxes toward a stationary covariance block V_inf(i) at rate
gamma_i:

    d(t) = G(t) d(0)
    V(t) = G(t) V(0) G(t) + (1 - e^{-gamma_i t}) V_inf   (per-mode factors)
    G(t) = direct sum of e^{-gamma_i t / 2} I_2

with the stationary block set by the reservoir occupation n_e and squeezing
m_e (complex):

    V_inf = [[2 n_e + 1 + Re m_e, Im m_e], [Im m_e, 2 n_e + 1 - Re m_e]]

Physicality of the reservoir requires |m_e|^2 <= n_e (n_e + 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian_core import GaussianState


@dataclass
class NoisyChannel:
    gamma: np.ndarray
    n_e: np.ndarray
    m_e: np.ndarray

    def __post_init__(self):
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        self.n_e = np.atleast_1d(np.asarray(self.n_e, dtype=float))
        self.m_e = np.atleast_1d(np.asarray(self.m_e, dtype=complex))
        if not (self.gamma.shape == self.n_e.shape == self.m_e.shape):
            raise ValueError("per-mode parameter arrays must have equal length")
        if np.any(self.gamma < 0):
            raise ValueError("damping rates must be >= 0")
        if np.any(self.n_e < 0):
            raise ValueError("reservoir occupations must be >= 0")
        bound = self.n_e * (self.n_e + 1.0)
        if np.any(np.abs(self.m_e) ** 2 > bound + 1e-12):
            raise ValueError("reservoir squeezing violates |m_e|^2 <= n_e(n_e+1)")

    @property
    def modes(self) -> int:
        return self.gamma.size

    @classmethod
    def uniform(cls, modes: int, gamma: float, n_e: float, m_e: complex = 0.0) -> "NoisyChannel":
        return cls(
            np.full(modes, float(gamma)),
            np.full(modes, float(n_e)),
            np.full(modes, complex(m_e)),
        )


def diffusion_matrix(ch: NoisyChannel) -> np.ndarray:
    """Direct sum of the stationary reservoir blocks."""
    out = np.zeros((2 * ch.modes, 2 * ch.modes))
    for i in range(ch.modes):
        ne = ch.n_e[i]
        me = ch.m_e[i]
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = np.array(
            [
                [2.0 * ne + 1.0 + me.real, me.imag],
                [me.imag, 2.0 * ne + 1.0 - me.real],
            ]
        )
    return out


def evolve(ch: NoisyChannel, state: GaussianState, t: float) -> GaussianState:
    """Damp the state for a time t >= 0."""
    if ch.modes != state.modes:
        raise ValueError("channel acts on %d modes, state has %d" % (ch.modes, state.modes))
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    g = np.repeat(np.exp(-0.5 * ch.gamma * t), 2)  # diagonal of G(t)
    V = g[:, None] * state.V * g[None, :]
    V_inf = diffusion_matrix(ch)
    relax = 1.0 - np.exp(-ch.gamma * t)
    for i in range(ch.modes):
        sl = slice(2 * i, 2 * i + 2)
        V[sl, sl] += relax[i] * V_inf[sl, sl]
    return GaussianState(g * state.d, V)
