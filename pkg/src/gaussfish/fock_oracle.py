"""Truncated number-basis oracle for the Gaussian information quantities.

Everything here works on explicit density matrices in a Fock cutoff, with no
Gaussian shortcuts, so it can serve as an independent cross-check of the
moment-based formulas.  Conventions match the rest of the package (hbar = 2):
Q = a + a^dag, P = i(a^dag - a), so the vacuum has <Q^2> = <P^2> = 1.

The displacement family uses alpha = (theta1 + i theta2)/sqrt(2), which makes
its means shift (sqrt(2) theta1, sqrt(2) theta2); with that calibration the
number-basis QFIM of a displaced thermal state reproduces the moment-level
displacement QFIM (2/tau) I exactly, so the two pipelines are directly
comparable.

Truncation honesty: state constructors enforce a leakage budget - both the
trace deficit and the top two level populations must stay below 1e-6 - and
raise instead of silently returning a clipped state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from . import numkit

LEAKAGE_BUDGET = 1e-6


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def create(dim: int) -> np.ndarray:
    return destroy(dim).T.conj()


def num_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def quad_q(dim: int) -> np.ndarray:
    a = destroy(dim).astype(complex)
    return a + a.T.conj()


def quad_p(dim: int) -> np.ndarray:
    a = destroy(dim).astype(complex)
    return 1j * (a.T.conj() - a)


def displacement_unitary(alpha: complex, dim: int) -> np.ndarray:
    a = destroy(dim).astype(complex)
    return expm(alpha * a.T.conj() - np.conj(alpha) * a)


def squeeze_unitary(r: float, dim: int) -> np.ndarray:
    """exp(r/2 (a^2 - a^dag^2)): squeezes Q, <Q^2> -> e^{-2r} for the vacuum."""
    a = destroy(dim).astype(complex)
    return expm(0.5 * r * (a @ a - a.T.conj() @ a.T.conj()))


def _leakage(rho: np.ndarray) -> float:
    trace_deficit = abs(1.0 - float(np.trace(rho).real))
    top = float(np.real(rho[-1, -1] + rho[-2, -2]))
    return max(trace_deficit, top)


def fock_state(kind: str, dim: int, **par) -> np.ndarray:
    """Density matrix of a named state in a Fock cutoff of size dim.

    Kinds: vacuum | coherent(alpha) | thermal(n_th) | squeezed(r) |
    displaced_thermal(alpha, n_th).  Raises if the cutoff leaks more than
    LEAKAGE_BUDGET (increase dim in that case).
    """
    if dim < 4:
        raise ValueError("dim must be at least 4")
    if kind == "vacuum":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
    elif kind == "coherent":
        alpha = complex(par.pop("alpha"))
        psi = displacement_unitary(alpha, dim)[:, 0]
        rho = np.outer(psi, psi.conj())
    elif kind == "thermal":
        n_th = float(par.pop("n_th"))
        if n_th < 0:
            raise ValueError("n_th must be nonnegative")
        n = np.arange(dim)
        p = (n_th / (n_th + 1.0)) ** n / (n_th + 1.0) if n_th > 0 else np.eye(dim)[0]
        rho = np.diag(p).astype(complex)
    elif kind == "squeezed":
        r = float(par.pop("r"))
        psi = squeeze_unitary(r, dim)[:, 0]
        rho = np.outer(psi, psi.conj())
    elif kind == "displaced_thermal":
        alpha = complex(par.pop("alpha"))
        rho = fock_state("thermal", dim, n_th=par.pop("n_th"))
        D = displacement_unitary(alpha, dim)
        rho = D @ rho @ D.T.conj()
    else:
        raise ValueError("unknown state kind %r" % (kind,))
    if par:
        raise TypeError("unexpected parameters: %s" % ", ".join(sorted(par)))
    leak = _leakage(rho)
    if leak > LEAKAGE_BUDGET:
        raise ValueError(
            "cutoff dim=%d leaks %.3g (> %.0e budget) for %s; increase dim"
            % (dim, leak, LEAKAGE_BUDGET, kind)
        )
    return rho


@dataclass
class FockModel:
    """Parameterized density-matrix family theta -> rho(theta)."""

    rho_fn: Callable[[np.ndarray], np.ndarray]
    n_params: int
    drho_fn: Optional[Callable[[np.ndarray], Sequence[np.ndarray]]] = None
    step: float = 1e-5

    def rho(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.n_params:
            raise ValueError("expected %d parameters, got %d" % (self.n_params, theta.size))
        return self.rho_fn(theta)

    def derivatives(self, theta) -> List[np.ndarray]:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if self.drho_fn is not None:
            return [numkit.hermitize(np.asarray(m, dtype=complex)) for m in self.drho_fn(theta)]
        out = []
        for mu in range(self.n_params):
            tp = theta.copy()
            tm = theta.copy()
            tp[mu] += self.step
            tm[mu] -= self.step
            d = (self.rho_fn(tp) - self.rho_fn(tm)) / (2.0 * self.step)
            out.append(numkit.hermitize(d))
        return out


def sld_solve(rho: np.ndarray, drho: np.ndarray, support_cut: float = 1e-12) -> np.ndarray:
    """Solve (rho L + L rho)/2 = drho in the eigenbasis of rho.

    Matrix elements with w_j + w_k <= support_cut are set to zero (the
    pseudo-inverse solution of the Lyapunov equation).
    """
    w, U = np.linalg.eigh(numkit.hermitize(rho))
    dt = U.T.conj() @ drho @ U
    denom = w[:, None] + w[None, :]
    mask = denom > support_cut
    Lt = np.where(mask, 2.0 * dt / np.where(mask, denom, 1.0), 0.0)
    return numkit.hermitize(U @ Lt @ U.T.conj())


def rld_solve(rho: np.ndarray, drho: np.ndarray, support_cut: float = 1e-12) -> np.ndarray:
    """Solve rho L = drho on the support of rho (rows with w_j <= cut are zero).

    The result is generally non-Hermitian; off-support derivative components
    are left-projected away rather than treated as an error.
    """
    w, U = np.linalg.eigh(numkit.hermitize(rho))
    dt = U.T.conj() @ drho @ U
    wcol = w[:, None]
    mask = wcol > support_cut
    Lt = np.where(mask, dt / np.where(mask, wcol, 1.0), 0.0)
    return U @ Lt @ U.T.conj()


def qfim_fock_sld(model: FockModel, theta, support_cut: float = 1e-12) -> np.ndarray:
    """SLD QFIM from explicit density matrices: F_jk = Re Tr[rho {Lj, Lk}]/2."""
    rho = model.rho(theta)
    drhos = model.derivatives(theta)
    Ls = [sld_solve(rho, d, support_cut) for d in drhos]
    m = model.n_params
    F = np.zeros((m, m))
    for j in range(m):
        for k in range(j, m):
            anti = Ls[j] @ Ls[k] + Ls[k] @ Ls[j]
            val = 0.5 * float(np.trace(rho @ anti).real)
            F[j, k] = val
            F[k, j] = val
    return F


def qfim_fock_rld(model: FockModel, theta, support_cut: float = 1e-12) -> np.ndarray:
    """RLD QFIM from explicit density matrices: F_jk = Tr[rho Lj Lk^dag]."""
    rho = model.rho(theta)
    drhos = model.derivatives(theta)
    Ls = [rld_solve(rho, d, support_cut) for d in drhos]
    m = model.n_params
    F = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            F[j, k] = np.trace(rho @ Ls[j] @ Ls[k].T.conj())
    return numkit.hermitize(F)


def check_povm(povm: Sequence[np.ndarray], dim: int, tol: float = 1e-10) -> None:
    """Validate a POVM: Hermitian PSD elements resolving the identity."""
    total = np.zeros((dim, dim), dtype=complex)
    for i, el in enumerate(povm):
        el = np.asarray(el, dtype=complex)
        if el.shape != (dim, dim):
            raise ValueError("POVM element %d has shape %r" % (i, el.shape))
        if np.max(np.abs(el - el.T.conj())) > tol:
            raise ValueError("POVM element %d is not Hermitian" % i)
        if not numkit.is_psd(el, tol=tol):
            raise ValueError("POVM element %d is not PSD" % i)
        total += el
    if np.max(np.abs(total - np.eye(dim))) > tol:
        raise ValueError("POVM does not resolve the identity")


def sld_eigenprojector_povm(L: np.ndarray) -> List[np.ndarray]:
    """Rank-1 projectors onto the eigenvectors of an SLD (attains the QFI)."""
    _, U = np.linalg.eigh(numkit.hermitize(L))
    return [np.outer(U[:, i], U[:, i].conj()) for i in range(U.shape[1])]


def cfi_povm(model: FockModel, theta, povm: Sequence[np.ndarray], p_floor: float = 1e-12) -> np.ndarray:
    """Classical Fisher information matrix of a POVM on the model.

    Outcomes with probability below p_floor are dropped (with a warning if
    they carry derivative weight); genuinely negative probabilities beyond
    round-off raise.
    """
    rho = model.rho(theta)
    drhos = model.derivatives(theta)
    m = model.n_params
    F = np.zeros((m, m))
    dropped = 0.0
    for el in povm:
        el = np.asarray(el, dtype=complex)
        p = float(np.trace(rho @ el).real)
        if p < -1e-10:
            raise ValueError("negative outcome probability %.3g" % p)
        if p < p_floor:
            dropped += max(
                abs(float(np.trace(d @ el).real)) for d in drhos
            )
            continue
        dp = np.array([float(np.trace(d @ el).real) for d in drhos])
        F += np.outer(dp, dp) / p
    if dropped > 1e-8:
        warnings.warn(
            "outcomes below the probability floor carry derivative weight %.3g" % dropped
        )
    return F


# ----------------------------------------------------------------------------
# reference families
# ----------------------------------------------------------------------------


def displacement_family(rho0: np.ndarray) -> FockModel:
    """Two-parameter displacement of a fixed state, alpha = (t1 + i t2)/sqrt(2).

    The sqrt(2) puts the family on the same footing as the moment-level
    displacement model: means shift by sqrt(2) theta, and the QFIM of a
    displaced thermal state comes out (2/tau) I.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]

    def rho_fn(theta):
        alpha = (theta[0] + 1j * theta[1]) / np.sqrt(2.0)
        D = displacement_unitary(alpha, dim)
        return D @ rho0 @ D.T.conj()

    return FockModel(rho_fn, n_params=2)


def phase_family(rho0: np.ndarray, analytic: bool = True) -> FockModel:
    """Phase rotation e^{-i phi n} rho0 e^{i phi n}; drho = -i[n, rho]."""
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    n = num_op(dim)

    def rho_fn(theta):
        ph = np.exp(-1j * theta[0] * np.arange(dim))
        return (ph[:, None] * rho0) * np.conj(ph)[None, :]

    drho_fn = None
    if analytic:
        def drho_fn(theta):
            r = rho_fn(theta)
            return [-1j * (n @ r - r @ n)]

    return FockModel(rho_fn, n_params=1, drho_fn=drho_fn)


def qubit_theta_family() -> FockModel:
    """Pure qubit family psi = (cos(theta/4), sin(theta/4)): QFI = 1/4.

    Every projective measurement in a basis unbiased to psi attains it, which
    makes this a convenient end-to-end check of the POVM machinery.
    """

    def rho_fn(theta):
        c, s = np.cos(theta[0] / 4.0), np.sin(theta[0] / 4.0)
        psi = np.array([c, s], dtype=complex)
        return np.outer(psi, psi.conj())

    def drho_fn(theta):
        c, s = np.cos(theta[0] / 4.0), np.sin(theta[0] / 4.0)
        psi = np.array([c, s], dtype=complex)
        dpsi = 0.25 * np.array([-s, c], dtype=complex)
        return [np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())]

    return FockModel(rho_fn, n_params=1, drho_fn=drho_fn)
