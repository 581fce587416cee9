import numpy as np
import pytest

from gaussfish.channels import NoisyChannel, diffusion_matrix, evolve
from gaussfish.gaussian_core import (
    GaussianState,
    apply,
    omega,
    probe_tmsdt,
    purity,
    squeezed_vacuum,
    two_mode_squeezer,
    vacuum,
)


def test_diffusion_matrix_with_correlated_noise():
    ch = NoisyChannel(gamma=[1.0], n_e=[0.4], m_e=[0.3])
    D = diffusion_matrix(ch)
    assert np.allclose(D, [[1.8 + 0.3, 0.0], [0.0, 1.8 - 0.3]])
    ch2 = NoisyChannel(gamma=[1.0], n_e=[0.4], m_e=[0.3j])
    D2 = diffusion_matrix(ch2)
    assert np.allclose(D2, [[1.8, 0.3], [0.3, 1.8]])


def test_uniform_constructor():
    ch = NoisyChannel.uniform(3, 0.7, 0.2)
    assert ch.modes == 3
    assert np.allclose(ch.gamma, 0.7)
    assert np.allclose(ch.n_e, 0.2)


def test_channel_validation():
    with pytest.raises(ValueError):
        NoisyChannel(gamma=[-0.1], n_e=[0.0], m_e=[0.0])
    with pytest.raises(ValueError):
        NoisyChannel(gamma=[1.0], n_e=[-0.2], m_e=[0.0])
    with pytest.raises(ValueError):
        NoisyChannel(gamma=[1.0, 1.0], n_e=[0.1], m_e=[0.0])
    with pytest.raises(ValueError):
        # |m_e|^2 must not exceed n_e (n_e + 1)
        NoisyChannel(gamma=[1.0], n_e=[0.1], m_e=[1.0])


def test_evolve_identity_at_t0():
    st = probe_tmsdt(0.4, np.pi, 0.1, 0.2, -0.3, 0.0, 0.5)
    ch = NoisyChannel.uniform(2, 1.0, 0.5)
    out = evolve(ch, st, 0.0)
    assert np.allclose(out.d, st.d, atol=1e-15)
    assert np.allclose(out.V, st.V, atol=1e-15)


def test_evolve_reaches_stationary_state():
    st = probe_tmsdt(0.9, 0.3, 1.0, -1.0, 0.5, 0.5, 0.0)
    ch = NoisyChannel.uniform(2, 1.0, 0.35)
    out = evolve(ch, st, 60.0)
    assert np.allclose(out.d, np.zeros(4), atol=1e-10)
    assert np.allclose(out.V, diffusion_matrix(ch), atol=1e-10)


def test_semigroup_composition():
    st = probe_tmsdt(0.6, np.pi, 0.3, -0.2, 0.1, 0.4, 0.2)
    ch = NoisyChannel(gamma=[0.8, 1.3], n_e=[0.5, 0.1], m_e=[0.2, 0.0])
    one = evolve(ch, st, 0.9)
    two = evolve(ch, evolve(ch, st, 0.4), 0.5)
    assert np.allclose(one.d, two.d, atol=1e-12)
    assert np.allclose(one.V, two.V, atol=1e-12)


def test_evolution_preserves_physicality():
    rng = np.random.default_rng(17)
    for _ in range(25):
        r = rng.uniform(0.0, 1.2)
        st = apply(two_mode_squeezer(r, rng.uniform(0, 2 * np.pi)), vacuum(2))
        ch = NoisyChannel.uniform(2, rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0))
        out = evolve(ch, st, rng.uniform(0.0, 3.0))
        assert out.physical(tol=1e-8)


def test_purity_decreases_into_hot_environment():
    st = squeezed_vacuum(0.5)
    ch = NoisyChannel.uniform(1, 1.0, 0.7)
    p0 = purity(st)
    p1 = purity(evolve(ch, st, 0.2))
    p2 = purity(evolve(ch, st, 0.8))
    assert p0 == pytest.approx(1.0)
    assert p1 < p0
    assert p2 < p1


def test_evolve_input_validation():
    st = vacuum(2)
    ch = NoisyChannel.uniform(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        evolve(ch, st, 0.5)  # mode count mismatch
    ch2 = NoisyChannel.uniform(2, 1.0, 0.0)
    with pytest.raises(ValueError):
        evolve(ch2, st, -0.1)
