import math
import warnings

import numpy as np
import pytest

from gaussfish import numkit
from gaussfish.channels import NoisyChannel
from gaussfish.gaussian_core import (
    GaussianState,
    apply,
    coherent,
    omega,
    probe_tmsdt,
    rotation,
    single_mode_squeezer,
    squeezed_vacuum,
    thermal,
    two_mode_squeezer,
    vacuum,
)
from gaussfish.qfi_gaussian import (
    GaussianModel,
    bound_chain,
    displacement_model,
    incompatibility,
    phase_model,
    qfim_report,
    qfim_rld,
    qfim_sld,
    quantumness,
    rld_components,
    rld_inverse_limit,
    sld_components,
)


def test_displacement_qfim_vacuum_and_thermal():
    assert np.allclose(qfim_sld(displacement_model(vacuum(1)), [0, 0]), 2 * np.eye(2), atol=1e-12)
    tau = 1 + 2 * 0.4
    F = qfim_sld(displacement_model(thermal(0.4)), [0.3, -0.2])
    assert np.allclose(F, (2 / tau) * np.eye(2), atol=1e-12)


def test_displacement_qfim_through_channel():
    ch = NoisyChannel.uniform(1, 1.0, 0.5)
    t = 0.3
    F = qfim_sld(displacement_model(thermal(0.2), ch, t), [0, 0])
    # means decay like e^{-gamma t / 2}; covariance relaxes toward 1 + 2 n_e
    x = math.exp(1.0 * t)
    v = (1 + 2 * 0.2) / x + (1 - 1 / x) * (1 + 2 * 0.5)
    assert np.allclose(F, (2 / (x * v)) * np.eye(2), atol=1e-12)


def test_phase_qfim_coherent_and_squeezed():
    q, p = 1.1, -0.7
    F = qfim_sld(phase_model(coherent(q, p)), [0.4])
    assert F[0, 0] == pytest.approx(2 * (q * q + p * p), abs=1e-10)
    r = math.asinh(1.0)  # sinh^2 r = 1
    F2 = qfim_sld(phase_model(squeezed_vacuum(r)), [0.0])
    assert F2[0, 0] == pytest.approx(16.0, abs=1e-10)
    # invariant under the rotation itself
    F3 = qfim_sld(phase_model(squeezed_vacuum(r)), [1.2])
    assert F3[0, 0] == pytest.approx(F2[0, 0], abs=1e-10)


def test_sld_components_satisfy_lyapunov_equation():
    # mixed, anisotropic probe so the covariance derivative is nontrivial
    probe = apply(single_mode_squeezer(0.4), thermal(0.1))
    model = phase_model(probe)
    st = model.state([0.5])
    dds, dVs = model.derivatives([0.5])
    comp = sld_components(model, [0.5], 0)
    Om = omega(1)
    assert np.allclose(st.V @ comp.l2 @ st.V + Om @ comp.l2 @ Om, dVs[0], atol=1e-10)
    assert np.allclose(comp.l2, comp.l2.T, atol=1e-12)
    # first-moment part for a means-only model
    dm = displacement_model(thermal(0.4))
    c2 = sld_components(dm, [0.2, -0.1], 0)
    st2 = dm.state([0.2, -0.1])
    assert np.allclose(c2.l2, 0, atol=1e-12)
    assert np.allclose(c2.l1, 2 * np.linalg.inv(st2.V) @ [1, 0], atol=1e-12)
    assert c2.l0 == pytest.approx(-float(st2.d @ c2.l1), abs=1e-12)


def test_sld_l2_matches_dense_least_squares():
    model = phase_model(squeezed_vacuum(0.6))
    st = model.state([0.3])
    _, dVs = model.derivatives([0.3])
    Om = omega(1)
    sig = numkit.kron(st.V, st.V) - numkit.kron(Om, Om)
    ref, *_ = np.linalg.lstsq(sig, numkit.vec(dVs[0]), rcond=None)
    comp = sld_components(model, [0.3], 0)
    assert np.allclose(numkit.vec(comp.l2), ref, atol=1e-9)


def test_rld_components_solve_their_equation():
    model = displacement_model(thermal(0.4))
    comp = rld_components(model, [0.1, 0.2], 1)
    st = model.state([0.1, 0.2])
    M = st.V + 1j * omega(1)
    # means-only family: l2 = 0 and M l1 = 2 dd
    assert np.allclose(comp.l2, 0, atol=1e-12)
    assert np.allclose(M @ comp.l1, 2 * np.array([0, 1]), atol=1e-10)
    ph = phase_model(apply(single_mode_squeezer(0.3), thermal(0.5)))
    c2 = rld_components(ph, [0.1], 0)
    st2 = ph.state([0.1])
    _, dVs = ph.derivatives([0.1])
    M2 = st2.V + 1j * omega(1)
    assert np.allclose(M2 @ c2.l2 @ np.conj(M2), dVs[0], atol=1e-9)


def test_rld_qfim_displaced_thermal_closed_form():
    tau = 1 + 2 * 0.4
    F = qfim_rld(displacement_model(thermal(0.4)), [0, 0])
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    expect = 2 * (tau * np.eye(2) - 1j * w) / (tau**2 - 1)
    assert np.allclose(F, expect, atol=1e-12)
    assert np.allclose(F, F.conj().T, atol=1e-14)


def test_incompatibility_vacuum_pair():
    U = incompatibility(displacement_model(vacuum(1)), [0, 0])
    assert np.allclose(U, [[0.0, 2.0], [-2.0, 0.0]], atol=1e-12)
    # single-parameter families have a vanishing 1x1 curvature
    U1 = incompatibility(phase_model(squeezed_vacuum(0.5)), [0.2])
    assert np.allclose(U1, 0, atol=1e-12)


def test_quantumness_values():
    assert quantumness(2 * np.eye(2), np.zeros((2, 2))) == 0.0
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert quantumness(2 * np.eye(2), 2 * w) == pytest.approx(1.0)
    assert quantumness(2 * np.eye(2), 1.2 * w) == pytest.approx(0.6)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        val = quantumness(np.eye(2), 4 * w)
        assert val == pytest.approx(4.0)
        assert any("exceeds 1" in str(r.message) for r in rec)


def test_bound_chain_displaced_thermal_rld_equals_upper():
    # for displaced thermal probes the RLD bound saturates the upper bound
    probe = probe_tmsdt(0.0, math.pi, 0.3, -0.2, 0.1, 0.4, 0.5)
    ch = NoisyChannel.uniform(2, 1.0, 0.5)
    model = displacement_model(probe, ch, 0.3)
    rep = qfim_report(model, [0, 0])
    assert rep.b_r == pytest.approx(rep.b_h_upper, abs=1e-9)
    assert rep.b_h_mid == pytest.approx(rep.b_h_upper, abs=1e-9)


def test_bound_chain_ordering_random_draws():
    rng = np.random.default_rng(23)
    for _ in range(20):
        r = rng.uniform(0, 1.2)
        n_th = rng.uniform(0, 0.8)
        probe = probe_tmsdt(r, rng.uniform(0, 2 * math.pi), 0, 0, 0, 0, n_th)
        ch = NoisyChannel.uniform(2, rng.uniform(0.1, 2.0), rng.uniform(0, 1.0))
        model = displacement_model(probe, ch, rng.uniform(0.0, 1.5))
        rep = qfim_report(model, [0, 0])
        assert 0.0 <= rep.r_q <= 1.0 + 1e-8
        assert max(rep.b_r, rep.b_s) <= rep.b_h_mid + 1e-9
        assert rep.b_h_mid <= rep.b_h_upper + 1e-9
        assert rep.b_h_upper <= 2 * rep.b_s + 1e-9


def test_bound_chain_weight_matrix():
    model = displacement_model(thermal(0.3))
    f = qfim_sld(model, [0, 0])
    fr = qfim_rld(model, [0, 0])
    u = incompatibility(model, [0, 0])
    W = np.diag([2.0, 1.0])
    ch = bound_chain(f, fr, u, weight=W)
    tau = 1 + 2 * 0.3
    assert ch.b_s == pytest.approx(3.0 * tau / 2.0, abs=1e-12)
    with pytest.raises(ValueError):
        bound_chain(f, fr, u, weight=np.diag([-1.0, 1.0]))
    with pytest.raises(ValueError):
        bound_chain(f, fr, u, weight=np.array([[1.0, 0.3], [0.0, 1.0]]))


def test_rld_inverse_limit_vacuum_pair():
    model = displacement_model(vacuum(1))
    f_rld = qfim_rld(model, [0, 0])
    inv = rld_inverse_limit(model, [0, 0], f_rld)
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.allclose(inv, (np.eye(2) + 1j * w) / 2.0, atol=1e-10)
    # trace + absolute antisymmetric part = 2, matching the known bound
    b_r = float(np.trace(inv.real)) + numkit.trace_abs(inv.imag)
    assert b_r == pytest.approx(2.0, abs=1e-10)


def test_rld_inverse_limit_pure_squeezed_pair_collapses():
    probe = probe_tmsdt(0.4, math.pi, 0, 0, 0, 0, 0.0)
    model = displacement_model(probe)  # no channel: the probe stays pure
    inv = rld_inverse_limit(model, [0, 0])
    assert np.allclose(inv, 0, atol=1e-12)


def test_rld_inverse_limit_regular_model_matches_pinv():
    model = displacement_model(thermal(0.4))
    f_rld = qfim_rld(model, [0, 0])
    inv = rld_inverse_limit(model, [0, 0], f_rld)
    assert np.allclose(inv, numkit.pinv(f_rld), atol=1e-10)


def test_fd_derivatives_match_analytic_hooks():
    ch = NoisyChannel.uniform(1, 0.8, 0.3)
    model = displacement_model(thermal(0.2), ch, 0.4)
    dds_a, dVs_a = model.derivatives([0.1, -0.2])
    dds_f, dVs_f = model.fd_derivatives([0.1, -0.2])
    for a, f in zip(dds_a, dds_f):
        assert np.allclose(a, f, atol=1e-8)
    for a, f in zip(dVs_a, dVs_f):
        assert np.allclose(a, f, atol=1e-8)


def test_fd_error_scales_quadratically():
    model = phase_model(squeezed_vacuum(0.7))
    dds_a, dVs_a = model.derivatives([0.3])

    def err(h):
        _, dVs = model.fd_derivatives([0.3], step=h)
        return np.max(np.abs(dVs[0] - dVs_a[0]))

    e1, e2 = err(1e-3), err(1e-4)
    assert e2 < e1 / 50.0  # near h^2 scaling


def test_reparametrization_covariance():
    J = np.array([[2.0, 1.0], [0.0, 3.0]])
    base = displacement_model(thermal(0.3))
    reparam = GaussianModel(lambda th: base.state(J @ th), n_params=2)
    F_base = qfim_sld(base, [0, 0])
    F_new = qfim_sld(reparam, [0, 0])
    assert np.allclose(F_new, J.T @ F_base @ J, atol=1e-6)


def test_block_additivity_spectator_mode():
    # a spectator mode leaves the displacement QFIM of mode 0 unchanged
    V = np.block(
        [[thermal(0.4).V, np.zeros((2, 2))], [np.zeros((2, 2)), squeezed_vacuum(0.5).V]]
    )
    probe = GaussianState(np.zeros(4), V)
    F = qfim_sld(displacement_model(probe), [0, 0])
    F_single = qfim_sld(displacement_model(thermal(0.4)), [0, 0])
    assert np.allclose(F, F_single, atol=1e-12)


def test_model_parameter_count_enforced():
    model = displacement_model(vacuum(1))
    with pytest.raises(ValueError):
        model.state([0.1])
    with pytest.raises(ValueError):
        phase_model(vacuum(2))


def test_report_is_consistent_with_parts():
    probe = probe_tmsdt(0.3, math.pi, 0, 0, 0, 0, 0.2)
    ch = NoisyChannel.uniform(2, 1.0, 0.5)
    model = displacement_model(probe, ch, 0.25)
    rep = qfim_report(model, [0, 0])
    assert np.allclose(rep.f_sld, qfim_sld(model, [0, 0]), atol=1e-12)
    assert np.allclose(rep.f_rld, qfim_rld(model, [0, 0]), atol=1e-12)
    assert np.allclose(rep.u, incompatibility(model, [0, 0]), atol=1e-12)
    chain = bound_chain(
        rep.f_sld,
        rep.f_rld,
        rep.u,
        rld_inverse=rld_inverse_limit(model, [0, 0], rep.f_rld),
    )
    assert rep.b_s == pytest.approx(chain.b_s)
    assert rep.b_r == pytest.approx(chain.b_r)
    assert rep.b_h_mid == pytest.approx(chain.b_h_mid)
    assert rep.b_h_upper == pytest.approx(chain.b_h_upper)
    d = rep.to_dict()
    assert d["b_s"] == rep.b_s and len(d["f_sld"]) == 2
