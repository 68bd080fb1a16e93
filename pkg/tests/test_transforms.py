import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisosc.errors import BranchAmbiguity, ConjugacyViolation, DimensionMismatch, OriginSingularity
from anisosc.phase_space import ComplexPhasePoint, FrequencySpec, RealPhasePoint, hamiltonian_real
from anisosc.poisson import BracketBasis, verify_canonical
from anisosc.sampling import branch_safe_points, uniform_points
from anisosc.transforms import (
    BranchPolicy,
    amplitude_phases,
    aniso_to_iso,
    complexify,
    complexify_components,
    continuous_new_args,
    decomplexify,
    forward_components,
    inverse_components,
    iso_to_aniso,
    pde_residual,
    physical_hamiltonian,
    principal_consistent,
    scale_from_unit,
    scale_to_unit,
)

SQ = np.sqrt(2.0)
W23 = FrequencySpec((2.0, 3.0))
coords = st.floats(-5, 5, allow_nan=False)


def cpoint(X, P, flag=False):
    return ComplexPhasePoint(X, P, conjugacy_flag=flag)


# rescaling ----------------------------------------------------------------------


def test_scale_to_unit_example():
    out = scale_to_unit(RealPhasePoint([2.0], [4.0]), FrequencySpec([4.0]))
    assert np.allclose(out.q, [4.0]) and np.allclose(out.p, [2.0])


def test_scale_from_unit_example():
    out = scale_from_unit(RealPhasePoint([4.0], [2.0]), FrequencySpec([4.0]))
    assert np.allclose(out.q, [2.0]) and np.allclose(out.p, [4.0])


def test_unit_frequencies_scale_identity():
    pt = RealPhasePoint([0.3, -1.2], [2.0, 0.1])
    freq = FrequencySpec((1.0, 1.0))
    assert scale_to_unit(pt, freq) == pt
    assert scale_from_unit(pt, FrequencySpec([1.0, 1.0])) == pt


def test_energy_preserved_by_rescaling():
    pt = RealPhasePoint([1.0, 1.0], [1.0, 1.0])
    assert physical_hamiltonian(pt, W23) == pytest.approx(7.5)
    assert hamiltonian_real(scale_to_unit(pt, W23), W23) == pytest.approx(7.5, rel=1e-15)


@given(st.lists(coords, min_size=4, max_size=4))
def test_scale_round_trip(v):
    pt = RealPhasePoint.from_flat(v)
    back = scale_from_unit(scale_to_unit(pt, W23), W23)
    assert np.allclose(back.as_flat(), pt.as_flat(), rtol=1e-15, atol=1e-15)


def test_scale_dimension_check():
    with pytest.raises(DimensionMismatch):
        scale_to_unit(RealPhasePoint([1.0], [1.0]), W23)


# complexification ------------------------------------------------------------------


def test_complexify_examples():
    a = complexify(RealPhasePoint([1.0], [0.0]))
    assert np.allclose(a.X, [1 / SQ]) and np.allclose(a.P, [-1j / SQ]) and a.conjugacy_flag
    b = complexify(RealPhasePoint([0.0], [1.0]))
    assert np.allclose(b.X, [-1j / SQ]) and np.allclose(b.P, [1 / SQ])


def test_energy_from_complex_product():
    c = complexify(RealPhasePoint([1.0], [1.0]))
    assert 1j * c.P[0] * c.X[0] == pytest.approx(1.0)


@given(st.lists(coords, min_size=4, max_size=4))
def test_energy_identity(v):
    pt = RealPhasePoint.from_flat(v)
    c = complexify(pt)
    e = 1j * np.sum(W23.array * c.P * c.X)
    h = hamiltonian_real(pt, W23)
    assert abs(e.real - h) <= 1e-12 * max(1.0, h)
    assert abs(e.imag) < 1e-12 * max(1.0, h)


@given(st.lists(coords, min_size=4, max_size=4))
def test_complexify_round_trip(v):
    pt = RealPhasePoint.from_flat(v)
    c = complexify(pt)
    assert np.array_equal(c.P, -1j * np.conj(c.X))
    assert np.allclose(decomplexify(c).as_flat(), pt.as_flat(), rtol=1e-15, atol=1e-15)


def test_decomplexify_example_and_violation():
    out = decomplexify(cpoint([1 / SQ], [-1j / SQ]))
    assert np.allclose(out.as_flat(), [1.0, 0.0])
    with pytest.raises(ConjugacyViolation):
        decomplexify(cpoint([1.0], [1.0]))


# the map ------------------------------------------------------------------------------


def test_unit_frequency_is_identity():
    pt = complexify(RealPhasePoint([0.4, -1.0], [1.5, 0.2]))
    out = aniso_to_iso(pt, FrequencySpec((1.0, 1.0)))
    assert np.array_equal(out.X, pt.X) and np.array_equal(out.P, pt.P)
    back = iso_to_aniso(pt, FrequencySpec((1.0, 1.0)))
    assert np.array_equal(back.X, pt.X)


def test_forward_example_omega_two():
    out = aniso_to_iso(cpoint([1.0], [1.0]), FrequencySpec([2.0]))
    assert np.allclose(out.X, [SQ], rtol=1e-15) and np.allclose(out.P, [SQ], rtol=1e-15)
    assert out.P[0] * out.X[0] == pytest.approx(2.0 * 1.0 * 1.0, rel=1e-15)


def test_inverse_example_omega_two():
    back = iso_to_aniso(cpoint([SQ], [SQ]), FrequencySpec([2.0]))
    assert np.allclose(back.X, [1.0], rtol=1e-15) and np.allclose(back.P, [1.0], rtol=1e-15)


def test_product_condition_and_conjugacy(rng):
    q, p = branch_safe_points(100, W23, seed=3)
    X, P = (np.array(v) for v in complexify_components(q, p))
    Xn, Pn = (np.array(v) for v in forward_components(X, P, W23.omegas))
    w = W23.array[:, None]
    assert np.max(np.abs(Pn * Xn - w * P * X) / np.abs(w * P * X)) < 1e-12
    assert np.max(np.abs(Pn + 1j * np.conj(Xn))) < 1e-10


def test_mapped_point_keeps_conjugacy_flag():
    pt = complexify(RealPhasePoint([1.0, 0.8], [0.3, -0.4]))
    out = aniso_to_iso(pt, W23)
    assert out.conjugacy_flag and out.conjugacy_residual() < 1e-12


def test_conjugacy_survives_on_every_sheet():
    q, p = uniform_points(2000, seed=4)
    X, P = complexify_components(q, p)
    for phases in (None, amplitude_phases(W23, "closed_form")):
        Xn, Pn = (np.array(v) for v in forward_components(np.array(X), np.array(P), W23.omegas, phases))
        assert np.max(np.abs(Pn + 1j * np.conj(Xn))) < 1e-10


def test_unwrap_policy_preserves_conjugacy_everywhere():
    q, p = uniform_points(500, seed=8)
    theta = np.arctan2(-p, q)
    for k in range(q.shape[1]):
        pt = complexify(RealPhasePoint(q[:, k], p[:, k]))
        out = aniso_to_iso(pt, W23, BranchPolicy.unwrap(theta[:, k]))
        assert out.conjugacy_residual() < 1e-10


def test_unwrapped_trajectory_round_trip():
    # after several turns, the continuous sheet still inverts exactly
    theta = np.array([0.3 + 4 * np.pi, -1.0 - 6 * np.pi])
    r = np.array([1.2, 0.7])
    X = r * np.exp(1j * theta) / SQ
    pt = ComplexPhasePoint(X, -1j * np.conj(X), conjugacy_flag=True)
    policy = BranchPolicy.unwrap(theta)
    out = aniso_to_iso(pt, W23, policy)
    back = iso_to_aniso(out, W23, policy)
    assert np.allclose(back.X, pt.X, atol=1e-13) and np.allclose(back.P, pt.P, atol=1e-13)


def test_round_trip_generic_points(rng):
    m = 1000
    mod = rng.uniform(0.2, 2.0, size=(2, 2, m))
    arg = rng.uniform(-np.pi / 4, np.pi / 4, size=(2, 2, m))
    X, P = mod * np.exp(1j * arg)
    Xn, Pn = forward_components(X, P, W23.omegas)
    Xb, Pb = inverse_components(Xn, Pn, W23.omegas)
    assert np.max(np.abs(np.array(Xb) - X)) < 1e-10
    assert np.max(np.abs(np.array(Pb) - P)) < 1e-10


def test_round_trip_with_amplitude_phase():
    pt = complexify(RealPhasePoint([1.0, 0.5], [0.2, 0.3]))
    ph = amplitude_phases(W23, "closed_form")
    out = aniso_to_iso(pt, W23, phases=ph)
    back = iso_to_aniso(out, W23, phases=ph)
    assert np.allclose(back.X, pt.X, atol=1e-14)


def test_origin_guard():
    with pytest.raises(OriginSingularity):
        aniso_to_iso(cpoint([0.0, 1.0], [1.0, 1.0]), W23)
    with pytest.raises(OriginSingularity):
        iso_to_aniso(cpoint([1.0, 1.0], [1e-16, 1.0]), W23)


def test_inverse_on_the_cut_is_ambiguous():
    with pytest.raises(BranchAmbiguity):
        iso_to_aniso(cpoint([-1.0], [1.0]), FrequencySpec([2.0]))


def test_dimension_mismatch_in_map():
    with pytest.raises(DimensionMismatch):
        aniso_to_iso(cpoint([1.0], [1.0]), W23)


def test_unwrap_policy_needs_reference():
    with pytest.raises(ValueError):
        BranchPolicy("unwrap")
    with pytest.raises(DimensionMismatch):
        aniso_to_iso(cpoint([1.0, 1.0], [1.0, 1.0]), W23, BranchPolicy.unwrap([0.0]))


@pytest.mark.parametrize("omega", [0.5, 2.0, 3.0])
def test_pde(omega, rng):
    X = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    P = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    assert pde_residual(X, P, omega).max() < 1e-10


@pytest.mark.parametrize("convention", ["zero", "closed_form"])
def test_map_is_canonical(convention):
    q, p = branch_safe_points(300, W23, seed=11)
    X, P = (np.array(v) for v in complexify_components(q, p))
    ph = amplitude_phases(W23, convention)
    rep = verify_canonical(lambda a, b: forward_components(a, b, W23.omegas, ph), (X, P), BracketBasis.COMPLEX_XP)
    assert rep.max_residual < 1e-9


def test_principal_consistent_mask():
    q, p = uniform_points(2000, seed=5)
    X, P = (np.array(v) for v in complexify_components(q, p))
    # w > 1: new arguments are convex mixtures of principal ones, never wrap
    assert principal_consistent(X, P, W23.omegas).all()
    slow = (0.5, 0.7)
    mask = principal_consistent(X, P, slow)
    assert 0 < mask.sum() < mask.size
    Xn, Pn = (np.array(v) for v in forward_components(X, P, slow))
    ax, ap = continuous_new_args(X, P, slow)
    assert np.allclose(np.angle(Xn)[:, mask], ax[:, mask], atol=1e-12)
    assert np.allclose(np.angle(Pn)[:, mask], ap[:, mask], atol=1e-12)
