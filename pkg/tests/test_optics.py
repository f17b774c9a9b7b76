import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings

from pathspin import hilbert as hb
from pathspin import optics
from pathspin.hilbert import SPIN, SQRT1_2, Operator, is_unitary, tensor_op
from pathspin.optics import STAGES, ElementKind, ElementSpec

from .conftest import phases

S1 = optics.product_space(STAGES[1])
S2 = optics.product_space(STAGES[2])


def path_ket(label):
    return hb.ket(optics.path_space(optics.stage_of(label)), label)


def on_spin_up(op, label):
    return hb.apply(op, hb.tensor(path_ket(label), hb.spin_up()))


def test_spin_rotator_zero_is_identity_on_up():
    out = hb.apply(optics.spin_rotator_spin(0.0), hb.spin_up())
    np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-15)


def test_spin_rotator_pi_flips_up_to_down():
    # (right - left)/sqrt2 = down
    out = hb.apply(optics.spin_rotator_spin(math.pi), hb.spin_up())
    np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)


def test_spin_rotator_half_pi_overlap():
    out = hb.apply(optics.spin_rotator_spin(math.pi / 2), hb.spin_up())
    amp = hb.inner(hb.spin_up(), out)
    assert amp == pytest.approx((1 + 1j) / 2, abs=1e-15)
    assert abs(amp) ** 2 == pytest.approx(0.5, abs=1e-15)


@given(phases)
def test_spin_rotator_matches_x_basis_definition(delta):
    out = hb.apply(optics.spin_rotator_spin(delta), hb.spin_up())
    expected = hb.spin_from_x(SQRT1_2, SQRT1_2 * cmath.exp(1j * delta))
    np.testing.assert_allclose(out.amplitudes, expected.amplitudes, atol=1e-15)


def test_beam_splitter_bs2_relations():
    bs = optics.BS2
    o1, o2 = on_spin_up(bs, "psi1"), on_spin_up(bs, "psi2")
    assert o1.amplitude("psi3,up") == pytest.approx(1j * SQRT1_2)
    assert o1.amplitude("psi4,up") == pytest.approx(SQRT1_2)
    assert o2.amplitude("psi3,up") == pytest.approx(SQRT1_2)
    assert o2.amplitude("psi4,up") == pytest.approx(1j * SQRT1_2)


def test_beam_splitter_bs3_relations():
    o3, o4 = on_spin_up(optics.BS3, "psi3"), on_spin_up(optics.BS3, "psi4")
    assert o3.amplitude("psi5,up") == pytest.approx(1j * SQRT1_2)
    assert o3.amplitude("psi6,up") == pytest.approx(SQRT1_2)
    assert o4.amplitude("psi5,up") == pytest.approx(SQRT1_2)
    assert o4.amplitude("psi6,up") == pytest.approx(1j * SQRT1_2)


def test_beam_splitter_even_split():
    out = on_spin_up(optics.BS1, "in2")
    probs = np.abs(out.amplitudes) ** 2
    assert probs[S1.index("psi1,up")] == pytest.approx(0.5, abs=1e-15)
    assert probs[S1.index("psi2,up")] == pytest.approx(0.5, abs=1e-15)


def test_beam_splitter_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        optics.beam_splitter(("psi1", "psi2"), ("psi2", "psi3"))


def test_phase_shifter_zero_and_two_pi_are_identity():
    eye = np.eye(4)
    np.testing.assert_allclose(optics.phase_shifter("psi2", 0.0).matrix, eye, atol=0)
    np.testing.assert_allclose(optics.phase_shifter("psi2", 2 * math.pi).matrix, eye, atol=1e-12)


def test_phase_shifter_after_bs1_gives_post_ps_state():
    phi = 0.73
    chi = hb.spin_from_x(SQRT1_2, SQRT1_2 * cmath.exp(0.4j))
    start = hb.tensor(path_ket("in2"), chi)
    out = hb.apply(optics.phase_shifter("psi2", phi) @ optics.BS1, start)
    path = hb.state(optics.path_space(STAGES[1]), [SQRT1_2, 1j * cmath.exp(1j * phi) * SQRT1_2])
    np.testing.assert_allclose(out.amplitudes, hb.tensor(path, chi).amplitudes, atol=1e-15)


def test_phase_shifter_unknown_label():
    with pytest.raises(KeyError):
        optics.phase_shifter("psi9", 1.0)


def test_mirror_is_identity(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = hb.StateVector(v / np.linalg.norm(v), S1)
    np.testing.assert_array_equal(hb.apply(optics.mirror(), s).amplitudes, s.amplitudes)
    m = optics.mirror()
    np.testing.assert_array_equal((m @ m).matrix, m.matrix)


def test_mirrors_do_not_change_bs1_bs2_composition():
    with_mirrors = optics.BS2 @ optics.mirror() @ optics.BS1
    without = optics.BS2 @ optics.BS1
    np.testing.assert_array_equal(with_mirrors.matrix, without.matrix)


def test_stern_gerlach_completeness():
    total = sum((p.matrix for path in STAGES[2] for p in optics.stern_gerlach_projectors(path)), 0)
    np.testing.assert_allclose(total, np.eye(4), atol=1e-15)


def test_stern_gerlach_on_basis_state():
    s = hb.tensor(path_ket("psi3"), hb.spin_up())
    probs = [abs(p.expectation(s)) for path in STAGES[2] for p in optics.stern_gerlach_projectors(path)]
    assert probs == [1, 0, 0, 0]


def test_stern_gerlach_equal_spin_superposition():
    s = hb.tensor(path_ket("psi4"), hb.state(SPIN, [SQRT1_2, SQRT1_2]))
    up, down = optics.stern_gerlach_projectors("psi4")
    assert up.expectation(s).real == pytest.approx(0.5)
    assert down.expectation(s).real == pytest.approx(0.5)


def test_stern_gerlach_projectors_are_orthogonal_idempotent():
    for path in STAGES[2]:
        up, down = optics.stern_gerlach_projectors(path)
        np.testing.assert_allclose(up.matrix @ down.matrix, 0, atol=0)
        for p in (up, down):
            np.testing.assert_allclose(p.matrix @ p.matrix, p.matrix, atol=0)
            assert hb.is_hermitian(p)


def test_element_spec_builds():
    ps = ElementSpec(ElementKind.PHASE_SHIFTER, parameter=0.5, target="psi2").build()
    np.testing.assert_array_equal(ps.matrix, optics.phase_shifter("psi2", 0.5).matrix)
    bs = ElementSpec(ElementKind.BEAM_SPLITTER, in_labels=STAGES[1], out_labels=STAGES[2]).build()
    np.testing.assert_array_equal(bs.matrix, optics.BS2.matrix)
    with pytest.raises(ValueError):
        ElementSpec(ElementKind.SPIN_ROTATOR, parameter=float("nan"))


# properties


def test_all_elements_unitary_for_random_phases(rng):
    for delta, phi, eta in rng.uniform(0, 2 * math.pi, size=(100, 3)):
        ops = [
            optics.spin_rotator(delta),
            optics.phase_shifter("psi2", phi),
            optics.phase_shifter("psi3", eta),
            optics.BS1,
            optics.BS2,
            optics.BS3,
            optics.mirror(),
            optics.interferometer(delta, phi),
            optics.extended_interferometer(delta, phi, eta),
        ]
        assert all(is_unitary(op) for op in ops)


def _random_spin_unitary(rng):
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return Operator(q, SPIN)


def test_beam_splitter_commutes_with_spin_operators(rng):
    for _ in range(20):
        u = _random_spin_unitary(rng)
        before = tensor_op(hb.identity(optics.path_space(STAGES[2])), u) @ optics.BS2
        after = optics.BS2 @ tensor_op(hb.identity(optics.path_space(STAGES[1])), u)
        np.testing.assert_allclose(before.matrix, after.matrix, atol=1e-15)


@given(phases, phases)
@settings(max_examples=50)
def test_phase_shifter_additive(a, b):
    lhs = optics.phase_shifter("psi3", a) @ optics.phase_shifter("psi3", b)
    np.testing.assert_allclose(lhs.matrix, optics.phase_shifter("psi3", a + b).matrix, atol=1e-12)


@given(phases)
def test_spin_rotator_periodic(delta):
    a = hb.apply(optics.spin_rotator_spin(delta), hb.spin_up())
    b = hb.apply(optics.spin_rotator_spin(delta + 2 * math.pi), hb.spin_up())
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)
