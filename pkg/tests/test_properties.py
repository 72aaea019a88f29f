import numpy as np
import pytest

from ncspec.matops import GeneralOperator, HermitianOperator, hermitian_eig
from ncspec.properties import (ideal_excess, ky_fan_excess, quasi_triangle_excess, random_hermitian,
                               random_psd, random_unitary, run_property_suite, signed_ky_fan_excess,
                               weak_trace_hermitian, weyl_sum_excess)


def test_unitary(rng):
    u = random_unitary(rng, 12)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(12), atol=1e-12)
    o = random_unitary(rng, 5, real=True)
    assert not np.iscomplexobj(o)


def test_prescribed_spectrum(rng):
    eig = np.linspace(-1, 2, 9)
    a = random_hermitian(rng, 9, eig)
    np.testing.assert_allclose(np.sort(hermitian_eig(a).values), eig, atol=1e-12)


def test_psd(rng):
    a = random_psd(rng, 6, rank=2)
    w = np.sort(hermitian_eig(a).values)
    assert w.min() > -1e-12 and np.sum(w > 1e-10) == 2


def test_weak_trace_envelope(rng):
    a = weak_trace_hermitian(rng, 200)
    mu = np.sort(np.abs(hermitian_eig(a).values))[::-1]
    # |lambda| = u_j / (j+1) with u_j in [1/2, 3/2], so (j+1) mu_j <= 3/2 after sorting
    assert np.max(np.arange(1, 201) * mu) <= 1.5 + 1e-12


def test_tight_cases_have_zero_slack():
    # inequalities attained with equality: the excess is exactly minus the tolerance
    s = HermitianOperator(np.diag([1.0, 0.0]))
    t = HermitianOperator(np.diag([0.0, 1.0]))
    assert ky_fan_excess(s, t) == pytest.approx(-1e-10, abs=1e-16)
    assert signed_ky_fan_excess(s, t) == pytest.approx(-1e-10, abs=1e-16)
    nilpotent = GeneralOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert weyl_sum_excess(nilpotent) == pytest.approx(-1e-10, abs=1e-16)
    one = GeneralOperator(np.eye(2))
    assert ideal_excess(one, GeneralOperator(np.diag([2.0, 1.0])), one) == pytest.approx(-2e-10, abs=1e-16)


def test_quasi_triangle_margin():
    # ||2I||_{1,inf} = 4 against 2 * (2 + 2)
    eye = HermitianOperator(np.eye(2))
    assert quasi_triangle_excess(eye, eye, 1.0) == pytest.approx(4 - 8 - 8e-10)


def test_suite_small():
    results = run_property_suite(n_pairs=25, max_dim=20, seed=7)
    assert [r.name for r in results] == ["ky_fan", "signed_ky_fan", "ideal", "quasi_triangle", "weyl_sums"]
    assert all(r.violations == 0 for r in results)
    assert results[3].checks == 75


def test_suite_deterministic():
    a = run_property_suite(n_pairs=5, max_dim=10, seed=1)
    b = run_property_suite(n_pairs=5, max_dim=10, seed=1)
    assert a == b
