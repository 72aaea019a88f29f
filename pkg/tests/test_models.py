import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncspec.errors import InvalidInputError, UnsupportedOrderError
from ncspec.matops import GeneralOperator, HermitianOperator, hermitian_eig
from ncspec.models import (DiagonalModel, TorusSymbolModel, abs_derivative_matrix, build_diagonal,
                           diagonal_sequence, free_torus_sequence, frequencies, load_model_json,
                           multiplication_matrix, nc_residue_quadrature, predicted_connes_integral,
                           save_model_json, sphere_area, symbol_weyl_rhs, torus_matrix)

COS = {1: 0.5, -1: 0.5}
TWO_PLUS_COS = {0: 2.0, 1: 0.5, -1: 0.5}


def circle(coeffs, cutoff=64, **kw):
    return TorusSymbolModel.trigonometric(coeffs, cutoff=cutoff, **kw)


class TestDiagonal:
    def test_harmonic(self):
        np.testing.assert_allclose(build_diagonal(DiagonalModel("harmonic", 3)).entries,
                                   np.diag([1, 1 / 2, 1 / 3]))

    def test_power(self):
        np.testing.assert_allclose(build_diagonal(DiagonalModel("power", 2, alpha=2)).entries,
                                   np.diag([1, 1 / 4]))

    def test_custom(self):
        np.testing.assert_array_equal(build_diagonal(DiagonalModel("custom", values=(5, 1))).entries,
                                      np.diag([5, 1]))

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            DiagonalModel("harmonic", 0)
        with pytest.raises(InvalidInputError):
            DiagonalModel("power", 3, alpha=-1)
        with pytest.raises(InvalidInputError):
            DiagonalModel("cubic", 3)

    def test_dense_refused(self):
        with pytest.raises(InvalidInputError) as info:
            build_diagonal(DiagonalModel("harmonic", 10 ** 6))
        assert info.value.guard == "max-dim"

    def test_sequence_nonincreasing(self):
        for rule in ("harmonic", "power", "log_oscillating"):
            seq = diagonal_sequence(DiagonalModel(rule, 1000, alpha=0.7))
            assert np.all(np.diff(np.abs(seq.values)) <= 0)

    def test_oscillating_values(self):
        j = np.arange(5.0)
        expected = (1 + np.sin(np.log(np.log(j + 2)))) / (j + 1)
        np.testing.assert_allclose(DiagonalModel("log_oscillating", 5).raw_values(), expected)


class TestTorusModel:
    def test_support_guard(self):
        with pytest.raises(InvalidInputError):
            circle({3: 1.0}, cutoff=4)

    def test_aliasing_guard(self):
        with pytest.raises(InvalidInputError) as info:
            torus_matrix(circle(COS, cutoff=3))
        assert info.value.guard == "aliasing"

    def test_reality(self):
        assert circle(COS).is_real
        assert not circle({1: 0.5}).is_real
        assert circle({1: 0.5j, -1: -0.5j}).is_real  # sin x

    def test_dimension_checks(self):
        with pytest.raises(InvalidInputError):
            TorusSymbolModel(n=3, m=1)
        with pytest.raises(InvalidInputError):
            TorusSymbolModel(n=2, m=2, fhat={(1,): 1.0})
        with pytest.raises(InvalidInputError):
            TorusSymbolModel(n=1, m=0)

    def test_constant_is_diagonal_closed_form(self):
        m = circle({0: 1.0}, cutoff=50)
        a = torus_matrix(m)
        assert isinstance(a, HermitianOperator)
        assert np.count_nonzero(a.entries - np.diag(np.diag(a.entries))) == 0
        seq = hermitian_eig(a)
        closed = free_torus_sequence(1, 1, 50)
        np.testing.assert_allclose(seq.values[:100], closed.values, rtol=1e-14)
        np.testing.assert_allclose(seq.values[:6], [1, 1, 1 / 2, 1 / 2, 1 / 3, 1 / 3])
        assert seq.values[100] == 0

    def test_constant_2d_closed_form(self):
        m = TorusSymbolModel(n=2, m=2.0, fhat={(0, 0): 1.0}, cutoff=10)
        seq = hermitian_eig(torus_matrix(m))
        np.testing.assert_allclose(seq.values[:440], free_torus_sequence(2, 2, 10).values, rtol=1e-13)

    def test_zero(self):
        assert not np.any(torus_matrix(circle({}, cutoff=8)).entries)

    def test_cos_entries(self):
        K = 16
        a = torus_matrix(circle(COS, cutoff=K)).entries
        k = np.arange(-K, K + 1)
        for i in range(2 * K):
            k1, k2 = k[i], k[i + 1]
            expected = 0.0 if 0 in (k1, k2) else 0.5 * abs(k1) ** -0.5 * abs(k2) ** -0.5
            assert a[i + 1, i] == pytest.approx(expected, rel=1e-15)
            assert a[i, i + 1] == pytest.approx(expected, rel=1e-15)
        assert np.count_nonzero(np.triu(a, 2)) == 0
        assert np.all(np.diag(a) == 0)

    def test_one_sided_entries(self, rng):
        K = 12
        m = circle(TWO_PLUS_COS, cutoff=K, symmetrized=False)
        a = torus_matrix(m)
        assert isinstance(a, GeneralOperator) and not isinstance(a, HermitianOperator)
        k = frequencies(1, K)[:, 0]
        c = multiplication_matrix(m)
        expected = c * np.where(k == 0, 0, 1.0 / np.maximum(np.abs(k), 1))[None, :]
        np.testing.assert_allclose(a.entries, expected)

    def test_2d_hermitian(self, rng):
        fhat = {(0, 0): 1.0, (1, 0): 0.25, (-1, 0): 0.25, (0, 1): 0.1j, (0, -1): -0.1j}
        m = TorusSymbolModel(n=2, m=2.0, fhat=fhat, cutoff=6)
        a = torus_matrix(m)
        assert isinstance(a, HermitianOperator)
        assert np.abs(a.entries - a.entries.conj().T).max() <= 1e-12 * np.abs(a.entries).max()

    def test_multiplication_matches_pointwise(self):
        # C e_k' = e^{ik'x} f restricted to the box
        m = TorusSymbolModel(n=2, m=2.0, fhat={(1, -1): 0.3, (0, 2): 1.5}, cutoff=8)
        c = multiplication_matrix(m)
        freq = [tuple(f) for f in frequencies(2, 8)]
        src = freq.index((2, 3))
        assert c[freq.index((3, 2)), src] == 0.3
        assert c[freq.index((2, 5)), src] == 1.5
        assert np.count_nonzero(c[:, src]) == 2

    def test_doubling_stability(self):
        # leading moduli are insensitive to the cutoff (signs of +- ties may swap)
        for coeffs in (COS, TWO_PLUS_COS):
            K = 64
            a = np.abs(hermitian_eig(torus_matrix(circle(coeffs, cutoff=K))).values)
            b = np.abs(hermitian_eig(torus_matrix(circle(coeffs, cutoff=2 * K))).values)
            assert np.abs(a[:K // 2] - b[:K // 2]).max() < 1e-8

    def test_abs_derivative(self):
        np.testing.assert_allclose(np.diag(abs_derivative_matrix(1, 2).entries), [2, 1, 0, 1, 2])

    def test_json_roundtrip(self, tmp_path):
        m = TorusSymbolModel(n=2, m=2.0, fhat={(0, 0): 1.0, (1, 0): 0.5 + 0.25j}, cutoff=8,
                             symmetrized=False)
        path = tmp_path / "model.json"
        save_model_json(m, path)
        back = load_model_json(path)
        assert back.fhat == m.fhat and back.cutoff == 8 and not back.symmetrized and back.m == 2

    def test_json_unknown_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 1, "m": 1, "cutoff": 8, "fhat": [], "colour": 1}')
        with pytest.raises(InvalidInputError):
            load_model_json(path)


class TestQuadrature:
    def test_sphere_area(self):
        assert sphere_area(1) == pytest.approx(2)
        assert sphere_area(2) == pytest.approx(2 * math.pi)

    def test_residue_two_plus_cos(self):
        assert nc_residue_quadrature(circle(TWO_PLUS_COS)) == pytest.approx(4, abs=1e-8)

    def test_residue_zero_and_one(self):
        assert nc_residue_quadrature(circle({})) == 0
        assert nc_residue_quadrature(circle({0: 1.0})) == pytest.approx(2, abs=1e-12)

    def test_residue_order(self):
        with pytest.raises(UnsupportedOrderError):
            nc_residue_quadrature(circle({0: 1.0}, m=2.0))

    def test_residue_2d(self):
        m = TorusSymbolModel(n=2, m=2.0, fhat={(0, 0): 3.0, (1, 1): 0.5, (-1, -1): 0.5}, cutoff=8)
        # (2 pi)^{-2} * (2 pi)^2 * 3 * 2 pi
        assert nc_residue_quadrature(m) == pytest.approx(6 * math.pi, rel=1e-12)

    def test_predicted(self):
        assert predicted_connes_integral(circle({0: 1.0})) == pytest.approx(2, abs=1e-8)
        assert predicted_connes_integral(circle({})) == 0
        assert predicted_connes_integral(circle(TWO_PLUS_COS)) == pytest.approx(4, abs=1e-12)
        with pytest.raises(UnsupportedOrderError):
            predicted_connes_integral(circle({0: 1.0}, m=0.5))

    @pytest.mark.parametrize("model", [
        TorusSymbolModel(n=1, m=1.0, fhat={0: 1.5, 2: 0.2, -2: 0.2}, cutoff=16),
        TorusSymbolModel(n=2, m=2.0, fhat={(0, 0): 0.7, (1, 0): 0.1, (-1, 0): 0.1}, cutoff=8),
    ])
    def test_trace_theorem(self, model):
        assert predicted_connes_integral(model) == pytest.approx(nc_residue_quadrature(model) / model.n, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.dictionaries(st.integers(-3, 3), st.floats(-2, 2), max_size=4),
           st.dictionaries(st.integers(-3, 3), st.floats(-2, 2), max_size=4), st.floats(-3, 3))
    def test_residue_linear(self, f, g, c):
        res = lambda h: nc_residue_quadrature(TorusSymbolModel(n=1, m=1.0, fhat=h, cutoff=16))
        combined = {k: f.get(k, 0) + c * g.get(k, 0) for k in set(f) | set(g)}
        lhs, rhs = res(combined), res(f) + c * res(g)
        assert abs(lhs - rhs) < 1e-9 * (1 + abs(lhs))

    def test_weyl_rhs_cos(self):
        m = circle(COS)
        assert symbol_weyl_rhs(m, 1, "plus") == pytest.approx(2 / math.pi, rel=1e-6)
        assert symbol_weyl_rhs(m, 1, "minus") == pytest.approx(2 / math.pi, rel=1e-6)
        assert symbol_weyl_rhs(m, 1, "abs") == pytest.approx(4 / math.pi, rel=1e-6)

    def test_weyl_rhs_one(self):
        assert symbol_weyl_rhs(circle({0: 1.0}), 1, "abs") == pytest.approx(2, rel=1e-12)

    def test_weyl_rhs_p_two(self):
        # order -1/2 on the circle, p = 2: [(1/2pi) * 2pi * 2 * 3^2]^{1/2}
        m = TorusSymbolModel(n=1, m=0.5, fhat={0: 3.0}, cutoff=16)
        assert symbol_weyl_rhs(m, 2, "abs") == pytest.approx(math.sqrt(2 * 9), rel=1e-12)

    def test_weyl_rhs_errors(self):
        with pytest.raises(InvalidInputError):
            symbol_weyl_rhs(circle(COS), 2, "abs")
        with pytest.raises(InvalidInputError):
            symbol_weyl_rhs(circle(COS), 1, "both")

    def test_resolution_floor(self):
        m = circle(TWO_PLUS_COS, cutoff=100)
        assert m.resolution_floor() == pytest.approx(3 / 100)
