"""Special functions: radial functions, Legendre/harmonics, Gaunt coefficients."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gaunt_quadrature, mp_sph_h1, mp_sph_jn, mp_sph_yn
from pcfilm.errors import InvalidArgumentError, SingularArgumentError
from pcfilm.specfun import (
    AngularIndex,
    assoc_legendre,
    gaunt,
    gaunt_lmm,
    sph_bessel,
    sph_hankel1,
    sph_neumann,
    zl_derivative,
)


class TestSphBessel:
    def test_j0_closed_form(self):
        j = sph_bessel(0, 1.0)
        assert j[0] == pytest.approx(math.sin(1.0), abs=1e-12)

    def test_small_argument_j1(self):
        j = sph_bessel(1, 1e-4)
        assert j[1] == pytest.approx(1e-4 / 3.0, rel=1e-6)

    def test_complex_argument_vs_oracle(self):
        z = 2.0 + 0.5j
        j = sph_bessel(5, z)
        for l in range(6):
            ref = mp_sph_jn(l, z)
            assert abs(j[l] - ref) <= 1e-12 * abs(ref)

    def test_zero_argument_analytic(self):
        j = sph_bessel(3, 0.0)
        assert j[0] == 1.0
        assert np.all(j[1:] == 0.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidArgumentError):
            sph_bessel(2, complex("nan"))

    @given(
        r=st.floats(1e-3, 50.0),
        phase=st.floats(0.0, 2.0 * math.pi),
        lmax=st.integers(0, 10),
    )
    @settings(max_examples=60, deadline=None)
    def test_recurrence_residual(self, r, phase, lmax):
        z = r * cmath.exp(1j * phase)
        j = sph_bessel(lmax + 1, z)
        scale = max(np.max(np.abs(j)), 1.0)
        for l in range(1, lmax + 1):
            res = j[l - 1] + j[l + 1] - (2 * l + 1) / z * j[l]
            assert abs(res) < 1e-12 * scale


class TestSphHankel:
    def test_h0_closed_form(self):
        h = sph_hankel1(0, 1.0)
        assert h[0] == pytest.approx(math.sin(1.0) - 1j * math.cos(1.0), abs=1e-13)

    def test_h1_closed_form(self):
        # h1_1(z) = -e^{iz} (z + i) / z^2
        z = 1.0
        h = sph_hankel1(1, z)
        ref = -cmath.exp(1j * z) * (z + 1j) / z**2
        assert h[1] == pytest.approx(ref, abs=1e-12)
        assert h[1].imag == pytest.approx(-1.381773, abs=1e-6)

    def test_zero_argument_raises(self):
        with pytest.raises(SingularArgumentError):
            sph_hankel1(2, 0.0)

    def test_complex_argument_vs_oracle(self):
        z = 0.5 + 2.0j
        h = sph_hankel1(6, z)
        for l in range(7):
            ref = mp_sph_h1(l, z)
            assert abs(h[l] - ref) <= 1e-12 * abs(ref)

    @given(
        r=st.floats(1e-3, 50.0),
        phase=st.floats(0.0, 2.0 * math.pi),
    )
    @settings(max_examples=60, deadline=None)
    def test_wronskian(self, r, phase):
        z = r * cmath.exp(1j * phase)
        lmax = 4
        j = sph_bessel(lmax, z)
        y = sph_neumann(lmax, z)
        jp = zl_derivative(j, z)
        yp = zl_derivative(y, z)
        for l in range(lmax + 1):
            w = j[l] * yp[l] - jp[l] * y[l]
            # relative to the cancellation scale (j, y grow like e^{|Im z|})
            scale = max(abs(1.0 / z**2), abs(j[l] * yp[l]) + abs(jp[l] * y[l]))
            assert abs(w - 1.0 / z**2) <= 1e-10 * scale

    def test_wronskian_spec_point(self):
        z = 0.5 + 2.0j
        j = sph_bessel(3, z)
        y = sph_neumann(3, z)
        jp = zl_derivative(j, z)
        yp = zl_derivative(y, z)
        for l in range(4):
            w = j[l] * yp[l] - jp[l] * y[l]
            assert abs(w - 1.0 / z**2) <= 1e-10 * abs(1.0 / z**2)


class TestAssocLegendre:
    def test_p10(self):
        p = assoc_legendre(1, 0.3)
        assert p[1, 0] == pytest.approx(0.3, abs=1e-14)

    def test_pole_degeneracy(self):
        p = assoc_legendre(2, 1.0)
        for l in range(3):
            for m in range(1, l + 1):
                assert p[l, m] == 0.0

    def test_vs_polynomial_oracle(self):
        # explicit expansion oracle (generalized binomials), no recurrences
        from math import comb, factorial

        from scipy.special import binom

        def plm(l, m, x):
            total = 0.0
            for k in range(m, l + 1):
                total += (
                    factorial(k)
                    / factorial(k - m)
                    * x ** (k - m)
                    * comb(l, k)
                    * binom((l + k - 1) / 2.0, l)
                )
            return (-1) ** m * 2**l * (1 - x * x) ** (m / 2) * total

        x = -0.7
        p = assoc_legendre(6, x)
        for l in range(7):
            for m in range(l + 1):
                ref = plm(l, m, x)
                assert abs(p[l, m] - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidArgumentError):
            assoc_legendre(2, 1.5)

    @given(x=st.floats(-1.0, 1.0), lmax=st.integers(2, 8))
    @settings(max_examples=60, deadline=None)
    def test_l_recurrence(self, x, lmax):
        p = assoc_legendre(lmax, x)
        scale = max(np.max(np.abs(p)), 1.0)
        for l in range(1, lmax):
            for m in range(l):
                res = (l + 1 - m) * p[l + 1, m] - (2 * l + 1) * x * p[l, m] + (l + m) * p[l - 1, m]
                assert abs(res) < 1e-12 * scale


class TestGaunt:
    def test_y00_normalization(self):
        v = gaunt(AngularIndex(0, 0), AngularIndex(0, 0), AngularIndex(0, 0))
        assert v == pytest.approx(1.0 / math.sqrt(4.0 * math.pi), abs=1e-14)

    def test_m_selection_rule(self):
        assert gaunt(AngularIndex(1, 0), AngularIndex(1, 0), AngularIndex(1, 1)) == 0.0

    def test_vs_quadrature_oracle(self):
        v = gaunt(AngularIndex(2, 1), AngularIndex(1, 0), AngularIndex(3, 1))
        ref = gaunt_quadrature(2, 1, 1, 0, 3, 1)
        assert v == pytest.approx(ref, abs=1e-12)

    @given(
        l1=st.integers(0, 4),
        l2=st.integers(0, 4),
        l3=st.integers(0, 6),
        m1=st.integers(-4, 4),
        m2=st.integers(-4, 4),
    )
    @settings(max_examples=80, deadline=None)
    def test_exchange_symmetry_and_quadrature(self, l1, l2, l3, m1, m2):
        if abs(m1) > l1 or abs(m2) > l2 or abs(m1 + m2) > l3:
            return
        m3 = m1 + m2
        a = gaunt(AngularIndex(l1, m1), AngularIndex(l2, m2), AngularIndex(l3, m3))
        b = gaunt(AngularIndex(l2, m2), AngularIndex(l1, m1), AngularIndex(l3, m3))
        assert a == pytest.approx(b, abs=1e-14)
        ref = gaunt_quadrature(l1, m1, l2, m2, l3, m3)
        assert a == pytest.approx(ref, abs=1e-12)

    def test_selection_rule_violations_exact_zero(self):
        # triangle violation
        assert gaunt_lmm(0, 0, 0, 0, 2, 0) == 0.0
        # parity violation
        assert gaunt_lmm(1, 0, 1, 0, 1, 0) == 0.0
