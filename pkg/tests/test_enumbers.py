"""Elliptic integers, factorials and binomials, with the trigonometric
q-number product as the independent oracle."""

import math

import numpy as np
import pytest

from lame_spectra import EllipticParams, ThetaEvaluator, ebinom, ebracket, efactorial, qnumber


@pytest.fixture
def ev():
    return ThetaEvaluator(EllipticParams(tau=1.2j, eta=0.17, tol=1e-12))


def trig_binomial(n, m, eta):
    """q-binomial via sin-ratio products; independent of the theta code."""
    def fac(k):
        out = 1.0
        for j in range(1, k + 1):
            out *= math.sin(math.pi * eta * j) / math.sin(math.pi * eta)
        return out

    return fac(n) / (fac(m) * fac(n - m))


class TestBracket:
    def test_one(self, ev):
        assert ebracket(1, ev) == 1

    def test_zero(self, ev):
        assert ebracket(0, ev) == 0

    def test_odd(self, ev):
        assert ebracket(-3, ev) == pytest.approx(-ebracket(3, ev), rel=1e-13)

    def test_trig_limit(self):
        ev40 = ThetaEvaluator(EllipticParams(tau=40j, eta=0.2, tol=1e-12))
        want = math.sin(3 * 0.2 * math.pi) / math.sin(0.2 * math.pi)
        assert abs(ebracket(3, ev40) - want) < 1e-6

    def test_small_eta_limit_quadratic(self):
        # [n] -> n with an O(eta^2) error
        devs = []
        for eta in (1e-2, 1e-3):
            ev_s = ThetaEvaluator(EllipticParams(tau=1.1j, eta=eta, tol=1e-14))
            devs.append(max(abs(ebracket(n, ev_s) - n) for n in range(2, 6)))
        assert devs[0] < 0.05
        assert devs[0] / devs[1] == pytest.approx(100, rel=0.3)


class TestFactorial:
    def test_empty_product(self, ev):
        assert efactorial(0, ev) == 1

    def test_one(self, ev):
        assert efactorial(1, ev) == 1

    def test_three(self, ev):
        want = ebracket(2, ev) * ebracket(3, ev)
        assert efactorial(3, ev) == pytest.approx(want, rel=1e-13)

    def test_negative_rejected(self, ev):
        with pytest.raises(ValueError):
            efactorial(-1, ev)


class TestBinomial:
    def test_edges_are_one(self, ev):
        assert ebinom(5, 0, ev) == 1
        assert ebinom(5, 5, ev) == 1

    def test_symmetry_grid(self, ev):
        for n in range(1, 9):
            for m in range(n + 1):
                lhs = ebinom(n, m, ev)
                rhs = ebinom(n, n - m, ev)
                assert abs(lhs - rhs) < 1e-11 * max(abs(lhs), 1.0)

    def test_out_of_range(self, ev):
        with pytest.raises(ValueError):
            ebinom(4, 5, ev)
        with pytest.raises(ValueError):
            ebinom(4, -1, ev)

    def test_q_binomial_oracle(self):
        ev40 = ThetaEvaluator(EllipticParams(tau=40j, eta=0.1, tol=1e-12))
        want = trig_binomial(4, 2, 0.1)
        assert abs(ebinom(4, 2, ev40) - want) < 1e-8


class TestQNumber:
    def test_matches_sin_ratio(self):
        eta = 0.23
        q = complex(np.exp(2j * np.pi * eta))
        for j in range(1, 7):
            want = math.sin(math.pi * eta * j) / math.sin(math.pi * eta)
            assert qnumber(j, q) == pytest.approx(want, rel=1e-12)
