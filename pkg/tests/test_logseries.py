import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renormnd.errors import DomainError, StructureError
from renormnd.logseries import (
    LogLaurentSeries,
    SingularModel,
    khat_printed_finite_part,
    mul,
    series_khat,
    series_ktilde,
    split_singular,
)
from renormnd.specfun import EULER_GAMMA, bessel_k

LOG2 = math.log(2)
SQ = math.sqrt(math.pi / 2)


def S(*terms, order=math.inf):
    return LogLaurentSeries.from_terms(terms, order)


# --- container -------------------------------------------------------------------

def test_normalization_merges_and_sorts():
    s = S((1, 0, 2.0), (-1, 0, 1.0), (1, 0, 3.0), (1 + 1e-12, 0, 1.0), (0, 1, 0.0))
    assert s.terms == ((-1.0, 0, 1.0), (1.0, 0, 6.0))


def test_truncation_drops_high_exponents():
    s = S((0, 0, 1.0), (3, 0, 1.0), order=2)
    assert s.exponents == (0.0,)
    assert s.truncation_order == 2


def test_log_power_limit():
    with pytest.raises(StructureError):
        LogLaurentSeries(((0.0, 3, 1.0),))
    with pytest.raises(StructureError):
        mul(S((0, 2, 1.0)), S((0, 1, 1.0)), 1)


def test_eval_and_parts():
    s = S((-1, 0, 2.0), (0, 0, 3.0), (0, 1, -1.0), (2, 0, 1.0))
    z = 0.3
    assert s(z) == pytest.approx(2 / z + 3 - math.log(z) + z * z)
    assert s.constant == 3.0
    assert s.singular_part().terms == ((-1.0, 0, 2.0), (0.0, 1, -1.0))
    assert s.without_constant()(z) == pytest.approx(s(z) - 3)


def test_rescale_substitutes_argument():
    s = S((-2, 0, 1.0), (0, 1, 2.0), (2, 2, 0.5), (0, 0, 0.25))
    r, e = 3.0, 0.07
    assert s.rescale(r)(e) == pytest.approx(s(r * e), rel=1e-13)


# --- mul ---------------------------------------------------------------------------

def test_mul_examples():
    assert mul(S((-1, 0, 1.0)), S((1, 0, 2.0)), 4).terms == ((0.0, 0, 2.0),)
    assert mul(S((0, 1, 1.0)), S((0, 1, 1.0)), 0).terms == ((0.0, 2, 1.0),)


def test_mul_half_order_product():
    c = 1 / (2 ** 0.5 * math.gamma(1.5))
    p = mul(series_khat(0.5, 4), series_ktilde(1.5, 4), 2).scale(c * c)
    # eps^-1 e^(-2 eps) (1 + eps) = eps^-1 - 1 + 0 eps + (2/3) eps^2 + ...
    assert p.coefficient(-1) == pytest.approx(1, abs=1e-15)
    assert p.coefficient(0) == pytest.approx(-1, abs=1e-15)
    assert p.coefficient(1) == pytest.approx(0, abs=1e-15)
    assert p.coefficient(2) == pytest.approx(2 / 3, abs=1e-15)


def _series_strategy(max_log):
    term = st.tuples(st.integers(-6, 6).map(lambda k: k / 2),
                     st.integers(0, max_log),
                     st.floats(-10, 10, allow_nan=False).filter(lambda c: abs(c) > 1e-3))
    return st.lists(term, min_size=1, max_size=10).map(lambda ts: LogLaurentSeries(tuple(ts)))


def _close(a, b, tol=1e-14):
    keys = {(x, p) for x, p, _ in a.terms} | {(x, p) for x, p, _ in b.terms}
    scale = max([1.0] + [abs(c) for _, _, c in a.terms + b.terms])
    return all(abs(a.coefficient(x, p) - b.coefficient(x, p)) <= tol * scale for x, p in keys)


@settings(max_examples=100, deadline=None)
@given(_series_strategy(1), _series_strategy(1))
def test_mul_commutative(a, b):
    assert _close(mul(a, b, 20), mul(b, a, 20))


@settings(max_examples=100, deadline=None)
@given(_series_strategy(1), _series_strategy(1), _series_strategy(0))
def test_mul_associative(a, b, c):
    assert _close(mul(mul(a, b, 30), c, 30), mul(a, mul(b, c, 30), 30), 1e-13)


# --- K-hat / K-tilde expansions --------------------------------------------------------

def test_series_khat_half():
    s = series_khat(0.5, 2)
    assert s.coefficient(-1) == pytest.approx(SQ, rel=1e-15)
    assert s.coefficient(0) == pytest.approx(-SQ, rel=1e-15)
    assert s.coefficient(1) == pytest.approx(SQ / 2, rel=1e-15)
    assert s.coefficient(2) == pytest.approx(-SQ / 6, rel=1e-15)


def test_series_khat_integer_one_leading():
    s = series_khat(1, 0)
    assert s.coefficient(-2) == 1.0
    assert s.exponents == (-2.0, 0.0)
    # corrected finite part of hat K_1: -(1/4)(psi(1) + psi(2) + 2 log 2) and log coefficient +1/2
    assert s.coefficient(0, 1) == pytest.approx(0.5, rel=1e-15)
    assert s.coefficient(0, 0) == pytest.approx(-0.25 * (1 - 2 * EULER_GAMMA + 2 * LOG2), rel=1e-14)


def test_series_khat_zero():
    s = series_khat(0, 0)
    assert s.terms == ((0.0, 0, pytest.approx(LOG2 - EULER_GAMMA, rel=1e-15)), (0.0, 1, -1.0))


def test_series_khat_sign_for_small_order():
    s = series_khat(0.3, 1)
    assert s.coefficient(-0.6) > 0
    f = s.constant
    expected = -math.pi / (2 ** 1.3 * math.gamma(1.3) * math.sin(0.3 * math.pi))
    assert f == pytest.approx(expected, rel=1e-14)
    assert khat_printed_finite_part(0.3) == pytest.approx(-expected, rel=1e-14)


def test_printed_integer_finite_part_is_twice_corrected():
    for n in range(0, 4):
        corrected = series_khat(n, 0).constant
        assert khat_printed_finite_part(n) == pytest.approx(2 * corrected, rel=1e-14)


def test_series_ktilde_examples():
    s = series_ktilde(1.5, 2)
    assert s.constant == pytest.approx(2 ** 0.5 * math.gamma(1.5), rel=1e-15)
    assert min(a for a in s.exponents if a > 0) == pytest.approx(2.0)
    s = series_ktilde(1, 2)
    assert s.constant == pytest.approx(1.0, rel=1e-15)
    assert s.coefficient(2, 1) == pytest.approx(0.5, rel=1e-15)
    assert s.coefficient(2, 0) != 0
    z = 1e-3
    assert series_ktilde(2, 6)(z) == pytest.approx(bessel_k("tilde", 2, z), rel=1e-12)


@pytest.mark.parametrize("mu", [0.25, 1, 1.5, 2.5, 3, 7])
def test_series_ktilde_constant(mu):
    assert series_ktilde(mu, 0).constant == pytest.approx(2 ** (mu - 1) * math.gamma(mu), rel=1e-14)


def test_series_domain_errors():
    with pytest.raises(DomainError):
        series_khat(0.5, -1)
    with pytest.raises(DomainError):
        series_khat(6.5, 2)
    with pytest.raises(DomainError):
        series_ktilde(0, 2)
    with pytest.raises(DomainError):
        series_ktilde(7.5, 2)


@pytest.mark.parametrize("nu", [0.3, 0.5, 1, 1.5, 2])
def test_recomposition(nu):
    s = series_khat(nu, 8)
    for z in np.geomspace(1e-4, 1e-1, 25):
        direct = bessel_k("hat", nu, z)
        assert abs(s(z) - direct) <= 1e-9 * abs(direct)


@pytest.mark.parametrize("nu", [0, 1, 2, 3])
def test_integer_series_log_structure(nu):
    s = series_khat(nu, 8)
    logs = sorted(a for a, p, _ in s.terms if p == 1)
    assert logs == [float(k) for k in range(0, 9, 2)]
    assert all(p <= 1 for _, p, _ in s.terms)


@pytest.mark.parametrize("nu", [0.3, 0.5, 1.5, 2.7])
def test_noninteger_series_has_no_logs(nu):
    assert all(p == 0 for _, p, _ in series_khat(nu, 8).terms)


def test_series_against_mpmath_coefficients():
    # K_0(z) = -(log(z/2) + gamma) I_0(z) + z^2/4 + ... gives the z^2 log z coefficient -1/4
    s = series_khat(0, 2)
    assert s.coefficient(2, 1) == pytest.approx(-0.25, rel=1e-15)
    mp.mp.dps = 30
    z = mp.mpf("0.01")
    approx = sum(c * z ** a * mp.log(z) ** p for a, p, c in series_khat(0, 8).terms)
    assert float(approx) == pytest.approx(float(mp.besselk(0, z)), rel=1e-14)


# --- split_singular / SingularModel -----------------------------------------------------

def test_split_examples():
    m, f, lc = split_singular(S((-2, 0, 3.0), (0, 0, 7.0), (2, 0, 1.0)))
    assert m.power_exponents == (-2.0,) and not m.has_log and f == 7.0
    m, f, lc = split_singular(series_khat(0, 0))
    assert m.has_log and lc == 1.0 and f == pytest.approx(LOG2 - EULER_GAMMA)
    m, f, lc = split_singular(LogLaurentSeries())
    assert m.is_empty and f == 0.0


def test_split_reports_corrections():
    m, _, _ = split_singular(S((0, 0, 1.0), (1, 0, 1.0), (2, 1, 1.0), (4, 2, 1.0), (9, 0, 1.0)), 8)
    assert m.correction_exponents == (1.0,)
    assert m.log_corrections == (2.0,)
    assert m.log2_corrections == (4.0,)


def test_split_rejects_log_squared_constant():
    with pytest.raises(StructureError):
        split_singular(S((0, 2, 1.0)))


def test_model_validation_and_roundtrip():
    with pytest.raises(StructureError):
        SingularModel((1.0,))
    with pytest.raises(StructureError):
        SingularModel((), False, (0.0,))
    m = SingularModel((-2.0, -1.0), True, (2.0,), (2.0,), (4.0,))
    assert SingularModel.from_dict(m.to_dict()) == m
    assert m.basis_labels() == ["1", "log(1/eps)", "eps^-2", "eps^-1", "eps^2",
                                "eps^2 log(eps)", "eps^4 log(eps)^2"]
    assert m.basis([0.1]).shape == (1, 7)
