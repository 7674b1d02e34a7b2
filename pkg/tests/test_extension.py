import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate, special

from renormnd.errors import AccuracyError, DomainError
from renormnd.extension import (
    SampledFunction,
    energy_curve,
    energy_singular_model,
    flux_constant,
    flux_hat,
    mode_energy,
    mode_energy_expansion,
    mode_series,
    phi_sturm,
    poisson_energy0,
    poisson_u0,
    u_hat,
)
from renormnd.renorm import eps_grid
from renormnd.spectral import gaussian_profile, make_symbol, pairing

F1 = gaussian_profile(1, 1.0)


def test_flux_constant():
    assert flux_constant(0.5) == pytest.approx(1 / (math.sqrt(2) * math.gamma(1.5)))


def test_phi_sturm_examples():
    for y in (0.1, 1.0, 3.0):
        assert phi_sturm(0.5, 1.0, y) == pytest.approx(math.exp(-y) / y, rel=1e-14)
    assert phi_sturm(0, 4, 1) == pytest.approx(float(mp.besselk(0, 2)), rel=1e-14)
    assert phi_sturm(0, 4, 1) == pytest.approx(0.1138938, abs=1e-7)


@pytest.mark.parametrize("nu", [-0.5, 0, 0.5, 1.3, 2])
def test_phi_sturm_flux_normalization(nu):
    # -y^(1+2nu) phi'(y) -> 1 as y -> 0, by central differences
    y, h = 1e-4, 1e-7
    d = (phi_sturm(nu, 2.0, y + h) - phi_sturm(nu, 2.0, y - h)) / (2 * h)
    assert -(y ** (1 + 2 * nu)) * d == pytest.approx(1.0, abs=1e-3)


def test_u_hat_examples():
    assert u_hat(0, F1, 1.0, 1.0) == pytest.approx(float(mp.besselk(0, 1)) * F1(1.0), rel=1e-14)
    assert u_hat(0, F1, 1.0, 1.0) == pytest.approx(0.64010, abs=1e-5)
    for y in (0.2, 2.0):
        assert u_hat(0.5, F1, 1.0, y) / F1(1.0) == pytest.approx(math.exp(-y) / y, rel=1e-14)
    nu, r, y = 1.7, 0.8, 0.3
    got = u_hat(nu, F1, r, y) * 2 ** nu * math.gamma(1 + nu) / (r ** (2 * nu) * F1(r))
    assert got == pytest.approx(float(mp.besselk(nu, r * y)) * (r * y) ** -nu, rel=1e-13)


def test_flux_hat_examples():
    assert flux_hat(0, F1, 1.0, 1e-8) == pytest.approx(F1(1.0), abs=1e-6)
    assert flux_hat(0.5, F1, 1.0, 1.0) == pytest.approx(2 / math.e * F1(1.0), rel=1e-14)
    for r in np.geomspace(0.1, 10, 9):
        assert flux_hat(1.3, F1, r, 1e-8) / F1(r) == pytest.approx(1.0, abs=1e-5)


def test_mode_energy_examples():
    assert mode_energy(0.5, 1.0, 0.1) == pytest.approx(10 * math.exp(-0.2) * 1.1, rel=1e-14)
    z = mp.mpf("0.01")
    assert mode_energy(0, 1.0, 0.01) == pytest.approx(float(mp.besselk(0, z) * z * mp.besselk(1, z)), rel=1e-14)


@pytest.mark.parametrize("nu", [-0.5, 0, 0.5, 1, 2.5])
def test_mode_energy_homogeneity(nu):
    for r, e in [(0.5, 0.01), (3.0, 0.2)]:
        assert mode_energy(nu, r, e) == pytest.approx(r ** (2 * nu) * mode_energy(nu, 1.0, r * e), rel=1e-14)


def test_mode_energy_broadcast_and_domain():
    out = mode_energy(1.0, np.array([0.5, 1.0]), np.array([[0.1], [0.01]]))
    assert out.shape == (2, 2)
    assert out[1, 0] == mode_energy(1.0, 0.5, 0.01)
    with pytest.raises(DomainError):
        mode_energy(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        mode_energy(-1.0, 1.0, 0.1)


def test_mode_series_half():
    s = mode_series(0.5, 3)
    assert s.coefficient(-1) == pytest.approx(1.0)
    assert s.constant == pytest.approx(-1.0)
    assert s.coefficient(1) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_per_mode_exact_subtraction(nu, r):
    ex = mode_energy_expansion(nu, r)
    # sample where (r eps)^(-2 nu) <= 1e3 so float64 cancellation stays below 1e-13
    e = max(1e-3, 10 ** (-3 / (2 * nu)) if nu else 0) / r
    assert mode_energy(nu, r, e) - ex.nonconstant_value(e) == pytest.approx(ex.finite, abs=1e-8)
    assert set(ex.model.power_exponents) <= {-2 * (nu - j) for j in range(int(math.ceil(nu)))}
    assert ex.model.has_log == float(nu).is_integer()


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5])
def test_singular_subtraction_converges(nu):
    ex = mode_energy_expansion(nu, 1.0)
    errs = [abs(mode_energy(nu, 1.0, e) - ex.singular_value(e) - ex.finite) for e in (1e-1, 1e-2)]
    assert errs[1] < errs[0] / 10


@pytest.mark.parametrize("nu", [-0.7, -0.25, 0.3])
def test_mode_series_matches_energy(nu):
    s = mode_series(nu)
    for z in (1e-3, 0.05):
        assert s(z) == pytest.approx(mode_energy(nu, 1.0, z), rel=1e-12)


def test_energy_curve_half_order_against_scipy():
    # per-mode closed form eps^-1 e^(-2 r eps)(1 + r eps); (1/pi) int m(r) 2 pi e^(-r^2) dr
    e = 0.1
    val, _ = integrate.quad(lambda r: 2 * math.exp(-r * r) * math.exp(-2 * r * e) * (1 + r * e) / e,
                            0, np.inf, epsabs=0, epsrel=1e-13)
    got = energy_curve(0.5, F1, F1, [e]).values[0]
    assert got == pytest.approx(val, rel=1e-10)


def test_energy_curve_monotone_divergence():
    c = energy_curve(0, F1, F1, eps_grid(1e-3, 1e-1, 8))
    assert np.all(np.diff(c.values) > 0)
    assert c.meta["nu"] == 0


def test_energy_curve_negative_order_limit():
    nu = -0.25
    const = math.gamma(-nu) / (2 ** (2 * nu + 1) * math.gamma(1 + nu))
    target = const * pairing(F1, F1, make_symbol("frac", nu))
    vals = energy_curve(nu, F1, F1, [1e-6, 1e-8]).values
    # the approach is like eps^(1/2); check the convergence rate, then the limit
    assert abs(vals[1] - target) < abs(vals[0] - target) / 5
    assert energy_singular_model(nu, F1, F1).finite == pytest.approx(target, rel=1e-6)


def test_energy_singular_model_examples():
    sqrt_pi = math.sqrt(math.pi)
    ex = energy_singular_model(0, F1, F1)
    assert ex.model.has_log and ex.model.power_exponents == ()
    assert ex.log_coefficient == pytest.approx(sqrt_pi, rel=1e-12)
    ex = energy_singular_model(0.5, F1, F1)
    assert ex.model.power_exponents == (-1.0,) and not ex.model.has_log
    assert ex.coefficients["eps^-1"] == pytest.approx(sqrt_pi, rel=1e-12)
    ex = energy_singular_model(1, F1, F1)
    assert ex.model.power_exponents == (-2.0,) and ex.model.has_log


def test_energy_singular_model_subtraction_converges():
    for nu in (0, 0.5, 1):
        ex = energy_singular_model(nu, F1, F1)
        e = 2e-3
        v = energy_curve(nu, F1, F1, [e]).values[0] - ex.singular_value(e)
        assert v == pytest.approx(ex.finite, abs=1e-4)


def test_energy_dimension_mismatch():
    with pytest.raises(DomainError):
        energy_curve(0.5, F1, gaussian_profile(2, 1.0), [0.1])


# --- Poisson oracle -----------------------------------------------------------------

def _gauss(x):
    return np.exp(-x * x / 2)


def test_poisson_narrow_bump():
    s = 0.01
    fs = SampledFunction.from_callable(lambda x: np.exp(-x * x / (2 * s * s)), 0.2, 5e-4)
    mass = s * math.sqrt(2 * math.pi)
    assert poisson_u0(fs, 0.0, 1.0) == pytest.approx(0.5 * mass, rel=1e-4)


def test_poisson_decay():
    fs = SampledFunction.from_callable(_gauss, 12, 0.02)
    assert poisson_u0(fs, 0.0, 1e6) < 1e-5


def test_poisson_u0_fourier_consistency():
    # F_x[u](1, 1) = K_0(1) fhat(1); the 1/(2|x|) tail beyond L adds -2A Ci(L)
    fs = SampledFunction.from_callable(_gauss, 12, 0.02)
    L, h = 200.0, 0.02
    x = np.arange(-L, L + h / 2, h)
    u = poisson_u0(fs, x, 1.0)
    w = np.full(x.size, h)
    w[0] = w[-1] = h / 2
    body = float(np.dot(w, u * np.cos(x)))
    A = 0.5 * math.sqrt(2 * math.pi)
    _, ci = special.sici(L)
    got = body - 2 * A * ci
    assert got == pytest.approx(float(mp.besselk(0, 1)) * F1(1.0), abs=1e-3)


def test_poisson_errors():
    fs = SampledFunction.from_callable(_gauss, 3, 0.02)
    with pytest.raises(AccuracyError):
        poisson_u0(fs, 0.0, 1.0)
    fine = SampledFunction.from_callable(_gauss, 12, 0.5)
    with pytest.raises(AccuracyError):
        poisson_u0(fine, 0.0, 0.01)
    with pytest.raises(DomainError):
        poisson_u0(fine, 0.0, 0.0)


def test_poisson_energy_matches_spectral():
    fs = SampledFunction.from_callable(_gauss, 12, 0.01)
    e = 0.1
    got = poisson_energy0(fs, e, half_width=60, tol=1e-6)
    assert got == pytest.approx(energy_curve(0, F1, F1, [e]).values[0], rel=1e-3)
