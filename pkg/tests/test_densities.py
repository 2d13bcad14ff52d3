import math

import numpy as np
import pytest
from scipy import integrate

from matrixpoints.densities import DensityKind, as_kind, cdf, cdf_on_grid, density, interval_probability
from matrixpoints.errors import DomainError


def F_semicircle(t):
    t = min(max(t, -2.0), 2.0)
    return 0.5 + (t * math.sqrt(4 - t * t) / 2 + 2 * math.asin(t / 2)) / (2 * math.pi)


def F_arcsine(t):
    t = min(max(t, -2.0), 2.0)
    return 0.5 + math.asin(t / 2) / math.pi


def _half(F):
    # law of u^2 - 1 for symmetric u with CDF F
    return lambda t: 0.0 if t <= -1 else (1.0 if t >= 3 else 2 * F(math.sqrt(t + 1)) - 1)


def _mixed(G):
    # law of +-X with a fair random sign
    return lambda t: (G(t) + 1 - G(-t)) / 2


F_B2 = _half(F_semicircle)
F_B4 = _half(F_arcsine)
CLOSED_FORM = {
    DensityKind.SEMICIRCLE: F_semicircle,
    DensityKind.ARCSINE: F_arcsine,
    DensityKind.B1: _mixed(F_B2),
    DensityKind.B2: F_B2,
    DensityKind.B3: _mixed(F_B4),
    DensityKind.B4: F_B4,
}


@pytest.mark.parametrize(
    "kind, t, expected",
    [
        ("semicircle", 0.0, 1 / math.pi),
        ("b1", 0.0, 6 / (4 * math.pi * math.sqrt(3))),
        ("b2", 1.0, 1 / (2 * math.pi)),
        ("arcsine", 0.0, 1 / (2 * math.pi)),
        ("b4", 1.0, 1 / (2 * math.pi)),
        ("semicircle", 2.5, 0.0),
        ("b2", -1.5, 0.0),
        ("arcsine", 2.0, 0.0),
    ],
)
def test_density_values(kind, t, expected):
    assert density(kind, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("kind", list(DensityKind))
def test_integrates_to_one(kind):
    assert interval_probability(kind, *kind.support) == pytest.approx(1.0, abs=1e-6)
    assert interval_probability(kind, -10, 10) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("kind", list(DensityKind))
def test_cdf_matches_closed_form(kind):
    F = CLOSED_FORM[kind]
    lo, hi = kind.support
    grid = np.linspace(lo, hi, 241)
    got = cdf_on_grid(kind, grid)
    assert np.max(np.abs(got - [F(t) for t in grid])) < 1e-9
    for t in (lo + 0.013, 0.0, 0.999, 1.0, hi - 1e-7):
        assert cdf(kind, t) == pytest.approx(F(t), abs=1e-9)


def test_interval_probability_is_additive():
    for kind in DensityKind:
        a, b, c = -0.7, 0.2, 1.3
        whole = interval_probability(kind, a, c)
        assert whole == pytest.approx(interval_probability(kind, a, b) + interval_probability(kind, b, c), abs=1e-12)
        assert interval_probability(kind, c, a) == pytest.approx(-whole, abs=1e-15)


def test_mixture_identities():
    t = np.linspace(-3, 3, 1000)
    assert np.max(np.abs(density("b1", t) - (density("b2", t) + density("b2", -t)) / 2)) <= 1e-12
    assert np.max(np.abs(density("b3", t) - (density("b4", t) + density("b4", -t)) / 2)) <= 1e-12


@pytest.mark.parametrize("src, dst", [("semicircle", "b2"), ("arcsine", "b4")])
def test_pushforward_by_square_minus_one(src, dst):
    u = np.linspace(-2, 2, 1001)
    u = u[(u != 0) & (np.abs(u) < 2)]
    t = u * u - 1
    image = density(src, np.sqrt(t + 1)) / np.sqrt(t + 1)
    assert np.max(np.abs(image - density(dst, t))) <= 1e-9


def test_quadrature_agrees_with_plain_scipy_on_smooth_piece():
    ref, _ = integrate.quad(lambda x: density("b1", x), 1.2, 2.6)
    assert interval_probability("b1", 1.2, 2.6) == pytest.approx(ref, abs=1e-10)


def test_as_kind():
    assert as_kind("B3") is DensityKind.B3
    assert as_kind(DensityKind.ARCSINE) is DensityKind.ARCSINE
    with pytest.raises(DomainError):
        as_kind("gaussian")


def test_vectorised_and_scalar_agree():
    t = np.linspace(-3.2, 3.2, 77)
    for kind in DensityKind:
        arr = density(kind, t)
        assert np.all(arr >= 0)
        assert arr.tolist() == [density(kind, float(x)) for x in t]
