"""
Unit tests for model manifold geometry
"""

import math

import numpy as np
import pytest

from driftlab.errors import (
    InputError,
    InternalConsistencyError,
    InvalidDimensionError,
    PoleSingularityError,
    ToleranceNotMetError,
)
from driftlab.geometry import (
    EuclideanWarping,
    HyperbolicWarping,
    ModelManifold,
    PowerLawWarping,
    SampledWarping,
    classify_volume_growth,
    growth_envelope,
    growth_order,
    power_law_exponent,
    quad,
    radial_laplacian_coeff,
    sphere_constant,
    volume,
    volumes,
)

GROWTH_RADII = np.geomspace(1.0, 100.0, 32)


@pytest.mark.parametrize(
    "dimension, expected",
    [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)],
)
def test_sphere_constant(dimension, expected):
    assert sphere_constant(dimension) == pytest.approx(expected, rel=1e-14)


def test_sphere_constant_rejects_dimension_one():
    with pytest.raises(InvalidDimensionError):
        sphere_constant(1)


def test_manifold_rejects_low_dimension():
    with pytest.raises(InvalidDimensionError):
        ModelManifold(1, EuclideanWarping())


def test_warping_must_start_like_r():
    with pytest.raises(InputError):
        ModelManifold(3, SampledWarping(radii=(0.0, 1.0, 2.0, 3.0), values=(0.0, 2.0, 4.0, 6.0)))


def test_laplacian_coefficient_examples(euclidean3):
    assert radial_laplacian_coeff(euclidean3, 2.0) == pytest.approx(1.0)
    hyperbolic = ModelManifold(2, HyperbolicWarping(1.0))
    assert radial_laplacian_coeff(hyperbolic, 1.0) == pytest.approx(math.cosh(1) / math.sinh(1), rel=1e-12)
    power = ModelManifold(2, PowerLawWarping(lam=2.0))
    assert radial_laplacian_coeff(power, 100.0) == pytest.approx(0.02, rel=0.02)


def test_laplacian_coefficient_is_singular_at_pole(euclidean3):
    with pytest.raises(PoleSingularityError):
        radial_laplacian_coeff(euclidean3, 0.0)


def test_hyperbolic_coefficient_is_finite_far_out():
    hyperbolic = ModelManifold(3, HyperbolicWarping(1.0))
    assert radial_laplacian_coeff(hyperbolic, 800.0) == pytest.approx(2.0)


def test_laplacian_coefficient_equals_log_derivative_of_area():
    """(N-1) phi'/phi is d/dr log(phi^(N-1)); compare against a difference quotient"""
    manifold = ModelManifold(4, PowerLawWarping(lam=1.5))
    r, h = 3.0, 1e-5
    log_area = lambda t: 3 * math.log(float(manifold.phi(t)))
    numeric = (log_area(r + h) - log_area(r - h)) / (2 * h)
    assert radial_laplacian_coeff(manifold, r) == pytest.approx(numeric, rel=1e-8)


def test_unit_ball_volumes(euclidean2, euclidean3, hyperbolic2):
    assert volume(euclidean2, 1.0) == pytest.approx(math.pi, rel=1e-8)
    assert volume(euclidean3, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-8)
    assert volume(hyperbolic2, 1.0) == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-8)


def test_volume_at_zero_radius(euclidean3):
    assert volume(euclidean3, 0.0) == 0.0


def test_volume_is_monotone(hyperbolic2):
    radii = np.linspace(0.5, 10.0, 20)
    assert np.all(np.diff(volumes(hyperbolic2, radii)) > 0)


def test_accumulated_volumes_match_direct(euclidean3):
    radii = [1.0, 2.0, 5.0]
    direct = [volume(euclidean3, r) for r in radii]
    assert volumes(euclidean3, radii) == pytest.approx(direct, rel=1e-9)


def test_power_law_doubling_ratio(power_law3):
    ratio = volume(power_law3, 128.0) / volume(power_law3, 64.0)
    assert ratio == pytest.approx(2.0**5, rel=0.03)


def test_quadrature_failure_carries_estimate():
    with pytest.raises(ToleranceNotMetError) as excinfo:
        quad(lambda t: 1.0 / t, 0.0, 1.0, 1e-12)
    assert excinfo.value.best_estimate is not None


def test_growth_euclidean_is_polynomial(euclidean3):
    report = classify_volume_growth(euclidean3, GROWTH_RADII)
    assert report.growth_class == "polynomial"
    assert report.alpha == pytest.approx(3.0, rel=1e-3)
    assert report.exact_exponent == 3.0


def test_growth_power_law_exponent(power_law3):
    report = classify_volume_growth(power_law3, GROWTH_RADII)
    assert report.growth_class == "polynomial"
    assert report.alpha == pytest.approx(5.0, rel=0.05)
    assert power_law_exponent(power_law3) == 5.0


def test_growth_hyperbolic_is_exponential(hyperbolic2):
    report = classify_volume_growth(hyperbolic2, GROWTH_RADII)
    assert report.growth_class == "exponential"
    assert report.alpha == pytest.approx(1.0, rel=0.02)
    assert report.exact_exponent is None


@pytest.mark.parametrize("radii", [np.geomspace(1.0, 10.0, 8), np.linspace(3.0, 10.0, 8)])
def test_short_hyperbolic_range_is_exponential(hyperbolic2, radii):
    report = classify_volume_growth(hyperbolic2, radii)
    assert report.growth_class == "exponential"
    assert report.alpha == pytest.approx(1.0, rel=0.05)
    assert report.growth_order == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("radii", [np.geomspace(1.0, 10.0, 8), np.geomspace(1.0, 20.0, 8)])
def test_short_power_law_range_is_polynomial(power_law3, radii):
    report = classify_volume_growth(power_law3, radii)
    assert report.growth_class == "polynomial"
    assert report.alpha == pytest.approx(power_law_exponent(power_law3), rel=0.05)
    assert report.growth_order < 0.1


@pytest.mark.parametrize("dimension", [2, 3, 5])
def test_euclidean_growth_order_vanishes(dimension):
    manifold = ModelManifold(dimension, EuclideanWarping())
    assert growth_order(manifold, 10.0, volume(manifold, 10.0)) == pytest.approx(0.0, abs=1e-6)


def test_growth_needs_enough_radii(euclidean3):
    with pytest.raises(InputError):
        classify_volume_growth(euclidean3, [1.0, 2.0, 3.0])


def test_growth_rejects_non_monotone_samples(euclidean3, monkeypatch):
    stalled = np.concatenate([np.linspace(1.0, 2.0, 10), np.full(10, 2.0)])
    monkeypatch.setattr("driftlab.geometry.volumes", lambda manifold, radii, tol=None: stalled)
    with pytest.raises(InternalConsistencyError):
        classify_volume_growth(euclidean3, np.geomspace(1.0, 20.0, 20))


def test_sampled_warping_reproduces_closed_form():
    radii = np.linspace(0.0, 12.0, 2401)
    sampled = ModelManifold(3, SampledWarping.from_function(np.sinh, radii))
    exact = ModelManifold(3, HyperbolicWarping(1.0))
    assert volume(sampled, 10.0, tol=1e-8) == pytest.approx(volume(exact, 10.0), rel=1e-5)


def test_sampled_warping_out_of_range():
    radii = np.linspace(0.0, 5.0, 101)
    sampled = SampledWarping.from_function(lambda r: r, radii)
    with pytest.raises(InputError):
        sampled.value(6.0)


def test_growth_envelope_exponential(hyperbolic2):
    alpha = growth_envelope(hyperbolic2, "exponential", GROWTH_RADII)
    volumes_ = volumes(hyperbolic2, GROWTH_RADII)
    assert np.all(volumes_ <= np.exp(alpha * GROWTH_RADII) * (1 + 1e-12))


def test_growth_envelope_stretched_needs_theta(euclidean3):
    with pytest.raises(InputError):
        growth_envelope(euclidean3, "stretched", GROWTH_RADII)
