#!/usr/bin/env python3
"""
Tests for the scalar-curvature, mean-curvature and ALH hypothesis margins
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from alh.core.errors import ChartError, DegenerateError
from alh.services.backgrounds import (
    birmingham_background,
    build_background,
    euclidean_background,
    horizon_radius,
    hyperbolic_background,
)
from alh.services.hypotheses import (
    alh_diagnostic,
    boundary_cross_section,
    boundary_mean_margin,
    check_hypotheses,
    mean_curvature_into,
    mean_curvature_level,
    scalar_margin,
)
from alh.services.sampling import level_sampler, region_sampler
from alh.services.tensors import mean_curvature


def test_scalar_margin_saturates_on_einstein_metrics():
    for model in (hyperbolic_background(3), birmingham_background(3, 1, 0.5)):
        samples = region_sampler(model.chart, 1.0, 100.0, 32, seed=5)
        assert scalar_margin(model.metric, samples) == pytest.approx(0.0, abs=1e-9)


def test_shrunk_hyperbolic_metric_violates_the_scalar_bound():
    """0.81 g has R = -6 / 0.81 < -6"""
    model = build_background("hyperbolic", {"n": 3, "scale": 0.81})
    samples = region_sampler(model.chart, 1.0, 10.0, 16, seed=5)
    assert scalar_margin(model.metric, samples) == pytest.approx(6.0 - 6.0 / 0.81, rel=1e-9)


def test_mean_curvature_into_the_end():
    """Unit coordinate sphere in hyperbolic space: H into M = -2 sqrt(2)"""
    g = hyperbolic_background(3).metric
    p = [1.0, 1.0, 0.5]
    assert mean_curvature_into(g, ("r", 1.0), p) == pytest.approx(-2 * math.sqrt(2), rel=1e-12)
    points = level_sampler(g.chart, 1.0, 8, seed=1)
    assert boundary_mean_margin(g, ("r", 1.0), points) == pytest.approx(-2 * math.sqrt(2) - 2, rel=1e-12)


def test_normal_flip_changes_the_sign():
    g = birmingham_background(3, 1, 0.5).metric
    p = [2.0, 0.9, 1.3]
    up = mean_curvature(g, (0, 2.0), p, orientation=1.0)
    down = mean_curvature(g, (0, 2.0), p, orientation=-1.0)
    assert up == -down
    assert up > 0


def test_inner_boundary_must_be_an_asymptotic_level():
    g = hyperbolic_background(3).metric
    with pytest.raises(ChartError):
        mean_curvature_into(g, ("theta", 1.0), [2.0, 1.0, 0.5])


def test_point_must_lie_on_the_boundary():
    g = hyperbolic_background(3).metric
    with pytest.raises(DegenerateError):
        mean_curvature_into(g, ("r", 1.0), [2.0, 1.0, 0.5])


def test_mean_curvature_level_finds_the_unit_sphere():
    g = hyperbolic_background(3).metric
    level = mean_curvature_level(g, -2 * math.sqrt(2), (0.5, 2.0), tangential=[1.0, 0.5])
    assert level == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(DegenerateError):
        mean_curvature_level(g, 5.0, (0.5, 2.0), tangential=[1.0, 0.5])


def test_near_horizon_boundary_is_almost_minimal():
    """Just outside the Birmingham horizon H is close to 0, so the margin is close to -(n-1)"""
    model = birmingham_background(3, 1, 0.5)
    r = 1.0001 * horizon_radius(3, 1, 0.5)
    points = level_sampler(model.chart, r, 8, seed=2)
    margin = boundary_mean_margin(model.metric, ("r", r), points)
    assert -2.2 < margin < -2.0


def test_alh_deviation_decays_at_order_n():
    diagnostic = alh_diagnostic(birmingham_background(3, 1, 0.5).metric, seed=3)
    assert not diagnostic.diverged
    assert diagnostic.deviations[0] > diagnostic.deviations[-1]
    assert diagnostic.order == pytest.approx(3.0, abs=0.1)


def test_euclidean_deviation_does_not_decay():
    diagnostic = alh_diagnostic(euclidean_background(3).metric, seed=3)
    assert diagnostic.diverged
    assert diagnostic.deviations[-1] == pytest.approx(1.0)


def test_spherical_cross_section():
    verdict = boundary_cross_section(hyperbolic_background(3).metric, seed=4)
    assert verdict.constant
    assert verdict.ah
    assert verdict.section.curvature == pytest.approx(1.0, abs=1e-6)
    assert verdict.section.volume == pytest.approx(4 * math.pi, rel=1e-9)


def test_toroidal_cross_section_is_flat():
    verdict = boundary_cross_section(birmingham_background(3, 0, -0.2).metric, seed=4)
    assert verdict.constant
    assert not verdict.ah
    assert verdict.section.curvature == pytest.approx(0.0, abs=1e-6)
    assert verdict.section.volume == pytest.approx(1.0, rel=1e-9)


def test_check_hypotheses_on_hyperbolic_space():
    report = check_hypotheses(hyperbolic_background(3).metric, boundary=("r", 1.0), sample_count=16, seed=9)
    assert report.satisfied
    assert report.verdict == "hypotheses satisfied"
    assert report.mean_margin == pytest.approx(-2 * math.sqrt(2) - 2, rel=1e-9)
    assert report.boundary == ("r", 1.0)
    assert len(report.scalar_samples) == 16
    assert report.cross_section.ah


def test_check_hypotheses_flags_the_shrunk_metric():
    model = build_background("hyperbolic", {"n": 3, "scale": 0.81})
    report = check_hypotheses(model.metric, sample_count=16, seed=9, diagnostics=False)
    assert not report.satisfied
    assert report.verdict == "hypotheses violated"
    assert report.scalar_margin < 0


def test_samples_are_reproducible():
    chart = hyperbolic_background(3).chart
    a = region_sampler(chart, 1.0, 10.0, 12, seed=42)
    b = region_sampler(chart, 1.0, 10.0, 12, seed=42)
    assert np.array_equal(a, b)
    assert np.all((a[:, 0] >= 1.0) & (a[:, 0] <= 10.0))
