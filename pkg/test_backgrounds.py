#!/usr/bin/env python3
"""
Tests for the catalog of reference metrics, static potentials and end normalization
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from alh.core.errors import ChartError, NormalizationError
from alh.services.backgrounds import (
    StaticPotential,
    ah_basis,
    birmingham_background,
    build_background,
    catalog_entries,
    horizon_radius,
    hyperbolic_background,
    lapse_potential,
    normalize_end,
    patch_volume,
    sphere_volume,
    static_residual,
)
from alh.services.expression import parse_expression


def test_sphere_and_patch_volumes():
    assert sphere_volume(3) == pytest.approx(4 * math.pi)
    assert sphere_volume(4) == pytest.approx(2 * math.pi ** 2)
    assert patch_volume(3) == pytest.approx(0.5)


def test_horizon_radius():
    """r^3 + r - 1 = 0 for n = 3, k = 1, m = 0.5"""
    r_h = horizon_radius(3, 1, 0.5)
    assert r_h ** 3 + r_h - 1 == pytest.approx(0.0, abs=1e-12)
    assert horizon_radius(3, 1, 0.0) == 0.0
    assert horizon_radius(3, -1, 0.0) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "n, k, m",
    [(3, 1, 0.5), (3, 1, 2.0), (4, 1, 0.3), (5, 1, 1.0), (3, 0, 0.7), (3, -1, 0.3), (4, -1, -0.05)],
)
def test_birmingham_backgrounds_build(n, k, m):
    """f(r_h) = 0 and the metric is defined just outside r_h"""
    model = birmingham_background(n, k, m)
    r_h = horizon_radius(n, k, m)
    assert k + r_h ** 2 - 2 * m * r_h ** (2 - n) == pytest.approx(0.0, abs=1e-12 * max(1.0, r_h ** 2))
    assert model.chart.axes[0].lower >= r_h
    middle = [0.0 if a.periodic else 0.5 * (a.lower + a.upper) for a in model.chart.axes[1:]]
    p = [1.01 * max(r_h, 1.0)] + middle
    assert np.all(np.linalg.eigvalsh(model.metric.values(p)) > 0)


def test_birmingham_chart_starts_outside_the_horizon():
    model = birmingham_background(3, 1, 0.5)
    assert model.chart.axes[0].lower == pytest.approx(horizon_radius(3, 1, 0.5))
    assert model.metric.reference is model.background
    assert model.end_type == "AH spherical"


def test_hyperbolic_basis_is_static():
    """D^2 V = (Ric - R g / (n-1)) V for every basis potential"""
    model = hyperbolic_background(3)
    for V in model.potentials:
        for p in ([1.3, 0.7, 2.1], [4.0, 2.2, 5.0]):
            assert np.max(np.abs(static_residual(model.metric, V, p))) < 1e-9


def test_non_static_function_has_a_residual():
    model = hyperbolic_background(3)
    V = StaticPotential(parse_expression("r", model.chart.names), "r")
    assert np.linalg.norm(static_residual(model.metric, V, [1.0, 1.0, 0.5])) >= 0.1


def test_lapse_is_static_for_birmingham():
    model = birmingham_background(3, 1, 0.5)
    V = lapse_potential(model)
    assert np.max(np.abs(static_residual(model.metric, V, [5.0, 1.0, 0.3]))) < 1e-8


def test_ah_basis_values():
    chart = hyperbolic_background(4).chart
    basis = ah_basis(chart)
    assert [V.index for V in basis] == [0, 1, 2, 3, 4]
    p = np.array([2.0, 0.4, 1.1, 2.5])
    y = np.array([V.value(p) for V in basis])
    # hyperboloid: -y0^2 + |y|^2 = -1
    assert -y[0] ** 2 + np.sum(y[1:] ** 2) == pytest.approx(-1.0)


def test_ah_basis_needs_a_polar_chart():
    torus = birmingham_background(3, 0, -0.2).chart
    with pytest.raises(ChartError):
        ah_basis(torus)


def test_torus_normalization_rescales_to_unit_volume():
    """A volume-8 torus in n = 4 is rescaled by 8^(1/3) = 2"""
    model = birmingham_background(4, 0, -0.2, volume=8.0)
    V = normalize_end(model.metric, model.potentials[0])
    assert V.normalization == "alh-normalized"
    assert V.boundary_scale == pytest.approx(2.0, rel=1e-9)
    assert V.scale == pytest.approx(2.0, rel=1e-9)


def test_normalization_refuses_spherical_ends():
    model = hyperbolic_background(3)
    with pytest.raises(NormalizationError):
        normalize_end(model.metric, model.potentials[0])


def test_catalog():
    names = [e["name"] for e in catalog_entries()]
    assert names == sorted(names)
    assert "hyperbolic" in names and "euclidean" in names
    with pytest.raises(KeyError):
        build_background("anti-de-sitter", {})


def test_scaled_catalog_entry():
    model = build_background("hyperbolic", {"n": 3, "scale": 0.81})
    assert model.metric.geometry([2.0, 1.0, 1.0]).scalar == pytest.approx(-6.0 / 0.81)
    assert model.params["scale"] == 0.81


def test_potential_normalization_tag_is_checked():
    e = parse_expression("r", ["r", "theta", "phi"])
    with pytest.raises(ValueError):
        StaticPotential(e, "V", None, "unit")
