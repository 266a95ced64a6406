#!/usr/bin/env python3
"""
Tests for metric jets and the Levi-Civita curvature pipeline
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from alh.core.errors import MetricError
from alh.services.backgrounds import birmingham_background, hyperbolic_background
from alh.services.sampling import plane_sampler, region_sampler
from alh.services.tensors import (
    MetricJet,
    christoffel_symbols,
    covariant_hessian,
    curvature,
    einstein_divergence,
    invert_metric,
    make_metric_jet,
    sectional_curvature,
)


@pytest.mark.parametrize("n", [3, 4])
def test_hyperbolic_space_is_einstein(n):
    """R = -n(n-1) and Ric = -(n-1) g at sampled points"""
    g = hyperbolic_background(n).metric
    for p in region_sampler(g.chart, 0.5, 50.0, 40, seed=7):
        bundle = g.geometry(p)
        assert bundle.scalar == pytest.approx(-n * (n - 1), abs=1e-9)
        assert np.allclose(bundle.ricci, -(n - 1) * bundle.g, rtol=0.0, atol=1e-8 * np.abs(bundle.g).max())


def test_hyperbolic_sectional_curvature():
    g = hyperbolic_background(3).metric
    planes = plane_sampler(3, 6, seed=3)
    for p in region_sampler(g.chart, 0.5, 20.0, 10, seed=11):
        bundle = g.geometry(p, riemann=True)
        for u, v in planes:
            assert sectional_curvature(bundle, u, v) == pytest.approx(-1.0, abs=1e-9)


def test_round_sphere_block():
    """dtheta^2 + sin^2(theta) dphi^2 has scalar curvature 2"""
    theta = 0.8
    g = np.diag([1.0, math.sin(theta) ** 2])
    dg = np.zeros((2, 2, 2))
    dg[0, 1, 1] = math.sin(2 * theta)
    ddg = np.zeros((2, 2, 2, 2))
    ddg[0, 0, 1, 1] = 2 * math.cos(2 * theta)
    bundle = curvature(make_metric_jet(g, dg, ddg))
    assert bundle.scalar == pytest.approx(2.0, rel=1e-12)


def test_christoffel_symbols_of_the_sphere():
    theta = 0.8
    g = np.diag([1.0, math.sin(theta) ** 2])
    dg = np.zeros((2, 2, 2))
    dg[0, 1, 1] = math.sin(2 * theta)
    gamma = christoffel_symbols(make_metric_jet(g, dg))
    assert gamma[0, 1, 1] == pytest.approx(-math.sin(theta) * math.cos(theta))
    assert gamma[1, 0, 1] == pytest.approx(math.cos(theta) / math.sin(theta))
    assert gamma[1, 1, 0] == gamma[1, 0, 1]


def test_invert_metric_rejects_indefinite_matrices():
    with pytest.raises(MetricError):
        invert_metric(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(MetricError):
        invert_metric(np.array([[1.0, np.nan], [np.nan, 1.0]]))


def test_make_metric_jet_requires_symmetry():
    g = np.array([[1.0, 0.1], [0.2, 1.0]])
    with pytest.raises(MetricError):
        make_metric_jet(g, np.zeros((2, 2, 2)))


def test_traceless_ricci_of_birmingham():
    """E^r_r = -(n-1)(n-2) m r^-n and E^a_a = (n-2) m r^-n"""
    n, m, r = 3, 0.5, 7.0
    g = birmingham_background(n, 1, m).metric
    e = g.geometry([r, 1.1, 0.4]).traceless_ricci()
    assert e[0, 0] == pytest.approx(-(n - 1) * (n - 2) * m * r ** -n, rel=1e-8)
    assert e[1, 1] == pytest.approx((n - 2) * m * r ** -n, rel=1e-8)
    assert e[2, 2] == pytest.approx((n - 2) * m * r ** -n, rel=1e-8)


def test_contracted_bianchi_identity():
    g = birmingham_background(3, 1, 0.5).metric
    div = einstein_divergence(g, [3.0, 1.0, 2.0])
    assert np.max(np.abs(div)) < 1e-6


def test_sectional_curvature_depends_only_on_the_plane():
    """(u, v) -> (a u + b v, c u + d v) leaves K unchanged"""
    g = birmingham_background(3, 1, 0.5).metric
    bundle = g.geometry([5.0, 1.1, 0.4], riemann=True)
    rng = np.random.default_rng(17)
    for u, v in plane_sampler(3, 6, seed=5):
        k = sectional_curvature(bundle, u, v)
        a, b, c, d = rng.uniform(-2.0, 2.0, size=4)
        if abs(a * d - b * c) < 0.1:
            continue
        mixed = sectional_curvature(bundle, a * u + b * v, c * u + d * v)
        assert mixed == pytest.approx(k, rel=1e-10)


def test_birmingham_sectional_curvature_tends_to_minus_one():
    """|K + 1| = O(m r^-3) toward the end"""
    g = birmingham_background(3, 1, 0.5).metric
    planes = plane_sampler(3, 6, seed=9)
    deviations = []
    for r in (100.0, 1000.0):
        bundle = g.geometry([r, 1.1, 0.4], riemann=True)
        deviations.append(max(abs(sectional_curvature(bundle, u, v) + 1.0) for u, v in planes))
    assert deviations[0] <= 1e-4
    assert deviations[1] < 1e-2 * deviations[0]


def test_covariant_hessian_of_the_lapse():
    """D^2 V0 = V0 g on hyperbolic space"""
    model = hyperbolic_background(3)
    g = model.metric
    V0 = model.potentials[0]
    for p in region_sampler(g.chart, 0.5, 20.0, 10, seed=13):
        expected = V0.value(p) * g.values(p)
        hessian = covariant_hessian(g, V0, p)
        assert np.allclose(hessian, expected, rtol=1e-10, atol=1e-10 * np.abs(expected).max())


def test_asymmetric_second_derivatives_are_rejected():
    """d0 d1 g_11 != d1 d0 g_11 gives R_10 = -1/2 and R_01 = 0"""
    n = 3
    ddg = np.zeros((n, n, n, n))
    ddg[0, 1, 1, 1] = 1.0
    jet = MetricJet(np.eye(n), np.eye(n), np.zeros((n, n, n)), ddg)
    with pytest.raises(MetricError):
        curvature(jet)
