"""Quadrature on level sets {asymptotic coordinate = const} of a chart.

Spheres: Gauss-Gegenbauer in cos(theta_j) matched to the sin^p(theta_j) factor of the
round measure (Gauss-Legendre for the 2-sphere), trapezoid in the azimuth.
Tori: uniform trapezoid, spectrally accurate for smooth periodic integrands.
Patches: Gauss-Legendre on every bounded coordinate, trapezoid on periodic ones.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
from scipy.special import roots_gegenbauer

from alh.core.config import settings
from alh.core.errors import ChartError, DegenerateError
from alh.services.charts import Chart, MetricField

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class AngularRule:
	nodes: np.ndarray
	weights: np.ndarray
	order: int


@dataclass(frozen=True)
class LevelSetQuadrature:
	level: float
	nodes: np.ndarray
	weights: np.ndarray
	area_elements: np.ndarray
	conormals: np.ndarray

	@property
	def area(self) -> float:
		return math.fsum(self.weights * self.area_elements)


def _trapezoid(lower: float, period: float, order: int):
	nodes = lower + period * np.arange(order) / order
	return nodes, np.full(order, period / order)


def _gauss_legendre(lower: float, upper: float, order: int):
	x, w = np.polynomial.legendre.leggauss(order)
	half = 0.5 * (upper - lower)
	return lower + half * (x + 1.0), half * w


def _polar_angle(power: int, order: int):
	"""Nodes in (0, pi) and weights for integrals F(theta) d theta, F carrying a sin^power factor."""
	x, w = roots_gegenbauer(order, 0.5 * power)
	theta = np.arccos(x)
	return theta[::-1], (w / np.sin(theta) ** power)[::-1]


def angular_rule(chart: Chart, order: int) -> AngularRule:
	if order < 2:
		raise ValueError(f"quadrature order must be at least 2, got {order}")
	axes = [chart.axes[k] for k in chart.tangential]
	per_axis = []
	if chart.cross_section == "sphere":
		d = len(axes)
		for j, axis in enumerate(axes):
			if axis.periodic:
				per_axis.append(_trapezoid(0.0, axis.period, order))
			else:
				per_axis.append(_polar_angle(d - 1 - j, order))
	else:
		for axis in axes:
			if axis.periodic:
				per_axis.append(_trapezoid(0.0, axis.period, order))
			elif math.isfinite(axis.lower) and math.isfinite(axis.upper):
				per_axis.append(_gauss_legendre(axis.lower, axis.upper, order))
			else:
				raise ChartError(f"coordinate '{axis.name}' is unbounded; a patch needs finite ranges")
	mesh = np.meshgrid(*[n for n, _ in per_axis], indexing="ij")
	wmesh = np.meshgrid(*[w for _, w in per_axis], indexing="ij")
	nodes = np.stack([m.ravel() for m in mesh], axis=-1)
	weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
	return AngularRule(nodes, weights, order)


def level_points(chart: Chart, level: float, rule: AngularRule) -> np.ndarray:
	points = np.empty((rule.nodes.shape[0], chart.dim))
	points[:, chart.asymptotic_index] = level
	points[:, chart.tangential] = rule.nodes
	return points


def area_element(g: np.ndarray, chart: Chart) -> float:
	t = chart.tangential
	det = float(np.linalg.det(g[np.ix_(t, t)]))
	if not det > 0:
		raise DegenerateError("induced metric on the level set is degenerate")
	return math.sqrt(det)


def unit_conormal(g_inv: np.ndarray, chart: Chart) -> np.ndarray:
	"""nu_i = s delta^c_i / sqrt(g^cc), s orienting toward the conformal boundary."""
	c = chart.asymptotic_index
	a = g_inv[c, c]
	if not a > 0:
		raise DegenerateError("level set is degenerate")
	nu = np.zeros(chart.dim)
	nu[c] = chart.outward_sign / math.sqrt(a)
	return nu


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
	"""Ordered map over contiguous chunks; the result order never depends on scheduling."""
	items = list(items)
	workers = workers or settings.worker_count()
	if workers <= 1 or len(items) < 2 * workers:
		return [fn(x) for x in items]
	bounds = np.linspace(0, len(items), workers + 1).astype(int)
	chunks = [items[bounds[k]:bounds[k + 1]] for k in range(workers)]
	with ThreadPoolExecutor(max_workers=workers) as pool:
		parts = list(pool.map(lambda chunk: [fn(x) for x in chunk], chunks))
	return [r for part in parts for r in part]


def level_quadrature(g: MetricField, level: float, order: Optional[int] = None) -> LevelSetQuadrature:
	chart = g.chart
	rule = angular_rule(chart, order or settings.quadrature_order)
	points = level_points(chart, level, rule)

	def node(p: np.ndarray):
		gm = g.values(p)
		return area_element(gm, chart), unit_conormal(np.linalg.inv(gm), chart)

	data = parallel_map(node, points)
	area = np.array([a for a, _ in data])
	conormals = np.array([nu for _, nu in data])
	return LevelSetQuadrature(level, points, rule.weights, area, conormals)


def level_area(g: MetricField, level: float, order: Optional[int] = None) -> float:
	return level_quadrature(g, level, order).area


def level_sequence(chart: Chart, start: Optional[float] = None, ratio: Optional[float] = None, count: Optional[int] = None) -> List[float]:
	"""Levels approaching the conformal boundary: r_k = r_0 q^k, or x_k = x_0 / q^k."""
	q = ratio or settings.default_ratio
	count = count or settings.default_levels
	if not 4 <= count <= 8:
		raise ValueError(f"level count must be between 4 and 8, got {count}")
	if not q > 1:
		raise ValueError(f"level ratio must exceed 1, got {q}")
	if chart.direction == "infinity":
		r0 = start or settings.default_r0
		return [r0 * q ** k for k in range(count)]
	x0 = start or 1.0 / settings.default_r0
	return [x0 / q ** k for k in range(count)]
