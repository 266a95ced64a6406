"""The conformal boundary metric h = lim x^2 g restricted to the cross-section."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from alh.core.config import settings
from alh.core.errors import DegenerateError, DivergenceError
from alh.services.charts import MetricField
from alh.services.extrapolation import extrapolate_arrays, richardson
from alh.services.quadrature import angular_rule, level_points, level_sequence, parallel_map
from alh.services.tensors import curvature, make_metric_jet

logger = logging.getLogger(__name__)


@dataclass
class CrossSection:
	volume: float
	volume_error: float
	curvature: float
	curvature_spread: float
	samples: List[List[float]] = field(default_factory=list)
	sectional: List[float] = field(default_factory=list)

	def is_constant(self, tol: float) -> bool:
		return self.curvature_spread <= tol


def _tangential_jet(g: MetricField, p: np.ndarray):
	chart = g.chart
	t = chart.tangential
	x = chart.boundary_x(p[chart.asymptotic_index])
	mj = g.metric_jet(p)
	x2 = x * x
	h = x2 * mj.g[np.ix_(t, t)]
	dh = x2 * mj.dg[np.ix_(t, t, t)]
	ddh = x2 * mj.ddg[np.ix_(t, t, t, t)]
	return h, dh, ddh


def boundary_jet(g: MetricField, y: Sequence[float], levels: Optional[Sequence[float]] = None):
	"""Extrapolated MetricJet of the boundary metric at tangential coordinates y."""
	chart = g.chart
	levels = list(levels or level_sequence(chart))
	xs = [chart.boundary_x(level) for level in levels]
	blocks = []
	for level in levels:
		p = np.empty(chart.dim)
		p[chart.asymptotic_index] = level
		p[chart.tangential] = y
		blocks.append(_tangential_jet(g, p))
	out = []
	for part in range(3):
		limit, error, _, ok = extrapolate_arrays(xs, [b[part] for b in blocks], floor=settings.roundoff_floor)
		if not ok:
			raise DivergenceError(f"boundary metric does not converge at {list(y)} (last change {error:.3e})")
		out.append(limit)
	h = 0.5 * (out[0] + out[0].T)
	dh = 0.5 * (out[1] + np.transpose(out[1], (0, 2, 1)))
	ddh = out[2]
	ddh = 0.5 * (ddh + np.transpose(ddh, (1, 0, 2, 3)))
	ddh = 0.5 * (ddh + np.transpose(ddh, (0, 1, 3, 2)))
	return make_metric_jet(h, dh, ddh)


def boundary_volume(g: MetricField, levels: Optional[Sequence[float]] = None, order: Optional[int] = None):
	"""Volume of the boundary metric: level volumes of x^2 g extrapolated to x = 0.

	Returns (volume, error estimate)."""
	chart = g.chart
	levels = list(levels or level_sequence(chart))
	rule = angular_rule(chart, order or settings.quadrature_order)
	t = chart.tangential
	volumes = []
	for level in levels:
		x = chart.boundary_x(level)
		points = level_points(chart, level, rule)

		def element(p: np.ndarray) -> float:
			det = float(np.linalg.det(x * x * g.values(p)[np.ix_(t, t)]))
			if not det > 0:
				raise DegenerateError("boundary metric is degenerate")
			return math.sqrt(det)

		dv = parallel_map(element, points)
		volumes.append(math.fsum(w * a for w, a in zip(rule.weights, dv)))
	xs = [chart.boundary_x(level) for level in levels]
	result = richardson(xs, volumes, floor=settings.roundoff_floor * max(abs(v) for v in volumes))
	if not result.converged:
		raise DivergenceError(f"boundary volume does not converge: {result.message}", table=volumes)
	logger.debug("BOUNDARY: volume %.15g (error %.3e)", result.limit, result.error)
	return result.limit, result.error


def sectional_curvatures(mj) -> List[float]:
	"""Sectional curvatures of all coordinate planes of an (n-1)-dimensional metric jet."""
	bundle = curvature(mj, riemann=True)
	lowered = bundle.lowered_riemann()
	d = mj.dim
	out = []
	for a in range(d):
		for b in range(a + 1, d):
			num = lowered[a, b, a, b]
			den = mj.g[a, a] * mj.g[b, b] - mj.g[a, b] ** 2
			out.append(float(num / den))
	return out


def cross_section(g: MetricField, samples: Sequence[Sequence[float]], levels: Optional[Sequence[float]] = None, order: Optional[int] = None) -> CrossSection:
	volume, volume_error = boundary_volume(g, levels, order)
	sectional: List[float] = []
	for y in samples:
		sectional.extend(sectional_curvatures(boundary_jet(g, y, levels)))
	if not sectional:
		raise ValueError("cross-section check needs at least one sample point")
	c = float(np.mean(sectional))
	spread = float(max(abs(k - c) for k in sectional))
	logger.info("BOUNDARY: volume %.12g, curvature %.12g (spread %.2e)", volume, c, spread)
	return CrossSection(volume, volume_error, c, spread, [list(map(float, y)) for y in samples], sectional)
