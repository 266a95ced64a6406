"""Margins for the hypotheses of the hyperbolic positive energy theorems.

scalar margin      min (R + n(n-1)) over samples; >= 0 when R >= -n(n-1)
mean margin        max (H - (n-1)) over an inner boundary, H taken with respect to the normal
                   pointing into M (toward the asymptotic end)
ALH deviation      max |K + 1| over sampled planes on each level of the approach to the boundary
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from alh.core.config import settings
from alh.core.errors import ChartError, DegenerateError, DivergenceError
from alh.services.boundary import CrossSection, cross_section
from alh.services.charts import Chart, MetricField
from alh.services.extrapolation import fit_order, sequence_ratio
from alh.services.quadrature import level_sequence, parallel_map
from alh.services.sampling import describe, level_sampler, plane_sampler, region_sampler
from alh.services.tensors import mean_curvature, sectional_curvature

logger = logging.getLogger(__name__)

Boundary = Tuple[Union[int, str], float]


@dataclass
class ALHDiagnostic:
	levels: List[float]
	xs: List[float]
	deviations: List[float]
	order: Optional[float]
	diverged: bool
	message: str = ""
	planes_per_level: int = 0


@dataclass
class CrossSectionVerdict:
	section: CrossSection
	tolerance: float
	constant: bool
	ah: bool
	verdict: str


@dataclass
class HypothesisReport:
	n: int
	scalar_margin: float
	scalar_samples: List[str]
	mean_margin: Optional[float]
	boundary: Optional[Tuple[str, float]]
	boundary_samples: List[str]
	alh: Optional[ALHDiagnostic]
	cross_section: Optional[CrossSectionVerdict]
	tolerance: float
	seed: int
	satisfied: bool
	notes: List[str] = field(default_factory=list)

	@property
	def verdict(self) -> str:
		return "hypotheses satisfied" if self.satisfied else "hypotheses violated"


def _coordinate_index(chart: Chart, coord: Union[int, str]) -> int:
	if isinstance(coord, str):
		if coord not in chart.names:
			raise ChartError(f"'{coord}' is not a coordinate of the chart {chart.names}")
		return chart.names.index(coord)
	if not 0 <= coord < chart.dim:
		raise ChartError(f"coordinate index {coord} out of range for dimension {chart.dim}")
	return int(coord)


def scalar_margin(g: MetricField, samples: Sequence[Sequence[float]]) -> float:
	"""min over samples of R + n(n-1)."""
	samples = list(samples)
	if not samples:
		raise ValueError("scalar margin needs at least one sample point")
	n = g.dim
	floor = -float(n * (n - 1))
	values = parallel_map(lambda p: g.geometry(p).scalar - floor, samples)
	return float(min(values))


def mean_curvature_into(g: MetricField, boundary: Boundary, p: Sequence[float]) -> float:
	"""H of {x^c = value} with respect to the normal pointing into M.

	Sign convention: H = -div(nu_into), so a large sphere of hyperbolic space has H -> -(n-1)."""
	chart = g.chart
	c = _coordinate_index(chart, boundary[0])
	if c != chart.asymptotic_index:
		raise ChartError("an inner boundary must be a level set of the asymptotic coordinate")
	return mean_curvature(g, (c, float(boundary[1])), p, orientation=-chart.outward_sign)


def boundary_mean_margin(g: MetricField, boundary: Boundary, samples: Sequence[Sequence[float]]) -> float:
	"""max over samples of H - (n-1)."""
	samples = list(samples)
	if not samples:
		raise ValueError("mean-curvature margin needs at least one sample point")
	n = g.dim
	values = parallel_map(lambda p: mean_curvature_into(g, boundary, p) - (n - 1), samples)
	return float(max(values))


def mean_curvature_level(
	g: MetricField,
	target: float,
	bracket: Tuple[float, float],
	tangential: Optional[Sequence[float]] = None,
) -> float:
	"""Level of the asymptotic coordinate where H (into M) equals target, at one tangential point."""
	chart = g.chart
	c = chart.asymptotic_index
	y = np.asarray(tangential if tangential is not None else level_sampler(chart, bracket[0], 1)[0][chart.tangential], dtype=float)

	def residual(level: float) -> float:
		p = np.empty(chart.dim)
		p[c] = level
		p[chart.tangential] = y
		return mean_curvature_into(g, (c, level), p) - target

	lo, hi = bracket
	if residual(lo) * residual(hi) > 0:
		raise DegenerateError(f"H - {target} does not change sign on [{lo}, {hi}]")
	level = brentq(residual, lo, hi, xtol=1e-14, rtol=1e-15)
	logger.debug("CHECK: H = %g at level %.15g", target, level)
	return float(level)


def alh_diagnostic(
	g: MetricField,
	levels: Optional[Sequence[float]] = None,
	planes_per_level: Optional[int] = None,
	points_per_level: Optional[int] = None,
	seed: Optional[int] = None,
) -> ALHDiagnostic:
	"""max |K(u, v) + 1| per level over the same sampled points and planes on every level."""
	chart = g.chart
	levels = list(levels or level_sequence(chart))
	xs = [chart.boundary_x(level) for level in levels]
	q = sequence_ratio(xs)
	planes = plane_sampler(g.dim, planes_per_level or settings.planes_per_level, seed)
	count = points_per_level or settings.boundary_samples

	def level_deviation(level: float) -> float:
		worst = 0.0
		for p in level_sampler(chart, level, count, seed):
			bundle = g.geometry(p, riemann=True)
			for u, v in planes:
				worst = max(worst, abs(sectional_curvature(bundle, u, v) + 1.0))
		return worst

	deviations = [float(d) for d in parallel_map(level_deviation, levels)]
	floor = settings.deviation_floor
	order = None
	diverged = False
	message = ""
	if deviations[-1] <= floor:
		message = "sectional curvatures are -1 to roundoff"
	elif deviations[-1] >= deviations[-2] or deviations[-1] > settings.alh_tolerance:
		diverged = True
		message = f"deviations do not decay toward the boundary ({deviations[-2]:.3e} -> {deviations[-1]:.3e})"
	else:
		order = fit_order(deviations[-2], deviations[-1], q)
		if any(b > a for a, b in zip(deviations, deviations[1:]) if b > floor):
			message = "deviations are not monotone over the level sequence"
	if diverged:
		logger.warning("CHECK: %s", message)
	else:
		logger.info("CHECK: ALH deviation %.3e at the outermost level, decay order %s", deviations[-1], order)
	return ALHDiagnostic(
		[float(level) for level in levels], [float(x) for x in xs], deviations, order, diverged, message,
		len(planes),
	)


def boundary_cross_section(
	g: MetricField,
	samples: Optional[Sequence[Sequence[float]]] = None,
	levels: Optional[Sequence[float]] = None,
	tol: Optional[float] = None,
	seed: Optional[int] = None,
) -> CrossSectionVerdict:
	"""The boundary metric lim x^2 g on the cross-section and its constant-curvature verdict.

	AH is granted only for a declared spherical cross-section with constant positive curvature."""
	chart = g.chart
	levels = list(levels or level_sequence(chart))
	tol = settings.curvature_tolerance if tol is None else tol
	if samples is None:
		points = level_sampler(chart, levels[0], settings.boundary_samples, seed)
		samples = points[:, chart.tangential]
	section = cross_section(g, samples, levels)
	constant = section.is_constant(tol)
	ah = chart.cross_section == "sphere" and constant and section.curvature > tol
	if constant:
		verdict = f"constant curvature {section.curvature:.9g} +- {tol:g}"
	else:
		verdict = f"non-constant curvature (spread {section.curvature_spread:.3e})"
	return CrossSectionVerdict(section, tol, constant, ah, verdict)


def _sample_region(chart: Chart, levels: Sequence[float]) -> Tuple[float, float]:
	c = chart.asymptotic_index
	if chart.direction == "infinity":
		lower = max(1.0, 2.0 * chart.axes[c].lower)
		return min(lower, levels[0]), max(levels)
	return min(levels), max(levels)


def check_hypotheses(
	g: MetricField,
	boundary: Optional[Boundary] = None,
	levels: Optional[Sequence[float]] = None,
	tol: Optional[float] = None,
	sample_count: Optional[int] = None,
	seed: Optional[int] = None,
	region: Optional[Tuple[float, float]] = None,
	diagnostics: bool = True,
) -> HypothesisReport:
	chart = g.chart
	n = g.dim
	tol = settings.tolerance if tol is None else tol
	seed = settings.sample_seed if seed is None else seed
	levels = list(levels or level_sequence(chart))
	lo, hi = region or _sample_region(chart, levels)
	notes: List[str] = []

	samples = region_sampler(chart, lo, hi, sample_count, seed)
	s_margin = scalar_margin(g, samples)
	logger.info("CHECK: scalar margin %.6e over %d samples", s_margin, len(samples))

	m_margin = None
	boundary_desc = None
	boundary_samples: List[str] = []
	if boundary is not None:
		c = _coordinate_index(chart, boundary[0])
		value = float(boundary[1])
		points = level_sampler(chart, value, sample_count, seed)
		m_margin = boundary_mean_margin(g, (c, value), points)
		boundary_desc = (chart.names[c], value)
		boundary_samples = describe(points, chart)
		logger.info("CHECK: mean-curvature margin %.6e on %s = %g", m_margin, chart.names[c], value)

	alh = None
	section = None
	if diagnostics:
		alh = alh_diagnostic(g, levels, seed=seed)
		try:
			section = boundary_cross_section(g, levels=levels, seed=seed)
		except DivergenceError as exc:
			notes.append(f"boundary metric: {exc}")
			logger.warning("CHECK: boundary metric does not converge: %s", exc)

	satisfied = s_margin >= -tol and (m_margin is None or m_margin <= tol)
	report = HypothesisReport(
		n=n,
		scalar_margin=s_margin,
		scalar_samples=describe(samples, chart),
		mean_margin=m_margin,
		boundary=boundary_desc,
		boundary_samples=boundary_samples,
		alh=alh,
		cross_section=section,
		tolerance=tol,
		seed=seed,
		satisfied=satisfied,
		notes=notes,
	)
	logger.info("CHECK: %s", report.verdict)
	return report
