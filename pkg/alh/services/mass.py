"""Mass of an ALH end and the energy-momentum vector of an AH end.

For a static potential V the level-set flux is

	m(V, x) = - sum_nodes w * (E^i_j D^j V) nu_i dA,   E = Ric - (R/n) g (mixed)

with nu the unit conormal pointing toward the conformal boundary; the mass is its limit as
x -> 0, obtained by Richardson extrapolation along a geometric level sequence. The positive
dimensional factor in front of the integral is fixed to 1.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from alh.core.config import settings
from alh.core.errors import ChartError, DivergenceError, MetricError, NormalizationError
from alh.services.backgrounds import StaticPotential, ah_basis, normalize_end
from alh.services.boundary import boundary_volume
from alh.services.charts import MetricField
from alh.services.extrapolation import richardson, sequence_ratio
from alh.services.isometry import minkowski
from alh.services.quadrature import angular_rule, area_element, level_points, level_sequence, parallel_map
from alh.services.tensors import CurvatureBundle, invert_metric

logger = logging.getLogger(__name__)

RAISE_WITH = ("physical", "background")


class CausalClass(str, Enum):
	TIMELIKE_FUTURE = "timelike-future"
	NULL_FUTURE = "null-future"
	ZERO = "zero"
	SPACELIKE = "spacelike"
	TIMELIKE_PAST = "timelike-past"
	NULL_PAST = "null-past"


@dataclass
class LevelEvaluation:
	level: float
	x: float
	order: int
	values: np.ndarray
	scales: np.ndarray
	deviation: float


@dataclass
class MassResult:
	label: str
	index: Optional[int]
	mass: float
	error: float
	order: Optional[float]
	levels: List[float]
	xs: List[float]
	values: List[float]
	extrapolants: List[float] = field(default_factory=list)
	quadrature_orders: List[int] = field(default_factory=list)
	converged: bool = True
	message: str = ""
	normalization: str = "raw"

	def rows(self) -> List[Dict]:
		return [
			{"potential": self.label, "level": lv, "x": x, "value": v, "quadrature_order": q}
			for lv, x, v, q in zip(self.levels, self.xs, self.values, self.quadrature_orders)
		]


@dataclass
class EnergyMomentum:
	components: np.ndarray
	tolerance: float = field(default_factory=lambda: settings.causal_tolerance)
	results: List[MassResult] = field(default_factory=list)

	def __post_init__(self) -> None:
		self.components = np.asarray(self.components, dtype=float)

	@property
	def dim(self) -> int:
		return self.components.shape[0] - 1

	@property
	def norm2(self) -> float:
		m = self.components
		return float(-m[0] * m[0] + math.fsum(m[1:] * m[1:]))

	@property
	def rest_mass(self) -> Optional[float]:
		"""sqrt(-norm2) for causal vectors, None for spacelike ones."""
		s = self.norm2
		if s > 0.0:
			return None
		return math.sqrt(-s)

	@property
	def causal_class(self) -> CausalClass:
		return classify_causal(self, self.tolerance)

	def boosted(self, lorentz: np.ndarray) -> "EnergyMomentum":
		"""Energy-momentum of the pullback by an isometry with matrix Lambda: eta Lambda^T eta m."""
		eta = minkowski(self.dim)
		return EnergyMomentum(eta @ np.asarray(lorentz).T @ eta @ self.components, self.tolerance)


def classify_causal(v: Union[EnergyMomentum, Sequence[float]], tol: Optional[float] = None) -> CausalClass:
	if isinstance(v, EnergyMomentum):
		tol = v.tolerance if tol is None else tol
		m = v.components
	else:
		m = np.asarray(v, dtype=float)
	tol = settings.causal_tolerance if tol is None else tol
	if not tol > 0:
		raise ValueError(f"classification tolerance must be positive, got {tol}")
	length = float(np.linalg.norm(m))
	if length <= tol:
		return CausalClass.ZERO
	s = float(-m[0] * m[0] + math.fsum(m[1:] * m[1:]))
	future = m[0] > 0
	if abs(s) <= tol * length * length:
		return CausalClass.NULL_FUTURE if future else CausalClass.NULL_PAST
	if s > 0:
		return CausalClass.SPACELIKE
	return CausalClass.TIMELIKE_FUTURE if future else CausalClass.TIMELIKE_PAST


def _raising_inverse(g: MetricField, bundle: CurvatureBundle, p: np.ndarray, raise_with: str) -> np.ndarray:
	if raise_with == "physical":
		return bundle.g_inv
	if g.reference is None:
		raise MetricError("contraction with the background needs a metric with a reference background")
	return invert_metric(g.reference.values(p))


def _flux_vector(bundle: CurvatureBundle, grad: np.ndarray, raise_inv: np.ndarray) -> np.ndarray:
	n = bundle.dim
	traceless = bundle.ricci - (bundle.scalar / n) * bundle.g
	return raise_inv @ traceless @ (raise_inv @ grad)


def _cancellation_scale(bundle: CurvatureBundle, grad: np.ndarray, raise_inv: np.ndarray) -> np.ndarray:
	"""|R^i_j| |D^j V|: size of the terms that cancel in E^i_j D^j V on an Einstein metric."""
	return np.abs(raise_inv @ bundle.ricci) @ np.abs(raise_inv @ grad)


def _subtracted_reference(g: MetricField, subtract: bool) -> Optional[MetricField]:
	ref = g.reference if subtract else None
	return None if ref is g else ref


def mass_integrand(
	g: MetricField,
	V: StaticPotential,
	p: Sequence[float],
	raise_with: str = "physical",
	subtract_reference: bool = False,
) -> np.ndarray:
	"""W^i = E^i_j D^j V at p, optionally minus the same field on the reference background."""
	if raise_with not in RAISE_WITH:
		raise ValueError(f"raise_with must be one of {RAISE_WITH}, got '{raise_with}'")
	p = g.chart.check(p)
	bundle = g.geometry(p)
	grad = V.jet(p).grad
	raise_inv = _raising_inverse(g, bundle, p, raise_with)
	w = _flux_vector(bundle, grad, raise_inv)
	ref = _subtracted_reference(g, subtract_reference)
	if ref is not None:
		ref_bundle = ref.geometry(p)
		w = w - _flux_vector(ref_bundle, grad, ref_bundle.g_inv)
	w[np.abs(w) <= settings.roundoff_floor * _cancellation_scale(bundle, grad, raise_inv)] = 0.0
	return w


def _node(g: MetricField, potentials: Sequence[StaticPotential], p: np.ndarray, raise_with: str, subtract: bool):
	chart = g.chart
	c = chart.asymptotic_index
	n = g.dim
	bundle = g.geometry(p)
	raise_inv = _raising_inverse(g, bundle, p, raise_with)
	ref = _subtracted_reference(g, subtract)
	ref_bundle = ref.geometry(p) if ref is not None else None

	a = bundle.g_inv[c, c]
	nu = chart.outward_sign / math.sqrt(a)
	dA = area_element(bundle.g, chart)
	mixed = bundle.mixed_ricci()
	deviation = abs(bundle.scalar / (n * (n - 1)) + 1.0)

	fluxes = np.empty(len(potentials))
	scales = np.empty(len(potentials))
	for k, V in enumerate(potentials):
		grad = V.jet(p).grad
		dv = raise_inv @ grad
		scales[k] = float(np.abs(mixed[c]) @ np.abs(dv)) * abs(nu) * dA
		w = _flux_vector(bundle, grad, raise_inv)
		if ref_bundle is not None:
			w = w - _flux_vector(ref_bundle, grad, ref_bundle.g_inv)
		fluxes[k] = -w[c] * nu * dA
	return fluxes, scales, deviation


def evaluate_level(
	g: MetricField,
	potentials: Sequence[StaticPotential],
	level: float,
	order: int,
	raise_with: str = "physical",
	subtract_reference: bool = True,
) -> LevelEvaluation:
	"""Fluxes of all potentials through one level set at a fixed quadrature order."""
	chart = g.chart
	rule = angular_rule(chart, order)
	points = level_points(chart, level, rule)
	data = parallel_map(lambda p: _node(g, potentials, p, raise_with, subtract_reference), points)
	values = np.array([math.fsum(w * d[0][k] for w, d in zip(rule.weights, data)) for k in range(len(potentials))])
	scales = np.array([math.fsum(abs(w) * d[1][k] for w, d in zip(rule.weights, data)) for k in range(len(potentials))])
	# fluxes within roundoff of the cancelling terms are zero
	values[np.abs(values) <= settings.roundoff_floor * scales] = 0.0
	deviation = max(d[2] for d in data)
	return LevelEvaluation(level, chart.boundary_x(level), order, values, scales, deviation)


def level_set_mass(g: MetricField, V: StaticPotential, level: float, order: Optional[int] = None, **options) -> float:
	"""Flux of V through {asymptotic coordinate = level} at a fixed quadrature order."""
	return float(evaluate_level(g, [V], level, order or settings.quadrature_order, **options).values[0])


def level_masses(
	g: MetricField,
	potentials: Sequence[StaticPotential],
	level: float,
	order: Optional[int] = None,
	**options,
) -> LevelEvaluation:
	"""Level fluxes with the quadrature order doubled until order/2 and order agree."""
	order = order or settings.quadrature_order
	top = max(order, settings.quadrature_max_order)
	coarse = evaluate_level(g, potentials, level, max(2, order // 2), **options)
	fine = evaluate_level(g, potentials, level, order, **options)
	while True:
		diff = np.abs(fine.values - coarse.values)
		allowed = settings.quadrature_rel_tol * float(np.max(np.abs(fine.values))) + settings.roundoff_floor * fine.scales
		if np.all(diff <= allowed):
			break
		if fine.order >= top:
			logger.warning("QUAD: level %g not resolved at order %d (change %.3e)", level, fine.order, float(np.max(diff)))
			break
		new_order = min(2 * fine.order, top)
		logger.debug("QUAD: level %g, order %d -> %d (change %.3e)", level, fine.order, new_order, float(np.max(diff)))
		coarse, fine = fine, evaluate_level(g, potentials, level, new_order, **options)
	return fine


def _divergence_table(results: Sequence[MassResult]) -> List[Dict]:
	return [row for r in results for row in r.rows()]


def scalar_deviation(g: MetricField, level: float, order: int = 4) -> float:
	"""max |R / (n(n-1)) + 1| over a coarse rule on one level set."""
	chart = g.chart
	n = g.dim
	points = level_points(chart, level, angular_rule(chart, order))
	return max(abs(g.geometry(p).scalar / (n * (n - 1)) + 1.0) for p in points)


def screen_alh_end(g: MetricField, levels: Sequence[float]) -> None:
	"""Refuse ends whose scalar curvature stays away from -n(n-1): they have no conformal boundary."""
	chart = g.chart
	table = [
		{"level": float(level), "x": chart.boundary_x(level), "scalar_deviation": scalar_deviation(g, level)}
		for level in levels
	]
	last = table[-1]["scalar_deviation"]
	if last > settings.alh_tolerance:
		message = (
			f"scalar curvature does not approach -n(n-1) toward the end (relative deviation {last:.3g} "
			f"at level {levels[-1]:g}); no conformal boundary"
		)
		logger.warning("MASS: %s", message)
		raise DivergenceError(message, table=table)


def mass_limits(
	g: MetricField,
	potentials: Sequence[StaticPotential],
	levels: Optional[Sequence[float]] = None,
	order: Optional[int] = None,
	sigma: Optional[float] = None,
	raise_with: str = "physical",
	subtract_reference: bool = True,
) -> List[MassResult]:
	"""Extrapolated masses of several potentials, sharing one geometry evaluation per node."""
	if raise_with not in RAISE_WITH:
		raise ValueError(f"raise_with must be one of {RAISE_WITH}, got '{raise_with}'")
	if not potentials:
		raise ValueError("at least one static potential is required")
	chart = g.chart
	levels = list(levels or level_sequence(chart))
	if not 4 <= len(levels) <= 8:
		raise ValueError(f"level count must be between 4 and 8, got {len(levels)}")
	xs = [chart.boundary_x(level) for level in levels]
	sequence_ratio(xs)
	screen_alh_end(g, levels)

	evaluations = []
	for level in levels:
		ev = level_masses(g, potentials, level, order, raise_with=raise_with, subtract_reference=subtract_reference)
		logger.debug("MASS: level %g (x = %.6g) order %d -> %s", level, ev.x, ev.order, ev.values.tolist())
		evaluations.append(ev)

	results = []
	for k, V in enumerate(potentials):
		values = [float(ev.values[k]) for ev in evaluations]
		scale = max(float(ev.scales[k]) for ev in evaluations)
		ext = richardson(xs, values, order=sigma, floor=settings.roundoff_floor * scale)
		results.append(MassResult(
			label=V.label,
			index=V.index,
			mass=ext.limit,
			error=ext.error,
			order=ext.order,
			levels=[float(level) for level in levels],
			xs=[float(x) for x in xs],
			values=values,
			extrapolants=ext.extrapolants,
			quadrature_orders=[ev.order for ev in evaluations],
			converged=ext.converged,
			message=ext.message,
			normalization=V.normalization,
		))

	for r in results:
		if not r.converged:
			message = f"mass of {r.label} does not converge: {r.message}"
			logger.warning("MASS: %s", message)
			raise DivergenceError(message, table=_divergence_table(results))
	for r in results:
		logger.info("MASS: m(%s) = %.15g (error %.2e, order %s)", r.label, r.mass, r.error, r.order)
	return results


def mass_limit(
	g: MetricField,
	V: StaticPotential,
	levels: Optional[Sequence[float]] = None,
	order: Optional[int] = None,
	sigma: Optional[float] = None,
	**options,
) -> MassResult:
	return mass_limits(g, [V], levels, order, sigma, **options)[0]


def normalized_mass(
	g: MetricField,
	V: StaticPotential,
	levels: Optional[Sequence[float]] = None,
	order: Optional[int] = None,
	**options,
) -> MassResult:
	"""Mass of a non-AH end with V normalized so lim x V = 1 on a unit-volume cross-section.

	Patch ends are reported per unit boundary volume."""
	levels = list(levels or level_sequence(g.chart))
	Vn = normalize_end(g, V, levels)
	result = mass_limit(g, Vn, levels, order, **options)
	if g.chart.cross_section == "patch":
		volume, _ = boundary_volume(g, levels, order)
		result.mass /= volume
		result.error /= volume
		result.values = [v / volume for v in result.values]
		result.extrapolants = [v / volume for v in result.extrapolants]
		result.message = (result.message + "; " if result.message else "") + f"per unit boundary volume ({volume:.12g})"
	return result


def energy_momentum(
	g: MetricField,
	levels: Optional[Sequence[float]] = None,
	order: Optional[int] = None,
	tol: Optional[float] = None,
	potentials: Optional[Sequence[StaticPotential]] = None,
	**options,
) -> EnergyMomentum:
	"""m_mu = m(V_mu) over the AH basis V_0 = sqrt(r^2 + 1), V_i = r w^i."""
	chart = g.chart
	if chart.cross_section != "sphere":
		raise ChartError("energy-momentum needs an AH end with a spherical cross-section")
	potentials = list(potentials or ah_basis(chart))
	if len(potentials) != chart.dim + 1:
		raise NormalizationError(f"energy-momentum needs {chart.dim + 1} basis potentials, got {len(potentials)}")
	results = mass_limits(g, potentials, levels, order, **options)
	em = EnergyMomentum(np.array([r.mass for r in results]), settings.causal_tolerance if tol is None else tol, results)
	logger.info("MASS: energy-momentum %s, norm^2 %.6g, %s", em.components.tolist(), em.norm2, em.causal_class.value)
	return em
