"""Catalog of reference metrics, their static potentials and end normalization.

Birmingham family: g = dr^2 / f + r^2 h_k with f = k + r^2 - 2 m r^(2-n) and h_k the unit
round sphere (k = 1), a flat torus (k = 0), or a local patch of a constant curvature -1
metric (k = -1). With m = 0 each member is hyperbolic space and sqrt(k + r^2) is a static
potential; for k = 1 the full basis V_0 = sqrt(r^2 + 1), V_i = r w^i is available.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from alh.core import registry
from alh.core.config import settings
from alh.core.errors import ChartError, NormalizationError
from alh.services.boundary import boundary_volume
from alh.services.charts import AnalyticMetric, Chart, CoordinateAxis, MetricField, scale_metric
from alh.services.expression import Expression, parse_expression
from alh.services.extrapolation import richardson
from alh.services.jet import Jet2
from alh.services.quadrature import level_sequence
from alh.services.tensors import covariant_hessian

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("ah-basis", "alh-normalized", "raw")

# u in [1, 2] and w_j in [0, 1] for the k = -1 fundamental patch
PATCH_U = (1.0, 2.0)


@dataclass(frozen=True)
class StaticPotential:
	expression: Expression
	label: str
	index: Optional[int] = None
	normalization: str = "raw"
	scale: float = 1.0
	boundary_scale: Optional[float] = None
	params: Mapping[str, float] = field(default_factory=dict, compare=False)

	def __post_init__(self) -> None:
		if self.normalization not in NORMALIZATIONS:
			raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got '{self.normalization}'")

	def jet(self, p: Sequence[float]) -> Jet2:
		jet = self.expression.jet(np.asarray(p, dtype=float), self.params)
		return jet if self.scale == 1.0 else jet * self.scale

	def value(self, p: Sequence[float]) -> float:
		return self.scale * self.expression.evaluate(p, self.params)

	def scaled(self, factor: float, normalization: Optional[str] = None, boundary_scale: Optional[float] = None) -> "StaticPotential":
		return replace(
			self,
			scale=self.scale * factor,
			normalization=normalization or self.normalization,
			boundary_scale=boundary_scale if boundary_scale is not None else self.boundary_scale,
		)


@dataclass
class BackgroundModel:
	name: str
	n: int
	metric: MetricField
	background: MetricField
	potentials: List[StaticPotential]
	end_type: str
	boundary_volume: float
	params: Dict[str, float] = field(default_factory=dict)

	@property
	def chart(self) -> Chart:
		return self.metric.chart


def angle_names(n: int) -> List[str]:
	if n == 3:
		return ["theta", "phi"]
	return [f"theta{j}" for j in range(1, n - 1)] + ["phi"]


def polar_chart(n: int, r_lower: Optional[float] = None) -> Chart:
	if n < 3:
		raise ChartError(f"dimension must be at least 3, got {n}")
	lower = settings.r_min if r_lower is None else max(r_lower, settings.r_min)
	axes = [CoordinateAxis("r", lower, math.inf)]
	for name in angle_names(n)[:-1]:
		axes.append(CoordinateAxis(name, 0.0, math.pi))
	axes.append(CoordinateAxis("phi", period=2.0 * math.pi))
	return Chart(tuple(axes), "r", "infinity", "sphere")


def torus_chart(n: int, volume: float = 1.0, r_lower: Optional[float] = None) -> Chart:
	if not volume > 0:
		raise ChartError(f"torus volume must be positive, got {volume}")
	side = volume ** (1.0 / (n - 1))
	lower = settings.r_min if r_lower is None else max(r_lower, settings.r_min)
	axes = [CoordinateAxis("r", lower, math.inf)]
	axes += [CoordinateAxis(f"y{j}", period=side) for j in range(1, n)]
	return Chart(tuple(axes), "r", "infinity", "torus")


def patch_chart(n: int, r_lower: Optional[float] = None) -> Chart:
	lower = settings.r_min if r_lower is None else max(r_lower, settings.r_min)
	axes = [CoordinateAxis("r", lower, math.inf), CoordinateAxis("u", *PATCH_U)]
	axes += [CoordinateAxis(f"w{j}", 0.0, 1.0) for j in range(1, n - 1)]
	return Chart(tuple(axes), "r", "infinity", "patch")


def sphere_volume(n: int) -> float:
	"""Volume of the unit round S^(n-1)."""
	return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def patch_volume(n: int) -> float:
	"""Volume of the k = -1 patch: integral of u^(1-n) over [1, 2] x [0, 1]^(n-2)."""
	a, b = PATCH_U
	return (a ** (2 - n) - b ** (2 - n)) / (n - 2)


def direction_cosines(n: int) -> List[str]:
	"""w^i of the unit sphere in polar angles, as expression text."""
	angles = angle_names(n)
	out = []
	prefix = ""
	for j, name in enumerate(angles):
		if name == "phi":
			out.append(f"{prefix}cos(phi)")
			out.append(f"{prefix}sin(phi)")
		else:
			out.append(f"{prefix}cos({name})")
			prefix += f"sin({name})*"
	return out


def _f_text(n: int, k: int) -> str:
	return f"{k} + r^2 - 2*m*r^({2 - n})"


def _angular_block(n: int) -> List[str]:
	out = []
	factor = "r^2"
	for name in angle_names(n):
		out.append(factor)
		factor += f"*sin({name})^2"
	return out


def birmingham_metric(n: int, k: int, m: float, chart: Chart) -> AnalyticMetric:
	names = chart.names
	params = ["m"]
	comps: Dict = {(0, 0): parse_expression(f"1/({_f_text(n, k)})", names, params)}
	if k == 1:
		for a, text in enumerate(_angular_block(n), start=1):
			comps[(a, a)] = parse_expression(text, names, params)
	elif k == 0:
		for a in range(1, n):
			comps[(a, a)] = parse_expression("r^2", names, params)
	else:
		for a in range(1, n):
			comps[(a, a)] = parse_expression("r^2/u^2", names, params)
	return AnalyticMetric(chart, comps, {"m": float(m)})


def ah_basis(chart: Chart) -> List[StaticPotential]:
	"""V_0 = sqrt(r^2 + 1), V_i = r w^i on a polar chart."""
	if chart.cross_section != "sphere" or chart.direction != "infinity":
		raise ChartError("the AH basis is defined on polar charts with r -> infinity")
	n = chart.dim
	r = chart.asymptotic
	names = chart.names
	out = [StaticPotential(parse_expression(f"sqrt({r}^2+1)", names), "V0", 0, "ah-basis")]
	cosines = direction_cosines(n)
	if chart.names[1:] != angle_names(n):
		# rename the standard angles to the chart's own tangential names
		mapping = dict(zip(angle_names(n), [names[k] for k in chart.tangential]))
		for old, new in mapping.items():
			cosines = [c.replace(f"({old})", f"({new})") for c in cosines]
	for i, w in enumerate(cosines, start=1):
		out.append(StaticPotential(parse_expression(f"{r}*{w}", names), f"V{i}", i, "ah-basis"))
	return out


def horizon_radius(n: int, k: int, m: float) -> float:
	"""Largest zero of f(r) = k + r^2 - 2 m r^(2-n); 0 when f > 0 for every r > 0."""
	def f(r: float) -> float:
		return k + r * r - 2.0 * m * r ** (2 - n)

	top = 10.0 + 2.0 * abs(2.0 * m) ** (1.0 / n) + abs(k)
	grid = np.geomspace(1e-8, top, 4000)
	values = np.array([f(r) for r in grid])
	change = np.nonzero((values[:-1] <= 0.0) & (values[1:] > 0.0))[0]
	if change.size == 0:
		return 0.0
	i = int(change[-1])
	if values[i] == 0.0:
		return float(grid[i])
	return float(brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))


def _end_type(k: int) -> str:
	return {1: "AH spherical", 0: "toroidal", -1: "higher-genus"}[k]


def birmingham_background(n: int, k: int = 1, m: float = 0.0, volume: float = 1.0) -> BackgroundModel:
	if n < 3:
		raise ChartError(f"dimension must be at least 3, got {n}")
	if k not in (1, 0, -1):
		raise ChartError(f"k must be one of 1, 0, -1, got {k}")
	r_h = horizon_radius(n, k, m)
	r_h0 = horizon_radius(n, k, 0.0)
	if k == 1:
		chart = polar_chart(n, r_h)
		vol = sphere_volume(n)
	elif k == 0:
		chart = torus_chart(n, volume, r_h)
		vol = float(volume)
	else:
		chart = patch_chart(n, max(r_h, r_h0))
		vol = patch_volume(n)
	background = birmingham_metric(n, k, 0.0, chart)
	background.reference = background
	if m == 0.0:
		metric = background
	else:
		metric = birmingham_metric(n, k, m, chart)
		metric.reference = background
	if k == 1:
		potentials = ah_basis(chart)
	else:
		text = "r" if k == 0 else "sqrt(r^2-1)"
		potentials = [StaticPotential(parse_expression(text, chart.names), "V", None, "raw")]
	params = {"n": n, "k": k, "m": float(m)}
	if k == 0:
		params["volume"] = float(volume)
	return BackgroundModel("birmingham", n, metric, background, potentials, _end_type(k), vol, params)


def hyperbolic_background(n: int) -> BackgroundModel:
	"""dr^2 / (1 + r^2) + r^2 dOmega^2 with the (n+1)-dimensional static potential basis."""
	chart = polar_chart(n)
	names = chart.names
	comps = {(0, 0): parse_expression("1/(1+r^2)", names)}
	for a, text in enumerate(_angular_block(n), start=1):
		comps[(a, a)] = parse_expression(text, names)
	metric = AnalyticMetric(chart, comps)
	metric.reference = metric
	return BackgroundModel("hyperbolic", n, metric, metric, ah_basis(chart), "AH spherical", sphere_volume(n), {"n": n})


def bump_perturbation(model: BackgroundModel, eps: float, amplitude: float = 1.0, width: float = 2.0) -> BackgroundModel:
	"""Adds eps * amplitude * exp(-width (1 - cos theta)) r^-(n+2) to g_rr of a spherical end.

	The decay is that of the Birmingham mass term, so the mass is linear in eps to leading order.
	The background metric becomes the reference."""
	chart = model.chart
	if chart.cross_section != "sphere" or not isinstance(model.metric, AnalyticMetric):
		raise ChartError("bump perturbations need an analytic metric on a spherical chart")
	if not (math.isfinite(eps) and math.isfinite(amplitude) and width >= 0):
		raise ValueError(f"invalid bump parameters eps={eps}, amplitude={amplitude}, width={width}")
	names = chart.names
	theta = names[chart.tangential[0]]
	c = chart.asymptotic_index
	rr = model.metric.component(c, c)
	params = sorted(set(rr.params) | {"eps"})
	bump = f"eps*({amplitude!r})*exp(-({width!r})*(1-cos({theta})))*{names[c]}^(-{model.n + 2})"
	comps: Dict = {}
	for i in range(chart.dim):
		for j in range(i, chart.dim):
			e = model.metric.component(i, j)
			if e is not None:
				comps[(i, j)] = e
	comps[(c, c)] = parse_expression(f"{rr.pretty()} + {bump}", names, params)
	metric = AnalyticMetric(chart, comps, {**model.metric.params, "eps": float(eps)}, reference=model.background)
	logger.debug("bump perturbation of %s: eps=%g amplitude=%g width=%g", model.name, eps, amplitude, width)
	return replace(
		model, name=f"{model.name}+bump", metric=metric,
		params={**model.params, "eps": eps, "amplitude": amplitude, "width": width},
	)


def euclidean_background(n: int) -> BackgroundModel:
	"""Flat space in polar coordinates; potentials 1 and x^i. Has no conformal boundary."""
	chart = polar_chart(n)
	names = chart.names
	comps = {(0, 0): parse_expression("1", names)}
	for a, text in enumerate(_angular_block(n), start=1):
		comps[(a, a)] = parse_expression(text, names)
	metric = AnalyticMetric(chart, comps)
	potentials = [StaticPotential(parse_expression("1", names), "V0", 0, "raw")]
	for i, w in enumerate(direction_cosines(n), start=1):
		potentials.append(StaticPotential(parse_expression(f"r*{w}", names), f"V{i}", i, "raw"))
	return BackgroundModel("euclidean", n, metric, metric, potentials, "none", sphere_volume(n), {"n": n})


def lapse_potential(model: BackgroundModel) -> StaticPotential:
	"""sqrt(f): the exact static lapse of the Birmingham metric; residual O(m r^-n) on the background."""
	k = int(model.params.get("k", 1))
	m = float(model.params.get("m", 0.0))
	text = f"sqrt({_f_text(model.n, k)})"
	return StaticPotential(parse_expression(text, model.chart.names, ["m"]), "lapse", None, "raw", params={"m": m})


def static_residual(g: MetricField, V: StaticPotential, p: Sequence[float]) -> np.ndarray:
	"""D_i D_j V - (R_ij - R g_ij / (n-1)) V."""
	p = np.asarray(p, dtype=float)
	bundle = g.geometry(p)
	n = g.dim
	hess = covariant_hessian(g, V, p)
	rhs = (bundle.ricci - (bundle.scalar / (n - 1)) * bundle.g) * V.value(p)
	return hess - rhs


def normalize_end(g: MetricField, V: StaticPotential, levels: Optional[Sequence[float]] = None) -> StaticPotential:
	"""Rescale V so that lim x V = 1 once the boundary coordinates give the cross-section unit volume.

	Tori are rescaled to unit volume (side c = vol^(1/(n-1)), x -> x / c). Patches keep their
	coordinates; their masses are reported per unit boundary volume."""
	chart = g.chart
	if V.normalization == "ah-basis" or chart.cross_section == "sphere":
		raise NormalizationError("normalization convention is the AH basis")
	levels = list(levels or level_sequence(chart))
	volume, _ = boundary_volume(g, levels)
	if not (math.isfinite(volume) and volume > 0):
		raise NormalizationError(f"boundary volume is not positive and finite: {volume}")
	c = volume ** (1.0 / (chart.dim - 1)) if chart.cross_section == "torus" else 1.0

	y = np.array([0.5 * (chart.axes[k].lower + chart.axes[k].upper) if not chart.axes[k].periodic else 0.0 for k in chart.tangential])
	xs = [chart.boundary_x(level) for level in levels]
	products = []
	for level, x in zip(levels, xs):
		p = np.empty(chart.dim)
		p[chart.asymptotic_index] = level
		p[chart.tangential] = y
		products.append((x / c) * V.value(p))
	result = richardson(xs, products, floor=settings.roundoff_floor * max(1.0, max(abs(v) for v in products)))
	if not result.converged:
		raise NormalizationError(f"lim x V does not converge: {result.message}")
	limit = result.limit
	if not math.isfinite(limit) or abs(limit) < 1e-300:
		raise NormalizationError(f"lim x V is vanishing or not finite: {limit}")
	logger.info("BACKGROUND: normalized %s with boundary scale %.15g, lim xV = %.15g", V.label, c, limit)
	return V.scaled(1.0 / limit, "alh-normalized", c)


def _register() -> None:
	registry.register_background("euclidean", lambda n=3: euclidean_background(int(n)))
	registry.register_background("hyperbolic", lambda n=3: hyperbolic_background(int(n)))
	registry.register_background(
		"birmingham",
		lambda n=3, k=1, m=0.0, volume=1.0: birmingham_background(int(n), int(k), float(m), float(volume)),
	)


def build_background(name: str, params: Optional[Mapping[str, float]] = None) -> BackgroundModel:
	params = dict(params or {})
	scale = params.pop("scale", None)
	builder = registry.get_background(name)
	if builder is None:
		raise KeyError(f"unknown catalog entry '{name}' (known: {', '.join(registry.background_names())})")
	model = builder(**params)
	if scale is not None:
		model.metric = scale_metric(model.metric, float(scale))
		model.params["scale"] = float(scale)
	return model


def catalog_entries() -> List[Dict]:
	"""Alphabetical listing; birmingham is expanded by k."""
	entries = [
		{"name": "birmingham k=-1", "params": ["n", "m"], "end_type": _end_type(-1), "potentials": "1"},
		{"name": "birmingham k=0", "params": ["n", "m", "volume"], "end_type": _end_type(0), "potentials": "1"},
		{"name": "birmingham k=1", "params": ["n", "m"], "end_type": _end_type(1), "potentials": "n+1"},
		{"name": "euclidean", "params": ["n"], "end_type": "none", "potentials": "n+1"},
		{"name": "hyperbolic", "params": ["n"], "end_type": "AH spherical", "potentials": "n+1"},
	]
	return sorted(entries, key=lambda e: e["name"])


_register()
