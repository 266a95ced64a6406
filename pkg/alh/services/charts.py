import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator

from alh.core.errors import ChartError, MetricError
from alh.services import stencils
from alh.services.expression import Expression
from alh.services.jet import Jet2
from alh.services.tensors import (
	CurvatureBundle,
	MetricJet,
	curvature,
	invert_metric,
	make_metric_jet,
	metric_jet_from_jets,
)

logger = logging.getLogger(__name__)

CROSS_SECTIONS = ("sphere", "torus", "patch")
DIRECTIONS = ("infinity", "zero")


@dataclass(frozen=True)
class CoordinateAxis:
	name: str
	lower: float = -math.inf
	upper: float = math.inf
	period: Optional[float] = None

	@property
	def periodic(self) -> bool:
		return self.period is not None


@dataclass(frozen=True)
class Chart:
	"""Coordinates of an end. One coordinate is asymptotic: the conformal boundary sits at
	r -> infinity (direction "infinity", boundary-defining function x = 1/r) or at x -> 0+
	(direction "zero")."""
	axes: Tuple[CoordinateAxis, ...]
	asymptotic: str
	direction: str = "infinity"
	cross_section: str = "sphere"

	def __post_init__(self) -> None:
		names = [a.name for a in self.axes]
		if len(names) < 3:
			raise ChartError(f"chart dimension must be at least 3, got {len(names)}")
		if len(set(names)) != len(names):
			raise ChartError(f"duplicate coordinate names: {names}")
		if names.count(self.asymptotic) != 1:
			raise ChartError(f"asymptotic coordinate '{self.asymptotic}' is not a chart coordinate")
		if self.direction not in DIRECTIONS:
			raise ChartError(f"direction must be one of {DIRECTIONS}, got '{self.direction}'")
		if self.cross_section not in CROSS_SECTIONS:
			raise ChartError(f"cross section must be one of {CROSS_SECTIONS}, got '{self.cross_section}'")
		for a in self.axes:
			if a.periodic and not a.period > 0:
				raise ChartError(f"coordinate '{a.name}' has non-positive period {a.period}")
			if a.name == self.asymptotic and a.periodic:
				raise ChartError("the asymptotic coordinate cannot be periodic")

	@property
	def dim(self) -> int:
		return len(self.axes)

	@property
	def names(self) -> List[str]:
		return [a.name for a in self.axes]

	@property
	def asymptotic_index(self) -> int:
		return self.names.index(self.asymptotic)

	@property
	def tangential(self) -> List[int]:
		c = self.asymptotic_index
		return [k for k in range(self.dim) if k != c]

	@property
	def outward_sign(self) -> float:
		"""Sign of the asymptotic coordinate's increase toward the conformal boundary."""
		return 1.0 if self.direction == "infinity" else -1.0

	def boundary_x(self, level: float) -> float:
		return 1.0 / level if self.direction == "infinity" else level

	def level_of(self, x: float) -> float:
		return 1.0 / x if self.direction == "infinity" else x

	def with_axis(self, name: str, **changes) -> "Chart":
		axes = tuple(
			CoordinateAxis(**{**a.__dict__, **changes}) if a.name == name else a for a in self.axes
		)
		return Chart(axes, self.asymptotic, self.direction, self.cross_section)

	def check(self, p: Sequence[float]) -> np.ndarray:
		p = np.asarray(p, dtype=float)
		if p.shape != (self.dim,):
			raise ChartError(f"point has shape {p.shape}, chart has dimension {self.dim}")
		for a, value in zip(self.axes, p):
			if not math.isfinite(value):
				raise ChartError(f"coordinate '{a.name}' is not finite: {value}")
			if a.periodic:
				continue
			if value < a.lower or value > a.upper:
				raise ChartError(f"coordinate '{a.name}' = {value!r} outside [{a.lower}, {a.upper}]")
		return p


class MetricField(ABC):
	"""A Riemannian metric on a chart, evaluable with two derivatives at a point.

	reference, when set, is the background (m = 0) metric on the same chart; the mass
	integrand subtracts its flux and can raise indices with it. A background is its own
	reference and is then evaluated without subtraction."""

	def __init__(self, chart: Chart, params: Optional[Mapping[str, float]] = None, reference: Optional["MetricField"] = None) -> None:
		self.chart = chart
		self.params: Dict[str, float] = dict(params or {})
		self.reference = reference

	@property
	def dim(self) -> int:
		return self.chart.dim

	@abstractmethod
	def metric_jet(self, p: Sequence[float], order: int = 2) -> MetricJet:
		...

	def values(self, p: Sequence[float]) -> np.ndarray:
		return self.metric_jet(p, order=1).g

	def geometry(self, p: Sequence[float], riemann: bool = False) -> CurvatureBundle:
		return curvature(self.metric_jet(p), riemann=riemann)


class AnalyticMetric(MetricField):
	def __init__(
		self,
		chart: Chart,
		components: Mapping[Tuple[int, int], Expression],
		params: Optional[Mapping[str, float]] = None,
		reference: Optional[MetricField] = None,
	) -> None:
		super().__init__(chart, params, reference)
		n = chart.dim
		table: List[List[Optional[Expression]]] = [[None] * n for _ in range(n)]
		for (i, j), expr in components.items():
			a, b = min(i, j), max(i, j)
			if table[a][b] is not None and table[a][b] != expr:
				raise MetricError(f"component ({a}, {b}) given twice with different expressions")
			if tuple(expr.coords) != tuple(chart.names):
				raise MetricError(f"component ({a}, {b}) is not written in chart coordinates {chart.names}")
			table[a][b] = expr
		for i in range(n):
			if table[i][i] is None:
				raise MetricError(f"diagonal component ({i}, {i}) is missing")
		self._table = table
		missing = {name for row in table for e in row if e is not None for name in e.params} - set(self.params)
		if missing:
			raise MetricError(f"unbound parameters: {sorted(missing)}")

	def component(self, i: int, j: int) -> Optional[Expression]:
		return self._table[min(i, j)][max(i, j)]

	def metric_jet(self, p: Sequence[float], order: int = 2) -> MetricJet:
		p = self.chart.check(p)
		n = self.dim
		zero = Jet2.constant(0.0, n)
		jets = [[None] * n for _ in range(n)]
		for i in range(n):
			for j in range(i, n):
				e = self._table[i][j]
				if e is None:
					jets[i][j] = zero
				else:
					jets[i][j] = e.jet(p, self.params)
		mj = metric_jet_from_jets(jets)
		return mj if order >= 2 else MetricJet(mj.g, mj.g_inv, mj.dg, None)

	def values(self, p: Sequence[float]) -> np.ndarray:
		p = self.chart.check(p)
		n = self.dim
		g = np.zeros((n, n))
		for i in range(n):
			for j in range(i, n):
				e = self._table[i][j]
				if e is not None:
					g[i, j] = g[j, i] = e.evaluate(p, self.params)
		invert_metric(g)
		return g


class ScaledMetric(MetricField):
	"""c2 * g for a constant c2 > 0."""

	def __init__(self, source: MetricField, c2: float) -> None:
		if not c2 > 0:
			raise MetricError(f"scale factor must be positive, got {c2}")
		super().__init__(source.chart, source.params, None)
		self.source = source
		self.c2 = float(c2)
		if source.reference is source:
			self.reference = self
		elif source.reference is not None:
			self.reference = ScaledMetric(source.reference, c2)

	def metric_jet(self, p: Sequence[float], order: int = 2) -> MetricJet:
		mj = self.source.metric_jet(p, order)
		ddg = None if mj.ddg is None else self.c2 * mj.ddg
		return MetricJet(self.c2 * mj.g, mj.g_inv / self.c2, self.c2 * mj.dg, ddg)

	def values(self, p: Sequence[float]) -> np.ndarray:
		return self.c2 * self.source.values(p)


def scale_metric(g: MetricField, c2: float) -> MetricField:
	return ScaledMetric(g, c2)


class GridMetric(MetricField):
	"""Metric sampled on a uniform rectilinear grid.

	Derivatives come from 4th-order stencils at the nodes; off-node points use local
	tensor-product quintic interpolation over a six-node window (the local degree-5
	interpolating polynomial) of the node values and node derivatives."""

	WINDOW = 6

	def __init__(self, chart: Chart, axes_values: Sequence[np.ndarray], g: np.ndarray, reference: Optional[MetricField] = None) -> None:
		super().__init__(chart, {}, reference)
		n = chart.dim
		if len(axes_values) != n:
			raise MetricError(f"grid has {len(axes_values)} axes, chart has dimension {n}")
		shape = tuple(len(v) for v in axes_values)
		g = np.asarray(g, dtype=float)
		if g.shape != shape + (n, n):
			raise MetricError(f"grid components have shape {g.shape}, expected {shape + (n, n)}")
		self.shape = shape
		self.origin = np.array([float(v[0]) for v in axes_values])
		self.spacing = np.empty(n)
		self.periodic = [a.periodic for a in chart.axes]
		for k, (axis, v) in enumerate(zip(chart.axes, axes_values)):
			v = np.asarray(v, dtype=float)
			if len(v) < stencils.MIN_POINTS:
				raise MetricError(f"axis '{axis.name}' has {len(v)} points, need at least {stencils.MIN_POINTS}")
			steps = np.diff(v)
			h = float(steps.mean())
			if not h > 0 or not np.allclose(steps, h, rtol=1e-9, atol=0.0):
				raise MetricError(f"axis '{axis.name}' is not uniformly increasing")
			if axis.periodic and not math.isclose(len(v) * h, axis.period, rel_tol=1e-9):
				raise MetricError(
					f"periodic axis '{axis.name}' must cover one period without its endpoint "
					f"({len(v)} x {h} != {axis.period})"
				)
			self.spacing[k] = h
		self._g = g
		self._dg = np.empty(shape + (n, n, n))
		self._ddg = np.empty(shape + (n, n, n, n))
		for k in range(n):
			self._dg[..., k, :, :] = stencils.first_derivative(g, self.spacing[k], k, self.periodic[k])
		for k in range(n):
			for l in range(k, n):
				if k == l:
					block = stencils.second_derivative(g, self.spacing[k], k, self.periodic[k])
				else:
					block = stencils.first_derivative(self._dg[..., k, :, :], self.spacing[l], l, self.periodic[l])
				self._ddg[..., l, k, :, :] = block
				self._ddg[..., k, l, :, :] = block
		logger.info("GRID: %s nodes, spacing %s", "x".join(str(s) for s in shape), self.spacing.tolist())

	@classmethod
	def sample(cls, source: MetricField, axes_values: Sequence[np.ndarray]) -> "GridMetric":
		"""Sample an analytic field on the tensor grid spanned by axes_values."""
		mesh = np.meshgrid(*axes_values, indexing="ij")
		points = np.stack([m.ravel() for m in mesh], axis=-1)
		n = source.dim
		shape = tuple(len(v) for v in axes_values)
		g = np.array([source.values(p) for p in points]).reshape(shape + (n, n))
		return cls(source.chart, axes_values, g)

	@classmethod
	def from_frame(cls, frame: pd.DataFrame, chart: Chart, source: str = "<frame>") -> "GridMetric":
		n = chart.dim
		names = chart.names
		expected = names + [f"g{i}{j}" for i in range(n) for j in range(i, n)]
		if len(frame.columns) != len(expected):
			raise MetricError(f"{source}: expected {len(expected)} columns {expected}, found {list(frame.columns)}")
		frame = frame.copy()
		frame.columns = [str(c).strip() for c in frame.columns]
		if list(frame.columns[:n]) != names:
			raise MetricError(f"{source}: coordinate columns {list(frame.columns[:n])} do not match chart {names}")
		axes_values = [np.unique(frame[name].to_numpy(dtype=float)) for name in names]
		shape = tuple(len(v) for v in axes_values)
		if int(np.prod(shape)) != len(frame):
			raise MetricError(f"{source}: {len(frame)} rows do not form a {shape} grid")
		frame = frame.sort_values(names, kind="mergesort")
		n_comp = n * (n + 1) // 2
		flat = frame.iloc[:, n:n + n_comp].to_numpy(dtype=float)
		g = np.empty((len(frame), n, n))
		col = 0
		for i in range(n):
			for j in range(i, n):
				g[:, i, j] = g[:, j, i] = flat[:, col]
				col += 1
		return cls(chart, axes_values, g.reshape(shape + (n, n)))

	@classmethod
	def from_csv(cls, path: str, chart: Chart) -> "GridMetric":
		frame = pd.read_csv(path, sep=None, engine="python", comment="#")
		return cls.from_frame(frame, chart, source=str(path))

	def to_frame(self) -> pd.DataFrame:
		n = self.dim
		axes_values = [self.origin[k] + self.spacing[k] * np.arange(self.shape[k]) for k in range(n)]
		mesh = np.meshgrid(*axes_values, indexing="ij")
		data = {name: m.ravel() for name, m in zip(self.chart.names, mesh)}
		flat = self._g.reshape(-1, n, n)
		for i in range(n):
			for j in range(i, n):
				data[f"g{i}{j}"] = flat[:, i, j]
		return pd.DataFrame(data)

	def _node(self, p: np.ndarray) -> Optional[Tuple[int, ...]]:
		t = (p - self.origin) / self.spacing
		idx = np.rint(t)
		if np.all(np.abs(t - idx) <= 1e-9):
			out = []
			for k, i in enumerate(idx.astype(int)):
				out.append(i % self.shape[k] if self.periodic[k] else i)
			return tuple(out)
		return None

	def _interpolate(self, arrays: Sequence[np.ndarray], p: np.ndarray) -> List[np.ndarray]:
		n = self.dim
		w = self.WINDOW
		index = []
		coords = []
		for k in range(n):
			t = (p[k] - self.origin[k]) / self.spacing[k]
			i = int(math.floor(t))
			if self.periodic[k]:
				ids = np.arange(i - 2, i - 2 + w)
				index.append(ids % self.shape[k])
			else:
				start = min(max(i - 2, 0), self.shape[k] - w)
				ids = np.arange(start, start + w)
				index.append(ids)
			coords.append(self.origin[k] + self.spacing[k] * ids)
		window = np.ix_(*index)
		out = []
		for arr in arrays:
			local = arr[window]
			interp = RegularGridInterpolator(tuple(coords), local, method="quintic")
			out.append(interp(p[None, :])[0])
		return out

	def metric_jet(self, p: Sequence[float], order: int = 2) -> MetricJet:
		p = self.chart.check(p)
		for k, axis in enumerate(self.chart.axes):
			lo = self.origin[k]
			hi = lo + self.spacing[k] * (self.shape[k] - 1)
			if not axis.periodic and not (lo - 1e-12 * self.spacing[k] <= p[k] <= hi + 1e-12 * self.spacing[k]):
				raise ChartError(f"coordinate '{axis.name}' = {p[k]!r} outside the sampled range [{lo}, {hi}]")
		node = self._node(p)
		if node is not None:
			g, dg, ddg = self._g[node], self._dg[node], self._ddg[node]
		else:
			g, dg, ddg = self._interpolate((self._g, self._dg, self._ddg), p)
			g = 0.5 * (g + g.T)
		return make_metric_jet(g, dg, ddg if order >= 2 else None)
