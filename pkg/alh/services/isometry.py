"""Hyperbolic isometries on the polar chart, realised through the hyperboloid model.

A point (r, angles) embeds as y^0 = sqrt(1 + r^2), y^i = r w^i; an isometry acts linearly on
y by a Lorentz matrix and the result is projected back to polar coordinates. The static
potentials are the restrictions of y, so V o Phi = Lambda V.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from alh.core.errors import ChartError
from alh.services import jet as J
from alh.services.charts import Chart, MetricField
from alh.services.jet import Jet2
from alh.services.stencils import central_difference
from alh.services.tensors import CurvatureBundle, MetricJet, make_metric_jet

logger = logging.getLogger(__name__)

MINKOWSKI_SIGN = -1.0


def minkowski(n: int) -> np.ndarray:
	eta = np.eye(n + 1)
	eta[0, 0] = MINKOWSKI_SIGN
	return eta


def boost_matrix(n: int, direction: int, beta: float) -> np.ndarray:
	if not 1 <= direction <= n:
		raise ValueError(f"boost direction must be in 1..{n}, got {direction}")
	lam = np.eye(n + 1)
	ch, sh = math.cosh(beta), math.sinh(beta)
	lam[0, 0] = lam[direction, direction] = ch
	lam[0, direction] = lam[direction, 0] = sh
	return lam


def embed(coords: Sequence[Jet2]) -> List[Jet2]:
	"""Polar coordinates (r, theta_1, ..., phi) -> hyperboloid point (y^0, ..., y^n)."""
	r = coords[0]
	angles = coords[1:]
	ys = [J.sqrt(r * r + 1.0)]
	prefix = r
	for a in angles[:-1]:
		ys.append(prefix * J.cos(a))
		prefix = prefix * J.sin(a)
	ys.append(prefix * J.cos(angles[-1]))
	ys.append(prefix * J.sin(angles[-1]))
	return ys


def project(ys: Sequence[Jet2]) -> List[Jet2]:
	"""Inverse of embed; phi is wrapped to [0, 2 pi)."""
	space = list(ys[1:])
	n = len(space)
	squares = [y * y for y in space]
	tails = [None] * n
	acc = squares[-1]
	tails[n - 1] = acc
	for j in range(n - 2, -1, -1):
		acc = acc + squares[j]
		tails[j] = acc
	out = [J.sqrt(tails[0])]
	for j in range(n - 2):
		out.append(J.atan2(J.sqrt(tails[j + 1]), space[j]))
	phi = J.atan2(space[-1], space[-2])
	if phi.value < 0.0:
		phi = phi + 2.0 * math.pi
	out.append(phi)
	return out


@dataclass(frozen=True)
class IsometryMap:
	chart: Chart
	lorentz: np.ndarray
	label: str = ""

	def __post_init__(self) -> None:
		if self.chart.cross_section != "sphere" or self.chart.direction != "infinity":
			raise ChartError("isometries act on polar charts with r -> infinity")
		eta = minkowski(self.chart.dim)
		if not np.allclose(self.lorentz.T @ eta @ self.lorentz, eta, rtol=0.0, atol=1e-12):
			raise ValueError("matrix does not preserve the Minkowski form")

	@property
	def dim(self) -> int:
		return self.chart.dim

	def jets(self, p: Sequence[float]) -> List[Jet2]:
		p = np.asarray(p, dtype=float)
		n = self.dim
		coords = [Jet2.variable(k, float(p[k]), n) for k in range(n)]
		ys = embed(coords)
		boosted = []
		for a in range(n + 1):
			acc = Jet2.constant(0.0, n)
			for b in range(n + 1):
				if self.lorentz[a, b] != 0.0:
					acc = acc + ys[b] * float(self.lorentz[a, b])
			boosted.append(acc)
		return project(boosted)

	def apply(self, p: Sequence[float]) -> np.ndarray:
		return np.array([j.value for j in self.jets(p)])

	def derivatives(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
		"""Image point, Jacobian J[a, i] = d Phi^a / d x^i and second derivatives H[a, i, j]."""
		jets = self.jets(p)
		q = np.array([j.value for j in jets])
		jac = np.array([j.grad for j in jets])
		hess = np.array([j.hess for j in jets])
		return q, jac, hess

	def compose(self, other: "IsometryMap") -> "IsometryMap":
		"""self o other."""
		return IsometryMap(self.chart, self.lorentz @ other.lorentz, f"{self.label}*{other.label}")


def boost_isometry(n: int, direction: int, beta: float, chart: Optional[Chart] = None) -> IsometryMap:
	from alh.services.backgrounds import polar_chart

	chart = chart or polar_chart(n)
	if chart.dim != n:
		raise ChartError(f"chart dimension {chart.dim} does not match n = {n}")
	logger.debug("BOOST: direction %d, rapidity %g on %s", direction, beta, chart.names)
	return IsometryMap(chart, boost_matrix(n, direction, beta), f"boost({direction}, {beta})")


class PullbackMetric(MetricField):
	"""Phi^* g. First derivatives are exact through the map's second-order jets; curvature is
	transported tensorially, and metric_jet second derivatives come from 4th-order differences."""

	def __init__(self, source: MetricField, phi: IsometryMap, step: float = 1e-3) -> None:
		if source.chart.dim != phi.dim:
			raise ChartError("isometry and metric live on charts of different dimension")
		super().__init__(source.chart, source.params, None)
		self.source = source
		self.phi = phi
		self.step = step
		if source.reference is source:
			self.reference = self
		elif source.reference is not None:
			self.reference = PullbackMetric(source.reference, phi, step)

	def _image(self, p: Sequence[float]):
		p = self.chart.check(p)
		q, jac, hess = self.phi.derivatives(p)
		try:
			self.source.chart.check(q)
		except ChartError as exc:
			raise ChartError(f"image of {p.tolist()} leaves the chart: {exc}") from None
		return q, jac, hess

	def _first_order(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
		q, jac, hess = self._image(p)
		src = self.source.metric_jet(q, order=1)
		g = jac.T @ src.g @ jac
		g = 0.5 * (g + g.T)
		t1 = np.einsum("aki,bj,ab->kij", hess, jac, src.g)
		t3 = np.einsum("ai,bj,ck,cab->kij", jac, jac, jac, src.dg)
		dg = t1 + np.transpose(t1, (0, 2, 1)) + t3
		dg = 0.5 * (dg + np.transpose(dg, (0, 2, 1)))
		return g, dg

	def metric_jet(self, p: Sequence[float], order: int = 2) -> MetricJet:
		p = np.asarray(p, dtype=float)
		g, dg = self._first_order(p)
		if order < 2:
			return make_metric_jet(g, dg)
		n = self.dim
		ddg = np.empty((n, n, n, n))
		for l in range(n):
			h = self.step * max(1.0, abs(p[l]))
			ddg[l] = central_difference(lambda x: self._first_order(x)[1], p, l, h)
		ddg = 0.5 * (ddg + np.transpose(ddg, (1, 0, 2, 3)))
		return make_metric_jet(g, dg, ddg)

	def values(self, p: Sequence[float]) -> np.ndarray:
		q, jac, _ = self._image(p)
		g = jac.T @ self.source.values(q) @ jac
		return 0.5 * (g + g.T)

	def geometry(self, p: Sequence[float], riemann: bool = False) -> CurvatureBundle:
		q, jac, hess = self._image(p)
		src = self.source.geometry(q, riemann=riemann)
		inv = np.linalg.inv(jac)
		g = jac.T @ src.g @ jac
		g = 0.5 * (g + g.T)
		g_inv = inv @ src.g_inv @ inv.T
		g_inv = 0.5 * (g_inv + g_inv.T)
		gamma = np.einsum("ka,abc,bi,cj->kij", inv, src.christoffel, jac, jac) + np.einsum("ka,aij->kij", inv, hess)
		gamma = 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))
		ricci = jac.T @ src.ricci @ jac
		ricci = 0.5 * (ricci + ricci.T)
		rm = None
		if riemann:
			rm = np.einsum("ae,efgh,fb,gc,hd->abcd", inv, src.riemann, jac, jac, jac)
		return CurvatureBundle(g, g_inv, gamma, ricci, src.scalar, rm)


def pullback_metric(g: MetricField, phi: IsometryMap) -> MetricField:
	return PullbackMetric(g, phi)
