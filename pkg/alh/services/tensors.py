"""Levi-Civita geometry from second-order metric jets.

Index conventions:
	dg[k, i, j]      = d_k g_ij
	ddg[l, k, i, j]  = d_l d_k g_ij
	christoffel[k, i, j] = Gamma^k_ij
	riemann[a, b, c, d]  = R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
	ricci[b, d]      = R^a_bad
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from alh.core.config import settings
from alh.core.errors import DegenerateError, MetricError
from alh.services.stencils import central_difference

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricJet:
	g: np.ndarray
	g_inv: np.ndarray
	dg: np.ndarray
	ddg: Optional[np.ndarray] = None

	@property
	def dim(self) -> int:
		return self.g.shape[0]


@dataclass(frozen=True)
class CurvatureBundle:
	g: np.ndarray
	g_inv: np.ndarray
	christoffel: np.ndarray
	ricci: np.ndarray
	scalar: float
	riemann: Optional[np.ndarray] = None

	@property
	def dim(self) -> int:
		return self.g.shape[0]

	def mixed_ricci(self) -> np.ndarray:
		"""R^i_j."""
		return self.g_inv @ self.ricci

	def traceless_ricci(self) -> np.ndarray:
		"""R^i_j - (R/n) delta^i_j."""
		n = self.dim
		return self.mixed_ricci() - (self.scalar / n) * np.eye(n)

	def lowered_riemann(self) -> np.ndarray:
		if self.riemann is None:
			raise ValueError("curvature bundle was computed without the Riemann tensor")
		return np.einsum("ae,ebcd->abcd", self.g, self.riemann)


def invert_metric(g: np.ndarray) -> np.ndarray:
	"""Cholesky-checked inverse; a failed factorization means the metric is not positive definite."""
	if not np.all(np.isfinite(g)):
		raise MetricError(f"metric has non-finite components: {g.tolist()}")
	try:
		factor = scipy.linalg.cho_factor(g, lower=True, check_finite=False)
	except np.linalg.LinAlgError:
		raise MetricError(f"metric is not positive definite: {g.tolist()}") from None
	inv = scipy.linalg.cho_solve(factor, np.eye(g.shape[0]), check_finite=False)
	return 0.5 * (inv + inv.T)


def make_metric_jet(g: np.ndarray, dg: np.ndarray, ddg: Optional[np.ndarray] = None) -> MetricJet:
	g = np.asarray(g, dtype=float)
	if g.ndim != 2 or g.shape[0] != g.shape[1]:
		raise MetricError(f"metric must be a square matrix, got shape {g.shape}")
	if not np.array_equal(g, g.T):
		raise MetricError("metric components are not symmetric")
	return MetricJet(g, invert_metric(g), np.asarray(dg, dtype=float), None if ddg is None else np.asarray(ddg, dtype=float))


def metric_jet_from_jets(jets) -> MetricJet:
	"""Assemble a MetricJet from an n x n table of Jet2 components (upper triangle is read)."""
	n = len(jets)
	g = np.empty((n, n))
	dg = np.empty((n, n, n))
	ddg = np.empty((n, n, n, n))
	for i in range(n):
		for j in range(i, n):
			jet = jets[i][j]
			g[i, j] = g[j, i] = jet.value
			dg[:, i, j] = dg[:, j, i] = jet.grad
			ddg[:, :, i, j] = ddg[:, :, j, i] = jet.hess
	return make_metric_jet(g, dg, ddg)


def christoffel_symbols(mj: MetricJet) -> np.ndarray:
	# lowered[l, i, j] = Gamma_lij
	lowered = 0.5 * (np.transpose(mj.dg, (2, 0, 1)) + np.transpose(mj.dg, (2, 1, 0)) - mj.dg)
	return np.einsum("kl,lij->kij", mj.g_inv, lowered)


def curvature(mj: MetricJet, riemann: bool = False) -> CurvatureBundle:
	if mj.ddg is None:
		raise ValueError("curvature needs second derivatives of the metric")
	dg, ddg, g_inv = mj.dg, mj.ddg, mj.g_inv
	lowered = 0.5 * (np.transpose(dg, (2, 0, 1)) + np.transpose(dg, (2, 1, 0)) - dg)
	gamma = np.einsum("kl,lij->kij", g_inv, lowered)

	# d_m Gamma_lij and d_m g^kl
	d_lowered = 0.5 * (
		np.transpose(ddg, (0, 3, 1, 2)) + np.transpose(ddg, (0, 3, 2, 1)) - ddg
	)
	d_ginv = -np.einsum("ka,mab,bl->mkl", g_inv, dg, g_inv)
	d_gamma = np.einsum("mkl,lij->mkij", d_ginv, lowered) + np.einsum("kl,mlij->mkij", g_inv, d_lowered)

	# R^a_bcd
	term = np.transpose(d_gamma, (1, 3, 0, 2))
	rm = term - np.transpose(term, (0, 1, 3, 2))
	quad = np.einsum("ace,edb->abcd", gamma, gamma)
	rm = rm + quad - np.transpose(quad, (0, 1, 3, 2))

	ricci = np.einsum("abad->bd", rm)
	scale = float(np.max(np.abs(d_gamma))) + float(np.max(np.abs(gamma))) ** 2 * mj.dim
	skew = float(np.max(np.abs(ricci - ricci.T)))
	if skew > settings.symmetry_tolerance * max(scale, 1.0):
		raise MetricError(f"Ricci tensor is not symmetric (antisymmetric part {skew:.3e}, term scale {scale:.3e})")
	ricci = 0.5 * (ricci + ricci.T)
	scalar = float(np.einsum("ij,ij->", g_inv, ricci))
	return CurvatureBundle(mj.g, g_inv, gamma, ricci, scalar, rm if riemann else None)


def sectional_curvature(bundle: CurvatureBundle, u: Sequence[float], v: Sequence[float]) -> float:
	u = np.asarray(u, dtype=float)
	v = np.asarray(v, dtype=float)
	g = bundle.g
	uu = u @ g @ u
	vv = v @ g @ v
	uv = u @ g @ v
	denom = uu * vv - uv * uv
	if denom <= 1e-14 * uu * vv:
		raise DegenerateError("plane spanned by u and v is degenerate")
	num = np.einsum("abcd,a,b,c,d->", bundle.lowered_riemann(), u, v, u, v)
	return float(num / denom)


def covariant_hessian(g, V, p: Sequence[float]) -> np.ndarray:
	"""D_i D_j V = d_i d_j V - Gamma^k_ij d_k V."""
	bundle = g.geometry(p)
	jet = V.jet(p)
	return jet.hess - np.einsum("kij,k->ij", bundle.christoffel, jet.grad)


def mean_curvature(g, level: Tuple[int, float], p: Sequence[float], orientation: float = 1.0) -> float:
	"""Divergence of the unit normal nu^i = s g^ic / sqrt(g^cc) to the level set {x^c = value}.

	orientation s = +1 points toward increasing x^c.
	"""
	c, value = level
	p = np.asarray(p, dtype=float)
	if abs(p[c] - value) > 1e-12 * max(1.0, abs(value)):
		raise DegenerateError(f"point {p.tolist()} is not on the level set x^{c} = {value}")
	mj = g.metric_jet(p, order=1)
	g_inv, dg = mj.g_inv, mj.dg
	a = g_inv[c, c]
	if not a > 0.0:
		raise DegenerateError(f"level set x^{c} = {value} is degenerate at {p.tolist()}")
	s = 1.0 if orientation >= 0 else -1.0
	# d_i g^jc for every i, j
	d_ginv_c = -np.einsum("ja,iab,b->ij", g_inv, dg, g_inv[:, c])
	div_raised = float(np.trace(d_ginv_c))
	da = d_ginv_c[:, c]
	trace_gamma = 0.5 * np.einsum("jl,ijl->i", g_inv, dg)
	root = np.sqrt(a)
	return s * (
		div_raised / root
		- 0.5 * float(g_inv[:, c] @ da) / (a * root)
		+ float(trace_gamma @ g_inv[:, c]) / root
	)


def einstein_divergence(g, p: Sequence[float], h: float = 1e-3) -> np.ndarray:
	"""D_j G^j_i with G = Ric - R g / 2; derivatives of G by 4th-order central differences."""
	p = np.asarray(p, dtype=float)
	n = p.shape[0]

	def mixed_einstein(q: np.ndarray) -> np.ndarray:
		b = g.geometry(q)
		return b.mixed_ricci() - 0.5 * b.scalar * np.eye(n)

	bundle = g.geometry(p)
	G = bundle.mixed_ricci() - 0.5 * bundle.scalar * np.eye(n)
	gamma = bundle.christoffel
	partial = np.zeros(n)
	for j in range(n):
		partial += central_difference(mixed_einstein, p, j, h)[j]
	trace_gamma = np.einsum("jjk->k", gamma)
	return partial + trace_gamma @ G - np.einsum("kji,jk->i", gamma, G)
