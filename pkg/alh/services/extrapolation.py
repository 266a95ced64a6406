"""Richardson extrapolation along geometric sequences x_k = x_0 / q^k with error model a * x^sigma."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class Extrapolation:
	limit: float
	error: float
	order: Optional[float]
	extrapolants: List[float] = field(default_factory=list)
	converged: bool = True
	message: str = ""


def sequence_ratio(xs: Sequence[float]) -> float:
	xs = np.asarray(xs, dtype=float)
	if xs.size < 2:
		raise ValueError("extrapolation needs at least two levels")
	if np.any(xs <= 0):
		raise ValueError("x-sequence must be positive")
	ratios = xs[:-1] / xs[1:]
	q = float(ratios[0])
	if not q > 1.0 or not np.allclose(ratios, q, rtol=1e-9, atol=0.0):
		raise ValueError(f"x-sequence is not geometric and decreasing: {xs.tolist()}")
	return q


def fit_order(d_prev: float, d_last: float, q: float, gap: int = 1) -> Optional[float]:
	"""Order sigma from two successive differences; None when they do not shrink."""
	if d_last == 0.0 or d_prev == 0.0:
		return None
	rho = d_prev / d_last
	if rho <= 1.0:
		return None
	return math.log(rho) / (gap * math.log(q))


def richardson(
	xs: Sequence[float],
	values: Sequence[float],
	order: Optional[float] = None,
	floor: float = 0.0,
) -> Extrapolation:
	q = sequence_ratio(xs)
	v = [float(a) for a in values]
	if len(v) != len(xs):
		raise ValueError("xs and values differ in length")
	d = [v[k + 1] - v[k] for k in range(len(v) - 1)]
	if abs(d[-1]) <= floor:
		return Extrapolation(v[-1], abs(d[-1]), None, [v[-1]], True, "converged to roundoff")

	sigma = order
	if sigma is None:
		above = [k for k in range(len(d)) if abs(d[k]) > floor]
		if len(above) < 2:
			return Extrapolation(v[-1], abs(d[-1]), None, [], False, "not enough resolved levels to fit a convergence order")
		a, b = above[-2], above[-1]
		sigma = fit_order(d[a], d[b], q, b - a)
		if sigma is None:
			return Extrapolation(
				v[-1], abs(d[-1]), None, [], False,
				f"level differences do not decrease ({d[a]:.3e} -> {d[b]:.3e})",
			)
	elif not sigma > 0:
		raise ValueError(f"convergence order must be positive, got {sigma}")

	factor = q ** sigma - 1.0
	extrapolants = [v[k + 1] + d[k] / factor for k in range(len(d))]
	logger.debug("extrapolating with order %.4g over %d levels", sigma, len(v))
	if len(extrapolants) > 1:
		error = abs(extrapolants[-1] - extrapolants[-2])
	else:
		error = abs(d[-1]) / factor
	return Extrapolation(extrapolants[-1], error, float(sigma), extrapolants, True, "")


def extrapolate_arrays(
	xs: Sequence[float],
	arrays: Sequence[np.ndarray],
	order: Optional[float] = None,
	floor: float = 0.0,
) -> Tuple[np.ndarray, float, Optional[float], bool]:
	"""Componentwise extrapolation with one order fitted on the norms of the differences.

	Returns (limit, error, order, converged).
	"""
	q = sequence_ratio(xs)
	stack = [np.asarray(a, dtype=float) for a in arrays]
	d = [stack[k + 1] - stack[k] for k in range(len(stack) - 1)]
	norms = [float(np.max(np.abs(x))) if x.size else 0.0 for x in d]
	if norms[-1] <= floor:
		return stack[-1], norms[-1], None, True
	sigma = order
	if sigma is None:
		if len(norms) < 2:
			return stack[-1], norms[-1], None, False
		sigma = fit_order(norms[-2], norms[-1], q)
		if sigma is None:
			return stack[-1], norms[-1], None, False
	factor = q ** sigma - 1.0
	limits = [stack[k + 1] + d[k] / factor for k in range(len(d))]
	if len(limits) > 1:
		error = float(np.max(np.abs(limits[-1] - limits[-2])))
	else:
		error = norms[-1] / factor
	return limits[-1], error, float(sigma), True
