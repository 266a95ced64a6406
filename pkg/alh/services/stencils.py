"""Fourth-order finite-difference stencils.

Interior nodes use the 5-point central formulas; the two nodes nearest a
non-periodic edge use one-sided 4th-order formulas. Periodic axes wrap.
"""
from typing import Callable

import numpy as np

CENTRAL_FIRST = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
CENTRAL_SECOND = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# coefficients on f[0..4] (first) and f[0..5] (second) for edge nodes 0 and 1
EDGE_FIRST = (
	np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
	np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)
EDGE_SECOND = (
	np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0,
	np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0,
)

MIN_POINTS = 6


def _central(f: np.ndarray, weights: np.ndarray, periodic: bool) -> np.ndarray:
	if periodic:
		return sum(w * np.roll(f, 2 - k, axis=0) for k, w in enumerate(weights) if w != 0.0)
	out = np.empty_like(f)
	n = f.shape[0]
	out[2:n - 2] = sum(w * f[k:n - 4 + k] for k, w in enumerate(weights) if w != 0.0)
	return out


def _edges(out: np.ndarray, f: np.ndarray, table, sign: float) -> None:
	n = f.shape[0]
	for i, w in enumerate(table):
		m = len(w)
		out[i] = np.tensordot(w, f[:m], axes=(0, 0))
		out[n - 1 - i] = sign * np.tensordot(w, f[::-1][:m], axes=(0, 0))


def first_derivative(f: np.ndarray, h: float, axis: int = 0, periodic: bool = False) -> np.ndarray:
	g = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
	if g.shape[0] < MIN_POINTS:
		raise ValueError(f"axis {axis} has {g.shape[0]} points, stencils need at least {MIN_POINTS}")
	out = _central(g, CENTRAL_FIRST, periodic)
	if not periodic:
		_edges(out, g, EDGE_FIRST, -1.0)
	return np.moveaxis(out / h, 0, axis)


def second_derivative(f: np.ndarray, h: float, axis: int = 0, periodic: bool = False) -> np.ndarray:
	g = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
	if g.shape[0] < MIN_POINTS:
		raise ValueError(f"axis {axis} has {g.shape[0]} points, stencils need at least {MIN_POINTS}")
	out = _central(g, CENTRAL_SECOND, periodic)
	if not periodic:
		_edges(out, g, EDGE_SECOND, 1.0)
	return np.moveaxis(out / (h * h), 0, axis)


def central_difference(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, direction: int, h: float) -> np.ndarray:
	"""5-point first derivative of an array-valued function along one coordinate."""
	x = np.asarray(x, dtype=float)
	step = np.zeros_like(x)
	step[direction] = h
	total = None
	for k, w in enumerate(CENTRAL_FIRST):
		if w == 0.0:
			continue
		term = w * np.asarray(fn(x + (k - 2) * step), dtype=float)
		total = term if total is None else total + term
	return total / h
