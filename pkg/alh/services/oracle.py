"""Closed forms for the Birmingham family, independent of the numerical pipeline.

For g = dr^2 / f + r^2 h_k with f = k + r^2 - 2 m r^(2-n):
	E^r_r = -(n-1)(n-2) m r^-n,   E^a_b = (n-2) m r^-n delta^a_b
and the level flux of V = sqrt(k + r^2) is (n-1)(n-2) vol(h_k) m sqrt(f / (k + r^2)).
"""
import math
from typing import Optional

import numpy as np

from alh.services.backgrounds import patch_volume, sphere_volume


def mass_constant(n: int) -> float:
	"""Ratio between the reported m(V_0) of a unit-volume end and the Birmingham parameter m."""
	return float((n - 1) * (n - 2))


def traceless_ricci(n: int, m: float, r: float) -> np.ndarray:
	"""Mixed traceless Ricci tensor in the (r, angles) frame."""
	e = np.full(n, (n - 2) * m * r ** (-n))
	e[0] = -(n - 1) * (n - 2) * m * r ** (-n)
	return np.diag(e)


def _cross_section_volume(n: int, k: int, volume: float) -> float:
	if k == 1:
		return sphere_volume(n)
	if k == 0:
		return volume
	return patch_volume(n)


def birmingham_level_mass(n: int, k: int, m: float, r: float, volume: float = 1.0) -> float:
	"""Flux of V = sqrt(k + r^2) through {r} in raw coordinates."""
	f = k + r * r - 2.0 * m * r ** (2 - n)
	return mass_constant(n) * _cross_section_volume(n, k, volume) * m * math.sqrt(f / (k + r * r))


def birmingham_mass(n: int, k: int, m: float, volume: Optional[float] = None) -> float:
	"""Limit mass in the conventions the evaluator reports.

	k = 1: m(V_0) over the round sphere. k = 0: V normalized on the unit-volume torus,
	C m v^(n/(n-1)). k = -1: per unit boundary volume."""
	c = mass_constant(n)
	if k == 1:
		return c * sphere_volume(n) * m
	if k == 0:
		v = 1.0 if volume is None else volume
		return c * m * v ** (n / (n - 1.0))
	return c * m
