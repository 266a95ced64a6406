"""Deterministic low-discrepancy sample sets (scrambled Halton with a recorded seed)."""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import qmc

from alh.core.config import settings
from alh.services.charts import Chart

logger = logging.getLogger(__name__)

# keeps polar angles off the coordinate singularities
POLE_MARGIN = 1e-2


def _unit_samples(dim: int, count: int, seed: Optional[int]) -> np.ndarray:
	if count < 1:
		raise ValueError(f"sample count must be positive, got {count}")
	sampler = qmc.Halton(d=dim, scramble=True, seed=settings.sample_seed if seed is None else seed)
	return sampler.random(count)


def _tangential_ranges(chart: Chart) -> List[Tuple[float, float]]:
	ranges = []
	for k in chart.tangential:
		axis = chart.axes[k]
		if axis.periodic:
			ranges.append((0.0, axis.period))
			continue
		if not (math.isfinite(axis.lower) and math.isfinite(axis.upper)):
			raise ValueError(f"coordinate '{axis.name}' is unbounded; supply a bounded chart range")
		lo, hi = axis.lower, axis.upper
		if chart.cross_section == "sphere":
			pad = POLE_MARGIN * (hi - lo)
			lo, hi = lo + pad, hi - pad
		ranges.append((lo, hi))
	return ranges


def level_sampler(chart: Chart, level: float, count: Optional[int] = None, seed: Optional[int] = None) -> np.ndarray:
	"""Points on {asymptotic coordinate = level}."""
	count = count or settings.sample_count
	ranges = _tangential_ranges(chart)
	unit = _unit_samples(len(ranges), count, seed)
	points = np.empty((count, chart.dim))
	points[:, chart.asymptotic_index] = level
	for j, (k, (lo, hi)) in enumerate(zip(chart.tangential, ranges)):
		points[:, k] = lo + (hi - lo) * unit[:, j]
	return points


def region_sampler(
	chart: Chart,
	lower: float,
	upper: float,
	count: Optional[int] = None,
	seed: Optional[int] = None,
) -> np.ndarray:
	"""Points with the asymptotic coordinate log-uniform in [lower, upper]."""
	if not 0 < lower <= upper:
		raise ValueError(f"sample range must satisfy 0 < lower <= upper, got [{lower}, {upper}]")
	count = count or settings.sample_count
	ranges = _tangential_ranges(chart)
	logger.debug("CHECK: %d region samples, %s in [%g, %g]", count, chart.asymptotic, lower, upper)
	unit = _unit_samples(len(ranges) + 1, count, seed)
	points = np.empty((count, chart.dim))
	points[:, chart.asymptotic_index] = lower * (upper / lower) ** unit[:, 0]
	for j, (k, (lo, hi)) in enumerate(zip(chart.tangential, ranges), start=1):
		points[:, k] = lo + (hi - lo) * unit[:, j]
	return points


def plane_sampler(n: int, count: Optional[int] = None, seed: Optional[int] = None) -> List[Tuple[np.ndarray, np.ndarray]]:
	"""Pairs of coordinate vectors spanning random 2-planes."""
	count = count or settings.planes_per_level
	unit = 2.0 * _unit_samples(2 * n, count, seed) - 1.0
	return [(row[:n].copy(), row[n:].copy()) for row in unit]


def describe(points: np.ndarray, chart: Chart) -> List[str]:
	names = chart.names
	return [", ".join(f"{name}={value:.6g}" for name, value in zip(names, p)) for p in points]
