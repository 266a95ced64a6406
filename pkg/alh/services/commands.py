"""The mass / check / boost / catalog drivers shared by the CLI and the HTTP routes."""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd

from alh.core.config import settings
from alh.core.errors import ChartError, DivergenceError, SpecFileError
from alh.models.schemas import (
	BoostReport,
	CatalogEntry,
	CatalogListing,
	CheckReport,
	DivergenceModel,
	MassReport,
)
from alh.services import reports
from alh.services.backgrounds import catalog_entries
from alh.services.hypotheses import check_hypotheses
from alh.services.isometry import boost_isometry, pullback_metric
from alh.services.mass import EnergyMomentum, energy_momentum, mass_limit, normalized_mass
from alh.services.specfile import Problem

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DIVERGENCE = 2
EXIT_VIOLATED = 3
EXIT_OUTSIDE_TOLERANCE = 4


@dataclass
class Outcome:
	report: object
	exit_code: int
	table: Optional[pd.DataFrame] = None


def _config(problem: Problem) -> dict:
	run = problem.document.run
	return {
		"levels": problem.levels,
		"quadrature_order": run.quadrature_order or settings.quadrature_order,
		"quadrature_max_order": settings.quadrature_max_order,
		"quadrature_rel_tol": settings.quadrature_rel_tol,
		"roundoff_floor": settings.roundoff_floor,
		"sigma": run.sigma,
		"raise_with": run.raise_with,
		"causal_tolerance": run.causal_tolerance or settings.causal_tolerance,
		"threads": settings.worker_count(),
	}


def run_mass(problem: Problem) -> Outcome:
	doc = problem.document
	run = doc.run
	options = {"raise_with": run.raise_with}
	base = dict(
		source=problem.source,
		dimension=doc.dimension,
		end_type=problem.end_type,
		mode="energy-momentum" if problem.is_ah else "mass",
		config=_config(problem),
	)
	if not problem.potentials:
		raise SpecFileError(problem.source, "potentials", "a non-AH end needs at least one static potential")
	try:
		if problem.is_ah:
			em = energy_momentum(
				problem.metric, problem.levels, run.quadrature_order, run.causal_tolerance,
				potentials=problem.potentials, sigma=run.sigma, **options,
			)
			results = em.results
			em_model = reports.energy_momentum_model(em)
			logger.info("MASS: %s -> %s", problem.source, em_model.causal_class)
		else:
			results = []
			for V in problem.potentials:
				if V.normalization == "raw" and problem.chart.cross_section != "sphere":
					results.append(normalized_mass(problem.metric, V, problem.levels, run.quadrature_order, sigma=run.sigma, **options))
				else:
					results.append(mass_limit(problem.metric, V, problem.levels, run.quadrature_order, run.sigma, **options))
			em_model = None
	except DivergenceError as exc:
		report = MassReport(status="divergence", divergence=DivergenceModel(message=str(exc), table=exc.table), **base)
		return Outcome(report, EXIT_DIVERGENCE, reports.divergence_frame(exc.table))
	report = MassReport(
		status="converged",
		masses=[reports.mass_entry(r) for r in results],
		energy_momentum=em_model,
		**base,
	)
	return Outcome(report, EXIT_OK, reports.convergence_frame(results))


def run_check(problem: Problem) -> Outcome:
	run = problem.document.run
	result = check_hypotheses(
		problem.metric,
		boundary=problem.boundary,
		levels=problem.levels,
		tol=run.tolerance,
		sample_count=run.sample_count,
		seed=run.seed,
	)
	report: CheckReport = reports.check_report(result, problem.source)
	return Outcome(report, EXIT_OK if result.satisfied else EXIT_VIOLATED)


def _relative_deviation(boosted: EnergyMomentum, predicted: EnergyMomentum) -> float:
	diff = float(np.max(np.abs(boosted.components - predicted.components)))
	scale = float(np.linalg.norm(predicted.components))
	return diff / scale if scale > predicted.tolerance else diff


def run_boost(problem: Problem, direction: int, beta: float) -> Outcome:
	run = problem.document.run
	tol = run.equivariance_tolerance or settings.equivariance_tolerance
	n = problem.chart.dim
	if not problem.is_ah:
		raise SpecFileError(problem.source, "chart", "boosts need an AH end with the full static potential basis")
	try:
		phi = boost_isometry(n, direction, beta, chart=problem.chart)
	except (ChartError, ValueError) as exc:
		raise SpecFileError(problem.source, "boost", str(exc)) from None
	base = dict(
		source=problem.source, direction=direction, rapidity=beta,
		lorentz=phi.lorentz.tolist(), tolerance=tol,
	)
	options = dict(potentials=problem.potentials, sigma=run.sigma, raise_with=run.raise_with)
	try:
		original = energy_momentum(problem.metric, problem.levels, run.quadrature_order, run.causal_tolerance, **options)
		moved = energy_momentum(pullback_metric(problem.metric, phi), problem.levels, run.quadrature_order, run.causal_tolerance, **options)
	except DivergenceError as exc:
		report = BoostReport(status="divergence", divergence=DivergenceModel(message=str(exc), table=exc.table), **base)
		return Outcome(report, EXIT_DIVERGENCE)
	predicted = original.boosted(phi.lorentz)
	deviation = _relative_deviation(moved, predicted)
	norm_scale = max(abs(original.norm2), original.tolerance)
	norm_deviation = abs(moved.norm2 - original.norm2) / norm_scale
	within = deviation <= tol
	logger.info("BOOST: direction %d, rapidity %g, deviation %.3e (tolerance %g)", direction, beta, deviation, tol)
	report = BoostReport(
		status="within tolerance" if within else "outside tolerance",
		original=reports.energy_momentum_model(original),
		boosted=reports.energy_momentum_model(moved),
		predicted=reports.energy_momentum_model(predicted),
		deviation=deviation,
		norm2_deviation=norm_deviation,
		**base,
	)
	return Outcome(report, EXIT_OK if within else EXIT_OUTSIDE_TOLERANCE)


def catalog_listing() -> CatalogListing:
	entries: List[CatalogEntry] = [CatalogEntry(**e) for e in catalog_entries()]
	return CatalogListing(entries=entries)
