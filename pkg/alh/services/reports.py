"""Report models, convergence tables and atomic file output."""
import json
import logging
import os
import tempfile
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from alh.models.schemas import (
	ALHDiagnosticModel,
	CheckReport,
	CrossSectionModel,
	EnergyMomentumModel,
	LevelRow,
	MassEntry,
)
from alh.services.hypotheses import HypothesisReport
from alh.services.mass import EnergyMomentum, MassResult

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["potential", "x", "m(x)", "extrapolant", "error_estimate"]


def _finite(value: Optional[float]) -> Optional[float]:
	if value is None or not np.isfinite(value):
		return None
	return float(value)


def _extrapolant_columns(result: MassResult):
	"""Per-level extrapolants and error estimates aligned with the level rows."""
	count = len(result.values)
	ext: List[Optional[float]] = [None] * count
	err: List[Optional[float]] = [None] * count
	offset = count - len(result.extrapolants)
	for k, value in enumerate(result.extrapolants):
		ext[offset + k] = value
	for k in range(count):
		if ext[k] is not None and k > 0 and ext[k - 1] is not None:
			err[k] = abs(ext[k] - ext[k - 1])
	if count and ext[-1] is not None and err[-1] is None:
		err[-1] = result.error
	return ext, err


def mass_entry(result: MassResult) -> MassEntry:
	ext, err = _extrapolant_columns(result)
	rows = [
		LevelRow(level=lv, x=x, value=v, extrapolant=e, error_estimate=d, quadrature_order=q)
		for lv, x, v, e, d, q in zip(result.levels, result.xs, result.values, ext, err, result.quadrature_orders)
	]
	return MassEntry(
		label=result.label,
		index=result.index,
		normalization=result.normalization,
		mass=result.mass,
		error=result.error,
		order=result.order,
		converged=result.converged,
		message=result.message,
		levels=rows,
	)


def energy_momentum_model(em: EnergyMomentum) -> EnergyMomentumModel:
	return EnergyMomentumModel(
		components=[float(c) for c in em.components],
		norm2=em.norm2,
		rest_mass=em.rest_mass,
		causal_class=em.causal_class.value,
		tolerance=em.tolerance,
	)


def check_report(report: HypothesisReport, source: str) -> CheckReport:
	alh = None
	if report.alh is not None:
		d = report.alh
		alh = ALHDiagnosticModel(
			levels=d.levels, xs=d.xs, deviations=d.deviations, order=d.order, diverged=d.diverged,
			message=d.message, planes_per_level=d.planes_per_level,
		)
	section = None
	if report.cross_section is not None:
		cs = report.cross_section
		section = CrossSectionModel(
			volume=cs.section.volume,
			volume_error=cs.section.volume_error,
			curvature=cs.section.curvature,
			curvature_spread=cs.section.curvature_spread,
			constant=cs.constant,
			ah=cs.ah,
			verdict=cs.verdict,
			tolerance=cs.tolerance,
			samples=cs.section.samples,
		)
	boundary = None
	if report.boundary is not None:
		boundary = {"coord": report.boundary[0], "value": report.boundary[1]}
	return CheckReport(
		source=source,
		dimension=report.n,
		verdict=report.verdict,
		satisfied=report.satisfied,
		scalar_margin=report.scalar_margin,
		mean_curvature_margin=report.mean_margin,
		boundary=boundary,
		alh=alh,
		cross_section=section,
		tolerance=report.tolerance,
		seed=report.seed,
		scalar_samples=report.scalar_samples,
		boundary_samples=report.boundary_samples,
		notes=report.notes,
	)


def convergence_frame(results: Sequence[MassResult]) -> pd.DataFrame:
	"""Columns x, m(x), extrapolant, error_estimate per potential."""
	records = []
	for r in results:
		ext, err = _extrapolant_columns(r)
		for x, v, e, d in zip(r.xs, r.values, ext, err):
			records.append({"potential": r.label, "x": x, "m(x)": v, "extrapolant": e, "error_estimate": d})
	return pd.DataFrame.from_records(records, columns=TABLE_COLUMNS)


def divergence_frame(table: Sequence[dict]) -> pd.DataFrame:
	return pd.DataFrame.from_records(list(table))


def _atomic_write(path: str, text: str) -> None:
	directory = os.path.dirname(os.path.abspath(path))
	os.makedirs(directory, exist_ok=True)
	fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
	try:
		with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
			fh.write(text)
		os.replace(tmp, path)
	except BaseException:
		if os.path.exists(tmp):
			os.unlink(tmp)
		raise


def report_json(model: BaseModel) -> str:
	return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True)


def write_report(path: str, model: BaseModel) -> None:
	_atomic_write(path, report_json(model) + "\n")
	logger.info("REPORT: wrote %s", path)


def write_table(path: str, frame: pd.DataFrame) -> None:
	_atomic_write(path, frame.to_csv(index=False, float_format="%.17g"))
	logger.info("REPORT: wrote %s (%d rows)", path, len(frame))
