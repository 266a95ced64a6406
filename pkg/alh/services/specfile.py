"""Metric specification files: JSON documents turned into metric fields and potentials."""
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import ValidationError

from alh.core.errors import AlhError, ChartError, ExpressionError, MetricError, SpecFileError
from alh.models.schemas import ChartSpec, SpecDocument
from alh.services.backgrounds import BackgroundModel, StaticPotential, ah_basis, build_background
from alh.services.charts import AnalyticMetric, Chart, CoordinateAxis, GridMetric, MetricField
from alh.services.expression import parse_expression
from alh.services.quadrature import level_sequence

logger = logging.getLogger(__name__)

_END_TYPES = {"sphere": "AH spherical", "torus": "toroidal", "patch": "higher-genus"}


@dataclass
class Problem:
	"""A loaded specification: the metric, its potentials and the run settings."""
	source: str
	document: SpecDocument
	metric: MetricField
	potentials: List[StaticPotential]
	end_type: str
	levels: List[float]
	model: Optional[BackgroundModel] = None

	@property
	def chart(self) -> Chart:
		return self.metric.chart

	@property
	def is_ah(self) -> bool:
		return (
			self.chart.cross_section == "sphere"
			and len(self.potentials) == self.chart.dim + 1
			and all(V.normalization == "ah-basis" for V in self.potentials)
		)

	@property
	def boundary(self) -> Optional[Tuple[str, float]]:
		b = self.document.boundary
		return None if b is None else (b.coord, b.value)


def _validation_context(exc: ValidationError) -> Tuple[str, str]:
	err = exc.errors()[0]
	where = ".".join(str(part) for part in err.get("loc", ())) or "document"
	return where, err.get("msg", str(exc))


def parse_document(data: Mapping[str, Any], source: str = "<document>") -> SpecDocument:
	try:
		return SpecDocument.model_validate(data)
	except ValidationError as exc:
		where, msg = _validation_context(exc)
		raise SpecFileError(source, where, msg) from None


def load_document(path: str) -> SpecDocument:
	try:
		with open(path, "r", encoding="utf-8") as fh:
			data = json.load(fh)
	except FileNotFoundError:
		raise SpecFileError(path, "file", "no such file") from None
	except json.JSONDecodeError as exc:
		raise SpecFileError(path, f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
	if not isinstance(data, dict):
		raise SpecFileError(path, "document", "top level must be a JSON object")
	return parse_document(data, path)


def _number(value: Any, source: str, context: str, default: float) -> float:
	if value is None:
		return default
	if isinstance(value, (int, float)):
		return float(value)
	try:
		return float(parse_expression(str(value), []).evaluate([], {}))
	except ExpressionError as exc:
		raise SpecFileError(source, context, str(exc)) from None


def build_chart(spec: ChartSpec, dimension: int, source: str) -> Chart:
	if len(spec.coordinates) != dimension:
		raise SpecFileError(source, "chart.coordinates", f"{len(spec.coordinates)} coordinates for dimension {dimension}")
	axes = []
	for k, axis in enumerate(spec.coordinates):
		where = f"chart.coordinates.{k}"
		period = None if axis.period is None else _number(axis.period, source, f"{where}.period", 0.0)
		axes.append(CoordinateAxis(
			axis.name,
			_number(axis.lower, source, f"{where}.lower", -math.inf),
			_number(axis.upper, source, f"{where}.upper", math.inf),
			period,
		))
	try:
		return Chart(tuple(axes), spec.asymptotic, spec.direction, spec.cross_section)
	except ChartError as exc:
		raise SpecFileError(source, "chart", str(exc)) from None


def _component_index(key: str, names: List[str], source: str) -> Tuple[int, int]:
	parts = [p.strip() for p in key.split(",")]
	if len(parts) != 2:
		raise SpecFileError(source, f"components.{key}", "keys are 'i,j' with indices or coordinate names")
	out = []
	for part in parts:
		if part.isdigit():
			idx = int(part)
		elif part in names:
			idx = names.index(part)
		else:
			raise SpecFileError(source, f"components.{key}", f"'{part}' is neither an index nor a coordinate")
		if not 0 <= idx < len(names):
			raise SpecFileError(source, f"components.{key}", f"index {idx} out of range")
		out.append(idx)
	i, j = out
	if i > j:
		raise SpecFileError(source, f"components.{key}", "give the upper triangle (i <= j)")
	return i, j


def _analytic_metric(doc: SpecDocument, chart: Chart, source: str) -> AnalyticMetric:
	names = chart.names
	params = list(doc.parameters)
	comps = {}
	for key, text in doc.components.items():
		ij = _component_index(key, names, source)
		try:
			comps[ij] = parse_expression(text, names, params)
		except ExpressionError as exc:
			raise SpecFileError(source, f"components.{key}", str(exc)) from None
	try:
		return AnalyticMetric(chart, comps, doc.parameters)
	except MetricError as exc:
		raise SpecFileError(source, "components", str(exc)) from None


def _grid_metric(doc: SpecDocument, chart: Chart, source: str) -> GridMetric:
	path = doc.grid.path
	if not os.path.isabs(path) and os.path.exists(source):
		path = os.path.join(os.path.dirname(os.path.abspath(source)), path)
	if not os.path.exists(path):
		raise SpecFileError(source, "grid.path", f"no such file '{doc.grid.path}'")
	try:
		return GridMetric.from_csv(path, chart)
	except (MetricError, ValueError) as exc:
		raise SpecFileError(source, "grid", str(exc)) from None


def _potentials(doc: SpecDocument, chart: Chart, source: str) -> List[StaticPotential]:
	out = []
	names = chart.names
	for k, spec in enumerate(doc.potentials or []):
		try:
			expr = parse_expression(spec.expression, names, list(doc.parameters)).bind(doc.parameters)
		except ExpressionError as exc:
			raise SpecFileError(source, f"potentials.{k}.expression", str(exc)) from None
		index = k if spec.normalization == "ah-basis" else None
		out.append(StaticPotential(expr, spec.label or f"V{k}", index, spec.normalization))
	return out


def _levels(doc: SpecDocument, chart: Chart, source: str) -> List[float]:
	run = doc.run
	try:
		if run.r_sequence is not None:
			levels = [float(v) for v in run.r_sequence]
		elif run.x_sequence is not None:
			levels = [chart.level_of(float(x)) for x in run.x_sequence]
		else:
			start = run.r0
			if start is not None and chart.direction == "zero":
				start = 1.0 / start
			levels = level_sequence(chart, start, run.ratio, run.levels)
		if not 4 <= len(levels) <= 8:
			raise ValueError(f"level count must be between 4 and 8, got {len(levels)}")
	except (ValueError, ZeroDivisionError) as exc:
		raise SpecFileError(source, "run", str(exc)) from None
	return levels


def build_problem(doc: SpecDocument, source: str = "<document>") -> Problem:
	model = None
	if doc.catalog is not None:
		params: Dict[str, float] = {"n": doc.dimension, **doc.catalog.params}
		if int(params["n"]) != doc.dimension:
			raise SpecFileError(source, "catalog.params.n", f"n = {params['n']} disagrees with dimension {doc.dimension}")
		try:
			model = build_background(doc.catalog.name, params)
		except KeyError as exc:
			raise SpecFileError(source, "catalog.name", exc.args[0]) from None
		except TypeError as exc:
			raise SpecFileError(source, "catalog.params", str(exc)) from None
		except AlhError as exc:
			raise SpecFileError(source, "catalog", str(exc)) from None
		metric = model.metric
		chart = metric.chart
		end_type = model.end_type
		potentials = model.potentials
	else:
		chart = build_chart(doc.chart, doc.dimension, source)
		metric = _analytic_metric(doc, chart, source) if doc.components is not None else _grid_metric(doc, chart, source)
		end_type = _END_TYPES[chart.cross_section]
		potentials = []
		if chart.cross_section == "sphere" and chart.direction == "infinity":
			try:
				potentials = ah_basis(chart)
			except (ChartError, ExpressionError) as exc:
				raise SpecFileError(source, "chart", str(exc)) from None
	if doc.potentials:
		potentials = _potentials(doc, chart, source)
	if doc.boundary is not None and doc.boundary.coord not in chart.names:
		raise SpecFileError(source, "boundary.coord", f"'{doc.boundary.coord}' is not a chart coordinate")
	levels = _levels(doc, chart, source)
	logger.info("SPEC: %s -> %s end, %d potentials, levels %s", source, end_type, len(potentials), levels)
	return Problem(source, doc, metric, potentials, end_type, levels, model)


def load_problem(path: str) -> Problem:
	return build_problem(load_document(path), path)
