from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AxisSpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	name: str
	lower: Optional[Union[float, str]] = None
	upper: Optional[Union[float, str]] = None
	period: Optional[Union[float, str]] = None


class ChartSpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	coordinates: List[AxisSpec]
	asymptotic: str
	direction: Literal["infinity", "zero"] = "infinity"
	cross_section: Literal["sphere", "torus", "patch"] = "sphere"


class CatalogSpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	name: str
	params: Dict[str, float] = Field(default_factory=dict)


class GridSpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	path: str


class BoundarySpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	coord: str
	value: float


class PotentialSpec(BaseModel):
	model_config = ConfigDict(extra="forbid")

	expression: str
	label: Optional[str] = None
	normalization: Literal["ah-basis", "alh-normalized", "raw"] = "raw"


class RunConfig(BaseModel):
	model_config = ConfigDict(extra="forbid")

	r_sequence: Optional[List[float]] = None
	x_sequence: Optional[List[float]] = None
	r0: Optional[float] = None
	ratio: Optional[float] = None
	levels: Optional[int] = None
	quadrature_order: Optional[int] = None
	tolerance: Optional[float] = None
	causal_tolerance: Optional[float] = None
	equivariance_tolerance: Optional[float] = None
	sigma: Optional[float] = None
	raise_with: Literal["physical", "background"] = "physical"
	sample_count: Optional[int] = None
	seed: Optional[int] = None

	@model_validator(mode="after")
	def _one_sequence(self) -> "RunConfig":
		if self.r_sequence is not None and self.x_sequence is not None:
			raise ValueError("give at most one of r_sequence and x_sequence")
		return self


class SpecDocument(BaseModel):
	model_config = ConfigDict(extra="forbid")

	dimension: int = Field(ge=3)
	chart: Optional[ChartSpec] = None
	catalog: Optional[CatalogSpec] = None
	components: Optional[Dict[str, str]] = None
	grid: Optional[GridSpec] = None
	parameters: Dict[str, float] = Field(default_factory=dict)
	boundary: Optional[BoundarySpec] = None
	potentials: Optional[List[PotentialSpec]] = None
	run: RunConfig = Field(default_factory=RunConfig)

	@model_validator(mode="after")
	def _one_source(self) -> "SpecDocument":
		given = [k for k in ("catalog", "components", "grid") if getattr(self, k) is not None]
		if len(given) != 1:
			raise ValueError(f"exactly one of catalog, components, grid is required (got {given or 'none'})")
		if self.catalog is None and self.chart is None:
			raise ValueError("a chart is required unless the metric comes from the catalog")
		return self


class LevelRow(BaseModel):
	level: float
	x: float
	value: float
	extrapolant: Optional[float] = None
	error_estimate: Optional[float] = None
	quadrature_order: int


class MassEntry(BaseModel):
	label: str
	index: Optional[int] = None
	normalization: str
	mass: float
	error: float
	order: Optional[float] = None
	converged: bool
	message: str = ""
	levels: List[LevelRow]


class EnergyMomentumModel(BaseModel):
	components: List[float]
	norm2: float
	rest_mass: Optional[float] = None
	causal_class: str
	tolerance: float


class DivergenceModel(BaseModel):
	message: str
	table: List[Dict[str, Any]] = Field(default_factory=list)


class MassReport(BaseModel):
	source: str
	status: Literal["converged", "divergence"]
	dimension: int
	end_type: str
	mode: Literal["energy-momentum", "mass"]
	masses: List[MassEntry] = Field(default_factory=list)
	energy_momentum: Optional[EnergyMomentumModel] = None
	divergence: Optional[DivergenceModel] = None
	config: Dict[str, Any] = Field(default_factory=dict)


class ALHDiagnosticModel(BaseModel):
	levels: List[float]
	xs: List[float]
	deviations: List[float]
	order: Optional[float] = None
	diverged: bool
	message: str = ""
	planes_per_level: int


class CrossSectionModel(BaseModel):
	volume: float
	volume_error: float
	curvature: float
	curvature_spread: float
	constant: bool
	ah: bool
	verdict: str
	tolerance: float
	samples: List[List[float]]


class CheckReport(BaseModel):
	source: str
	dimension: int
	verdict: Literal["hypotheses satisfied", "hypotheses violated"]
	satisfied: bool
	scalar_margin: float
	mean_curvature_margin: Optional[float] = None
	boundary: Optional[BoundarySpec] = None
	alh: Optional[ALHDiagnosticModel] = None
	cross_section: Optional[CrossSectionModel] = None
	tolerance: float
	seed: int
	scalar_samples: List[str] = Field(default_factory=list)
	boundary_samples: List[str] = Field(default_factory=list)
	notes: List[str] = Field(default_factory=list)


class BoostReport(BaseModel):
	source: str
	status: Literal["within tolerance", "outside tolerance", "divergence"]
	direction: int
	rapidity: float
	lorentz: List[List[float]]
	original: Optional[EnergyMomentumModel] = None
	boosted: Optional[EnergyMomentumModel] = None
	predicted: Optional[EnergyMomentumModel] = None
	deviation: Optional[float] = None
	norm2_deviation: Optional[float] = None
	tolerance: float
	divergence: Optional[DivergenceModel] = None


class CatalogEntry(BaseModel):
	name: str
	params: List[str]
	end_type: str
	potentials: str


class CatalogListing(BaseModel):
	entries: List[CatalogEntry]
