import os

from pydantic import BaseModel


class Settings(BaseModel):
	r_min: float = 1e-3
	default_r0: float = 20.0
	default_ratio: float = 2.0
	default_levels: int = 4
	quadrature_order: int = 24
	quadrature_max_order: int = 96
	quadrature_rel_tol: float = 1e-9
	tolerance: float = 1e-8
	causal_tolerance: float = 1e-9
	equivariance_tolerance: float = 1e-5
	alh_tolerance: float = 0.1
	# successive level differences below roundoff_floor * (flux scale) are roundoff
	roundoff_floor: float = 1e-13
	sample_seed: int = 20211
	sample_count: int = 64
	planes_per_level: int = 8
	boundary_samples: int = 4
	curvature_tolerance: float = 1e-6
	# sectional-curvature deviations below this count as identically zero
	deviation_floor: float = 1e-11
	# antisymmetric part of Ricci allowed, relative to the largest curvature term
	symmetry_tolerance: float = 1e-10
	threads: int = 0
	log_level: str = "INFO"

	@classmethod
	def from_env(cls) -> "Settings":
		values = {}
		if os.environ.get("ALH_THREADS", "").strip():
			values["threads"] = int(os.environ["ALH_THREADS"])
		if os.environ.get("ALH_LOG_LEVEL", "").strip():
			values["log_level"] = os.environ["ALH_LOG_LEVEL"].strip().upper()
		return cls(**values)

	def worker_count(self) -> int:
		if self.threads > 0:
			return self.threads
		return os.cpu_count() or 1


settings = Settings.from_env()
