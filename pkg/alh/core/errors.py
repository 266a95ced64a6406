from typing import Any, List, Optional


class AlhError(Exception):
	"""Base class for every error raised by the alh package."""


class ExpressionError(AlhError):
	pass


class ExpressionSyntaxError(ExpressionError):
	def __init__(self, position: int, message: str, source: str = "") -> None:
		self.position = position
		self.source = source
		super().__init__(f"syntax error at position {position}: {message}")


class UnknownIdentifierError(ExpressionError):
	def __init__(self, name: str, position: Optional[int] = None, message: str = "unknown identifier") -> None:
		self.name = name
		self.position = position
		where = f" at position {position}" if position is not None else ""
		super().__init__(f"{message} '{name}'{where}")


class DomainError(ExpressionError):
	def __init__(self, subexpression: Optional[str], message: str) -> None:
		self.subexpression = subexpression
		self.detail = message
		if subexpression:
			super().__init__(f"{message} in '{subexpression}'")
		else:
			super().__init__(message)


class ChartError(AlhError):
	pass


class MetricError(AlhError):
	pass


class DegenerateError(AlhError):
	pass


class NormalizationError(AlhError):
	pass


class DivergenceError(AlhError):
	def __init__(self, message: str, table: Optional[List[Any]] = None) -> None:
		self.table = list(table) if table is not None else []
		super().__init__(message)


class SpecFileError(AlhError):
	def __init__(self, path: str, context: str, message: str) -> None:
		self.path = path
		self.context = context
		super().__init__(f"{path}: {context}: {message}")
