"""Second-order forward jets: a value with its gradient and Hessian.

Every Hessian update is built from symmetric pieces (H, outer(g, g),
outer(a, b) + outer(b, a)), so symmetry holds bit for bit without a
symmetrisation pass.
"""
import math
from typing import Union

import numpy as np

from alh.core.errors import DomainError

Number = Union[int, float]


class Jet2:
	__slots__ = ("value", "grad", "hess")

	def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray) -> None:
		self.value = float(value)
		self.grad = grad
		self.hess = hess

	@classmethod
	def constant(cls, value: float, n: int) -> "Jet2":
		return cls(value, np.zeros(n), np.zeros((n, n)))

	@classmethod
	def variable(cls, index: int, value: float, n: int) -> "Jet2":
		grad = np.zeros(n)
		grad[index] = 1.0
		return cls(value, grad, np.zeros((n, n)))

	@property
	def dim(self) -> int:
		return self.grad.shape[0]

	def __repr__(self) -> str:
		return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"

	def _lift(self, other: Union["Jet2", Number]) -> "Jet2":
		if isinstance(other, Jet2):
			return other
		return Jet2.constant(float(other), self.dim)

	def chain(self, f0: float, f1: float, f2: float) -> "Jet2":
		"""Compose a scalar function with value f0, derivative f1 and second derivative f2."""
		return Jet2(
			f0,
			f1 * self.grad,
			f1 * self.hess + f2 * np.outer(self.grad, self.grad),
		)

	def __add__(self, other: Union["Jet2", Number]) -> "Jet2":
		if not isinstance(other, Jet2):
			return Jet2(self.value + other, self.grad, self.hess)
		return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

	__radd__ = __add__

	def __neg__(self) -> "Jet2":
		return Jet2(-self.value, -self.grad, -self.hess)

	def __sub__(self, other: Union["Jet2", Number]) -> "Jet2":
		if not isinstance(other, Jet2):
			return Jet2(self.value - other, self.grad, self.hess)
		return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

	def __rsub__(self, other: Number) -> "Jet2":
		return Jet2(other - self.value, -self.grad, -self.hess)

	def __mul__(self, other: Union["Jet2", Number]) -> "Jet2":
		if not isinstance(other, Jet2):
			c = float(other)
			return Jet2(self.value * c, c * self.grad, c * self.hess)
		cross = np.outer(self.grad, other.grad)
		return Jet2(
			self.value * other.value,
			self.value * other.grad + other.value * self.grad,
			self.value * other.hess + other.value * self.hess + (cross + cross.T),
		)

	__rmul__ = __mul__

	def reciprocal(self) -> "Jet2":
		a = self.value
		if a == 0.0:
			raise DomainError(None, "division by zero")
		return self.chain(1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a))

	def __truediv__(self, other: Union["Jet2", Number]) -> "Jet2":
		if not isinstance(other, Jet2):
			if float(other) == 0.0:
				raise DomainError(None, "division by zero")
			return self * (1.0 / float(other))
		return self * other.reciprocal()

	def __rtruediv__(self, other: Number) -> "Jet2":
		return self.reciprocal() * float(other)

	def __pow__(self, other: Union["Jet2", Number]) -> "Jet2":
		if isinstance(other, Jet2):
			if not other.grad.any() and not other.hess.any():
				return self.power(other.value)
			# a^b with a varying exponent is only defined for a positive base
			return exp(other * log(self))
		return self.power(float(other))

	def __rpow__(self, base: Number) -> "Jet2":
		return exp(self * log(Jet2.constant(float(base), self.dim)))

	def power(self, c: float) -> "Jet2":
		a = self.value
		if c == 0.0:
			return Jet2.constant(1.0, self.dim)
		if c == 1.0:
			return self
		integral = float(c).is_integer()
		if a < 0.0 and not integral:
			raise DomainError(None, f"negative base {a!r} raised to non-integer power {c!r}")
		if a == 0.0:
			if not integral or c < 0.0:
				raise DomainError(None, f"zero raised to power {c!r}")
			k = int(c)
			f1 = 1.0 if k == 1 else 0.0
			f2 = 2.0 if k == 2 else 0.0
			return self.chain(0.0, f1, f2)
		f0 = a ** c
		return self.chain(f0, c * f0 / a, c * (c - 1.0) * f0 / (a * a))


def _jet(x: Union[Jet2, Number], like: Jet2) -> Jet2:
	return x if isinstance(x, Jet2) else Jet2.constant(float(x), like.dim)


def sqrt(x: Jet2) -> Jet2:
	a = x.value
	if a < 0.0:
		raise DomainError(None, f"sqrt of negative value {a!r}")
	if a == 0.0:
		if x.grad.any() or x.hess.any():
			raise DomainError(None, "sqrt is not differentiable at 0")
		return Jet2.constant(0.0, x.dim)
	s = math.sqrt(a)
	return x.chain(s, 0.5 / s, -0.25 / (s * a))


def exp(x: Jet2) -> Jet2:
	v = math.exp(x.value)
	return x.chain(v, v, v)


def log(x: Jet2) -> Jet2:
	a = x.value
	if a <= 0.0:
		raise DomainError(None, f"log of non-positive value {a!r}")
	return x.chain(math.log(a), 1.0 / a, -1.0 / (a * a))


def sin(x: Jet2) -> Jet2:
	s, c = math.sin(x.value), math.cos(x.value)
	return x.chain(s, c, -s)


def cos(x: Jet2) -> Jet2:
	s, c = math.sin(x.value), math.cos(x.value)
	return x.chain(c, -s, -c)


def tan(x: Jet2) -> Jet2:
	c = math.cos(x.value)
	if c == 0.0:
		raise DomainError(None, "tan at a pole")
	t = math.tan(x.value)
	sec2 = 1.0 + t * t
	return x.chain(t, sec2, 2.0 * t * sec2)


def sinh(x: Jet2) -> Jet2:
	s, c = math.sinh(x.value), math.cosh(x.value)
	return x.chain(s, c, s)


def cosh(x: Jet2) -> Jet2:
	s, c = math.sinh(x.value), math.cosh(x.value)
	return x.chain(c, s, c)


def tanh(x: Jet2) -> Jet2:
	t = math.tanh(x.value)
	sech2 = 1.0 - t * t
	return x.chain(t, sech2, -2.0 * t * sech2)


def fabs(x: Jet2) -> Jet2:
	a = x.value
	if a == 0.0 and (x.grad.any() or x.hess.any()):
		raise DomainError(None, "abs is not differentiable at 0")
	sign = 1.0 if a >= 0.0 else -1.0
	return x.chain(abs(a), sign, 0.0)


def arccos(x: Jet2) -> Jet2:
	a = x.value
	if not -1.0 < a < 1.0:
		raise DomainError(None, f"arccos outside (-1, 1): {a!r}")
	q = 1.0 - a * a
	root = math.sqrt(q)
	return x.chain(math.acos(a), -1.0 / root, -a / (q * root))


def atan2(y: Union[Jet2, Number], x: Union[Jet2, Number]) -> Jet2:
	"""atan2(y, x) for jets; used by chart maps that project back to angles."""
	like = y if isinstance(y, Jet2) else x
	y = _jet(y, like)
	x = _jet(x, like)
	rho = x.value * x.value + y.value * y.value
	if rho == 0.0:
		raise DomainError(None, "atan2 at the origin")
	hy = x.value / rho
	hx = -y.value / rho
	hyy = -2.0 * x.value * y.value / (rho * rho)
	hxx = -hyy
	hxy = (y.value * y.value - x.value * x.value) / (rho * rho)
	gy, gx = y.grad, x.grad
	cross = np.outer(gx, gy)
	hess = (
		hy * y.hess + hx * x.hess
		+ hyy * np.outer(gy, gy) + hxx * np.outer(gx, gx)
		+ hxy * (cross + cross.T)
	)
	return Jet2(math.atan2(y.value, x.value), hy * gy + hx * gx, hess)


UNARY = {
	"sqrt": sqrt,
	"exp": exp,
	"log": log,
	"sin": sin,
	"cos": cos,
	"tan": tan,
	"sinh": sinh,
	"cosh": cosh,
	"tanh": tanh,
	"abs": fabs,
}
