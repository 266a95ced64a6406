"""Closed-form scalar expressions in chart coordinates and named parameters.

Grammar (pyparsing):

	expr   :: term [ ('+' | '-') term ]*
	term   :: unary [ ('*' | '/') unary ]*
	unary  :: '-' unary | power
	power  :: atom [ '^' unary ]          right-associative, binds tighter than unary minus
	atom   :: number | func '(' expr ')' | identifier | '(' expr ')'
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Union

import numpy as np
import pyparsing as pp

from alh.core.errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError
from alh.services import jet as J
from alh.services.jet import Jet2

pp.ParserElement.enable_packrat()

CONSTANTS = {"pi": math.pi, "e": math.e}

_FLOAT_FUNCS: Dict[str, Callable[[float], float]] = {
	"sqrt": math.sqrt,
	"exp": math.exp,
	"log": math.log,
	"sin": math.sin,
	"cos": math.cos,
	"tan": math.tan,
	"sinh": math.sinh,
	"cosh": math.cosh,
	"tanh": math.tanh,
	"abs": abs,
}

FUNCTIONS = tuple(sorted(J.UNARY))


class _Env:
	__slots__ = ("point", "params", "jets")

	def __init__(self, point: Sequence[float], params: Mapping[str, float], jets: Optional[List[Jet2]] = None) -> None:
		self.point = point
		self.params = params
		self.jets = jets


class Node:
	def jet(self, env: _Env) -> Jet2:
		raise NotImplementedError

	def evaluate(self, env: _Env) -> float:
		raise NotImplementedError

	def pretty(self) -> str:
		raise NotImplementedError

	def symbols(self) -> Iterable["Sym"]:
		return ()


@dataclass(frozen=True)
class Num(Node):
	value: float

	def jet(self, env: _Env) -> Jet2:
		return Jet2.constant(self.value, len(env.point))

	def evaluate(self, env: _Env) -> float:
		return self.value

	def pretty(self) -> str:
		if not math.isfinite(self.value):
			raise ValueError(f"literal {self.value!r} has no textual form")
		if math.copysign(1.0, self.value) < 0:
			return f"(-{-self.value!r})"
		return repr(self.value)


@dataclass(frozen=True)
class Sym(Node):
	name: str
	kind: str = "unresolved"
	index: int = field(default=-1, compare=False)
	pos: int = field(default=-1, compare=False)

	def jet(self, env: _Env) -> Jet2:
		if self.kind == "coord":
			return env.jets[self.index]
		return Jet2.constant(self._param(env), len(env.point))

	def evaluate(self, env: _Env) -> float:
		if self.kind == "coord":
			return float(env.point[self.index])
		return self._param(env)

	def _param(self, env: _Env) -> float:
		try:
			return float(env.params[self.name])
		except KeyError:
			raise UnknownIdentifierError(self.name, None, "unbound parameter") from None

	def pretty(self) -> str:
		return self.name

	def symbols(self) -> Iterable["Sym"]:
		return (self,)


@dataclass(frozen=True)
class Neg(Node):
	operand: Node

	def jet(self, env: _Env) -> Jet2:
		return -self.operand.jet(env)

	def evaluate(self, env: _Env) -> float:
		return -self.operand.evaluate(env)

	def pretty(self) -> str:
		return f"(-{self.operand.pretty()})"

	def symbols(self) -> Iterable[Sym]:
		return self.operand.symbols()


@dataclass(frozen=True)
class BinOp(Node):
	op: str
	left: Node
	right: Node

	def jet(self, env: _Env) -> Jet2:
		a = self.left.jet(env)
		if self.op == "^" and isinstance(self.right, Num):
			b: Union[Jet2, float] = self.right.value
		else:
			b = self.right.jet(env)
		try:
			if self.op == "+":
				return a + b
			if self.op == "-":
				return a - b
			if self.op == "*":
				return a * b
			if self.op == "/":
				return a / b
			return a ** b
		except DomainError as exc:
			raise DomainError(exc.subexpression or self.pretty(), exc.detail) from None

	def evaluate(self, env: _Env) -> float:
		a = self.left.evaluate(env)
		b = self.right.evaluate(env)
		if self.op == "+":
			return a + b
		if self.op == "-":
			return a - b
		if self.op == "*":
			return a * b
		if self.op == "/":
			if b == 0.0:
				raise DomainError(self.pretty(), "division by zero")
			return a / b
		if a < 0.0 and not float(b).is_integer():
			raise DomainError(self.pretty(), f"negative base {a!r} raised to non-integer power {b!r}")
		if a == 0.0 and b < 0.0:
			raise DomainError(self.pretty(), "division by zero")
		return a ** b

	def pretty(self) -> str:
		return f"({self.left.pretty()} {self.op} {self.right.pretty()})"

	def symbols(self) -> Iterable[Sym]:
		return tuple(self.left.symbols()) + tuple(self.right.symbols())


@dataclass(frozen=True)
class Call(Node):
	func: str
	arg: Node
	pos: int = field(default=-1, compare=False)

	def jet(self, env: _Env) -> Jet2:
		inner = self.arg.jet(env)
		try:
			return J.UNARY[self.func](inner)
		except DomainError as exc:
			raise DomainError(exc.subexpression or self.pretty(), exc.detail) from None

	def evaluate(self, env: _Env) -> float:
		a = self.arg.evaluate(env)
		if self.func == "sqrt" and a < 0.0:
			raise DomainError(self.pretty(), f"sqrt of negative value {a!r}")
		if self.func == "log" and a <= 0.0:
			raise DomainError(self.pretty(), f"log of non-positive value {a!r}")
		return _FLOAT_FUNCS[self.func](a)

	def pretty(self) -> str:
		return f"{self.func}({self.arg.pretty()})"

	def symbols(self) -> Iterable[Sym]:
		return self.arg.symbols()


def _fold_left(tokens: pp.ParseResults) -> Node:
	items = list(tokens)
	node = items[0]
	for k in range(1, len(items), 2):
		node = BinOp(items[k], node, items[k + 1])
	return node


def _build_grammar() -> pp.ParserElement:
	number = pp.Regex(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?").set_name("number")
	number.set_parse_action(lambda t: Num(float(t[0])))
	name = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*").set_name("identifier")
	lpar = pp.Suppress("(")
	rpar = pp.Suppress(")")

	expr = pp.Forward()
	unary = pp.Forward()

	call = (name + lpar + expr + rpar).set_name("function call")
	call.set_parse_action(lambda s, loc, t: Call(t[0], t[1], pos=loc))
	ident = name.copy().set_parse_action(lambda s, loc, t: Sym(t[0], pos=loc))
	atom = number | call | ident | (lpar + expr + rpar)

	power = atom + pp.Optional(pp.Suppress("^") + unary)
	power.set_parse_action(lambda t: BinOp("^", t[0], t[1]) if len(t) == 2 else t[0])

	negation = (pp.Suppress("-") + unary).set_parse_action(lambda t: Neg(t[0]))
	unary <<= negation | power

	term = (unary + pp.ZeroOrMore(pp.one_of("* /") + unary)).set_parse_action(_fold_left)
	expr <<= (term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_fold_left)
	return expr


_GRAMMAR = _build_grammar()


def _resolve(node: Node, coords: Mapping[str, int], params: Set[str]) -> Node:
	if isinstance(node, Num):
		return node
	if isinstance(node, Sym):
		if node.name in coords:
			return Sym(node.name, "coord", coords[node.name], node.pos)
		if node.name in params:
			return Sym(node.name, "param", -1, node.pos)
		if node.name in CONSTANTS:
			return Num(CONSTANTS[node.name])
		raise UnknownIdentifierError(node.name, node.pos)
	if isinstance(node, Neg):
		return Neg(_resolve(node.operand, coords, params))
	if isinstance(node, BinOp):
		return BinOp(node.op, _resolve(node.left, coords, params), _resolve(node.right, coords, params))
	if isinstance(node, Call):
		if node.func not in J.UNARY:
			raise UnknownIdentifierError(node.func, node.pos, "unknown function")
		return Call(node.func, _resolve(node.arg, coords, params), node.pos)
	raise TypeError(f"unexpected node {node!r}")


def _substitute(node: Node, values: Mapping[str, float]) -> Node:
	if isinstance(node, Sym) and node.kind == "param" and node.name in values:
		return Num(values[node.name])
	if isinstance(node, Neg):
		return Neg(_substitute(node.operand, values))
	if isinstance(node, BinOp):
		return BinOp(node.op, _substitute(node.left, values), _substitute(node.right, values))
	if isinstance(node, Call):
		return Call(node.func, _substitute(node.arg, values), node.pos)
	return node


class Expression:
	"""A parsed, immutable expression bound to a coordinate list and a parameter list."""

	def __init__(self, root: Node, coords: Sequence[str], params: Sequence[str] = (), source: str = "") -> None:
		self.root = root
		self.coords = tuple(coords)
		self.params = tuple(params)
		self.source = source or root.pretty()

	def __eq__(self, other: object) -> bool:
		return isinstance(other, Expression) and self.root == other.root

	def __hash__(self) -> int:
		return hash(self.root)

	def __repr__(self) -> str:
		return f"Expression({self.source!r})"

	@property
	def dim(self) -> int:
		return len(self.coords)

	def pretty(self) -> str:
		return self.root.pretty()

	def identifiers(self) -> Set[str]:
		return {s.name for s in self.root.symbols()}

	def is_zero(self) -> bool:
		return isinstance(self.root, Num) and self.root.value == 0.0

	def scaled(self, factor: float) -> "Expression":
		if not math.isfinite(factor):
			raise ValueError(f"scale factor must be finite, got {factor!r}")
		return Expression(BinOp("*", Num(float(factor)), self.root), self.coords, self.params)

	def bind(self, values: Mapping[str, float]) -> "Expression":
		"""Substitute parameter values; bound names leave the parameter list."""
		unknown = set(values) - set(self.params)
		if unknown:
			raise UnknownIdentifierError(sorted(unknown)[0], None, "unknown parameter")
		bad = sorted(k for k, v in values.items() if not math.isfinite(float(v)))
		if bad:
			raise ValueError(f"parameter '{bad[0]}' must be bound to a finite value")
		root = _substitute(self.root, {k: float(v) for k, v in values.items()})
		return Expression(root, self.coords, [p for p in self.params if p not in values], self.source)

	def jet(self, point: Sequence[float], params: Mapping[str, float]) -> Jet2:
		n = len(self.coords)
		if len(point) != n:
			raise ValueError(f"point has {len(point)} coordinates, expression expects {n}")
		jets = [Jet2.variable(k, float(point[k]), n) for k in range(n)]
		return self.root.jet(_Env(point, params, jets))

	def evaluate(self, point: Sequence[float], params: Mapping[str, float]) -> float:
		return self.root.evaluate(_Env(point, params))


def parse_expression(src: str, coords: Sequence[str], params: Sequence[str] = ()) -> Expression:
	if not src or not src.strip():
		raise ExpressionSyntaxError(0, "empty expression", src or "")
	overlap = set(coords) & set(params)
	if overlap:
		raise ValueError(f"coordinates and parameters overlap: {sorted(overlap)}")
	try:
		raw = _GRAMMAR.parse_string(src, parse_all=True)[0]
	except pp.ParseBaseException as exc:
		raise ExpressionSyntaxError(exc.loc, exc.msg, src) from None
	index = {name: k for k, name in enumerate(coords)}
	return Expression(_resolve(raw, index, set(params)), coords, params, src.strip())


def eval_jet2(e: Expression, point: Sequence[float], params: Optional[Mapping[str, float]] = None) -> Jet2:
	return e.jet(np.asarray(point, dtype=float), params or {})


def constant_expression(value: float, coords: Sequence[str]) -> Expression:
	return Expression(Num(float(value)), coords)
