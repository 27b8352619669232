"""Polynomial ODE systems, homogenization, and the sparse tensor form.

A system of n real polynomial ODEs dx_j/dt = G_j(x) is held symbolically as
per-variable tuples of monomials. A homogeneous degree-q system is
equivalently a sparse rank-(q+1) tensor A whose first index selects the
target variable and whose remaining q indices name the variables multiplied
in each monomial:

    dx_j/dt = sum over entries A[j, a_1, ..., a_q] * x_{a_1} * ... * x_{a_q}

The tensor form is not unique (latter indices commute); ``to_tensor`` emits
the canonical representative with latter indices sorted non-decreasing and
the full coefficient on that single entry.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import MappingError, ParseError

__all__ = [
    "Monomial",
    "PolynomialSystem",
    "SparseTensor",
    "HomogenizationRecord",
    "parse_system",
    "serialize_system",
    "homogenize",
    "to_tensor",
    "contract_tensor",
    "evaluate_system",
]


@dataclass(frozen=True)
class Monomial:
    """One term coefficient * prod_i x_i^exponents[i]."""

    coefficient: float
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if not math.isfinite(self.coefficient):
            raise MappingError(f"non-finite coefficient {self.coefficient!r}")
        if any(e < 0 or not isinstance(e, int) for e in self.exponents):
            raise MappingError(f"exponents must be non-negative integers, got {self.exponents!r}")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True)
class PolynomialSystem:
    """Real polynomial ODE system dx/dt = G(x).

    ``n_vars`` counts dynamical variables and excludes the constant
    coordinate a homogenized system carries; a homogenized system has
    ``n_vars + 1`` equations with the constant's (empty) equation first.
    """

    n_vars: int
    equations: tuple[tuple[Monomial, ...], ...]
    var_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.equations) not in (self.n_vars, self.n_vars + 1):
            raise MappingError(
                f"{len(self.equations)} equations for {self.n_vars} dynamical variables"
            )
        width = self.total_vars
        for eq in self.equations:
            for mono in eq:
                if len(mono.exponents) != width:
                    raise MappingError(
                        f"exponent vector {mono.exponents!r} does not have length {width}"
                    )
        if self.var_names is not None and len(self.var_names) != width:
            raise MappingError("var_names length does not match variable count")

    @property
    def total_vars(self) -> int:
        """Number of coordinates, including the constant one if present."""
        return len(self.equations)

    @property
    def includes_constant(self) -> bool:
        return len(self.equations) == self.n_vars + 1

    @property
    def max_degree(self) -> int:
        return max((m.degree for eq in self.equations for m in eq), default=0)

    def names(self) -> tuple[str, ...]:
        if self.var_names is not None:
            return self.var_names
        if self.includes_constant:
            return ("x0",) + tuple(f"x{k}" for k in range(1, self.n_vars + 1))
        return tuple(f"x{k}" for k in range(1, self.n_vars + 1))


@dataclass(frozen=True)
class HomogenizationRecord:
    """How a system was padded with the constant coordinate x0 = c."""

    c: float
    original_n_vars: int
    target_degree: int

    def __post_init__(self) -> None:
        if not (self.c > 0):
            raise MappingError(f"c must be positive, got {self.c}")


@dataclass(frozen=True)
class SparseTensor:
    """Sparse real tensor keyed by full multi-indices.

    Entries map a tuple of ``rank`` indices in [0, dim) to a nonzero
    coefficient. No index ordering is imposed here: producers choose their
    own representative orderings (``to_tensor`` sorts latter indices), and
    consumers look entries up literally.
    """

    rank: int
    dim: int
    entries: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rank < 2:
            raise MappingError(f"rank must be >= 2, got {self.rank}")
        if self.dim < 1:
            raise MappingError(f"dim must be >= 1, got {self.dim}")
        for idx, coeff in self.entries.items():
            if len(idx) != self.rank:
                raise MappingError(f"multi-index {idx!r} does not have rank {self.rank}")
            if any(i < 0 or i >= self.dim for i in idx):
                raise MappingError(f"multi-index {idx!r} out of range for dim {self.dim}")
            if not math.isfinite(coeff):
                raise MappingError(f"non-finite coefficient at {idx!r}")

    @classmethod
    def from_entries(
        cls, rank: int, dim: int, entries: Mapping[tuple[int, ...], float]
    ) -> "SparseTensor":
        """Build a tensor, dropping exact zeros."""
        kept = {tuple(idx): float(v) for idx, v in entries.items() if v != 0.0}
        return cls(rank=rank, dim=dim, entries=kept)

    @property
    def nnz(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_VAR_RE = re.compile(r"x(\d+)")
_LHS_RE = re.compile(r"^\s*dx(\d+)\s*/\s*dt\s*=")


def _tokenize_rhs(rhs: str, line_no: int, offset: int) -> list[tuple[str, object, int]]:
    """Tokenize the right-hand side of one equation.

    Returns (kind, value, column) triples where kind is one of
    'num', 'var', 'op'.
    """
    tokens: list[tuple[str, object, int]] = []
    pos = 0
    while pos < len(rhs):
        ch = rhs[pos]
        col = offset + pos + 1
        if ch.isspace():
            pos += 1
            continue
        if ch in "+-*^":
            tokens.append(("op", ch, col))
            pos += 1
            continue
        m = _VAR_RE.match(rhs, pos)
        if m:
            tokens.append(("var", int(m.group(1)), col))
            pos = m.end()
            continue
        m = _NUMBER_RE.match(rhs, pos)
        if m:
            value = float(m.group(0))
            if not math.isfinite(value):
                raise ParseError(f"non-finite coefficient {m.group(0)!r}", line_no, col)
            tokens.append(("num", value, col))
            pos = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", line_no, col)
    return tokens


def _parse_rhs(tokens: list[tuple[str, object, int]], n_vars: int, line_no: int) -> list[Monomial]:
    """Parse a token stream into monomials.

    Grammar: expr := [sign] term (sign term)*,
    term := factor (['*'] factor)*, factor := number | var ['^' int].
    Adjacent factors multiply implicitly.
    """
    monomials: list[Monomial] = []
    i = 0
    n_tok = len(tokens)

    while i < n_tok:
        sign = 1.0
        # Leading signs (also between terms); allow chains like "- -".
        while i < n_tok and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n_tok:
            raise ParseError("dangling sign at end of expression", line_no, tokens[-1][2])

        coefficient = sign
        exponents = [0] * n_vars
        saw_factor = False

        while i < n_tok:
            kind, value, col = tokens[i]
            if kind == "op" and value in "+-":
                break
            if kind == "op" and value == "*":
                i += 1
                continue
            if kind == "num":
                coefficient *= value  # type: ignore[operator]
                i += 1
                saw_factor = True
                continue
            if kind == "var":
                var = int(value)  # type: ignore[arg-type]
                if var < 1 or var > n_vars:
                    raise ParseError(f"unknown variable name x{var}", line_no, col)
                power = 1
                i += 1
                if i < n_tok and tokens[i][0] == "op" and tokens[i][1] == "^":
                    if i + 1 >= n_tok or tokens[i + 1][0] != "num":
                        raise ParseError("expected integer exponent after '^'", line_no, col)
                    raw = tokens[i + 1][1]
                    power = int(raw)  # type: ignore[arg-type]
                    if power != raw or power < 0:
                        raise ParseError(
                            f"exponent must be a non-negative integer, got {raw}", line_no, col
                        )
                    i += 2
                exponents[var - 1] += power
                saw_factor = True
                continue
            raise ParseError(f"unexpected token {value!r}", line_no, col)

        if not saw_factor:
            raise ParseError("empty term", line_no, tokens[min(i, n_tok - 1)][2])
        if coefficient != 0.0:
            monomials.append(Monomial(coefficient, tuple(exponents)))
    return monomials


def parse_system(text: str) -> PolynomialSystem:
    """Parse a system definition, either line format or the JSON form.

    The line format holds one equation per line, ``dx<k>/dt = <polynomial>``
    with ``+ - * ^`` operators, decimal literals, variables ``x1..xn`` and
    ``#`` comments. A polynomial of ``0`` denotes an empty equation.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _system_from_json(text)

    # First pass: find the equations and establish n_vars.
    raw_lines = text.splitlines()
    bodies: dict[int, tuple[str, int, int]] = {}
    for line_no, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LHS_RE.match(line)
        if not m:
            raise ParseError("expected 'dx<k>/dt = <polynomial>'", line_no, 1)
        var = int(m.group(1))
        if var < 1:
            raise ParseError(f"unknown variable name x{var}", line_no, 1)
        if var in bodies:
            raise ParseError(f"duplicate equation for x{var}", line_no, 1)
        bodies[var] = (line[m.end():], line_no, m.end())

    if not bodies:
        raise ParseError("no equations found", 1, 1)
    n_vars = max(bodies)
    missing = [k for k in range(1, n_vars + 1) if k not in bodies]
    if missing:
        raise ParseError(f"missing equation for x{missing[0]}", 1, 1)

    equations = []
    for var in range(1, n_vars + 1):
        rhs, line_no, offset = bodies[var]
        tokens = _tokenize_rhs(rhs, line_no, offset)
        if not tokens:
            raise ParseError("empty right-hand side", line_no, offset + 1)
        monomials = _parse_rhs(tokens, n_vars, line_no)
        equations.append(tuple(monomials))
    return PolynomialSystem(n_vars=n_vars, equations=tuple(equations))


def _system_from_json(text: str) -> PolynomialSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        n_vars = int(doc["n_vars"])
        equations = []
        for eq in doc["equations"]:
            monomials = []
            for term in eq:
                coefficient = float(term["coefficient"])
                if not math.isfinite(coefficient):
                    raise ParseError(f"non-finite coefficient {coefficient!r}")
                exponents = tuple(int(e) for e in term["exponents"])
                monomials.append(Monomial(coefficient, exponents))
            equations.append(tuple(monomials))
        var_names = doc.get("var_names")
        if var_names is not None:
            var_names = tuple(str(s) for s in var_names)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed system document: {exc}") from exc
    return PolynomialSystem(n_vars=n_vars, equations=tuple(equations), var_names=var_names)


def serialize_system(sys: PolynomialSystem) -> str:
    """Canonical JSON serialization; ``parse_system`` round-trips it."""
    doc = {
        "format": "poly-system/1",
        "n_vars": sys.n_vars,
        "equations": [
            [
                {"coefficient": m.coefficient, "exponents": list(m.exponents)}
                for m in eq
            ]
            for eq in sys.equations
        ],
    }
    if sys.var_names is not None:
        doc["var_names"] = list(sys.var_names)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Homogenization
# ---------------------------------------------------------------------------


def homogenize(
    sys: PolynomialSystem, c: float, target_degree: int
) -> tuple[PolynomialSystem, HomogenizationRecord]:
    """Pad every monomial with the constant coordinate x0 = c to a uniform degree.

    The output system has the constant's empty equation first, so variable k
    moves to index k. Coefficients are rescaled by c^(degree - target) so the
    original dynamics are recovered exactly on the slice x0 = c. The target
    degree must be odd: downstream degree reduction groups (q+1)/2 indices.
    """
    if sys.includes_constant:
        raise MappingError("system already carries a constant coordinate")
    if not (c > 0):
        raise MappingError(f"c must be positive, got {c}")
    if target_degree % 2 == 0:
        raise MappingError(f"target degree must be odd, got {target_degree}")
    if target_degree < sys.max_degree:
        raise MappingError(
            f"target degree {target_degree} below maximum monomial degree {sys.max_degree}"
        )

    equations: list[tuple[Monomial, ...]] = [()]
    for eq in sys.equations:
        padded = []
        for mono in eq:
            pad = target_degree - mono.degree
            coefficient = mono.coefficient * c ** (mono.degree - target_degree)
            padded.append(Monomial(coefficient, (pad,) + mono.exponents))
        equations.append(tuple(padded))

    names = ("x0",) + sys.names()
    out = PolynomialSystem(n_vars=sys.n_vars, equations=tuple(equations), var_names=names)
    record = HomogenizationRecord(c=c, original_n_vars=sys.n_vars, target_degree=target_degree)
    return out, record


# ---------------------------------------------------------------------------
# Tensor form
# ---------------------------------------------------------------------------


def to_tensor(sys: PolynomialSystem, degree: int | None = None) -> SparseTensor:
    """Convert a homogeneous system to its canonical rank-(q+1) tensor.

    ``degree`` is only needed when the system has no monomials at all.
    Raises MappingError on non-homogeneous input.
    """
    degrees = {m.degree for eq in sys.equations for m in eq}
    if len(degrees) > 1:
        raise MappingError(f"system is not homogeneous: degrees {sorted(degrees)}")
    if degrees:
        q = degrees.pop()
        if degree is not None and degree != q:
            raise MappingError(f"system has degree {q}, not {degree}")
    elif degree is not None:
        q = degree
    else:
        raise MappingError("empty system: pass the intended degree explicitly")
    if q < 1:
        raise MappingError(f"tensor form needs degree >= 1, got {q}")

    dim = sys.total_vars
    entries: dict[tuple[int, ...], float] = {}
    for j, eq in enumerate(sys.equations):
        for mono in eq:
            latter: list[int] = []
            for var, power in enumerate(mono.exponents):
                latter.extend([var] * power)
            idx = (j,) + tuple(sorted(latter))
            entries[idx] = entries.get(idx, 0.0) + mono.coefficient
    return SparseTensor.from_entries(rank=q + 1, dim=dim, entries=entries)


def contract_tensor(t: SparseTensor, x: Iterable[float]) -> np.ndarray:
    """Evaluate dx_j/dt = sum A[j, alpha] * prod x[alpha]."""
    vec = np.asarray(x, dtype=float)
    if vec.shape != (t.dim,):
        raise MappingError(f"expected vector of length {t.dim}, got shape {vec.shape}")
    out = np.zeros(t.dim)
    for idx, coeff in t.entries.items():
        term = coeff
        for k in idx[1:]:
            term *= vec[k]
        out[idx[0]] += term
    return out


def evaluate_system(sys: PolynomialSystem, x: Iterable[float]) -> np.ndarray:
    """Evaluate G(x) directly from the monomial form."""
    vec = np.asarray(x, dtype=float)
    if vec.shape != (sys.total_vars,):
        raise MappingError(f"expected vector of length {sys.total_vars}, got shape {vec.shape}")
    out = np.zeros(sys.total_vars)
    for j, eq in enumerate(sys.equations):
        for mono in eq:
            out[j] += mono.coefficient * np.prod(vec ** np.asarray(mono.exponents))
    return out
