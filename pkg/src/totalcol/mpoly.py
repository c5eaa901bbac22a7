"""Sparse multivariate polynomials over Z_p.

Two representations live here. ``SparsePoly`` is the expanded
monomial -> coefficient map; ``FactoredPoly`` keeps a product of small
factors and is what the graph constructions use, because their
per-variable degree is around p and expanding them is hopeless beyond toy
sizes. Evaluation of a factored product never needs Fermat reduction:
x^p and x agree as functions on Z_p.

Coefficients of reduced polynomials are recovered from evaluations by
Lagrange interpolation over all of Z_p (``lagrange_matrix``), applied one
variable at a time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Protocol, Sequence

import numpy as np

from .budget import Budget, BudgetExceeded

VERTEX = 0
EDGE = 1


class ModulusMismatch(ValueError):
    pass


class MissingVariable(KeyError):
    pass


class ZeroPolynomial(ValueError):
    pass


class DuplicateAbscissa(ValueError):
    pass


class WrongSampleCount(ValueError):
    pass


class ExponentTooLarge(ValueError):
    pass


class VarId(NamedTuple):
    """Variable identifier. Tuple order puts every vertex before every edge."""

    kind: int
    index: int

    def __repr__(self) -> str:
        return ("v" if self.kind == VERTEX else "e") + str(self.index)

    __str__ = __repr__


def v(i: int) -> VarId:
    return VarId(VERTEX, i)


def e(i: int) -> VarId:
    return VarId(EDGE, i)


# A monomial is a tuple of (VarId, exponent) pairs sorted by VarId, exponents > 0.
Monomial = tuple
ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for var, k in b:
        d[var] = d.get(var, 0) + k
    return tuple(sorted(d.items()))


def mono_degree(mono: Monomial) -> int:
    return sum(k for _, k in mono)


def gradedlex_key(mono: Monomial, order: Sequence[VarId]) -> tuple:
    """Sort key: total degree first, then exponent vector in ``order``."""
    d = dict(mono)
    return (mono_degree(mono), tuple(d.get(x, 0) for x in order))


class Evaluable(Protocol):
    p: int

    def eval(self, point: Mapping[VarId, int]) -> int: ...

    def variables(self) -> frozenset: ...


class SparsePoly:
    """Expanded polynomial over Z_p. The zero polynomial has no terms."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Mapping[Monomial, int] | None = None):
        self.p = int(p)
        clean: dict[Monomial, int] = {}
        if terms:
            for mono, c in terms.items():
                c %= self.p
                if c:
                    clean[mono] = c
        self.terms = clean

    # construction helpers
    @classmethod
    def const(cls, p: int, c: int) -> "SparsePoly":
        return cls(p, {ONE: c})

    @classmethod
    def var(cls, p: int, x: VarId) -> "SparsePoly":
        return cls(p, {((x, 1),): 1})

    @classmethod
    def linear(cls, p: int, x: VarId, c: int = 0) -> "SparsePoly":
        """x - c"""
        return cls(p, {((x, 1),): 1, ONE: -c})

    @classmethod
    def difference(cls, p: int, x: VarId, y: VarId) -> "SparsePoly":
        """x - y"""
        return cls(p, {((x, 1),): 1, ((y, 1),): -1})

    @classmethod
    def from_dense(cls, p: int, coeffs: Sequence[int], x: VarId) -> "SparsePoly":
        terms = {}
        for k, c in enumerate(coeffs):
            if c % p:
                terms[((x, k),) if k else ONE] = int(c)
        return cls(p, terms)

    def to_dense(self, x: VarId | None = None) -> list[int]:
        """Coefficient list (index = degree) of a univariate polynomial."""
        vs = self.variables()
        if len(vs) > 1 or (x is not None and vs and vs != {x}):
            raise ValueError(f"not univariate in {x}: {sorted(vs)}")
        deg = self.total_degree() if self.terms else 0
        out = [0] * (deg + 1)
        for mono, c in self.terms.items():
            out[mono_degree(mono)] = c
        return out

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> frozenset:
        return frozenset(x for mono in self.terms for x, _ in mono)

    def degree_in(self, x: VarId) -> int:
        best = -1 if not self.terms else 0
        for mono in self.terms:
            for y, k in mono:
                if y == x and k > best:
                    best = k
        return best

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(tuple(sorted(mono)), 0)

    # arithmetic
    def _check(self, other: "SparsePoly") -> None:
        if self.p != other.p:
            raise ModulusMismatch(f"Z_{self.p} vs Z_{other.p}")

    def __add__(self, other):
        if isinstance(other, int):
            other = SparsePoly.const(self.p, other)
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = (out.get(mono, 0) + c) % self.p
        return SparsePoly(self.p, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = SparsePoly.const(self.p, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return SparsePoly(self.p, {m: c * other for m, c in self.terms.items()})
        self._check(other)
        p = self.p
        out: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                out[mono] = (out.get(mono, 0) + ca * cb) % p
        return SparsePoly(p, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = SparsePoly.const(self.p, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"0 (mod {self.p})"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda t: t[0], reverse=True):
            body = "*".join(f"{x}^{k}" if k > 1 else str(x) for x, k in mono)
            parts.append(f"{c}*{body}" if body else str(c))
        return " + ".join(parts) + f" (mod {self.p})"

    # evaluation
    def eval(self, point: Mapping[VarId, int]) -> int:
        p = self.p
        total = 0
        for mono, c in self.terms.items():
            t = c
            for x, k in mono:
                try:
                    t = t * pow(point[x], k, p) % p
                except KeyError:
                    raise MissingVariable(x) from None
            total += t
        return total % p

    def substitute(self, partial: Mapping[VarId, int]) -> "SparsePoly":
        p = self.p
        out: dict[Monomial, int] = {}
        for mono, c in self.terms.items():
            keep = []
            for x, k in mono:
                if x in partial:
                    c = c * pow(partial[x], k, p) % p
                else:
                    keep.append((x, k))
            key = tuple(keep)
            out[key] = (out.get(key, 0) + c) % p
        return SparsePoly(p, out)

    def eval_array(self, env: Mapping[VarId, object]) -> np.ndarray:
        """Vectorized evaluation; ``env`` maps variables to ints or broadcastable int64 arrays."""
        p = self.p
        total = np.int64(0)
        for mono, c in self.terms.items():
            t = np.int64(c)
            for x, k in mono:
                val = env[x]
                for _ in range(k):
                    t = (t * val) % p
            total = (total + t) % p
        return np.asarray(total, dtype=np.int64)

    def fermat_reduce(self) -> "SparsePoly":
        return fermat_reduce(self)


def add(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    return f + g


def mul(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    return f * g


def reduce_exponent(k: int, p: int) -> int:
    """Smallest exponent k' <= p-1 with x^k == x^k' as functions on Z_p."""
    if k < 0:
        raise ValueError("negative exponent")
    if k == 0:
        return 0
    return (k - 1) % (p - 1) + 1


def fermat_reduce(f: SparsePoly) -> SparsePoly:
    p = f.p
    out: dict[Monomial, int] = {}
    for mono, c in f.terms.items():
        key = tuple((x, reduce_exponent(k, p)) for x, k in mono)
        out[key] = (out.get(key, 0) + c) % p
    return SparsePoly(p, out)


def evaluate(f: "Evaluable", point: Mapping[VarId, int]) -> int:
    return f.eval(point)


def substitute(f, partial: Mapping[VarId, int]):
    return f.substitute(partial)


class FactoredPoly:
    """A product of ``SparsePoly`` factors, kept unexpanded."""

    __slots__ = ("p", "factors")

    def __init__(self, p: int, factors: Iterable[SparsePoly] = ()):
        self.p = int(p)
        self.factors = list(factors)
        for f in self.factors:
            if f.p != self.p:
                raise ModulusMismatch(f"factor over Z_{f.p} in product over Z_{self.p}")

    def __mul__(self, other):
        if isinstance(other, FactoredPoly):
            if other.p != self.p:
                raise ModulusMismatch(f"Z_{self.p} vs Z_{other.p}")
            return FactoredPoly(self.p, self.factors + other.factors)
        if isinstance(other, SparsePoly):
            return FactoredPoly(self.p, self.factors + [other])
        return NotImplemented

    def __len__(self) -> int:
        return len(self.factors)

    def variables(self) -> frozenset:
        out: set = set()
        for f in self.factors:
            out |= f.variables()
        return frozenset(out)

    def eval(self, point: Mapping[VarId, int]) -> int:
        p = self.p
        acc = 1
        for f in self.factors:
            acc = acc * f.eval(point) % p
            if not acc:
                return 0
        return acc

    def substitute(self, partial: Mapping[VarId, int]) -> "FactoredPoly":
        const = 1
        rest = []
        for f in self.factors:
            g = f.substitute(partial)
            if not g.variables():
                const = const * g.eval({}) % self.p
            else:
                rest.append(g)
        if const != 1 or not rest:
            rest.insert(0, SparsePoly.const(self.p, const))
        return FactoredPoly(self.p, rest)

    def expand(self) -> SparsePoly:
        acc = SparsePoly.const(self.p, 1)
        for f in self.factors:
            acc = acc * f
        return acc

    def expand_reduced(self) -> SparsePoly:
        """Expand with Fermat reduction after every factor (reduction is a ring map)."""
        acc = SparsePoly.const(self.p, 1)
        for f in self.factors:
            acc = fermat_reduce(acc * f)
        return acc

    def degree_bound(self, x: VarId) -> int:
        """Per-variable degree of the unexpanded product (an upper bound after expansion)."""
        return sum(max(f.degree_in(x), 0) for f in self.factors)

    def eval_grid(self, axes: Sequence[VarId], fixed: Mapping[VarId, int] | None = None) -> np.ndarray:
        """Values over Z_p^len(axes) with the remaining variables fixed; shape (p,)*len(axes)."""
        p = self.p
        k = len(axes)
        env: dict[VarId, object] = dict(fixed or {})
        for pos, x in enumerate(axes):
            shape = [1] * k
            shape[pos] = p
            env[x] = np.arange(p, dtype=np.int64).reshape(shape)
        acc = np.ones((p,) * k, dtype=np.int64)
        for f in self.factors:
            acc = acc * f.eval_array(env) % p
        return acc

    def __repr__(self) -> str:
        return " * ".join(f"({f})" for f in self.factors) or "1"


# ---------------------------------------------------------------------------
# Univariate machinery


@lru_cache(maxsize=64)
def lagrange_matrix(p: int) -> np.ndarray:
    """W[k, a] = coefficient of x^k in the Lagrange basis polynomial L_a over Z_p.

    L_a(x) = prod_{b != a} (x - b)/(a - b). The numerator is (x^p - x)/(x - a)
    and the denominator is the derivative of x^p - x at a, which is -1.
    """
    a = np.arange(p, dtype=np.int64)
    q = np.zeros((p, p), dtype=np.int64)  # q[k, a]: coeff of x^k in (x^p - x)/(x - a)
    q[p - 1, :] = 1
    for k in range(p - 1, 0, -1):
        dk = -1 if k == 1 else 0
        q[k - 1, :] = (dk + a * q[k, :]) % p
    w = (-q) % p
    w.setflags(write=False)
    return w


def values_to_coeffs(values: np.ndarray, p: int, axes: Iterable[int] | None = None) -> np.ndarray:
    """Interpolate a value table along the given axes (default: all) into coefficients."""
    w = lagrange_matrix(p)
    out = np.asarray(values, dtype=np.int64) % p
    for ax in range(out.ndim) if axes is None else axes:
        out = np.moveaxis(np.tensordot(w, out, axes=([1], [ax])) % p, 0, ax)
    return out


def reconstruct_univariate(samples: Iterable[tuple[int, int]], p: int, x: VarId = e(1)) -> SparsePoly:
    """The unique polynomial of degree <= p-1 through one sample per element of Z_p."""
    samples = list(samples)
    if len(samples) != p:
        raise WrongSampleCount(f"need {p} samples, got {len(samples)}")
    table = [None] * p
    for a, y in samples:
        a %= p
        if table[a] is not None:
            raise DuplicateAbscissa(a)
        table[a] = y % p
    coeffs = values_to_coeffs(np.array(table, dtype=np.int64), p)
    return SparsePoly.from_dense(p, [int(c) for c in coeffs], x)


def synthetic_divide(coeffs: Sequence[int], beta: int, p: int) -> tuple[list[int], int]:
    """Divide sum coeffs[k] x^k by (x - beta); returns (quotient coeffs, remainder)."""
    n = len(coeffs) - 1
    if n < 1:
        return [0], coeffs[0] % p if coeffs else 0
    q = [0] * n
    carry = 0
    for k in range(n, 0, -1):
        carry = (coeffs[k] + carry * beta) % p
        q[k - 1] = carry
    rem = (coeffs[0] + carry * beta) % p
    return q, rem


def _trim(coeffs: list[int]) -> list[int]:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    return coeffs


def linear_multiplicity(f: SparsePoly, beta: int) -> int:
    """Largest k with (x - beta)^k dividing the univariate ``f``."""
    if f.is_zero():
        raise ZeroPolynomial("multiplicity of a root of the zero polynomial")
    coeffs = _trim(f.to_dense())
    p = f.p
    k = 0
    while len(coeffs) > 1:
        q, r = synthetic_divide(coeffs, beta % p, p)
        if r:
            break
        k += 1
        coeffs = _trim(q)
    return k


def dense_multiplicities(coeffs: Sequence[int], p: int, candidates: Iterable[int]) -> dict[int, int]:
    """Root multiplicity of each candidate in a nonzero dense univariate polynomial."""
    base = _trim([c % p for c in coeffs])
    if base == [0]:
        raise ZeroPolynomial("multiplicity of a root of the zero polynomial")
    out = {}
    for beta in candidates:
        c, k = base, 0
        while len(c) > 1:
            q, r = synthetic_divide(c, beta, p)
            if r:
                break
            k += 1
            c = _trim(q)
        out[beta] = k
    return out


# ---------------------------------------------------------------------------
# Zero tests and coefficient extraction


@dataclass
class ZeroTest:
    status: str  # "zero" | "nonzero" | "inconclusive"
    witness: dict | None = None
    reason: str = ""

    @property
    def nonzero(self) -> bool:
        return self.status == "nonzero"


def is_zero_reduced(f: SparsePoly, budget: Budget | int | None = None) -> ZeroTest:
    """Decide whether the reduced form of ``f`` is zero, with a witness if not.

    A nonempty reduced term map must be nonzero somewhere. The witness is
    searched in a box of size (t_1+1) x ... x (t_k+1) where prod x_i^{t_i}
    is a maximal-degree monomial: a nonvanishing point always exists there.
    Failing to find one means the two notions of zero disagree, which is
    a bug, so it raises.
    """
    if not isinstance(budget, Budget):
        budget = Budget(budget)
    g = fermat_reduce(f)
    if g.is_zero():
        return ZeroTest("zero")
    order = sorted(g.variables())
    lead = max(g.terms, key=lambda m: gradedlex_key(m, order))
    degs = dict(lead)
    ranges = [range(degs.get(x, 0) + 1) for x in order]
    size = 1
    for r in ranges:
        size *= len(r)
    try:
        budget.require(size, "witness search")
    except BudgetExceeded as exc:
        return ZeroTest("inconclusive", reason=str(exc))
    for vals in itertools.product(*ranges):
        point = dict(zip(order, vals))
        budget.charge(1)
        if g.eval(point):
            return ZeroTest("nonzero", point)
    raise AssertionError("reduced polynomial has terms but vanishes on a nullstellensatz box")


def find_nonzero(
    f: Evaluable,
    domains: Mapping[VarId, Sequence[int]],
    budget: Budget | None = None,
    cost: int = 1,
) -> dict | None:
    """First point (lex over ``domains`` in VarId order) where f is nonzero, else None."""
    order = sorted(domains)
    budget = budget or Budget()
    for vals in itertools.product(*(domains[x] for x in order)):
        point = dict(zip(order, vals))
        budget.charge(cost, "grid search")
        if f.eval(point):
            return point
    return None


class CoefficientView:
    """Coefficient of prod target_i^{exp_i} in the Fermat-reduced ``base``.

    Evaluable in the remaining variables. Each evaluation interpolates the
    first target variable from its p specializations, recursing into the
    next target for each specialization, so one query costs p^k base
    evaluations.
    """

    def __init__(self, base: Evaluable, targets: Sequence[VarId], exponents: Sequence[int],
                 budget: Budget | None = None):
        p = base.p
        if len(targets) != len(exponents):
            raise ValueError("targets and exponents differ in length")
        for k in exponents:
            if not 0 <= k <= p - 1:
                raise ExponentTooLarge(f"exponent {k} outside [0, {p - 1}]")
        self.p = p
        self.base = base
        self.targets = tuple(targets)
        self.exponents = tuple(exponents)
        self.cost = p ** len(self.targets)
        self.budget = budget
        if budget is not None:
            budget.require(self.cost, "coefficient extraction")

    def variables(self) -> frozenset:
        return self.base.variables() - frozenset(self.targets)

    def eval(self, point: Mapping[VarId, int]) -> int:
        if self.budget is not None:
            self.budget.charge(self.cost, "coefficient extraction")
        w = lagrange_matrix(self.p)
        env = {x: val for x, val in point.items() if x not in self.targets}
        return self._nested(env, 0, w)

    def _nested(self, env: dict, depth: int, w: np.ndarray) -> int:
        if depth == len(self.targets):
            return self.base.eval(env)
        x = self.targets[depth]
        row = w[self.exponents[depth]]
        total = 0
        for a in range(self.p):
            env[x] = a
            total += int(row[a]) * self._nested(env, depth + 1, w)
        del env[x]
        return total % self.p


def coeff_extract(f: Evaluable, target_vars: Sequence[VarId], exponents: Sequence[int],
                  budget: Budget | None = None) -> CoefficientView:
    return CoefficientView(f, target_vars, exponents, budget)


def gradedlex_descending(nvars: int, max_exp: int) -> Iterator[tuple[int, ...]]:
    """Exponent tuples in [0, max_exp]^nvars, largest graded-lex first."""

    def parts(total: int, k: int) -> Iterator[tuple[int, ...]]:
        if k == 1:
            if 0 <= total <= max_exp:
                yield (total,)
            return
        hi = min(total, max_exp)
        lo = max(0, total - (k - 1) * max_exp)
        for first in range(hi, lo - 1, -1):
            for rest in parts(total - first, k - 1):
                yield (first,) + rest

    for d in range(nvars * max_exp, -1, -1):
        yield from parts(d, nvars)


def lex_ascending(nvars: int, max_exp: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(max_exp + 1), repeat=nvars)
