"""Multivariate polynomial systems over the complex numbers.

Systems are immutable.  On construction the monomials (and the symbolic
Jacobian) are packed into flat arrays so the tracking kernels never see
Python objects: a complex coefficient vector, an int64 exponent matrix
with one row per monomial, and CSR-style offsets delimiting each
polynomial's run of monomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels

# Refuse Bezout counts beyond any desk-scale tracking budget.
MAX_TOTAL_DEGREE = 2 ** 24


@dataclass(frozen=True)
class Monomial:
    """A single term ``coefficient * prod_v x_v ** exponents[v]``."""

    coefficient: complex
    exponents: tuple[int, ...]

    def __post_init__(self):
        coeff = complex(self.coefficient)
        if not (math.isfinite(coeff.real) and math.isfinite(coeff.imag)):
            raise ValueError("monomial coefficient must be finite")
        object.__setattr__(self, "coefficient", coeff)
        expos = []
        for e in self.exponents:
            if not isinstance(e, (int, np.integer)) or isinstance(e, bool):
                raise ValueError(f"exponent {e!r} is not an integer")
            if e < 0:
                raise ValueError(f"exponent {e} is negative")
            expos.append(int(e))
        object.__setattr__(self, "exponents", tuple(expos))

    @property
    def degree(self) -> int:
        return sum(self.exponents)


class PolynomialSystem:
    """A square system of polynomials sharing one variable set.

    Each polynomial is a sequence of Monomials whose exponent tuples all
    have the same length (the number of variables, which must equal the
    number of polynomials).  Every polynomial must contain a monomial
    with a nonzero coefficient and have degree at least 1.
    """

    def __init__(self, polynomials, num_vars: int | None = None,
                 var_names: Sequence[str] | None = None):
        polys = tuple(tuple(p) for p in polynomials)
        if not polys:
            raise ValueError("system must contain at least one polynomial")
        first = None
        for p in polys:
            for m in p:
                first = m
                break
            if first is not None:
                break
        if first is None:
            raise ValueError("system has no monomials")
        nv = len(first.exponents) if num_vars is None else int(num_vars)
        if nv == 0:
            raise ValueError("system must have at least one variable")
        if len(polys) != nv:
            raise ValueError(
                f"system is not square: {len(polys)} polynomials "
                f"in {nv} variables")
        degs = []
        for i, p in enumerate(polys):
            deg = -1
            for m in p:
                if len(m.exponents) != nv:
                    raise ValueError(
                        f"polynomial {i}: exponent tuple of length "
                        f"{len(m.exponents)}, expected {nv}")
                if m.coefficient != 0:
                    deg = max(deg, m.degree)
            if deg < 0:
                raise ValueError(f"polynomial {i} has no nonzero monomial")
            if deg < 1:
                raise ValueError(f"polynomial {i} is constant (degree 0)")
            degs.append(deg)
        if var_names is not None:
            var_names = tuple(str(s) for s in var_names)
            if len(var_names) != nv:
                raise ValueError(
                    f"{len(var_names)} variable names for {nv} variables")
        else:
            var_names = tuple(f"x{i}" for i in range(nv))

        self._polys = polys
        self._num_vars = nv
        self._var_names = var_names
        self._degrees = tuple(degs)
        self._pack()

    def _pack(self):
        nv = self._num_vars
        coeffs, expos, offsets = [], [], [0]
        jcoeffs, jexpos, joffsets = [], [], [0]
        maxexp = 1
        for p in self._polys:
            terms = [m for m in p if m.coefficient != 0]
            for m in terms:
                coeffs.append(m.coefficient)
                expos.append(m.exponents)
                maxexp = max(maxexp, max(m.exponents, default=0))
            offsets.append(len(coeffs))
            for v in range(nv):
                for m in terms:
                    e = m.exponents[v]
                    if e >= 1:
                        jcoeffs.append(m.coefficient * e)
                        d = list(m.exponents)
                        d[v] -= 1
                        jexpos.append(tuple(d))
                joffsets.append(len(jcoeffs))

        def _freeze(a):
            a.flags.writeable = False
            return a

        self._coeffs = _freeze(np.array(coeffs, dtype=np.complex128))
        self._expos = _freeze(np.array(expos, dtype=np.int64).reshape(len(coeffs), nv))
        self._offsets = _freeze(np.array(offsets, dtype=np.int64))
        self._jcoeffs = _freeze(np.array(jcoeffs, dtype=np.complex128))
        self._jexpos = _freeze(np.array(jexpos, dtype=np.int64).reshape(len(jcoeffs), nv))
        self._joffsets = _freeze(np.array(joffsets, dtype=np.int64))
        self._max_exponent = maxexp

    @property
    def polynomials(self) -> tuple[tuple[Monomial, ...], ...]:
        return self._polys

    @property
    def num_polys(self) -> int:
        return len(self._polys)

    @property
    def num_vars(self) -> int:
        return self._num_vars

    @property
    def var_names(self) -> tuple[str, ...]:
        return self._var_names

    @property
    def packed(self):
        """(coeffs, expos, offsets) arrays for the kernels."""
        return self._coeffs, self._expos, self._offsets

    @property
    def packed_jacobian(self):
        """(coeffs, expos, offsets) arrays of the symbolic Jacobian."""
        return self._jcoeffs, self._jexpos, self._joffsets

    @property
    def max_exponent(self) -> int:
        """Largest single-variable exponent (power table size)."""
        return self._max_exponent

    def __repr__(self):
        return (f"PolynomialSystem({self.num_polys} polynomials, "
                f"{self.num_vars} vars, degrees={self._degrees})")


def _as_point(system: PolynomialSystem, point) -> np.ndarray:
    x = np.asarray(point, dtype=np.complex128)
    if x.shape != (system.num_vars,):
        raise ValueError(
            f"point of shape {x.shape}, expected ({system.num_vars},)")
    return x


def degrees(system: PolynomialSystem) -> tuple[int, ...]:
    """Per-polynomial total degrees (zero-coefficient terms ignored)."""
    return system._degrees


def total_degree(system: PolynomialSystem) -> int:
    """Bezout number: the product of the polynomial degrees."""
    td = math.prod(system._degrees)
    if td > MAX_TOTAL_DEGREE:
        raise OverflowError(
            f"total degree {td} exceeds the tracking budget {MAX_TOTAL_DEGREE}")
    return td


def evaluate(system: PolynomialSystem, point) -> np.ndarray:
    """Value of every polynomial at the point (complex vector)."""
    x = _as_point(system, point)
    k = _kernels.get_kernels()
    c, e, o = system.packed
    out = k.system_value(c, e, o, system.max_exponent, x)
    if not np.all(np.isfinite(out.view(np.float64))):
        raise OverflowError("polynomial evaluation overflowed")
    return out


def jacobian(system: PolynomialSystem, point) -> np.ndarray:
    """Jacobian matrix at the point, shape (num_polys, num_vars)."""
    x = _as_point(system, point)
    k = _kernels.get_kernels()
    jc, je, jo = system.packed_jacobian
    out = k.system_jac(jc, je, jo, system.max_exponent, system.num_vars, x)
    if not np.all(np.isfinite(out.view(np.float64))):
        raise OverflowError("Jacobian evaluation overflowed")
    return out
