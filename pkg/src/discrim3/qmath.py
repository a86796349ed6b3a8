"""Real symmetric 2x2 matrix algebra for qubit states and measurements.

All states and measurement operators in the three-outcome discrimination
game live in a single plane of the Bloch sphere, so every operator is a
real symmetric 2x2 matrix in the {|0>, |1>} basis.  This module provides
that arithmetic: projectors, closed-form eigendecomposition, PSD square
roots, and trace pairings.  Everything here is a pure function on
immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Eigenvalues this far below zero are treated as floating-point noise and
# clamped; anything lower signals a malformed operator.
PSD_CLAMP = 1e-9
PSD_TOL = 1e-12


@dataclass(frozen=True)
class Sym2:
    """The real symmetric matrix [[a, b], [b, c]]."""

    a: float
    b: float
    c: float

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a - other.a, self.b - other.b, self.c - other.c)

    def scale(self, t: float) -> "Sym2":
        return Sym2(t * self.a, t * self.b, t * self.c)

    def trace(self) -> float:
        return self.a + self.c

    def det(self) -> float:
        return self.a * self.c - self.b * self.b

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return self.a >= -tol and self.c >= -tol and self.det() >= -tol

    def max_abs(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c))


IDENTITY = Sym2(1.0, 0.0, 1.0)
ZERO = Sym2(0.0, 0.0, 0.0)


def _wrap_pi(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    elif wrapped > math.pi:
        wrapped -= 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class PlaneState:
    """Unit vector cos(angle)|0> + sin(angle)|1>, angle stored in (-pi, pi]."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _wrap_pi(self.angle))

    def vector(self) -> tuple[float, float]:
        return (math.cos(self.angle), math.sin(self.angle))


@dataclass(frozen=True)
class DensityMatrix:
    """A trace-one PSD Sym2."""

    m: Sym2

    def __post_init__(self):
        if abs(self.m.trace() - 1.0) > 1e-12:
            raise ValueError(f"density matrix trace {self.m.trace()!r} != 1")
        if not self.m.is_psd():
            raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def pure(cls, state: PlaneState) -> "DensityMatrix":
        return cls(projector(state))

    @classmethod
    def mixed(cls) -> "DensityMatrix":
        return cls(Sym2(0.5, 0.0, 0.5))

    def depolarize(self, p: float) -> "DensityMatrix":
        """Mix with the fully mixed state: (1-p) rho + p * I/2."""
        return DensityMatrix(self.m.scale(1.0 - p) + Sym2(0.5 * p, 0.0, 0.5 * p))


def projector(state: PlaneState) -> Sym2:
    """Rank-one projector |phi><phi| onto a plane state."""
    c, s = state.vector()
    return Sym2(c * c, s * c, s * s)


def eig_bounds(m: Sym2) -> tuple[float, float, float]:
    """Closed-form eigenvalues of a Sym2 and the minimizing eigenvector angle.

    Returns (min_eig, max_eig, min_eigvec_angle) with the angle in
    (-pi/2, pi/2].  Degenerate matrices (b = 0, a = c) return angle 0.
    """
    half_sum = 0.5 * (m.a + m.c)
    half_diff = 0.5 * (m.a - m.c)
    radius = math.hypot(half_diff, m.b)
    lo = half_sum - radius
    hi = half_sum + radius
    if radius == 0.0:
        angle = 0.0
    elif m.b == 0.0:
        angle = 0.0 if m.a < m.c else 0.5 * math.pi
    else:
        # Half-angle form: the max-eigenvector lies at atan2(2b, a-c)/2.
        # Unlike (b, lo - a) this has no cancellation when |b| << |a - c|.
        angle = 0.5 * math.atan2(2.0 * m.b, m.a - m.c) + 0.5 * math.pi
        if angle > 0.5 * math.pi:
            angle -= math.pi
    return lo, hi, angle


def psd_sqrt(m: Sym2) -> Sym2:
    """PSD square root via eigendecomposition.

    Eigenvalues within PSD_CLAMP below zero are clamped to zero; a lower
    eigenvalue raises ValueError (the operator is malformed, not noisy).
    """
    lo, hi, angle = eig_bounds(m)
    if lo < -PSD_CLAMP:
        raise ValueError(f"matrix has eigenvalue {lo!r} below -{PSD_CLAMP}")
    lo = max(lo, 0.0)
    hi = max(hi, 0.0)
    p_lo = projector(PlaneState(angle))
    p_hi = IDENTITY - p_lo
    return p_lo.scale(math.sqrt(lo)) + p_hi.scale(math.sqrt(hi))


def sandwich(op: Sym2, rho: DensityMatrix) -> float:
    """Trace(op . rho) for a POVM element op (i.e. some M†M)."""
    return trace_product(op, rho.m)


def trace_product(x: Sym2, y: Sym2) -> float:
    """Trace(x . y) for two symmetric matrices."""
    return x.a * y.a + 2.0 * x.b * y.b + x.c * y.c


@dataclass(frozen=True)
class Mat2:
    """General real 2x2 matrix [[m00, m01], [m10, m11]]."""

    m00: float
    m01: float
    m10: float
    m11: float

    @classmethod
    def from_sym(cls, s: Sym2) -> "Mat2":
        return cls(s.a, s.b, s.b, s.c)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m00 * other.m00 + self.m01 * other.m10,
            self.m00 * other.m01 + self.m01 * other.m11,
            self.m10 * other.m00 + self.m11 * other.m10,
            self.m10 * other.m01 + self.m11 * other.m11,
        )

    def gram(self) -> Sym2:
        """MᵀM, which is always symmetric PSD."""
        return Sym2(
            self.m00 * self.m00 + self.m10 * self.m10,
            self.m00 * self.m01 + self.m10 * self.m11,
            self.m01 * self.m01 + self.m11 * self.m11,
        )


def conjugate(n: Sym2, m: Sym2) -> Sym2:
    """n . m . n for symmetric n, m (the result is symmetric)."""
    # t = n @ m
    t00 = n.a * m.a + n.b * m.b
    t01 = n.a * m.b + n.b * m.c
    t10 = n.b * m.a + n.c * m.b
    t11 = n.b * m.b + n.c * m.c
    # r = t @ n; symmetrize the off-diagonal against rounding
    r00 = t00 * n.a + t01 * n.b
    r01 = t00 * n.b + t01 * n.c
    r10 = t10 * n.a + t11 * n.b
    r11 = t10 * n.b + t11 * n.c
    return Sym2(r00, 0.5 * (r01 + r10), r11)
