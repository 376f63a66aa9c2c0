"""Log-density expansion machinery and the density <-> wave-function transform.

Writing psi = exp{S/D} with S = sum_n lam**n S_n turns the transformed
equation into a hierarchy of equations for the S_n.  With delta-function
initial data the zeroth order is

    S0(x, t) = -(D/2) ln(4 pi D t) - x^2/(4 t),

and for a scale-invariant first-order potential the hierarchy terminates:
S1 = -U1/2 solves the first-order equation and makes the second-order source
S1'^2 - U1'^2/4 vanish identically, so all higher terms are constants.  The
residual evaluators here verify exactly that structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _numdiff
from .errors import DomainError, OrderError, RangeError
from .model import PhysParams, PowerLawPotential

__all__ = [
    "SAction",
    "S0Term",
    "FirstOrderTerm",
    "ConstantTerm",
    "NumericalPotential",
    "effective_potential",
    "s0",
    "hierarchy_residual",
    "to_schrodinger",
    "schrodinger_residual",
    "assemble_density",
]

# Steps for the finite-difference fallbacks: the tight step is pinned for the
# hierarchy residuals; the looser step keeps second-derivative round-off well
# below the 1e-6 floor when differentiating generic densities/wave functions.
_H_TIGHT = 1e-5
_H_LOOSE = 1e-3

# exp() overflows just above exp(709); guard a little earlier.
_EXP_GUARD = 700.0


def _check_t(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainError(f"evaluation requires t > 0, got t={t}")


class NumericalPotential:
    """Drift-potential wrapper giving finite-difference derivatives to a callable."""

    def __init__(self, func: Callable, step: float = _H_LOOSE):
        self._f = func
        self._h = step

    def __call__(self, x, t):
        return self._f(x, t)

    def dx(self, x, t):
        return _numdiff.partial_x(self._f, x, t, self._h * max(1.0, abs(x)))

    def dxx(self, x, t):
        return _numdiff.partial_xx(self._f, x, t, self._h * max(1.0, abs(x)))

    def dt(self, x, t):
        return _numdiff.partial_t(self._f, x, t, self._h * t)


def _term_dx(term, x, t):
    if hasattr(term, "dx"):
        return term.dx(x, t)
    return _numdiff.partial_x(term, x, t, _H_TIGHT * max(1.0, abs(x)))


def _term_dxx(term, x, t):
    if hasattr(term, "dxx"):
        return term.dxx(x, t)
    return _numdiff.partial_xx(term, x, t, _H_TIGHT * max(1.0, abs(x)))


def _term_dt(term, x, t):
    if hasattr(term, "dt"):
        return term.dt(x, t)
    return _numdiff.partial_t(term, x, t, _H_TIGHT * t)


class S0Term:
    """Zeroth-order log density for delta initial data, with derivatives."""

    def __init__(self, D: float):
        self.D = float(D)

    def __call__(self, x, t):
        return s0((x, t), self.D)

    def dx(self, x, t):
        _check_t(t)
        return -x / (2.0 * t)

    def dxx(self, x, t):
        _check_t(t)
        return -1.0 / (2.0 * t)

    def dt(self, x, t):
        _check_t(t)
        return -self.D / (2.0 * t) + x * x / (4.0 * t * t)


class FirstOrderTerm:
    """S1 = -U1/2 for a drift potential with analytic derivatives."""

    def __init__(self, U1):
        self.U1 = U1

    def __call__(self, x, t):
        return -0.5 * self.U1(x, t)

    def dx(self, x, t):
        return -0.5 * self.U1.dx(x, t)

    def dxx(self, x, t):
        return -0.5 * self.U1.dxx(x, t)

    def dt(self, x, t):
        return -0.5 * self.U1.dt(x, t)


class ConstantTerm:
    """A constant S_n = alpha_n; all derivatives vanish."""

    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def __call__(self, x, t):
        return self.value

    def dx(self, x, t):
        return 0.0

    def dxx(self, x, t):
        return 0.0

    def dt(self, x, t):
        return 0.0


@dataclass(frozen=True)
class SAction:
    """Ordered log-density terms (S0, S1, S2, ...) with the expansion strength."""

    terms: tuple
    lam: float
    D: float

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) == 0:
            raise ValueError("SAction requires at least the zeroth-order term")

    @classmethod
    def for_power_law(cls, params: PhysParams, pot: PowerLawPotential) -> "SAction":
        """S0 plus the terminating S1 = -U1/2; higher orders are zero constants."""
        return cls(terms=(S0Term(params.D), FirstOrderTerm(pot)), lam=params.lam, D=params.D)

    def term(self, n: int):
        if n < 0 or n >= len(self.terms):
            raise OrderError(f"order {n} not stored (have orders 0..{len(self.terms) - 1})")
        return self.terms[n]


def effective_potential(U, D: float, point: tuple[float, float]) -> float:
    """The combination (D/2) U'' - U'^2/4 + U_dot/2 driving the log-density PDE."""
    x, t = point
    _check_t(t)
    upp = _term_dxx(U, x, t) if not hasattr(U, "dxx") else U.dxx(x, t)
    up = U.dx(x, t) if hasattr(U, "dx") else _term_dx(U, x, t)
    ud = U.dt(x, t) if hasattr(U, "dt") else _term_dt(U, x, t)
    return 0.5 * D * upp - 0.25 * up * up + 0.5 * ud


def s0(point: tuple[float, float], D: float) -> float:
    """S0(x, t) = -(D/2) ln(4 pi D t) - x^2/(4 t) for t > 0."""
    x, t = point
    _check_t(t)
    return -0.5 * D * math.log(4.0 * math.pi * D * t) - x * x / (4.0 * t)


def hierarchy_residual(n: int, action: SAction, U1, point: tuple[float, float]) -> float:
    """LHS - RHS of the order-n expansion equation at a point.

    Order 1:  S1_dot - [D S1'' - (x/t) S1' + (D/2) U1'' + U1_dot/2]
    Order 2:  S2_dot - [D S2'' - (x/t) S2' + S1'^2 - U1'^2/4]

    Zero (to the derivative floor) for valid similarity solutions.  Only
    n in {1, 2} is supported: the order-2 source cancellation makes every
    higher order structurally identical to order 2.
    """
    if n not in (1, 2):
        raise OrderError(f"hierarchy residual implemented for n in {{1, 2}}, got n={n}")
    x, t = point
    _check_t(t)
    D = action.D
    s1 = action.term(1)
    if n == 1:
        lhs = _term_dt(s1, x, t)
        rhs = (
            D * _term_dxx(s1, x, t)
            - (x / t) * _term_dx(s1, x, t)
            + 0.5 * D * (U1.dxx(x, t) if hasattr(U1, "dxx") else _term_dxx(U1, x, t))
            + 0.5 * (U1.dt(x, t) if hasattr(U1, "dt") else _term_dt(U1, x, t))
        )
        return lhs - rhs
    s2 = action.term(2)
    s1p = _term_dx(s1, x, t)
    u1p = U1.dx(x, t) if hasattr(U1, "dx") else _term_dx(U1, x, t)
    lhs = _term_dt(s2, x, t)
    rhs = (
        D * _term_dxx(s2, x, t)
        - (x / t) * _term_dx(s2, x, t)
        + s1p * s1p
        - 0.25 * u1p * u1p
    )
    return lhs - rhs


def to_schrodinger(W, U, D: float, point: tuple[float, float]) -> float:
    """psi(x, t) = exp{U/(2D)} W(x, t); guards against exponent overflow."""
    x, t = point
    _check_t(t)
    arg = U(x, t) / (2.0 * D)
    if arg > _EXP_GUARD:
        raise RangeError(
            f"exp argument U/(2D) = {arg:.3g} exceeds {_EXP_GUARD} at (x={x}, t={t})"
        )
    return math.exp(arg) * W(x, t)


def schrodinger_residual(psi, U, D: float, point: tuple[float, float]) -> float:
    """psi_dot - D psi'' - (U''/2 - U'^2/(4D) + U_dot/(2D)) psi at a point.

    psi is any evaluable (x, t); its derivatives are taken with 4th-order
    centered differences, so exact solutions leave a residual at the
    derivative floor (~1e-9 for order-one fields).
    """
    x, t = point
    _check_t(t)
    hx = _H_LOOSE * max(1.0, abs(x))
    ht = _H_LOOSE * t
    psi_t = _numdiff.partial_t(psi, x, t, ht)
    psi_xx = _numdiff.partial_xx(psi, x, t, hx)
    upp = U.dxx(x, t) if hasattr(U, "dxx") else _numdiff.partial_xx(U, x, t, hx)
    up = U.dx(x, t) if hasattr(U, "dx") else _numdiff.partial_x(U, x, t, hx)
    ud = U.dt(x, t) if hasattr(U, "dt") else _numdiff.partial_t(U, x, t, ht)
    v = 0.5 * upp - up * up / (4.0 * D) + ud / (2.0 * D)
    return psi_t - D * psi_xx - v * psi(x, t)


def assemble_density(
    action: SAction,
    U1,
    point: tuple[float, float],
    order: int | None = None,
) -> float:
    """W(x, t) = exp{(sum_n lam**n S_n - lam U1/2) / D} at a point.

    ``order`` truncates the stored series; requesting more terms than the
    action stores raises :class:`OrderError`.
    """
    x, t = point
    _check_t(t)
    n_max = len(action.terms) - 1
    if order is None:
        order = n_max
    if order < 0 or order > n_max:
        raise OrderError(f"order {order} not stored (have orders 0..{n_max})")
    s = 0.0
    for k in range(order + 1):
        s += action.lam**k * action.terms[k](x, t)
    s -= action.lam * 0.5 * U1(x, t)
    return math.exp(s / action.D)
