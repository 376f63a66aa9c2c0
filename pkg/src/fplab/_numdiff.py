"""Fourth-order centered finite differences for scalar fields of (x, t)."""

from __future__ import annotations


def d1(f, x: float, h: float) -> float:
    """First derivative, 4th-order centered stencil."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h)


def d2(f, x: float, h: float) -> float:
    """Second derivative, 4th-order centered stencil."""
    return (
        -f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)
    ) / (12.0 * h * h)


def partial_x(g, x: float, t: float, h: float) -> float:
    return d1(lambda s: g(s, t), x, h)


def partial_xx(g, x: float, t: float, h: float) -> float:
    return d2(lambda s: g(s, t), x, h)


def partial_t(g, x: float, t: float, h: float) -> float:
    return d1(lambda s: g(x, s), t, h)
