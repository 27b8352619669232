"""Built-in demonstration systems."""

from __future__ import annotations

from .poly_ir import Monomial, PolynomialSystem

__all__ = ["logistic", "lorenz", "linear_growth", "rigid_rotation"]


def logistic() -> PolynomialSystem:
    """dx1/dt = x1 - x1^2, the logistic equation with unit rate and capacity."""
    return PolynomialSystem(
        n_vars=1,
        equations=((Monomial(1.0, (1,)), Monomial(-1.0, (2,))),),
    )


def lorenz(sigma: float = 10.0, rho: float = 28.0, beta: float = 8.0 / 3.0) -> PolynomialSystem:
    """The Lorenz system.

    dx1/dt = sigma (x2 - x1)
    dx2/dt = x1 (rho - x3) - x2
    dx3/dt = x1 x2 - beta x3
    """
    return PolynomialSystem(
        n_vars=3,
        equations=(
            (Monomial(sigma, (0, 1, 0)), Monomial(-sigma, (1, 0, 0))),
            (
                Monomial(rho, (1, 0, 0)),
                Monomial(-1.0, (1, 0, 1)),
                Monomial(-1.0, (0, 1, 0)),
            ),
            (Monomial(1.0, (1, 1, 0)), Monomial(-beta, (0, 0, 1))),
        ),
    )


def linear_growth(lam: float = 1.0) -> PolynomialSystem:
    """dx1/dt = lam * x1."""
    return PolynomialSystem(n_vars=1, equations=((Monomial(lam, (1,)),),))


def rigid_rotation() -> PolynomialSystem:
    """A rotation in the (x1, x2) plane at rate x3^2; already norm-preserving.

    dx1/dt = x2 x3^2, dx2/dt = -x1 x3^2, dx3/dt = 0, so G(x) . x = 0
    identically.
    """
    return PolynomialSystem(
        n_vars=3,
        equations=(
            (Monomial(1.0, (0, 1, 2)),),
            (Monomial(-1.0, (1, 0, 2)),),
            (),
        ),
    )
