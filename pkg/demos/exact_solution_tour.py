"""Tour of the closed-form self-similar solution layer.

Prints, for a few exponents m: the derived constants, quadrature checks of
unit mass, the self-similar rescaling identity, the fourth-moment finiteness
threshold, and the initial-trace convergence ∫γ(x)u(t,x)dx → γ(0) as t → 0.
Everything here is deterministic closed-form/quadrature work; it runs in
about a second.

Run:  python3 demos/exact_solution_tour.py
"""

import numpy as np

from fastdiff import (
    barenblatt_density,
    derive_params,
    fourth_moment,
    mass_quadrature,
    test_function_integral,
)


def main() -> None:
    print("derived constants:")
    print(f"  {'m':>5} {'alpha':>8} {'ktilde':>8} {'bigI':>8} {'bigD':>8}")
    for m in (0.3, 0.5, 0.7, 0.9):
        p = derive_params(m)
        print(f"  {m:>5.2f} {p.alpha:>8.4f} {p.ktilde:>8.4f} {p.bigI:>8.4f} {p.bigD:>8.4f}")

    print("\nunit mass (quadrature of the density over the real line):")
    for m in (0.3, 0.5, 0.7, 0.9):
        p = derive_params(m)
        errs = [abs(mass_quadrature(p, t) - 1.0) for t in (0.25, 1.0, 2.0)]
        print(f"  m={m}: worst |mass - 1| = {max(errs):.2e}")

    print("\nself-similar rescaling  lam^alpha * u(lam*t, lam^alpha * x) = u(t, x):")
    x = np.linspace(-6.0, 6.0, 13)
    for m in (0.3, 0.7):
        p = derive_params(m)
        worst = 0.0
        for lam in (0.5, 2.0, 10.0):
            lhs = lam**p.alpha * barenblatt_density(p, lam * 1.0, lam**p.alpha * x)
            rhs = barenblatt_density(p, 1.0, x)
            worst = max(worst, float(np.max(np.abs(lhs / rhs - 1.0))))
        print(f"  m={m}: worst relative identity error = {worst:.2e}")

    print("\nfourth moment of u(1, .): finite exactly when m > 3/5:")
    for m in (0.5, 0.61, 0.7, 0.9):
        fm = fourth_moment(derive_params(m), 1.0)
        shown = f"{fm.value:.4f}" if fm.finite else "divergent (heavy tail)"
        print(f"  m={m}: {shown}")

    print("\ninitial trace: integral of cos(x) u(t, x) dx -> cos(0) = 1 as t -> 0:")
    p = derive_params(0.5)
    for t in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
        v = test_function_integral(p, np.cos, t)
        print(f"  t={t:<6g} trace={v:.12f}   |trace - 1| = {abs(v - 1):.3e}")


if __name__ == "__main__":
    main()
