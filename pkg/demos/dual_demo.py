"""Action-angle duality: the scattering data of a Sutherland configuration
define a dual Lax matrix whose trace Hamiltonian equals the Sutherland
energy-like quantity sum cosh(2 q)."""

import numpy as np

from cn_sutherland import CouplingParams, PhasePoint
from cn_sutherland import matrixkit as mk
from cn_sutherland.dual import (
    build_dual_lax,
    dual_consistency_residual,
    dual_coordinates,
    rsvd_hamiltonian,
    rsvd_hamiltonian_trace,
)

cp = CouplingParams(1.1, 0.4)
pp = PhasePoint([1.9, 0.8], [0.6, -0.2])

dc = dual_coordinates(pp, cp)
A = build_dual_lax(dc, cp)
print("lambda", dc.lam, "theta", dc.theta)
print(f"det A - 1            {abs(mk.determinant(A) - 1):.1e}")
print(f"consistency residual {dual_consistency_residual(pp, cp, relative=True):.1e}")
print(f"H closed form        {rsvd_hamiltonian(dc, cp):.14f}")
print(f"H trace form         {rsvd_hamiltonian_trace(A):.14f}")
print(f"sum cosh(2q)         {np.cosh(2 * pp.q).sum():.14f}")
