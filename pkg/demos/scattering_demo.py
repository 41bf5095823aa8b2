"""Three particles scatter off each other and the wall.

Asymptotic momenta and phases are read off the spectral frame of L at t = 0
and compared with straight-line fits to the integrated trajectory at |t| ~ 20.
"""

import numpy as np

from cn_sutherland import CouplingParams, IntegratorOptions, PhasePoint
from cn_sutherland.scattering import asymptotic_data, dynamical_asymptotics, spectral_frame, theorem3_residual

cp = CouplingParams(0.7, -1.3)
pp = PhasePoint([2.1, 1.2, 0.4], [0.9, -0.3, 0.5])

frame = spectral_frame(pp, cp)
exact = asymptotic_data(frame)
fit, rms = dynamical_asymptotics(pp, cp, 20.0, IntegratorOptions(grid_points=2001))

np.set_printoptions(precision=10)
print("lambda        ", frame.lam)
print("q+ (frame)    ", exact.q_plus)
print("q+ (fit)      ", fit.q_plus)
print("q- (frame)    ", exact.q_minus)
print("q- (fit)      ", fit.q_minus)
print(f"fit rms {rms:.1e}")
print("phase-shift identity residual, frame", theorem3_residual(exact, cp))
print("phase-shift identity residual, fit  ", theorem3_residual(fit, cp))
