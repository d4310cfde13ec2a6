"""Published reference values the convergence experiments are checked against.

Keyed by per-axis cell count.  Tuples are (l2, max) for the Poisson studies
and (p, u, v) l2 values for the acoustic study at t = 1 with dt = 1e-3.
"""

POISSON_ANNULUS = {
    20: (4.9121e-06, 1.1035e-05),
    40: (2.6965e-07, 4.6489e-07),
    80: (1.5696e-08, 2.3401e-08),
    160: (9.4721e-10, 1.4261e-09),
    320: (5.8135e-11, 8.7943e-11),
}

POISSON_SINUSOIDAL = {
    20: (1.1987e-05, 4.3227e-05),
    40: (8.3285e-07, 3.0574e-06),
    80: (5.4609e-08, 1.9955e-07),
    160: (3.4870e-09, 1.2660e-08),
    320: (2.2011e-10, 7.9526e-10),
}

WAVE_ANNULUS = {
    16: (3.7483e-03, 2.4710e-03, 2.1802e-03),
    32: (3.4178e-04, 1.2705e-04, 1.2136e-04),
    64: (2.3358e-05, 1.2072e-05, 7.3432e-06),
    128: (2.2351e-06, 1.2109e-06, 5.1292e-07),
    256: (2.4048e-07, 1.3654e-07, 3.9980e-08),
}
