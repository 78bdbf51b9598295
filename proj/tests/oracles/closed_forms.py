"""Closed-form and quadrature oracles, evaluated with mpmath at 30 digits.

The printed values are frozen into the C++ tests; rerun to regenerate.
"""
import json

import mpmath as mp

mp.mp.dps = 30
pi, s3 = mp.pi, mp.sqrt(3)

unit_area = 2 * pi / 3 - s3 / 2


def lens_area(r):
    # circular segment above the chord, doubled: two segments of half-angle pi/3
    seg = r**2 * (pi / 3 - mp.sin(2 * pi / 3) / 2)
    return 2 * seg


# radius of the unit-mass lens by bisection on the segment formula
r1 = mp.findroot(lambda r: lens_area(r) - 1, (mp.mpf("0.5"), mp.mpf("1.5")), solver="bisect")

mu0 = 2 * mp.sqrt(unit_area)
# 4 pi/3 r - sqrt(3) r for the unit-mass lens
arcs_minus_chord = 4 * pi / 3 * r1 - s3 * r1

# relative perimeter of the lens partition in the window [-3, 3]^2, r = 1
rel_perimeter_r1_w3 = 4 * pi / 3 + 2 * (3 - s3 / 2)

# F_0 - P/2 for L_1
half_perimeter_margin = arcs_minus_chord - mp.mpf(1) / 2 * (4 * pi / 3 * r1)

# int_Q int_Q |x-y|^{-1}, Q unit square, via the difference density
square_a1 = 4 * mp.quad(lambda u, v: (1 - u) * (1 - v) / mp.sqrt(u * u + v * v), [0, 1], [0, 1])
square_closed = 4 * (mp.log(1 + mp.sqrt(2)) - (mp.sqrt(2) - 1) / 3)


def square_riesz(a):
    return 4 * mp.quad(lambda u, v: (1 - u) * (1 - v) * (u * u + v * v) ** (-a / 2), [0, 1], [0, 1])


def sawtooth(s, t):
    d = 2 * mp.sqrt(s * s / 4 + t * t) - s
    a = s * t / 2
    return d, a, d / a**2


out = {
    "lens_radius_m1": mp.nstr(r1, 20),
    "mu0": mp.nstr(mu0, 20),
    "arcs_minus_chord_m1": mp.nstr(arcs_minus_chord, 20),
    "relative_perimeter_r1_w3": mp.nstr(rel_perimeter_r1_w3, 20),
    "half_perimeter_margin_m1": mp.nstr(half_perimeter_margin, 20),
    "square_riesz_a1_quad": mp.nstr(square_a1, 20),
    "square_riesz_a1_closed": mp.nstr(square_closed, 20),
    "square_riesz_a05": mp.nstr(square_riesz(mp.mpf("0.5")), 20),
    "square_riesz_a15": mp.nstr(square_riesz(mp.mpf("1.5")), 20),
    "disk_riesz_a1_continuum": mp.nstr(16 * pi / 3, 20),
    "sawtooth_s1_t0.1": [mp.nstr(v, 20) for v in sawtooth(1, mp.mpf("0.1"))],
    "sawtooth_s1_t0.001": [mp.nstr(v, 20) for v in sawtooth(1, mp.mpf("0.001"))],
    "sawtooth_s2_t0.001": [mp.nstr(v, 20) for v in sawtooth(2, mp.mpf("0.001"))],
}
print(json.dumps(out, indent=2))
