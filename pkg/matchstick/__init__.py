"""
matchstick - planar maps with unit-length straight edges.
This package provides rotation-system maps, the exact discharging calculus for
5-regular and minimum-degree-5 maps, a matchstick-geometry validator, a numerical
unit-distance embedding solver and a desk-scale search harness.
"""
