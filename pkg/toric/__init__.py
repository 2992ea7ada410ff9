"""Numerical irrational toric geometry: cones and fans, point configurations, toric varieties and their degenerations."""
