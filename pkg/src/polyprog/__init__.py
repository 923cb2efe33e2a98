"""Toolkit for integral polynomial progressions.

Decides homogeneity, reparametrization stability, and per-index algebraic
complexity of progressions (x, x+P_1(y), ..., x+P_t(y)) by exact rational
linear algebra, and verifies the finitary and dynamical consequences at desk
scale: uniformity-norm control, progression counts against linear models,
popular common differences, and orbit closures of torus systems driven by
unipotent affine maps.
"""

__version__ = "0.1.0"
