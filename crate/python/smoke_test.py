"""Smoke test for the ulamfloat extension module.

Build and install first:  pip install ./crates/python
"""

import math

import ulamfloat as uf

square = uf.Body.polytope([[0, 0], [1, 0], [1, 1], [0, 1]])
assert square.dim == 2 and abs(square.volume - 1.0) < 1e-14

d, bary = uf.cap_cut(square, [1, 0], 0.1)
assert abs(d - 0.9) < 1e-12
assert abs(bary[0] - 0.95) < 1e-12 and abs(bary[1] - 0.5) < 1e-12

disc = uf.Body.ball([0, 0], 1.0)
h, x = uf.ulam_support(disc, [0, 1], 0.01)
assert 0.9 < h < 1.0 and abs(x[0]) < 1e-12

m = uf.ulam_body(square, 0.05, directions=64)
lo, hi = m["volume"]
assert lo <= hi < 1.0 and len(m["support"]) == 64

w = uf.Weight.gaussian(square.barycenter, 1.0)
r = uf.sandwich_check(square, 0.02 * uf.total_mass(square, w), directions=64, weight=w)
assert r["holds"], r

r = uf.symmetry_check(square.normalized(), 0.2, directions=16)
assert r["holds"], r

assert abs(uf.asa_p(disc, 1.0) - 2 * math.pi) < 1e-9
assert abs(uf.shrinkage_constant(2) - 0.393111) < 1e-6
assert uf.ball_shrinkage(2, 1.0, 1e-4) > 0

grad, jac = uf.cap_gradients(uf.Body.ball([0, 0, 0], 1.0), [0, 0, 2])
assert abs(grad[2] - 3 * math.pi / 16) < 1e-12

angles, everywhere = uf.equilibria(square.normalized(), 0.5, resolution=1024)
assert not everywhere and len(angles) == 8

try:
    uf.Body.ball([0, 0], -1.0)
except ValueError as e:
    assert "radius" in str(e)
else:
    raise AssertionError("negative radius accepted")

print("smoke test ok")
