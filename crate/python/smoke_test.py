"""Quick check of the pyaffdisc extension module."""
import math
import os
import tempfile

import pyaffdisc as ad

disc = ad.Body.disc(1.0)
assert abs(disc.area - math.pi) < 1e-12
assert abs(disc.perimeter - 2 * math.pi) < 1e-12
assert abs(ad.ft(disc, 0.0, 0.0) - math.pi) < 1e-9

sq = ad.Body.parse("square")
l, s = sq.diameters()
assert abs(l - math.sqrt(2)) < 1e-12 and abs(s - 1) < 1e-12
assert abs(sq.psi - math.pi / 2) < 1e-12
assert abs(sq.chord(0.0, 0.25) - 1.0) < 1e-12
assert ad.Body.from_json(sq.to_json()).area == sq.area

c = ad.Body.intermediate(math.pi / 2, 2.0)
vals = ad.dilation_avg_sq(c, 0.3, [10.0, 40.0])
assert len(vals) == 2 and vals[1] < vals[0]

p = ad.PointSet.rotated_lattice(32)
assert len(p) == 32
assert abs(p.exp_sum(0, 0) - 32) < 1e-12
assert len(ad.PointSet.compose(100)) == 100
lhs, rhs, ok = ad.cassels_montgomery(ad.PointSet.square_lattice(6), (16.0, 16.0), (1.0, 1.0))
assert ok and lhs >= rhs

body = ad.Body.disc().normalized_for_torus()
pts = ad.PointSet.square_lattice(4)
with tempfile.TemporaryDirectory() as tmp:
    table = ad.WeightTable(body, 0.0, 2 * math.pi, 64.0, angle_step=0.2)
    path = os.path.join(tmp, "w.csv")
    table.save_csv(path)
    again = ad.WeightTable.load_csv(path)
    assert again.weight(10.0, 0.5) == table.weight(10.0, 0.5)
r = pts.truncation_radius(16.0)
par = ad.d2_parseval(pts, body, 0.0, 2 * math.pi, min(r, 64.0), table)
mc = ad.d2_montecarlo(pts, body, 0.0, 2 * math.pi, 20000, 3)
assert par["method"] == "parseval" and mc["method"] == "montecarlo"
assert abs(par["value"] - mc["value"]) <= 3 * (mc["stderr"] + par["tail"])

try:
    ad.Body.parse("nonsense")
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")

print("pyaffdisc smoke test ok:", round(par["value"], 6), round(mc["value"], 6))
