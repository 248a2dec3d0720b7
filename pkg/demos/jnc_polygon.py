"""Outer polygon of a joint numerical cone slice.

For the CHSH problem we sample support values of the pair
(omega(F0), omega(1)) over the level-1 relaxed cone.  Since omega(1) = 1
under normalization, the slice is the value interval of F0 embedded at
height 1: the polygon collapses onto [-2*sqrt(2), 2*sqrt(2)] x {1}.

The CLI equivalent writes the same data as CSV:
    starsdp jnc problems/chsh.csdp --pair F0,1 --directions 16
"""

import math
from pathlib import Path

from starsdp import jnc_family, jnc_support, parse_problem_file

problem = parse_problem_file(
    str(Path(__file__).resolve().parent.parent / "problems" / "chsh.csdp"))
fam = dict(jnc_family(problem))
F0, unit = fam["F0"], fam["1"]

K = 12
print(f"{'angle':>8}  {'direction':>18}  {'support':>10}")
supports = []
for k in range(K):
    theta = 2 * math.pi * k / K
    ux, uy = math.cos(theta), math.sin(theta)
    # support function h(u) = max u.(x, y) = -min of the negated combination
    res = jnc_support(problem, [(F0, -ux), (unit, -uy)], level=1)
    h = -res.bound
    supports.append((ux, uy, h))
    print(f"{theta:>8.4f}  ({ux:>+7.4f}, {uy:>+7.4f})  {h:>10.6f}")

print("\npolygon vertices (consecutive support-line intersections):")
for k in range(K):
    x1, y1, h1 = supports[k]
    x2, y2, h2 = supports[(k + 1) % K]
    det = x1 * y2 - y1 * x2
    if abs(det) < 1e-12:
        continue
    vx = (h1 * y2 - h2 * y1) / det
    vy = (x1 * h2 - x2 * h1) / det
    print(f"  ({vx:+10.6f}, {vy:+10.6f})")

print(f"\nexpected extreme points: (+-{2 * math.sqrt(2):.6f}, 1)")
