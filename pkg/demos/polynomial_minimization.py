"""Commutative polynomial minimization as the single-generator case.

min x^4 - x^2 over states of the universal C*-algebra of one selfadjoint
contraction-free variable; declaring 1 - x^2 >= 0 restricts to spectrum in
[-1, 1] and adds a localizing block.  Level 2 is exact here: the objective
is a degree-4 polynomial and the moment matrix covers degree 4.
"""

from pathlib import Path

from starsdp import (
    RelaxationError, build_relaxation, grid_min, parse_problem_file,
)

problem = parse_problem_file(
    str(Path(__file__).resolve().parent.parent / "problems" / "lasserre_x4.csdp"))
pres = problem.presentation

# degree 4 objective needs a degree-2 basis, so level 1 must refuse
try:
    build_relaxation(problem, level=1)
except RelaxationError as e:
    print(f"level 1: {e}\n")

print(f"{'level':>5}  {'basis':>5}  {'blocks':>10}  {'bound':>12}")
for level in (2, 3):
    relax = build_relaxation(problem, level=level)
    sizes = "x".join(str(b.size) for b in relax.model.blocks)
    res = relax.solve()
    print(f"{level:>5}  {len(relax.basis):>5}  {sizes:>10}  {res.bound:>12.8f}")

# compare against a dense grid scan of the true function on [-1, 1]
truth = grid_min(pres, problem.objective, bounds=(-1.0, 1.0), points=20001)
print(f"\ngrid minimum {truth:.8f} (analytic -0.25 at x = +-1/sqrt(2))")

relax = build_relaxation(problem, level=2)
res = relax.solve()
m1 = res.moments[relax.basis[1]]
m2 = res.moments[relax.basis[2]]
print(f"optimal moments: omega(x) = {m1.real:+.6f}, "
      f"omega(x^2) = {m2.real:.6f}")
print("the optimum is a mixture of the two minimizers, so omega(x) vanishes "
      "while omega(x^2) = 1/2")
