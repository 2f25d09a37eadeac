"""Smith normal form, cokernels and abelian Reidemeister numbers."""

from reidemeister import (
    IntMatrix,
    abelian_reidemeister,
    cokernel_structure,
    finite_quotient_count,
    smith_normal_form,
)

M = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
snf = smith_normal_form(M)
print("M =", M)
print("U =", snf.U)
print("V =", snf.V)
print("D =", snf.D, "| U M V == D:", snf.U @ M @ snf.V == snf.D)
print("cokernel:", cokernel_structure(M))

# R(M) on Z^n is |coker(I - M)|, or INFINITE when I - M is singular
for rows in ([[2, 1], [1, 1]], [[-1, 0], [0, -1]], [[1, 3], [0, 1]], [[0, -1, 0], [1, 0, 0], [0, 0, -1]]):
    A = IntMatrix(rows)
    print(f"R({A}) = {abelian_reidemeister(A)}")

# the same count by brute force on (Z/4)^2, which surjects onto coker(I + I)
print("brute force on (Z/4)^2 for -I:", finite_quotient_count([4, 4], IntMatrix([[-1, 0], [0, -1]])))
