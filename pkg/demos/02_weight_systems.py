"""The sl2 and Conway weight systems on wheels, and the sl2 recursion
checked against brute-force tensor contraction."""

from wsforge.diagrams import wheel
from wsforge.weight_systems import deframed_sl2, eval_conway, eval_sl2, eval_sl2_oracle, mm_coefficients

print(f"{'n':>2}  {'sl2':<28} {'Conway':>6}")
for n in range(2, 9):
    w = wheel(n)
    print(f"{n:>2}  {str(eval_sl2(w)):<28} {str(eval_conway(w)):>6}")

w4 = wheel(4)
print("\ncontraction oracle on w4:", eval_sl2_oracle(w4, seed=1))
print("deframed sl2 on w4:     ", deframed_sl2(w4))
# coefficients of d^k after substituting c = (d^2 - 1) / 2
print("d-expansion on w4:      ", {k: str(v) for k, v in mm_coefficients(w4).items()})
