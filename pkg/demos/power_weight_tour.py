"""Walk a power weight φ(t) = |t|^α through every stage of the pipeline.

Run with ``python3 demos/power_weight_tour.py [alpha]``.
"""
import math
import sys

from zerodepth.laplace import laplace_asymptotic, laplace_oracle
from zerodepth.legendre import identity_check, legendre_point
from zerodepth.poisson import profile_for
from zerodepth.transforms import ComplexLogW, fourier_inverse_oracle, rho_bounds
from zerodepth.weights import PowerWeight, check_conditions


def main(alpha=0.5):
    w = PowerWeight(alpha)
    prof = profile_for(w)
    sec = 1 / math.cos(math.pi * alpha / 2)
    print(f"weight {w.describe()}")
    print("conditions:", ", ".join(f"{c}={v.verdict}" for c, v in check_conditions(w).verdicts.items()))

    print("\n     y          q(y)    closed form")
    for y in (1.0, 10.0, 1e3, 1e6):
        print(f"{y:8.0e} {prof.q(y):14.8f} {sec * y ** alpha:14.8f}")

    y = 1e3
    chk = identity_check(prof, y)
    print(f"\nq - y q' at y={y:g}: {chk.lhs:.8g} (integral form {chk.rhs:.8g}, "
          f"lower bound {chk.lo:.4g}, upper bound {chk.hi:.4g})")

    clw = ComplexLogW(prof)
    print("\n   s        y_s          Q      Laplace ratio-1   Fourier log|.|  -Q + ½log Q''")
    for s in (1e-1, 1e-2, 1e-3):
        pt = legendre_point(prof, s, y_cap=1e30)
        lap = laplace_oracle(prof, 0.0, s, point=pt) if pt.y_s >= 10 else None
        r1 = f"{lap.ratio_minus_1():+.3e}" if lap else "   (y_s < 10)"
        four = fourier_inverse_oracle(clw, math.inf, s)
        print(f"{s:6.0e} {pt.y_s:12.5g} {pt.Q:10.5g}   {r1:>15}   "
              f"{four.value.log_abs:12.6f}  {rho_bounds(prof, math.inf, s).asym_log:12.6f}")
    print(f"\nlog N(0.01) asymptotic: {laplace_asymptotic(prof, 0, 0.01).log_abs:.6f}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 0.5)
