"""Majorant log M(ξ) = ξ^-β: numeric Q(s) against the closed form.

Run with ``python3 demos/majorant_round_trip.py``.
"""
import math

from zerodepth.applications import ls_majorant, majorant_profile
from zerodepth.weights import Majorant, check_conditions


def closed_q(beta, s):
    a = beta / (beta + 1)
    c = (beta + 1) * beta ** -a / math.cos(math.pi * a / 2)
    ys = (c * a / s) ** (1 / (1 - a))
    return c * ys ** a * (1 - a)


def main():
    for beta in (0.5, 1.0, 2.0):
        maj = Majorant.inv_power(beta)
        cond = check_conditions(maj)
        prof = majorant_profile(maj)
        print(f"beta={beta}: " + ", ".join(f"{c}={v.verdict}" for c, v in cond.verdicts.items()))
        for s in (1e-1, 1e-2, 1e-3):
            r = ls_majorant(maj, s, prof=prof, conditions=cond)
            lo, hi = r.Qstar_sandwich
            print(f"  s={s:6.0e}  Q={r.logMstar_asym:14.6f}  closed={closed_q(beta, s):14.6f}"
                  f"  Q* in [{lo:.4f}, {hi:.4f}]: {r.ordered}")


if __name__ == "__main__":
    main()
