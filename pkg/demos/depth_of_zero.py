"""Depth of a zero for M_n = (n!)^2: Taylor bound against -Q(s).

Run with ``python3 demos/depth_of_zero.py``.
"""
from zerodepth.applications import depth_of_zero
from zerodepth.poisson import profile_for
from zerodepth.weights import DCSequence, sequence_weight


def main():
    seq = DCSequence.factorial_power(2.0, n_max=1000)
    prof = profile_for(sequence_weight(seq))
    print("    s      -Q(s)     Taylor bound   Q(s)·s")
    for s in (0.1, 0.03, 0.01, 0.003, 0.001):
        r = depth_of_zero(seq, s, prof=prof)
        print(f"{s:6.3f} {r.logQ_asym:11.4f} {r.taylor_log:12.4f} {r.Q * s:9.5f}")
    print("\nQ(s)·s approaches 2 (φ ≈ 2√t); the Taylor bound stays far weaker.")


if __name__ == "__main__":
    main()
