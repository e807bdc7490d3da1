"""Print the q -> 1 convergence of the q-Euler functions to the Euler function.

Run with ``python demos/confluence.py``.
"""

import math

from qsummation.euler_qlt1 import confluence_sweep_lt1, euler_classical
from qsummation.qsum_gt1 import confluence_sweep_gt1, stokes_jump
from qsummation.qcore import QParam, SurfacePoint


def main():
    x = 1.0
    print(f"Euler function at x = {x}: {euler_classical(x).value.real:.15f}")
    print("\nq < 1, convergent q-Euler function")
    print(f"{'q':>8} {'error':>12}")
    for row in confluence_sweep_lt1(x, [0.9, 0.99, 0.999]):
        print(f"{row['q']:8.3f} {row['error']:12.3e}")
    print("\nq > 1, continuous and discrete sums of the divergent series")
    print(f"{'q':>8} {'ray error':>12} {'spiral error':>14}")
    for row in confluence_sweep_gt1(x, [1.1, 1.01, 1.001]):
        print(f"{row['q']:8.3f} {row['ray_error']:12.3e} {row['spiral_error']:14.3e}")
    print("\nStokes jump across the negative axis, q = 2")
    for arg in (-0.5, -math.pi / 2, -3.0):
        chk = stokes_jump(QParam(2.0), SurfacePoint(0.4, arg))
        print(f"  arg x = {arg:6.3f}: |jump| = {abs(chk.lhs):.6f}, residual {chk.residual:.1e}")


if __name__ == "__main__":
    main()
