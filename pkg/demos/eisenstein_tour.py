"""A walk through the Eisenstein series and its period function.

Run with ``python3 demos/eisenstein_tour.py``. Prints a short table for
each step; every number is recomputed from the library.
"""

import math

from periodlab import autoforms, periodmap
from periodlab.specfun import riemann_zeta


def main():
    s = 1.7 + 0.3j
    print("1. Two evaluations of the Eisenstein series at s =", s)
    for z in (0.1 + 0.9j, -0.3 + 1.4j, 0.45 + 2.0j):
        lat = autoforms.eval_eisenstein_lattice(s, z)
        four = autoforms.eval_eisenstein_fourier(s, z)
        print(f"   z={z}:  lattice {lat:.12f}  fourier {four:.12f}  rel diff {abs(lat - four) / abs(four):.1e}")

    print("\n2. Invariance under z -> -1/z on the unit circle")
    zs = [complex(math.cos(th), math.sin(th)) * 1.02 for th in (0.8, 1.3, 2.0)]
    table = autoforms.modular_invariance_residual(lambda z: autoforms.eval_eisenstein_fourier(s, z), zs)
    print(f"   max relative residual {table['max_rel']:.1e}")

    print("\n3. The period function at s = 2")
    psi = periodmap.eisenstein_psi(2.0)
    print(f"   psi(1) = {psi(1.0).real:.15f},  zeta(3)/pi^2 = {riemann_zeta(3).real / math.pi**2:.15f}")
    for z in (0.6, 1.3 - 0.8j, 2 + 2j):
        print(f"   three-term residual at z={z}: {abs(periodmap.three_term_residual(psi, z)):.1e}")

    print("\n4. Continuation below Re s = 1")
    psi = periodmap.eisenstein_psi(0.75)
    print(f"   evaluator kind: {psi.kind}")
    for z in (0.6, 1.3 - 0.8j):
        print(f"   three-term residual at z={z}: {abs(periodmap.three_term_residual(psi, z)):.1e}")

    print("\n5. Family relation between s and 1 - s, checked coefficientwise")
    for s in (0.3 + 0.4j, 1.8 + 2.5j):
        print(f"   s={s}: max relative residual {autoforms.eisenstein_family_fe_residual(s)['max']:.1e}")


if __name__ == "__main__":
    main()
