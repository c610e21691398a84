"""Transfer-operator eigenvalues along the critical line.

Run with ``python3 demos/transfer_scan.py``. Shows the Gauss-Kuzmin-Wirsing
spectrum at s = 1, then scans two windows of Re s = 1/2 for eigenvalues
crossing -1 and +1 and refines them at two basis sizes. The default sizes
take under two minutes on one core; ``--quick`` runs N = 28 only.
"""

import sys

from periodlab import transfer
from periodlab.errors import NoConvergence


def main(sizes=((28, 36), (64, 72), (80, 88))):
    pairs = transfer.eigen_spectrum(transfer.build_transfer_matrix(1.0, 32))
    print("Leading eigenvalues at s = 1, N = 32:")
    for lam, _ in pairs[:4]:
        print(f"   {lam.real:+.15f}")

    for t_lo, t_hi, sign in ((9.3, 9.8, -1), (13.5, 14.0, +1)):
        print(f"\nWindow t in [{t_lo}, {t_hi}], eigenvalue {sign:+d}")
        for N, N2 in sizes:
            brackets = transfer.scan_critical_line(t_lo, t_hi, 0.05, N, sign)
            for b in brackets:
                try:
                    c = transfer.refine_crossing(b, N)
                    c2 = transfer.refine_crossing(b, N2)
                except NoConvergence as exc:
                    print(f"   N={N}: bracket [{b.t_lo:.2f}, {b.t_hi:.2f}] not refined ({exc})")
                    continue
                r = c.residuals
                print(f"   N={N}: t* = {c.t_star:.12f}  (N={N2}: {c2.t_star:.12f})  "
                      f"three-term {r['three_term']:.1e}  psi(1) {r['psi_at_one']:.1e}  parity {r['parity']:.1e}")


if __name__ == "__main__":
    main(((28, 36),) if "--quick" in sys.argv else ((28, 36), (64, 72), (80, 88)))
