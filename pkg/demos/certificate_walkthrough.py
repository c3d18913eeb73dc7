"""Recompute the analytic certificates and probe where they get tight.

Three claims are checked numerically here: the uniform remainder constant
kappa dominates the tail of every slashed expansion, the dominant cusp
term at a*h = 12 outruns all others by more than 2*kappa once n >= 54,
and the winding sectors of the four dominant terms never overlap.  The
script also shows the n = 53 near-miss that forces the cutoff.
"""

from singmoduli import bounds


def main() -> None:
    cert = bounds.kappa_certificate()
    print("kappa upper bound %.6f  (claimed %s, %d terms, tail %.2e)"
          % (cert.upper, cert.claimed, cert.terms, cert.tail))

    for n in (53, 54, 100):
        rep = bounds.separation_report(n)
        print("n=%-4d gap %.1f vs 2k=%.1f %-5s angle %.6f rad "
              "(margin %+.6f) sector %s"
              % (n, rep.min_gap, 2 * rep.kappa, rep.gap_ok,
                 rep.angle, rep.angle_margin, rep.sector_ok))

    sweep = bounds.separation_range(54, 200)
    print("sweep 54..200: %d checked, failures %s, worst angle margin %+.6f,"
          " min gap / 2k = %.2f"
          % (sweep.checked, list(sweep.failures), sweep.worst_angle_margin,
             sweep.min_gap_over_2kappa))

    report = bounds.remainder_report()
    peak = max(report.probes, key=lambda p: p.abs_remainder)
    print("remainder probes: %d points, worst |E| = %.2f at coset %s "
          "near %s (kappa %.2f)"
          % (len(report.probes), report.worst, peak.gamma,
             peak.where, report.kappa))


if __name__ == "__main__":
    main()
