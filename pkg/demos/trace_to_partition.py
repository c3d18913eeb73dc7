"""Walk one n from quadratic forms to the partition number.

For D = 1 - 24n the classes of positive definite forms [a, b, c] with
6 | a and b == 1 (mod 12) biject with the full class group of D, one
class per conductor-f layer.  Averaging P over the CM points of those
classes and dividing by |D| lands exactly on p(n).  This script shows
every intermediate quantity for a small n.
"""

import sys

from singmoduli.oracles import euler_p
from singmoduli.precision import EvalContext, local_prec
from singmoduli.qforms import cm_point
from singmoduli.trace import partition_bo, singular_forms
from singmoduli.modeval import eval_modular


def main(n: int = 10) -> None:
    disc, rows = singular_forms(n)
    print("n = %d, D = %d, %d classes" % (n, disc.D, len(rows)))

    ctx = EvalContext(prec=160)
    total = None
    with local_prec(ctx.prec + 32):
        for (f, Qred, rep, Qn) in rows:
            # scaling a form by f does not move its root, so the CM point
            # of the primitive layer is already the right evaluation point
            tau = cm_point(Qn, ctx.prec)
            val = eval_modular("P", tau, ctx)
            total = val if total is None else total + val
            print("  f=%d  [%4d,%4d,%6d]  coset %-6s  P = % .12f %+.3e i"
                  % (f, Qn.a, Qn.b, Qn.c, rep.label,
                     float(val.val.real), float(val.val.imag)))
        avg_re = total.val.real / (24 * n - 1)
        avg_err = total.err / (24 * n - 1)
    print("trace / (24n-1) = %.15f  (ball radius %.2e)"
          % (float(avg_re), float(avg_err)))

    cert = partition_bo(n)
    print("rounded:  p(%d) = %d   residual %.3e   error bound %.3e"
          % (n, cert.p, cert.residual, cert.err_bound))
    print("recurrence oracle: %d" % euler_p(n)[n])


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
