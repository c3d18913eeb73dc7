"""Build the class polynomials for a few discriminants and factor one.

Hhat_D is monic of degree h(D) with algebraic-integer roots P(tau_Q);
clearing denominators by |D| per coefficient makes it an integer
polynomial, which the certificates below show is irreducible.  At
n = 24 the discriminant -575 = -23 * 25 picks up conductor 5, and H
splits as the predicted two-factor product.
"""

from fractions import Fraction

from singmoduli.polyops import irreducible_over_Q, perfect_power_structure
from singmoduli.qforms import class_number
from singmoduli.trace import assemble_H, build_Hhat


def show(n: int) -> None:
    D = 1 - 24 * n
    hhat = build_Hhat(D)
    e, base = perfect_power_structure([Fraction(w) for w in hhat.scaled])
    cert = irreducible_over_Q(base)
    print("n=%-3d D=%-6d degree %d (h=%d)  power exponent %d  %s via %s"
          % (n, D, hhat.h, class_number(D), e,
             "irreducible" if cert else "REDUCIBLE", cert.method))
    if hhat.h <= 5:
        print("   scaled coefficients:", list(hhat.scaled))


def factorization_demo() -> None:
    D = -575
    H = assemble_H(D)
    print("\nD = %d: H has degree %d, conductor layers %s"
          % (D, H.degree, [f for (f, _e, _p) in H.factors]))

    inner = build_Hhat(-23)
    outer = build_Hhat(-575)
    # eps(5) = -1, h(-23) = 3: H(x) = Hhat_{-575}(x) * (-1)^3 * Hhat_{-23}(-x)
    twisted = [(-1) ** 3 * c * (-1) ** (inner.h - k)
               for k, c in enumerate(inner.coeffs)]
    prod = [Fraction(0)] * (outer.h + inner.h + 1)
    for i, a in enumerate(outer.coeffs):
        for j, b in enumerate(twisted):
            prod[i + j] += a * b
    match = tuple(prod) == H.coeffs
    print("two-factor product reproduces H exactly: %s" % match)


def main() -> None:
    for n in (1, 2, 3, 5, 8):
        show(n)
    factorization_demo()


if __name__ == "__main__":
    main()
