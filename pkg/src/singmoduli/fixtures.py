"""Bundled reference data and the loaders for it.

The package computes everything in here from scratch; the bundled copies
pin the conventions (orientation of the coset matrices, the sixth-root
normalization at each cusp, the sign and scale of the level 2 modular
polynomial) so that a regression in the computing code cannot silently
redefine them.  Tests compare both directions.

Files under data/:

  coset_reps.json   the 12 right cosets of the index 12 subgroup, with
                    matrices and cusp widths
  table_even.json   reduced forms of discriminant 1 - 24n whose main
table_odd.json      term has the extremal product a*h = 12, one file per
                    parity of n, with (gamma, h, zeta, phi) per row
  phi2.txt          the classical level 2 modular polynomial
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .qforms import QuadForm

__all__ = [
    "TableRow",
    "coset_table",
    "main_term_rows",
    "phi2_polynomial",
]


def _read_text(name: str) -> str:
    return resources.files("singmoduli").joinpath("data", name).read_text()


# ----------------------------------------------------------------------
# Main-term rows (the a*h = 12 forms)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    """One reduced form [a, b, c(n)] with a*h = 12 and its cusp data.

    c_spec = (p, q, r) encodes c = (p*n + q)/r.  zeta_exp is the exponent
    e in zeta = exp(pi i e/3); phi is the argument of the main term as an
    exact multiple of pi in (-1, 1].
    """

    a: int
    b: int
    c_spec: tuple[int, int, int]
    gamma: str
    h: int
    zeta_exp: int
    phi: Fraction

    def form(self, n: int) -> QuadForm:
        p, q, r = self.c_spec
        num = p * n + q
        if num % r:
            raise ValueError("c specification %s does not divide at n = %d"
                             % ((p, q, r), n))
        Q = QuadForm(self.a, self.b, num // r)
        if Q.disc() != 1 - 24 * n:
            raise AssertionError("fixture row %r has wrong discriminant at n = %d"
                                 % (self, n))
        return Q


def _parse_rows(payload: dict) -> tuple[TableRow, ...]:
    rows = []
    for raw in payload["rows"]:
        rows.append(TableRow(
            a=int(raw["a"]),
            b=int(raw["b"]),
            c_spec=tuple(int(t) for t in raw["c"]),
            gamma=str(raw["gamma"]),
            h=int(raw["h"]),
            zeta_exp=int(raw["zeta_exp"]),
            phi=Fraction(raw["phi"]),
        ))
    return tuple(rows)


_ROW_CACHE: dict[int, tuple[TableRow, ...]] = {}


def main_term_rows(n: int) -> tuple[TableRow, ...]:
    """The a*h = 12 rows for the parity of n (4 rows even, 3 rows odd).

    The form shapes are literal: each row instantiates to the reduced
    representative only once n is large enough that the listed triple is
    actually reduced (n >= 24 covers every row).
    """
    parity = n % 2
    if parity not in _ROW_CACHE:
        name = "table_odd.json" if parity else "table_even.json"
        _ROW_CACHE[parity] = _parse_rows(json.loads(_read_text(name)))
    return _ROW_CACHE[parity]


# ----------------------------------------------------------------------
# Coset table
# ----------------------------------------------------------------------

def coset_table():
    """The bundled coset list: (cusp, index, (p, q, r, s), width) tuples."""
    payload = json.loads(_read_text("coset_reps.json"))
    out = []
    for raw in payload["reps"]:
        out.append((str(raw["cusp"]), int(raw["index"]),
                    tuple(int(t) for t in raw["matrix"]), int(raw["width"])))
    return tuple(out)


# ----------------------------------------------------------------------
# Level 2 modular polynomial
# ----------------------------------------------------------------------

def phi2_polynomial():
    """The classical level 2 polynomial, read from the bundled table."""
    from .masser import load_modular_polynomial
    ref = resources.files("singmoduli").joinpath("data", "phi2.txt")
    with resources.as_file(ref) as path:
        return load_modular_polynomial(path)
