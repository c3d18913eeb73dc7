"""Partition numbers as traces of singular moduli.

The weight-zero non-holomorphic modular function P on Gamma0(6), averaged
over the CM points of discriminant 1 - 24n, equals (24n - 1) p(n).  This
package evaluates P rigorously with ball arithmetic, assembles the exact
class polynomials attached to those CM points, certifies their
irreducibility, and bounds the cusp asymptotics that make the trace
formula effective.
"""

from .bounds import (
    DominationReport,
    KappaCertificate,
    RemainderReport,
    SeparationReport,
    SeparationSweep,
    ah_products,
    coefficient_domination,
    exact_poincare_coeff,
    kappa_certificate,
    kappa_claim,
    main_term,
    poincare_coeff_bound,
    remainder_report,
    remainder_value,
    separation_range,
    separation_report,
)
from .fixtures import TableRow, coset_table, main_term_rows, phi2_polynomial
from .masser import (
    ModularPolynomial,
    eval_MD,
    load_modular_polynomial,
    masser_C,
    modular_polynomial,
    psi_index,
    save_modular_polynomial,
)
from .modeval import (
    QSeries,
    atkin_lehner_sign,
    cusp_expansion_F,
    eval_F,
    eval_P_qseries,
    eval_atomic,
    eval_modular,
    f_coefficient,
    f_coefficients,
)
from .oracles import (
    PartitionTable,
    euler_p,
    hardy_ramanujan_asymptotic,
    rademacher_p,
)
from .polyops import (
    IrreducibilityCertificate,
    irreducible_over_Q,
    perfect_power_structure,
    recognize_integer_polynomial,
)
from .precision import (
    BigComplex,
    EvalContext,
    PoleProximityError,
    PrecisionError,
    local_prec,
)
from .qforms import (
    CosetRep,
    CuspData,
    Discriminant,
    QuadForm,
    class_number,
    cm_point,
    coset_assign,
    cusp_invariants,
    enumerate_primitive_reduced,
    gamma06_representatives,
    reduce,
)
from .trace import (
    HhatPolynomial,
    HPolynomial,
    PartitionCertificate,
    assemble_H,
    build_Hhat,
    default_prec,
    eps_conductor,
    partition_bo,
    singular_forms,
    trace_P,
)

__version__ = "0.1.0"

__all__ = [
    "BigComplex",
    "CosetRep",
    "CuspData",
    "Discriminant",
    "DominationReport",
    "EvalContext",
    "HPolynomial",
    "HhatPolynomial",
    "IrreducibilityCertificate",
    "KappaCertificate",
    "ModularPolynomial",
    "PartitionCertificate",
    "PartitionTable",
    "PoleProximityError",
    "PrecisionError",
    "QSeries",
    "QuadForm",
    "RemainderReport",
    "SeparationReport",
    "SeparationSweep",
    "TableRow",
    "ah_products",
    "assemble_H",
    "atkin_lehner_sign",
    "build_Hhat",
    "class_number",
    "cm_point",
    "coefficient_domination",
    "coset_assign",
    "coset_table",
    "cusp_expansion_F",
    "cusp_invariants",
    "default_prec",
    "enumerate_primitive_reduced",
    "eps_conductor",
    "euler_p",
    "eval_F",
    "eval_MD",
    "eval_P_qseries",
    "eval_atomic",
    "eval_modular",
    "exact_poincare_coeff",
    "f_coefficient",
    "f_coefficients",
    "gamma06_representatives",
    "hardy_ramanujan_asymptotic",
    "irreducible_over_Q",
    "kappa_certificate",
    "kappa_claim",
    "load_modular_polynomial",
    "local_prec",
    "main_term",
    "main_term_rows",
    "masser_C",
    "modular_polynomial",
    "partition_bo",
    "perfect_power_structure",
    "phi2_polynomial",
    "poincare_coeff_bound",
    "psi_index",
    "rademacher_p",
    "recognize_integer_polynomial",
    "reduce",
    "remainder_report",
    "remainder_value",
    "save_modular_polynomial",
    "separation_range",
    "separation_report",
    "singular_forms",
    "trace_P",
]
