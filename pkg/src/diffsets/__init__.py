"""Generalized difference sets and autocorrelation integrals.

Exact representation-count certificates over Z and finite abelian groups,
number-theoretic constructions (shifted parabolas, cyclic lifts, blow-ups,
random models with Chernoff validation), an exact bridge between sets and
nonnegative step functions, and desk-scale exhaustive extremal search.
"""

from .core_sets import (
    BoundsLedger,
    CertificateError,
    GroupSpec,
    GroupSubset,
    IntSet,
    RepProfile,
    TrivialBounds,
    Verdict,
    group_rep_profile,
    rep_diff_profile,
    rep_sum_profile,
    trivial_bounds,
    verify_certificate,
)

__version__ = "0.1.0"
