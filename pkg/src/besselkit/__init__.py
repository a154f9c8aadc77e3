"""Exhaustive verifier for the coset combinatorics behind Bessel-model support.

The package enumerates parabolic double cosets of signed-permutation Weyl
groups, classifies every coset through the obstruction calculus, factors
Weyl elements into Langlands chains, and cross-checks the key identities in
an exact matrix realization (rationals, quadratic extensions, prime fields).
"""

from .core import (BesselDatum, GroupDatum, GroupKind, LeviDatum, RangeError,
                   make_config, whittaker_config)
from .roots import Root, RootKind, act, bessel_X, positive_roots, sigma_P_plus, simple_roots
from .support import (CaseTag, ClassificationGap, LEMMA_IDS, SupportVerdict,
                      classify, verify_lemma, verify_lemmas)
from .weyl import (CapExceeded, CosetNormalForm, MixedGroup, SignedPerm, compose,
                   coset_reps, enumerate_weyl, identity, in_levi_weyl, inverse,
                   normal_form, w0_maximal)

__version__ = "0.1.0"

__all__ = [
    "BesselDatum", "CapExceeded", "CaseTag", "ClassificationGap",
    "CosetNormalForm", "GroupDatum", "GroupKind", "LEMMA_IDS", "LeviDatum",
    "MixedGroup", "RangeError", "Root", "RootKind", "SignedPerm",
    "SupportVerdict", "act", "bessel_X", "classify", "compose", "coset_reps",
    "enumerate_weyl", "identity", "in_levi_weyl", "inverse", "make_config",
    "normal_form", "positive_roots", "sigma_P_plus", "simple_roots",
    "verify_lemma", "verify_lemmas", "w0_maximal", "whittaker_config",
]
