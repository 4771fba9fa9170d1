"""Exact q-series tools for Nahm sums, their duals, Bailey pairs and eta quotients."""

from .series import INF, InsufficientOrder, QExp, SeriesError, agrees, first_difference, monomial
from .products import EtaQuotient, PochSpec, eta_expand, poch
from .nahm import ModularQuadruple, ModularTriple, dual_quadruple, dual_triple, gnahm_expand, nahm_expand
from .bailey import apply_transform, builtin_pair, verify_pair
from .expr import eval_expr
from .catalog import IdentityRecord, builtin_catalog, run_catalog, verify_identity
from .eta_fit import classify, fit_eta

__version__ = "0.1.0"
