"""
Riesz Probability - conditional independence, Markov processes and martingales.

Checkers built on the exact kernel in ``riesz_core``. Each characterization
from the theory is a separate function so the equivalences between them can
be tested rather than assumed.
"""

from .independence import (
    IndependenceVerdict,
    bands_independent,
    family_independent,
    independent_via_condexp,
    independent_via_range_agreement,
    independent_wrt_S,
    self_independent_projections,
    sequence_independent,
    subspaces_independent,
)
from .markov import (
    MarkovReport,
    Process,
    chapman_kolmogorov,
    history_condexp,
    is_markov,
    markov_equivalence,
    markov_operator_form,
    rao_ii,
    rao_iii,
)
from .processes import (
    BrownianProcess,
    ProductSpace,
    is_martingale,
    partial_sums,
    product_space,
    rademacher_walk,
    verify_brownian,
)

__all__ = [
    "BrownianProcess",
    "IndependenceVerdict",
    "MarkovReport",
    "Process",
    "ProductSpace",
    "bands_independent",
    "chapman_kolmogorov",
    "family_independent",
    "history_condexp",
    "independent_via_condexp",
    "independent_via_range_agreement",
    "independent_wrt_S",
    "is_markov",
    "is_martingale",
    "markov_equivalence",
    "markov_operator_form",
    "partial_sums",
    "product_space",
    "rademacher_walk",
    "rao_ii",
    "rao_iii",
    "self_independent_projections",
    "sequence_independent",
    "subspaces_independent",
    "verify_brownian",
]
