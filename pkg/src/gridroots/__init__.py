"""Complete solution censuses of small power flow systems.

Finds every complex solution of the power flow equations for small
networks by total-degree polynomial homotopy continuation, and relates
the observed solution counts to the network's maximal-clique structure
through topology-dependent upper bounds.
"""

from . import bounds, casegen, cliques, harness, homotopy, pfmodel, polysys, \
    reference_cases

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "casegen",
    "cliques",
    "harness",
    "homotopy",
    "pfmodel",
    "polysys",
    "reference_cases",
    "__version__",
]
