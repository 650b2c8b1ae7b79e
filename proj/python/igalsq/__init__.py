"""Least-squares isogeometric collocation.

Thin layer over the compiled ``_core`` module: matrices come back as CSR
dicts (data, indices, indptr, shape); ``as_scipy`` turns them into
``scipy.sparse.csr_matrix`` when SciPy is installed.
"""

from ._core import (
    ConfigError,
    DimensionMismatchError,
    DomainError,
    NonConvergenceError,
    NumericalError,
    RankDeficiencyError,
    SingularMapError,
    assemble,
    bspline_basis,
    cg_points,
    collocation_points,
    echo_config,
    fit_exponential,
    fit_power,
    greville_abscissae,
    greville_points,
    knot_vector,
    num_basis,
    reference_law,
    reference_law_names,
    regime_boundary,
    sc_points,
    solve,
    sweep,
)
from ._core import singular_extremes as _singular_extremes

__version__ = "0.1.0"


def as_scipy(csr):
    """CSR dict -> scipy.sparse.csr_matrix."""
    from scipy.sparse import csr_matrix

    return csr_matrix((csr["data"], csr["indices"], csr["indptr"]), shape=csr["shape"])


def singular_extremes(matrix, **options):
    """sigma_max, sigma_min and cond of a CSR dict or any scipy sparse matrix."""
    if isinstance(matrix, dict):
        csr = matrix
    else:
        m = matrix.tocsr()
        m.sort_indices()
        csr = {"data": m.data, "indices": m.indices, "indptr": m.indptr, "shape": m.shape}
    return _singular_extremes(csr["data"], csr["indices"], csr["indptr"], tuple(csr["shape"]), **options)
