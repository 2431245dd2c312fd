"""Cubic B-spline bases with second-order difference penalties (P-splines).

The penalty acts on divided differences at the Greville abscissae, so a fully
penalized term is a straight line in x whatever the knot spacing.
"""
import logging

import numpy as np
from scipy.interpolate import BSpline

from src.conf import messages
from src.conf.config import config
from src.entity.models import BasisBlock
from src.services.errors import BasisError, NotConvergedError

logger = logging.getLogger(__name__)

DEGREE = 3


def place_knots(values: np.ndarray, K: int) -> np.ndarray:
    """Full knot vector for K cubic B-splines on the range of ``values``.

    Interior knots sit at quantiles of the values (of the distinct values when ties
    collapse them); three knots are added beyond each boundary at the spacing of
    the adjacent interior interval.

    :param values: Observed covariate values.
    :type values: np.ndarray
    :param K: Basis dimension.
    :type K: int
    :return: Knot vector of length K + 4.
    :rtype: np.ndarray
    """
    lo, hi = float(values.min()), float(values.max())
    n_interior = K - 4
    probs = np.arange(1, n_interior + 1) / (n_interior + 1)
    interior = np.quantile(values, probs)
    if n_interior and (np.any(np.diff(interior) <= 0) or interior[0] <= lo or interior[-1] >= hi):
        interior = np.quantile(np.unique(values), probs)
    inner = np.concatenate([[lo], interior, [hi]])
    left = lo - (inner[1] - inner[0]) * np.arange(DEGREE, 0, -1)
    right = hi + (inner[-1] - inner[-2]) * np.arange(1, DEGREE + 1)
    return np.concatenate([left, inner, right])


def raw_basis(x, knots: np.ndarray) -> np.ndarray:
    """Uncentered cubic B-spline design; values are clamped to the boundary knots."""
    x = np.clip(np.asarray(x, dtype=float), knots[DEGREE], knots[-DEGREE - 1])
    return BSpline.design_matrix(x, knots, DEGREE).toarray()


def greville(knots: np.ndarray) -> np.ndarray:
    """Greville abscissae of the cubic B-splines on ``knots``: means of three consecutive inner knots.

    Coefficients linear in these abscissae give a spline that is the same straight line in x.
    """
    knots = np.asarray(knots, dtype=float)
    K = knots.size - DEGREE - 1
    return np.array([knots[j + 1:j + DEGREE + 1].mean() for j in range(K)])


def difference_penalty(K: int, order: int = 2, abscissae=None) -> np.ndarray:
    """Penalty ``D.T @ D`` for the ``order``-th difference operator on K coefficients.

    With ``abscissae`` the rows are divided differences at those points, rescaled by
    the mean spacing so evenly spaced abscissae reproduce the plain differences. The
    null space is then the polynomials of degree < ``order`` in the abscissae.

    :param K: Number of coefficients.
    :type K: int
    :param order: Difference order.
    :type order: int
    :param abscissae: Increasing locations of the coefficients, optional.
    :type abscissae: np.ndarray, optional
    :return: K x K penalty.
    :rtype: np.ndarray
    """
    D = np.eye(K)
    if abscissae is None:
        D = np.diff(D, n=order, axis=0)
    else:
        xi = np.asarray(abscissae, dtype=float)
        if xi.size != K or np.any(np.diff(xi) <= 0):
            raise ValueError("abscissae must be K strictly increasing values")
        h = np.diff(xi).mean()
        for k in range(1, order + 1):
            D = np.diff(D, axis=0) * (k * h / (xi[k:] - xi[:-k]))[:, None]
    return D.T @ D


def centering_constraint(raw: np.ndarray) -> np.ndarray:
    """K x (K-1) reparameterisation whose columns make the fitted term sum to zero.

    The columns span the null space of the basis column sums (complete QR of the
    constraint vector, first column dropped).
    """
    q, _ = np.linalg.qr(raw.sum(axis=0).reshape(-1, 1), mode="complete")
    return q[:, 1:]


def build_basis(x, K: int | None = None, covariate: str = "x") -> BasisBlock:
    """Construct the centered basis block of one covariate.

    Missing entries of ``x`` get an all-zero design row; knots and the centering
    constraint use the observed values only.

    :param x: Covariate values, NaN for missing.
    :type x: np.ndarray
    :param K: Basis dimension (>= 4), defaults to ``config.DEFAULT_K``.
    :type K: int, optional
    :param covariate: Covariate name recorded in the block.
    :type covariate: str
    :raises BasisError: If K < 4 or fewer than K distinct values are observed.
    :return: Basis block with design, penalty and knots.
    :rtype: BasisBlock
    """
    K = config.DEFAULT_K if K is None else int(K)
    if K < 4:
        raise BasisError(messages.BASIS_TOO_SMALL.format(k=K))
    x = np.asarray(x, dtype=float)
    observed = ~np.isnan(x)
    values = x[observed]
    distinct = np.unique(values).size
    if distinct < K:
        raise BasisError(messages.FEW_DISTINCT.format(column=covariate, count=distinct, k=K))

    knots = place_knots(values, K)
    raw = raw_basis(values, knots)
    Z = centering_constraint(raw)
    B = np.zeros((x.size, K - 1))
    B[observed] = raw @ Z
    S = Z.T @ difference_penalty(K, abscissae=greville(knots)) @ Z
    S = (S + S.T) / 2
    logger.debug("basis for %s: K=%d, range [%g, %g]", covariate, K, knots[DEGREE], knots[-DEGREE - 1])
    return BasisBlock(
        covariate=covariate,
        K=K,
        knots=knots,
        constraint=Z,
        S=S,
        lower=float(knots[DEGREE]),
        upper=float(knots[-DEGREE - 1]),
        B=B,
    )


def basis_matrix(block: BasisBlock, x) -> np.ndarray:
    """Centered design of ``block`` evaluated at new values (clamped to the training range)."""
    return raw_basis(x, block.knots) @ block.constraint


def est_rank(block: BasisBlock) -> int:
    """Rank of the centered term, reported next to the Edf."""
    return block.dim


def effective_df(blocks, influence_diag, offset: int = 1, converged: bool = True) -> np.ndarray:
    """Per-term effective degrees of freedom.

    :param blocks: Fitted basis blocks in design order.
    :type blocks: Sequence[BasisBlock]
    :param influence_diag: Diagonal of ``(X'WX + S)^-1 X'WX`` at convergence.
    :type influence_diag: np.ndarray
    :param offset: Number of parametric columns preceding the smooth columns.
    :type offset: int
    :param converged: Whether the fit producing the diagonal converged.
    :type converged: bool
    :raises NotConvergedError: If the fit has not converged.
    :return: Edf of each block.
    :rtype: np.ndarray
    """
    if not converged:
        raise NotConvergedError()
    diag = np.asarray(influence_diag, dtype=float)
    if diag.size != offset + sum(b.dim for b in blocks):
        raise ValueError("influence diagonal does not match the block layout")
    edf = []
    start = offset
    for block in blocks:
        edf.append(diag[start:start + block.dim].sum())
        start += block.dim
    return np.array(edf, dtype=float)
