"""Penalized IRLS fitting of GLMs and GAMs under the logit, log-log and GEV links.

The coefficient vector is laid out as ``[alpha, beta..., gamma_1..., gamma_2..., ...]``;
the objective maximised is the Bernoulli log-likelihood minus
``0.5 * sum_j lambda_j * gamma_j' S_j gamma_j``.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import pandas as pd
import scipy.linalg
from joblib import Parallel, delayed
from scipy import stats

from src.conf import messages
from src.conf.config import config
from src.entity.models import BasisBlock, Dataset, FittedModel, LinkKind, LinkSpec, ModelSpec, SmoothSpec
from src.services.errors import (
    ConvergenceError,
    MissingValueError,
    NotConvergedError,
    RankDeficiencyError,
    SingleClassError,
)
from src.services.links import link_dmu_deta, link_forward, link_inverse, make_link, support
from src.services.smooth import basis_matrix, build_basis, effective_df, est_rank

logger = logging.getLogger(__name__)

Z_95 = stats.norm.ppf(0.975)


def _as_smooth(term, K: int) -> SmoothSpec:
    if isinstance(term, SmoothSpec):
        return term
    if isinstance(term, tuple):
        return SmoothSpec(*term)
    return SmoothSpec(term, K)


def build_spec(
    ds: Dataset,
    link: LinkSpec,
    smooth: Sequence = (),
    linear: Sequence[str] | None = None,
    K: int | None = None,
) -> ModelSpec:
    """Assemble a model specification adapted to the data.

    Smooth terms whose covariate has fewer distinct values than K get K reduced to
    that count; with fewer than 4 distinct values the covariate enters linearly, and
    constant covariates are left out.

    :param ds: Training data.
    :type ds: Dataset
    :param link: Link specification.
    :type link: LinkSpec
    :param smooth: Covariate names or ``(name, K)`` pairs to model with smooths.
    :type smooth: Sequence
    :param linear: Linear covariates, defaults to every feature that is not smooth.
    :type linear: Sequence[str], optional
    :param K: Basis dimension for names given without one, defaults to ``config.DEFAULT_K``.
    :type K: int, optional
    :return: The model specification.
    :rtype: ModelSpec
    """
    K = config.DEFAULT_K if K is None else K
    requested = [_as_smooth(s, K) for s in smooth]
    smooth_names = {s.covariate for s in requested}
    linear = [name for name in ds.feature_names if name not in smooth_names] if linear is None else list(linear)
    smooth_terms = []
    for term in requested:
        column = ds.column(term.covariate)
        distinct = np.unique(column[~np.isnan(column)]).size
        if distinct < 4:
            logger.warning("%s has %d distinct values; entering it linearly", term.covariate, distinct)
            linear.append(term.covariate)
        elif distinct < term.K:
            logger.warning("%s has %d distinct values; basis dimension reduced from %d", term.covariate,
                           distinct, term.K)
            smooth_terms.append(SmoothSpec(term.covariate, distinct))
        else:
            smooth_terms.append(term)
    for name in linear:
        ds.index(name)
    kept = []
    for name in ds.feature_names:
        if name not in set(linear):
            continue
        column = ds.column(name)
        if np.unique(column[~np.isnan(column)]).size < 2:
            logger.warning("%s is constant; dropped from the model", name)
        else:
            kept.append(name)
    return ModelSpec(link=link, linear_terms=tuple(kept), smooth_terms=tuple(smooth_terms))


def _check_response(y: np.ndarray):
    if y.min() == y.max():
        raise SingleClassError()


def _complete_column(ds: Dataset, name: str) -> np.ndarray:
    column = ds.column(name)
    if np.isnan(column).any():
        raise MissingValueError(messages.MISSING_CELLS.format(column=name))
    return column


def model_matrix(ds: Dataset, spec: ModelSpec, blocks: Sequence[BasisBlock] | None = None):
    """Design matrix ``[1, linear..., centered bases...]`` of ``ds``.

    :param ds: Complete data holding every covariate of ``spec``.
    :type ds: Dataset
    :param spec: Model specification.
    :type spec: ModelSpec
    :param blocks: Fitted blocks to evaluate; built from ``ds`` when omitted.
    :type blocks: Sequence[BasisBlock], optional
    :raises MissingCovariateError: If a covariate column is absent.
    :raises MissingValueError: If a used cell is missing.
    :return: Design matrix and the basis blocks in column order.
    :rtype: tuple[np.ndarray, list[BasisBlock]]
    """
    columns = [np.ones(ds.n)]
    columns += [_complete_column(ds, name) for name in spec.linear_terms]
    parts = [np.column_stack(columns)]
    if blocks is None:
        blocks = [build_basis(_complete_column(ds, s.covariate), s.K, s.covariate) for s in spec.smooth_terms]
        parts += [block.B for block in blocks]
    else:
        parts += [basis_matrix(block, _complete_column(ds, block.covariate)) for block in blocks]
    return np.hstack(parts), list(blocks)


def penalty_matrix(blocks: Sequence[BasisBlock], lambdas, n_parametric: int) -> np.ndarray:
    """Block-diagonal penalty with zero blocks for the parametric coefficients."""
    return scipy.linalg.block_diag(
        np.zeros((n_parametric, n_parametric)),
        *[lam * block.S for lam, block in zip(lambdas, blocks)],
    )


def _deviance(y: np.ndarray, mu: np.ndarray) -> float:
    return float(-2 * np.sum(y * np.log(mu) + (1 - y) * np.log1p(-mu)))


def _working(link: LinkSpec, eta: np.ndarray):
    mu = link_inverse(link, eta)
    d = link_dmu_deta(link, eta)
    variance = mu * (1 - mu)
    return mu, d, variance


def _score(X, y, link, P, beta, eta) -> np.ndarray:
    mu, d, variance = _working(link, eta)
    return X.T @ ((y - mu) * d / variance) - P @ beta


def _objective(X, y, link, P, beta) -> float:
    eta = X @ beta
    mu = link_inverse(link, eta)
    return -0.5 * _deviance(y, mu) - 0.5 * float(beta @ P @ beta)


class _PirlsResult(NamedTuple):
    beta: np.ndarray
    eta: np.ndarray
    deviance: float
    penalized_deviance: float
    converged: bool
    iterations: int


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.solve(A, b, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as err:
        raise ConvergenceError(f"Penalized normal equations are singular: {err}") from err


def pirls(
    X: np.ndarray,
    y: np.ndarray,
    link: LinkSpec,
    P: np.ndarray,
    max_iter: int | None = None,
    max_halvings: int | None = None,
    deviance_tol: float | None = None,
    score_tol: float | None = None,
) -> _PirlsResult:
    """Penalized iteratively reweighted least squares with step halving.

    Starts from ``mu = (y + ybar) / 2``. Each step solves
    ``(X'WX + P) beta = X'Wz`` with ``w = (dmu/deta)^2 / (mu (1 - mu))`` and
    ``z = eta + (y - mu) / (dmu/deta)``; a step that leaves the link support or
    increases the penalized deviance is halved up to ``max_halvings`` times.

    :raises ConvergenceError: After ``max_iter`` iterations without convergence, or when
        no halved step descends before the deviance has settled.
    """
    max_iter = config.MAX_ITER if max_iter is None else max_iter
    max_halvings = config.MAX_HALVINGS if max_halvings is None else max_halvings
    deviance_tol = config.DEVIANCE_TOL if deviance_tol is None else deviance_tol
    score_tol = config.SCORE_TOL if score_tol is None else score_tol

    ybar = y.mean()
    eta = link_forward(link, (y + ybar) / 2)
    fallback = np.zeros(X.shape[1])
    fallback[0] = link_forward(link, ybar)

    beta = None
    pen_dev = np.inf
    rel_change = np.inf
    max_score = np.inf
    for iteration in range(1, max_iter + 1):
        mu, d, variance = _working(link, eta)
        w = d ** 2 / variance
        A = X.T @ (w[:, None] * X) + P
        b = X.T @ (w * eta + (y - mu) * d / variance)
        candidate = _solve(A, b)

        start = fallback if beta is None else beta
        accepted = False
        for halving in range(max_halvings + 1):
            eta_new = X @ candidate
            if np.all(np.isfinite(eta_new)) and np.all(support(link, eta_new)):
                mu_new = link_inverse(link, eta_new)
                pen_dev_new = _deviance(y, mu_new) + float(candidate @ P @ candidate)
                if beta is None or pen_dev_new <= pen_dev + 1e-12 * abs(pen_dev):
                    accepted = True
                    break
            logger.debug("iteration %d: halving step (%d)", iteration, halving + 1)
            candidate = (start + candidate) / 2

        if not accepted:
            if beta is None:
                candidate = fallback
                eta_new = X @ candidate
                pen_dev_new = _deviance(y, link_inverse(link, eta_new))
            elif rel_change < deviance_tol:
                logger.debug("iteration %d: no descent after %d halvings; stopping", iteration, max_halvings)
                return _result(y, link, P, beta, eta, True, iteration)
            else:
                raise ConvergenceError(
                    messages.STALLED.format(iteration=iteration, halvings=max_halvings),
                    diagnostics={
                        "iterations": iteration,
                        "penalized_deviance": pen_dev,
                        "relative_change": rel_change,
                        "max_score": float(np.max(np.abs(_score(X, y, link, P, beta, eta)))),
                    },
                )

        step = np.inf if beta is None else float(np.max(np.abs(candidate - beta)))
        rel_change = abs(pen_dev_new - pen_dev) / (abs(pen_dev_new) + 0.1) if beta is not None else np.inf
        beta, eta, pen_dev = candidate, eta_new, pen_dev_new
        logger.debug("iteration %d: penalized deviance %.10g", iteration, pen_dev)

        if rel_change < deviance_tol:
            max_score = float(np.max(np.abs(_score(X, y, link, P, beta, eta))))
            if max_score < score_tol or step <= 1e-12 * (1 + float(np.max(np.abs(beta)))):
                return _result(y, link, P, beta, eta, True, iteration)

    if rel_change < deviance_tol:
        logger.warning("deviance stable but score %.3g after %d iterations", max_score, max_iter)
        return _result(y, link, P, beta, eta, True, max_iter)
    raise ConvergenceError(
        messages.NOT_CONVERGED.format(iterations=max_iter),
        diagnostics={
            "iterations": max_iter,
            "penalized_deviance": pen_dev,
            "relative_change": rel_change,
            "max_score": max_score,
        },
    )


def _result(y, link, P, beta, eta, converged, iterations) -> _PirlsResult:
    deviance = _deviance(y, link_inverse(link, eta))
    return _PirlsResult(beta, eta, deviance, deviance + float(beta @ P @ beta), converged, iterations)


def _check_rank(X: np.ndarray):
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        raise RankDeficiencyError(messages.RANK_DEFICIENT.format(rank=rank, columns=X.shape[1]))


def _fit_design(X, y, spec: ModelSpec, blocks, lambdas, **options) -> FittedModel:
    n_parametric = 1 + len(spec.linear_terms)
    lambdas = np.asarray(lambdas, dtype=float)
    P = penalty_matrix(blocks, lambdas, n_parametric)
    result = pirls(X, y, spec.link, P, **options)

    mu, d, variance = _working(spec.link, result.eta)
    H = X.T @ ((d ** 2 / variance)[:, None] * X)
    V = scipy.linalg.solve(H + P, np.eye(X.shape[1]), assume_a="pos")
    V = (V + V.T) / 2
    influence = np.einsum("ij,ji->i", V, H)
    edf = effective_df(blocks, influence, offset=n_parametric, converged=result.converged)

    beta = result.beta
    se = np.sqrt(np.diag(V)[:n_parametric])
    p_values = 2 * stats.norm.sf(np.abs(beta[:n_parametric] / se))

    gammas, statistics, smooth_p = [], [], []
    start = n_parametric
    for block in blocks:
        part = slice(start, start + block.dim)
        gamma = beta[part]
        statistic = float(gamma @ scipy.linalg.pinvh(V[part, part]) @ gamma)
        gammas.append(gamma.copy())
        statistics.append(statistic)
        smooth_p.append(stats.chi2.sf(statistic, est_rank(block)))
        start += block.dim

    return FittedModel(
        spec=spec,
        alpha=float(beta[0]),
        beta=beta[1:n_parametric].copy(),
        gamma_blocks=tuple(gammas),
        lambdas=lambdas.copy(),
        blocks=tuple(block.with_lambda(lam).without_design() for block, lam in zip(blocks, lambdas)),
        covariance=V,
        edf=edf,
        std_errors=se,
        p_values=p_values,
        smooth_statistics=np.array(statistics),
        smooth_p_values=np.array(smooth_p),
        deviance=result.deviance,
        penalized_deviance=result.penalized_deviance,
        converged=result.converged,
        iterations=result.iterations,
        n_obs=X.shape[0],
    )


def fit(ds: Dataset, spec: ModelSpec, lambdas="select", **options) -> FittedModel:
    """Fit a GLM (no smooth terms) or GAM by penalized IRLS.

    :param ds: Complete training data.
    :type ds: Dataset
    :param spec: Model specification.
    :type spec: ModelSpec
    :param lambdas: ``"select"`` for GCV selection, a scalar for every smooth, or one value per smooth.
    :type lambdas: str | float | Sequence[float]
    :param options: ``max_iter``, ``max_halvings``, ``deviance_tol`` or ``score_tol`` overrides.
    :raises SingleClassError: If only one response class is present.
    :raises RankDeficiencyError: If the design lacks full column rank.
    :raises ConvergenceError: If P-IRLS does not converge.
    :return: The fitted model.
    :rtype: FittedModel
    """
    _check_response(ds.y)
    X, blocks = model_matrix(ds, spec)
    _check_rank(X)
    if not blocks:
        lambdas = np.array([])
    elif isinstance(lambdas, str):
        if lambdas != "select":
            raise ValueError(f"unknown lambda policy {lambdas!r}")
        lambdas = _select_lambda(X, ds.y, spec, blocks)
    else:
        lambdas = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(blocks),)).copy()
        if np.any(lambdas < 0):
            raise ValueError("smoothing parameters must be non-negative")
    model = _fit_design(X, ds.y, spec, blocks, lambdas, **options)
    logger.info(
        "fitted %s: deviance %.6g, %d iterations, edf %s",
        spec.link.name, model.deviance, model.iterations, np.round(model.edf, 3).tolist(),
    )
    return model


def _gcv(X, y, spec, blocks, lambdas) -> float | None:
    try:
        model = _fit_design(X, y, spec, blocks, lambdas)
    except ConvergenceError as err:
        logger.warning("lambda %s skipped: %s", np.asarray(lambdas).tolist(), err)
        return None
    n = X.shape[0]
    return n * model.deviance / (n - model.total_edf) ** 2


def _select_lambda(X, y, spec, blocks, grid=None, sweeps=None, n_jobs=None, parsimony=None) -> np.ndarray:
    grid = 10.0 ** np.asarray(config.LAMBDA_GRID if grid is None else grid, dtype=float)
    sweeps = config.LAMBDA_SWEEPS if sweeps is None else sweeps
    n_jobs = config.N_JOBS if n_jobs is None else n_jobs
    parsimony = config.LAMBDA_PARSIMONY if parsimony is None else parsimony
    # one effective degree of freedom scales GCV by about (1 + 2 / n)
    tolerance = 1 + 2 * parsimony / X.shape[0]
    current = np.full(len(blocks), grid[np.argmin(np.abs(np.log10(grid)))])
    found = False
    for sweep in range(sweeps):
        for j in range(len(blocks)):
            candidates = []
            for lam in grid:
                trial = current.copy()
                trial[j] = lam
                candidates.append(trial)
            scores = Parallel(n_jobs=n_jobs)(delayed(_gcv)(X, y, spec, blocks, c) for c in candidates)
            finite = [(score, k) for k, score in enumerate(scores) if score is not None]
            if not finite:
                continue
            found = True
            best_score = min(score for score, _ in finite)
            best = max(k for score, k in finite if score <= best_score * tolerance)
            current[j] = grid[best]
            logger.debug("sweep %d, %s: lambda %g (GCV %.8g, best %.8g)", sweep + 1, blocks[j].covariate,
                         grid[best], scores[best], best_score)
    if not found:
        raise ConvergenceError(messages.NO_GRID_FIT.format(parameter="lambda"))
    logger.info("selected lambdas %s", current.tolist())
    return current


def select_lambda(ds: Dataset, spec: ModelSpec, grid=None, sweeps: int | None = None,
                  n_jobs: int | None = None, parsimony: float | None = None) -> np.ndarray:
    """Choose smoothing parameters by coordinate-wise GCV grid search.

    Each smooth in turn is set to every ``10**g`` of the grid with the others held and
    scored by ``n * deviance / (n - total_edf)**2``. The largest lambda whose score is
    within ``parsimony`` effective degrees of freedom of the minimum is kept, i.e.
    ``score <= best * (1 + 2 * parsimony / n)``; the sweep is repeated ``sweeps`` times.

    :param ds: Complete training data.
    :type ds: Dataset
    :param spec: Specification with at least one smooth term.
    :type spec: ModelSpec
    :param grid: log10 lambda grid, defaults to ``config.LAMBDA_GRID``.
    :type grid: Sequence[float], optional
    :param sweeps: Number of coordinate sweeps, defaults to ``config.LAMBDA_SWEEPS``.
    :type sweeps: int, optional
    :param n_jobs: joblib workers for the grid fits, defaults to ``config.N_JOBS``.
    :type n_jobs: int, optional
    :param parsimony: Score tolerance in effective degrees of freedom, defaults to
        ``config.LAMBDA_PARSIMONY``; 0 keeps the plain minimiser.
    :type parsimony: float, optional
    :raises ConvergenceError: If no grid point converges.
    :return: One lambda per smooth term.
    :rtype: np.ndarray
    """
    if not spec.smooth_terms:
        raise ValueError("lambda selection needs at least one smooth term")
    _check_response(ds.y)
    X, blocks = model_matrix(ds, spec)
    _check_rank(X)
    return _select_lambda(X, ds.y, spec, blocks, grid, sweeps, n_jobs, parsimony)


def _tau_deviance(ds, spec, tau, lambdas) -> float | None:
    link = make_link(LinkKind.gev, tau, spec.link.epsilon)
    try:
        return fit(ds, spec.with_link(link), lambdas).deviance
    except ConvergenceError as err:
        logger.warning("tau %g skipped: %s", tau, err)
        return None


def select_tau(ds: Dataset, spec: ModelSpec, grid: Sequence[float] | None = None, lambdas="select",
               n_jobs: int | None = None) -> float:
    """Choose the GEV tail parameter minimising the in-sample deviance.

    :param ds: Complete training data.
    :type ds: Dataset
    :param spec: Specification whose link is replaced by GEV(tau) for each grid point.
    :type spec: ModelSpec
    :param grid: Candidate tails, defaults to ``config.tau_grid``.
    :type grid: Sequence[float], optional
    :param lambdas: Smoothing policy shared by every grid fit.
    :type lambdas: str | float | Sequence[float]
    :param n_jobs: joblib workers, defaults to ``config.N_JOBS``.
    :type n_jobs: int, optional
    :raises ConvergenceError: If no grid point converges.
    :return: Selected tau; ties go to the value closest to 0.
    :rtype: float
    """
    grid = config.tau_grid if grid is None else list(grid)
    if len(grid) == 1:
        return float(grid[0])
    n_jobs = config.N_JOBS if n_jobs is None else n_jobs
    ordered = sorted(grid, key=lambda tau: (abs(tau), tau))
    deviances = Parallel(n_jobs=n_jobs)(delayed(_tau_deviance)(ds, spec, tau, lambdas) for tau in ordered)
    best_tau, best_deviance = None, np.inf
    for tau, deviance in zip(ordered, deviances):
        logger.debug("tau %g: deviance %s", tau, deviance)
        if deviance is not None and deviance < best_deviance:
            best_tau, best_deviance = tau, deviance
    if best_tau is None:
        raise ConvergenceError(messages.NO_GRID_FIT.format(parameter="tau"))
    logger.info("selected tau %g (deviance %.6g)", best_tau, best_deviance)
    return float(best_tau)


def linear_predictor(model: FittedModel, ds: Dataset) -> np.ndarray:
    X, _ = model_matrix(ds, model.spec, model.blocks)
    return X @ model.coefficients


def predict(model: FittedModel, ds: Dataset) -> np.ndarray:
    """Predicted default probabilities in ``[eps, 1 - eps]``.

    Smooth covariates outside the training range are clamped to the boundary knots.

    :param model: Fitted model.
    :type model: FittedModel
    :param ds: Complete data with every covariate of the model.
    :type ds: Dataset
    :return: Probability of default per row.
    :rtype: np.ndarray
    """
    return np.asarray(link_inverse(model.link, linear_predictor(model, ds)), dtype=float)


def penalized_loglik(model: FittedModel, ds: Dataset, coefficients=None) -> float:
    """Penalized log-likelihood of the training data at ``coefficients`` (default: the fit)."""
    X, _ = model_matrix(ds, model.spec, model.blocks)
    P = penalty_matrix(model.blocks, model.lambdas, model.n_parametric)
    beta = model.coefficients if coefficients is None else np.asarray(coefficients, dtype=float)
    return _objective(X, ds.y, model.link, P, beta)


def penalized_score(model: FittedModel, ds: Dataset) -> np.ndarray:
    """Gradient of the penalized log-likelihood at the fitted coefficients."""
    X, _ = model_matrix(ds, model.spec, model.blocks)
    P = penalty_matrix(model.blocks, model.lambdas, model.n_parametric)
    beta = model.coefficients
    return _score(X, ds.y, model.link, P, beta, X @ beta)


@dataclass(frozen=True)
class ModelSummary:
    """Parametric, smooth and linearized-smooth tables of a converged model."""

    link: str
    tau: float | None
    deviance: float
    total_edf: float
    n_obs: int
    parametric: pd.DataFrame
    smooth: pd.DataFrame
    linearized: pd.DataFrame

    def to_text(self) -> str:
        lines = [f"Link: {self.link}    n = {self.n_obs}    deviance = {self.deviance:.4f}    "
                 f"total edf = {self.total_edf:.3f}", "", "Parametric coefficients:"]
        lines.append(self.parametric.to_string(float_format=lambda v: f"{v:.6g}"))
        if not self.linearized.empty:
            lines += ["", "Smooth terms with linear estimates:"]
            lines.append(self.linearized.to_string(float_format=lambda v: f"{v:.6g}"))
        if not self.smooth.empty:
            lines += ["", "Smooth terms:"]
            lines.append(self.smooth.to_string(float_format=lambda v: f"{v:.4g}"))
        return "\n".join(lines)


def _grid(block: BasisBlock, size: int) -> np.ndarray:
    return np.linspace(block.lower, block.upper, size)


def summarize(model: FittedModel, linear_tol: float | None = None) -> ModelSummary:
    """Coefficient and smooth-term tables.

    Parametric rows carry Wald z-tests from the penalized covariance; smooth rows carry
    Edf, estimated rank and a chi-square Wald test of the term's coefficients. Smooths
    with ``Edf <= 1 + linear_tol`` are flagged linear and also get a slope estimate.

    :param model: Converged model.
    :type model: FittedModel
    :param linear_tol: Edf tolerance for linear smooths, defaults to ``config.EDF_LINEAR_TOL``.
    :type linear_tol: float, optional
    :raises NotConvergedError: If the model did not converge.
    :return: Summary tables.
    :rtype: ModelSummary
    """
    if not model.converged:
        raise NotConvergedError()
    linear_tol = config.EDF_LINEAR_TOL if linear_tol is None else linear_tol
    estimates = model.coefficients[:model.n_parametric]
    parametric = pd.DataFrame(
        {
            "Estimate": estimates,
            "Std.Error": model.std_errors,
            "z value": estimates / model.std_errors,
            "p-value": model.p_values,
        },
        index=pd.Index(model.parametric_names, name="term"),
    )

    smooth_rows, linear_rows = [], []
    for position, block in enumerate(model.blocks):
        is_linear = bool(model.edf[position] <= 1 + linear_tol)
        smooth_rows.append({
            "term": block.covariate,
            "Edf": model.edf[position],
            "Est.rank": est_rank(block),
            "Chi.sq": model.smooth_statistics[position],
            "p-value": model.smooth_p_values[position],
            "linear": is_linear,
        })
        if is_linear:
            g = _grid(block, 200)
            centered = (g - g.mean()) / np.sum((g - g.mean()) ** 2)
            a = centered @ basis_matrix(block, g)
            part = model.smooth_slice(position)
            slope = float(a @ model.gamma_blocks[position])
            se = float(np.sqrt(a @ model.covariance[part, part] @ a))
            linear_rows.append({
                "term": block.covariate,
                "Estimate": slope,
                "Std.Error": se,
                "z value": slope / se,
                "p-value": 2 * stats.norm.sf(abs(slope / se)),
            })
    smooth = pd.DataFrame(smooth_rows, columns=["term", "Edf", "Est.rank", "Chi.sq", "p-value", "linear"])
    linearized = pd.DataFrame(linear_rows, columns=["term", "Estimate", "Std.Error", "z value", "p-value"])
    return ModelSummary(
        link=model.link.name,
        tau=model.tau,
        deviance=model.deviance,
        total_edf=model.total_edf,
        n_obs=model.n_obs,
        parametric=parametric,
        smooth=smooth.set_index("term"),
        linearized=linearized.set_index("term"),
    )


class SmoothCurve(NamedTuple):
    x: np.ndarray
    fit: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "fit": self.fit, "lo95": self.lower, "hi95": self.upper})


def smooth_values(model: FittedModel, term: str, x) -> np.ndarray:
    """Centered fitted smooth of ``term`` at ``x``."""
    position, block = model.block(term)
    return basis_matrix(block, x) @ model.gamma_blocks[position]


def smooth_curve(model: FittedModel, term: str, grid_size: int = 100) -> SmoothCurve:
    """Fitted smooth on an even grid over the training range with pointwise 95% bands.

    :param model: Fitted additive model.
    :type model: FittedModel
    :param term: Smooth covariate name.
    :type term: str
    :param grid_size: Number of grid points.
    :type grid_size: int
    :raises UnknownTermError: If ``term`` is not a smooth term.
    :return: Grid, fit, lower and upper band.
    :rtype: SmoothCurve
    """
    position, block = model.block(term)
    x = _grid(block, grid_size)
    Bx = basis_matrix(block, x)
    part = model.smooth_slice(position)
    fitted = Bx @ model.gamma_blocks[position]
    se = np.sqrt(np.einsum("ij,jk,ik->i", Bx, model.covariance[part, part], Bx))
    return SmoothCurve(x, fitted, fitted - Z_95 * se, fitted + Z_95 * se)
