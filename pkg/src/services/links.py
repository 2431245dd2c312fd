"""Forward, inverse and derivative maps of the logit, log-log and GEV links.

All functions accept scalars or numpy arrays and are vectorised. GEV formulas are
written with ``log1p``/``expm1`` so they stay accurate for small ``|tau|``.
"""
import numpy as np
from scipy.special import expit

from src.conf.config import config
from src.entity.models import LinkKind, LinkSpec
from src.services.errors import LinkSupportError


def make_link(kind: LinkKind | str, tau: float | None = None, epsilon: float | None = None) -> LinkSpec:
    """Build a link, redirecting near-zero GEV tails to the LogLog limit.

    :param kind: ``logit``, ``loglog`` or ``gev``.
    :type kind: LinkKind | str
    :param tau: GEV tail parameter, ignored for the other kinds.
    :type tau: float, optional
    :param epsilon: Probability clamp bound, defaults to ``config.EPSILON``.
    :type epsilon: float, optional
    :return: The link specification.
    :rtype: LinkSpec
    """
    kind = LinkKind(kind)
    epsilon = config.EPSILON if epsilon is None else epsilon
    if kind is LinkKind.gev:
        if tau is None:
            raise ValueError("GEV link requires tau")
        if abs(tau) < config.GUMBEL_TAU_THRESHOLD:
            return LinkSpec(LinkKind.loglog, epsilon=epsilon)
        return LinkSpec(kind, tau=tau, epsilon=epsilon)
    return LinkSpec(kind, epsilon=epsilon)


def _clip(link: LinkSpec, mu):
    return np.clip(mu, link.epsilon, 1 - link.epsilon)


def support(link: LinkSpec, eta) -> np.ndarray:
    """Boolean mask of linear predictor values strictly inside the link's support."""
    eta = np.asarray(eta, dtype=float)
    if link.kind is LinkKind.gev:
        return 1 + link.tau * eta > 0
    return np.isfinite(eta)


def link_forward(link: LinkSpec, mu):
    """Map default probabilities to the linear predictor scale.

    :param link: Link specification.
    :type link: LinkSpec
    :param mu: Probabilities; clamped to ``[eps, 1 - eps]`` first.
    :type mu: float | np.ndarray
    :return: Linear predictor values.
    :rtype: float | np.ndarray
    """
    mu = _clip(link, np.asarray(mu, dtype=float))
    if link.kind is LinkKind.logit:
        eta = np.log(mu) - np.log1p(-mu)
    elif link.kind is LinkKind.loglog:
        eta = -np.log(-np.log(mu))
    else:
        eta = np.expm1(-link.tau * np.log(-np.log(mu))) / link.tau
    return eta[()] if eta.ndim == 0 else eta


def link_inverse(link: LinkSpec, eta):
    """Map the linear predictor to default probabilities in ``[eps, 1 - eps]``.

    Outside the GEV support the distribution saturates: ``1 - eps`` for ``tau < 0``
    and ``eps`` for ``tau > 0``.

    :param link: Link specification.
    :type link: LinkSpec
    :param eta: Linear predictor values.
    :type eta: float | np.ndarray
    :return: Probabilities.
    :rtype: float | np.ndarray
    """
    eta = np.asarray(eta, dtype=float)
    if link.kind is LinkKind.logit:
        mu = expit(eta)
    elif link.kind is LinkKind.loglog:
        mu = np.exp(-np.exp(-eta))
    else:
        tau = link.tau
        inside = support(link, eta)
        safe = np.where(inside, tau * eta, 0.0)
        mu = np.where(
            inside,
            np.exp(-np.exp(-np.log1p(safe) / tau)),
            1.0 if tau < 0 else 0.0,
        )
    mu = _clip(link, mu)
    return mu[()] if mu.ndim == 0 else mu


def link_dmu_deta(link: LinkSpec, eta):
    """Derivative of the inverse link with respect to the linear predictor.

    :param link: Link specification.
    :type link: LinkSpec
    :param eta: Linear predictor values strictly inside the support.
    :type eta: float | np.ndarray
    :raises LinkSupportError: If any GEV value is at or beyond the support boundary.
    :return: Positive derivatives.
    :rtype: float | np.ndarray
    """
    eta = np.asarray(eta, dtype=float)
    if link.kind is LinkKind.logit:
        mu = expit(eta)
        d = mu * (1 - mu)
    elif link.kind is LinkKind.loglog:
        d = np.exp(-eta - np.exp(-eta))
    else:
        if not np.all(support(link, eta)):
            raise LinkSupportError()
        tau = link.tau
        log_t = np.log1p(tau * eta)
        d = np.exp(-np.exp(-log_t / tau) + (-1 / tau - 1) * log_t)
    return d[()] if d.ndim == 0 else d
