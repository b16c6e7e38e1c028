"""GLRT detectors for a subpixel target ``x = beta*z + alpha*t``.

Every scorer accepts either a single pixel of length d or an (n, d) array of
pixels, and returns a float or an array accordingly. Scores are natural-log
likelihood ratios (or monotone transforms of them), larger meaning more
target-like, except ``clairvoyant_score`` whose sign follows the classical
definition (see its docstring).

Elliptically-contoured (EC) scorers read the tail parameter from the model;
the Gaussian scorers ignore it. Internally every score is evaluated in the
whitened frame ``w = L^{-1} x`` where ``L L' = R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BadBeta, DegenerateQuadratic, DimMismatch, IdentityMismatch, ZeroTarget
from .stats import BackgroundModel

Q_IDENTITY_RTOL = 1e-10
DEGENERATE_BETA = 1e-12
FTMF_GRID = 256
FTMF_ALPHA_MAX = 1.0 - 1e-6
FTMF_TOL = 1e-10

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class TargetContext:
    target: np.ndarray
    mean: np.ndarray
    rinv_t: np.ndarray
    ttr: float  # t' R^{-1} t
    q: np.ndarray  # matched-filter vector R^{-1} t / sqrt(t' R^{-1} t)
    Q: np.ndarray
    a: float  # mu' Q mu
    # whitened-frame cache
    s: np.ndarray  # L^{-1} t
    s_hat: np.ndarray
    w_mu: np.ndarray  # L^{-1} mu
    w_mu_perp: np.ndarray  # w_mu with the s_hat component removed
    u: np.ndarray  # L^{-1} (t - mu)

    @property
    def d(self) -> int:
        return self.target.shape[0]


@dataclass(frozen=True)
class PixelQuadratic:
    """Coefficients of ``q(beta) = a + b/beta + c/beta^2`` and of the
    stationarity condition ``A beta^2 + B beta + C = 0``."""
    a: float | np.ndarray
    b: float | np.ndarray
    c: float | np.ndarray
    A: float | np.ndarray
    B: float | np.ndarray
    C: float | np.ndarray

    def q(self, beta):
        beta = np.asarray(beta, dtype=float)
        return np.maximum(self.a + self.b / beta + self.c / beta ** 2, 0.0)


@dataclass(frozen=True)
class GlrtEstimate:
    alpha_hat: float | np.ndarray
    beta_hat: float | np.ndarray
    log_score: float | np.ndarray
    clamped_beta: bool | np.ndarray
    degenerate: bool | np.ndarray = False


def _scalarize(value, single: bool):
    if single:
        value = np.asarray(value).reshape(-1)[0]
        return value.item() if isinstance(value, np.generic) else value
    return value


def _as_pixels(x, d: int):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d or x.ndim not in (1, 2):
        raise DimMismatch(f"pixels must have shape (d,) or (n, d) with d={d}, got {x.shape}")
    return np.atleast_2d(x), x.ndim == 1


def make_target_context(model: BackgroundModel, t) -> TargetContext:
    t = np.array(t, dtype=float).reshape(-1)
    d = model.d
    if t.shape[0] != d:
        raise DimMismatch(f"target has length {t.shape[0]}, model has d={d}")
    if not np.any(t != 0):
        raise ZeroTarget("target signature is the zero vector")
    rinv = model.cov_inv
    rinv_t = np.linalg.solve(model.covariance, t)
    ttr = float(t @ rinv_t)
    if not ttr > 0:
        raise ZeroTarget("t' R^-1 t is not positive")
    # Definitional form: P' R^{-1} P with P = I - t t' R^{-1} / (t' R^{-1} t)
    proj = np.eye(d) - np.outer(t, rinv_t) / ttr
    Q = proj.T @ rinv @ proj
    Q = 0.5 * (Q + Q.T)
    q = rinv_t / np.sqrt(ttr)
    Q_alt = rinv - np.outer(q, q)
    scale = max(np.max(np.abs(rinv)), np.max(np.abs(Q_alt)))
    if np.max(np.abs(Q - Q_alt)) > Q_IDENTITY_RTOL * scale:
        raise IdentityMismatch(
            f"|Q - (R^-1 - qq')| = {np.max(np.abs(Q - Q_alt)):.3e} exceeds tolerance")

    s = model.whiten(t)
    s_hat = s / np.linalg.norm(s)
    w_mu = model.whiten(model.mean)
    w_mu_perp = w_mu - (s_hat @ w_mu) * s_hat
    u = s - w_mu
    a = float(w_mu_perp @ w_mu_perp)
    arrays = dict(target=t, mean=np.array(model.mean), rinv_t=rinv_t, q=q, Q=Q,
                  s=s, s_hat=s_hat, w_mu=w_mu, w_mu_perp=w_mu_perp, u=u)
    for arr in arrays.values():
        arr.setflags(write=False)
    return TargetContext(ttr=ttr, a=a, **arrays)


def alpha_hat(ctx: TargetContext, x, beta):
    """Least-squares abundance ``t'R^{-1}(x - beta mu) / t'R^{-1}t`` for fixed beta."""
    X, single = _as_pixels(x, ctx.d)
    beta = np.asarray(beta, dtype=float)
    out = (X @ ctx.rinv_t - beta * (ctx.mean @ ctx.rinv_t)) / ctx.ttr
    return _scalarize(out, single)


class _Forms(NamedTuple):
    w: np.ndarray
    mf: np.ndarray  # s_hat . (w - w_mu), i.e. q'(x - mu)
    delta: np.ndarray  # D(x)
    resid: np.ndarray  # (x-mu)' Q (x-mu)
    b: np.ndarray
    c: np.ndarray


def _forms(ctx: TargetContext, model: BackgroundModel, X: np.ndarray) -> _Forms:
    w = model.whiten(X)
    w_par = w @ ctx.s_hat
    w_perp = w - np.outer(w_par, ctx.s_hat)
    c = np.einsum("ij,ij->i", w_perp, w_perp)
    # pixels on the target line leave only rounding noise in w_perp
    c = np.where(c <= (16 * np.finfo(float).eps) ** 2 * np.einsum("ij,ij->i", w, w), 0.0, c)
    b = -2.0 * (w_perp @ ctx.w_mu_perp)
    y = w - ctx.w_mu
    mf = y @ ctx.s_hat
    y_perp = y - np.outer(mf, ctx.s_hat)
    resid = np.einsum("ij,ij->i", y_perp, y_perp)
    return _Forms(w=w, mf=mf, delta=resid + mf * mf, resid=resid, b=b, c=c)


def _quadratic(a, b, c, d: int, nu: float) -> PixelQuadratic:
    if np.isinf(nu):
        A = np.full_like(np.asarray(b, dtype=float), float(d))
        B = -b / 2
    else:
        A = d + d * (a - 2) / nu + np.zeros_like(b)
        B = -b / 2 + d * b / (2 * nu)
    return PixelQuadratic(a=a, b=b, c=c, A=A, B=B, C=-c)


def pixel_quadratic(ctx: TargetContext, model: BackgroundModel, x,
                    gaussian: bool = False) -> PixelQuadratic:
    X, single = _as_pixels(x, ctx.d)
    f = _forms(ctx, model, X)
    nu = np.inf if gaussian else model.nu
    pq = _quadratic(ctx.a, f.b, f.c, ctx.d, nu)
    if single:
        pq = PixelQuadratic(*(float(np.asarray(v).reshape(-1)[0]) for v in
                              (pq.a, pq.b, pq.c, pq.A, pq.B, pq.C)))
    return pq


def _positive_root(A, B, C):
    """Nonnegative root of A b^2 + B b + C (A > 0, C <= 0), cancellation-free."""
    A, B, C = (np.asarray(v, dtype=float) for v in (A, B, C))
    sq = np.sqrt(np.maximum(B * B - 4 * A * C, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.where(B > 0, -2 * C / (B + sq), (-B + sq) / (2 * A))
    return np.where(np.isfinite(root), root, 0.0)


def _solve_beta(pq: PixelQuadratic):
    A, B, C = (np.asarray(v, dtype=float) for v in (pq.A, pq.B, pq.C))
    root = _positive_root(A, B, C)
    clamped = -C >= A + B
    degenerate = ~clamped & ~(root > 0)
    beta = np.where(clamped, 1.0, np.minimum(root, 1.0))
    beta = np.where(degenerate, np.clip(-B / A, DEGENERATE_BETA, 1.0), beta)
    return beta, clamped, degenerate


def beta_hat(pq: PixelQuadratic, strict: bool = False):
    """Maximum-likelihood background scaling on (0, 1] and the clamp flag.

    With ``strict=True`` a pixel on the target line raises
    ``DegenerateQuadratic`` instead of being assigned beta = 1e-12.
    """
    beta, clamped, degenerate = _solve_beta(pq)
    if strict and np.any(degenerate):
        raise DegenerateQuadratic(f"{int(np.sum(degenerate))} pixel(s) have x'Qx = 0")
    if beta.ndim == 0:
        return float(beta), bool(clamped)
    return beta, clamped


def _log_lr(beta, q, delta, d: int, nu: float):
    """Log of p_x(alpha, beta; x) / p_z(x) given the residual D = q at beta."""
    beta = np.asarray(beta, dtype=float)
    if np.isinf(nu):
        return -d * np.log(beta) - 0.5 * (q - delta)
    return -d * np.log(beta) - 0.5 * (d + nu) * np.log1p((q - delta) / (nu - 2 + delta))


def _constrained_glrt(ctx, f: _Forms, X, d, nu):
    # Max over alpha >= 0, 0 < beta <= 1. alpha_hat(beta) is affine in beta, so
    # {beta : alpha_hat >= 0} is an interval I1; on it the profile likelihood is
    # the unconstrained one, on its complement I0 the optimum sits on alpha = 0.
    # Both profiles are unimodal in beta, so each maximum is the clipped root.
    k1 = X @ ctx.rinv_t
    k2 = float(ctx.mean @ ctx.rinv_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        bstar = np.clip(k1 / k2, 0.0, 1.0) if k2 != 0 else np.zeros_like(k1)
    if k2 > 0:
        lo1, hi1 = np.zeros_like(k1), bstar
        lo0, hi0 = bstar, np.ones_like(k1)
        ok1, ok0 = hi1 > 0, bstar < 1
    elif k2 < 0:
        lo1, hi1 = bstar, np.ones_like(k1)
        lo0, hi0 = np.zeros_like(k1), bstar
        ok1, ok0 = bstar < 1, hi0 > 0
    else:
        lo1 = lo0 = np.zeros_like(k1)
        hi1 = hi0 = np.ones_like(k1)
        ok1, ok0 = k1 >= 0, k1 < 0

    pq1 = _quadratic(ctx.a, f.b, f.c, d, nu)
    beta1 = np.clip(_positive_root(pq1.A, pq1.B, pq1.C), lo1, hi1)
    beta1 = np.maximum(beta1, DEGENERATE_BETA)
    score1 = np.where(ok1, _log_lr(beta1, pq1.q(beta1), f.delta, d, nu), -np.inf)

    w_mu = ctx.w_mu
    a0 = float(w_mu @ w_mu)
    b0 = -2.0 * (f.w @ w_mu)
    c0 = np.einsum("ij,ij->i", f.w, f.w)
    pq0 = _quadratic(a0, b0, c0, d, nu)
    beta0 = np.clip(_positive_root(pq0.A, pq0.B, pq0.C), lo0, hi0)
    beta0 = np.maximum(beta0, DEGENERATE_BETA)
    score0 = np.where(ok0, _log_lr(beta0, pq0.q(beta0), f.delta, d, nu), -np.inf)

    use1 = score1 >= score0
    beta = np.where(use1, beta1, beta0)
    alpha = np.where(use1, np.maximum((k1 - beta1 * k2) / ctx.ttr, 0.0), 0.0)
    return alpha, beta, np.maximum(score1, score0)


def _glrt(ctx, model, x, nu, constrained_alpha):
    X, single = _as_pixels(x, ctx.d)
    d = ctx.d
    f = _forms(ctx, model, X)
    pq = _quadratic(ctx.a, f.b, f.c, d, nu)
    beta, clamped, degenerate = _solve_beta(pq)
    if constrained_alpha:
        alpha, beta, score = _constrained_glrt(ctx, f, X, d, nu)
        clamped = beta >= 1.0
    else:
        alpha = alpha_hat(ctx, X, beta)
        score = _log_lr(beta, pq.q(beta), f.delta, d, nu)
    est = GlrtEstimate(alpha_hat=alpha, beta_hat=beta, log_score=score,
                       clamped_beta=clamped, degenerate=degenerate)
    if single:
        est = GlrtEstimate(*(_scalarize(v, True) for v in
                             (est.alpha_hat, est.beta_hat, est.log_score,
                              est.clamped_beta, est.degenerate)))
    return est


def ec2spade_score(ctx: TargetContext, model: BackgroundModel, x,
                   constrained_alpha: bool = False) -> GlrtEstimate:
    """EC-2SPADE: GLRT for the modified replacement model in t-distributed clutter.

    The abundance estimate is left unconstrained by default. With
    ``constrained_alpha=True`` the likelihood is maximized over alpha >= 0 as
    well (exactly, not by search).
    """
    return _glrt(ctx, model, x, model.nu, constrained_alpha)


def gauss2spade_score(ctx: TargetContext, model: BackgroundModel, x,
                      constrained_alpha: bool = False) -> GlrtEstimate:
    """2SPADE: Gaussian-background limit of ``ec2spade_score``; nu is ignored."""
    return _glrt(ctx, model, x, np.inf, constrained_alpha)


def ec_amf_score(ctx: TargetContext, model: BackgroundModel, x,
                 constrained_alpha: bool = False):
    """EC-AMF: additive-model GLRT (beta pinned to 1).

    By default the abundance is free in sign, giving
    ``(d+nu)/2 * log[((nu-2) + D(x)) / ((nu-2) + (x-mu)'Q(x-mu))]``. With
    ``constrained_alpha`` the fit is restricted to alpha >= 0, which zeroes
    the score of every pixel whose matched-filter output is negative.
    """
    X, single = _as_pixels(x, ctx.d)
    f = _forms(ctx, model, X)
    nu, d = model.nu, ctx.d
    if np.isinf(nu):
        out = 0.5 * f.mf ** 2
    else:
        out = 0.5 * (d + nu) * np.log1p(f.mf ** 2 / (nu - 2 + f.resid))
    if constrained_alpha:
        out = np.where(f.mf > 0, out, 0.0)
    return _scalarize(out, single)


def amf_score(ctx: TargetContext, x, constrained_alpha: bool = False):
    """Gaussian AMF, ``(q'(x - mu))^2 / 2`` (zero for q'(x - mu) <= 0 when constrained)."""
    X, single = _as_pixels(x, ctx.d)
    mf = (X - ctx.mean) @ ctx.q
    out = 0.5 * mf ** 2
    if constrained_alpha:
        out = np.where(mf > 0, out, 0.0)
    return _scalarize(out, single)


def _ftmf_objective(alpha, yy, yu, uu, d, nu):
    # D((x - alpha t)/(1 - alpha)) - D(x), written to avoid cancellation
    inc = alpha * (2 * (yy - yu) + alpha * (uu - yy)) / (1 - alpha) ** 2
    if np.isinf(nu):
        return -d * np.log1p(-alpha) - 0.5 * inc
    return -d * np.log1p(-alpha) - 0.5 * (d + nu) * np.log1p(inc / (nu - 2 + yy))


def ftmf_fit(ctx: TargetContext, model: BackgroundModel, x, gaussian: bool = False):
    """Replacement-model GLRT (beta = 1 - alpha): returns ``(alpha_hat, log_score)``.

    Coarse grid on [0, 1 - 1e-6] followed by a golden-section search in the
    bracket around the best grid node. The score is floored at 0 (alpha = 0).
    """
    X, single = _as_pixels(x, ctx.d)
    d = ctx.d
    nu = np.inf if gaussian else model.nu
    y = model.whiten(X) - ctx.w_mu
    yy = np.einsum("ij,ij->i", y, y)
    yu = y @ ctx.u
    uu = float(ctx.u @ ctx.u)

    def f(alpha):
        return _ftmf_objective(alpha, yy, yu, uu, d, nu)

    grid = np.linspace(0.0, FTMF_ALPHA_MAX, FTMF_GRID)
    best = np.full(len(yy), -np.inf)
    k = np.zeros(len(yy), dtype=int)
    for i, g in enumerate(grid):
        val = f(g)
        better = val > best
        best = np.where(better, val, best)
        k = np.where(better, i, k)

    lo = grid[np.maximum(k - 1, 0)]
    hi = grid[np.minimum(k + 1, FTMF_GRID - 1)]
    a_gs, f_gs = _golden_max(f, lo, hi, FTMF_TOL)

    cand_a = np.stack([grid[k], a_gs, np.zeros_like(yy)])
    cand_f = np.stack([best, f_gs, np.zeros_like(yy)])
    j = np.argmax(cand_f, axis=0)
    cols = np.arange(len(yy))
    alpha, score = cand_a[j, cols], cand_f[j, cols]
    return _scalarize(alpha, single), _scalarize(score, single)


def ec_ftmf_score(ctx: TargetContext, model: BackgroundModel, x):
    """EC-FTMF: replacement-model GLRT in t-distributed clutter."""
    return ftmf_fit(ctx, model, x)[1]


def ftmf_score(ctx: TargetContext, model: BackgroundModel, x):
    """Gaussian FTMF; nu is ignored."""
    return ftmf_fit(ctx, model, x, gaussian=True)[1]


def clairvoyant_score(ctx: TargetContext, model: BackgroundModel, x, alpha: float,
                      beta: float, gaussian: bool = False):
    """Clairvoyant statistic for known (alpha, beta).

    Returns ``[D((x - alpha t)/beta) - D(x)] / (1 + D(x)/(nu - 2))``, or the
    bare difference for a Gaussian background. This is a *decreasing*
    function of the likelihood ratio: small values are target-like. Negate it
    before ranking alongside the other detectors.
    """
    if not beta > 0:
        raise BadBeta(f"beta must be positive, got {beta}")
    X, single = _as_pixels(x, ctx.d)
    w = model.whiten(X)
    y0 = w - ctx.w_mu
    y1 = (w - alpha * ctx.s) / beta - ctx.w_mu
    d0 = np.einsum("ij,ij->i", y0, y0)
    d1 = np.einsum("ij,ij->i", y1, y1)
    nu = np.inf if gaussian else model.nu
    if np.isinf(nu):
        out = d1 - d0
    else:
        out = (d1 - d0) / (1 + d0 / (nu - 2))
    return _scalarize(out, single)


def _golden_max(f, lo, hi, tol):
    """Vectorized golden-section maximization of a unimodal f on [lo, hi]."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    width = float(np.max(hi - lo)) if np.size(lo) else 0.0
    n_iter = int(np.ceil(np.log(max(width, tol) / tol) / np.log(1 / _INVPHI))) + 1
    for _ in range(n_iter):
        left = f1 > f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new = np.where(left, hi - _INVPHI * (hi - lo), lo + _INVPHI * (hi - lo))
        fnew = f(new)
        x2, f2, x1, f1 = (np.where(left, x1, new), np.where(left, f1, fnew),
                          np.where(left, new, x2), np.where(left, fnew, f2))
    take1 = f1 >= f2
    return np.where(take1, x1, x2), np.where(take1, f1, f2)


def brute_force_glrt(ctx: TargetContext, model: BackgroundModel, x,
                     alpha_range=(-5.0, 5.0), beta_range=(1e-4, 1.0), grid=(41, 41),
                     refine: bool = True, gaussian: bool = False,
                     max_levels: int = 60) -> GlrtEstimate:
    """Search-based maximizer of the modified-replacement log likelihood ratio.

    The likelihood is evaluated directly from the Mahalanobis distance of
    ``(x - alpha t)/beta``; none of the closed-form machinery is used.

    Without ``refine`` this is a plain exhaustive search of the
    ``grid[0] x grid[1]`` lattice. With ``refine`` each beta node gets its
    alpha optimized (grid, then golden section: the likelihood is unimodal in
    alpha for fixed beta), and the beta lattice is re-centred on the incumbent
    and shrunk until its spacing falls below 1e-12. Meant as a test oracle.
    """
    X, single = _as_pixels(x, ctx.d)
    n, d = X.shape
    na, nb = grid
    if na < 2 or nb < 2:
        raise ValueError("grid needs at least 2 points per axis")
    nu = np.inf if gaussian else model.nu
    w = model.whiten(X)
    d0 = np.einsum("ij,ij->i", w - ctx.w_mu, w - ctx.w_mu)

    def loglr(alphas, betas):
        # alphas and betas broadcast against each other with a leading pixel axis
        shape = np.broadcast_shapes(alphas.shape, betas.shape)
        extra = (1,) * (len(shape) - 1)
        wr = w.reshape((n,) + extra + (d,))
        base = d0.reshape((n,) + extra)
        r = (wr - alphas[..., None] * ctx.s) / betas[..., None] - ctx.w_mu
        d1 = np.einsum("...k,...k->...", r, r)
        if np.isinf(nu):
            return -d * np.log(betas) - 0.5 * (d1 - base)
        return -d * np.log(betas) - 0.5 * (d + nu) * np.log1p((d1 - base) / (nu - 2 + base))

    a0, a1 = float(alpha_range[0]), float(alpha_range[1])
    a_nodes = np.linspace(a0, a1, na)
    rows = np.arange(n)

    if not refine:
        b_nodes = np.linspace(beta_range[0], beta_range[1], nb)
        vals = loglr(a_nodes[None, :, None], b_nodes[None, None, :]).reshape(n, -1)
        idx = np.argmax(vals, axis=1)
        i, j = np.unravel_index(idx, (na, nb))
        best_a, best_b, best = a_nodes[i], b_nodes[j], vals[rows, idx]
    else:
        def alpha_profile(betas):
            # betas (n, m) -> best alpha and value per node
            vals = loglr(a_nodes[None, :, None], betas[:, None, :])
            k = np.argmax(vals, axis=1)
            step = (a1 - a0) / (na - 1)
            lo = np.maximum(a_nodes[k] - step, a0)
            hi = np.minimum(a_nodes[k] + step, a1)
            return _golden_max(lambda al: loglr(al, betas), lo, hi, 1e-12)

        b_lo = np.full(n, float(beta_range[0]))
        b_hi = np.full(n, float(beta_range[1]))
        tb = np.linspace(0, 1, nb)
        for _ in range(max_levels):
            betas = b_lo[:, None] + (b_hi - b_lo)[:, None] * tb
            alphas, vals = alpha_profile(betas)
            j = np.argmax(vals, axis=1)
            best_a, best_b, best = alphas[rows, j], betas[rows, j], vals[rows, j]
            db = (b_hi - b_lo) / (nb - 1)
            if np.max(db) < 1e-12:
                break
            b_lo = np.maximum(best_b - 2 * db, beta_range[0])
            b_hi = np.minimum(best_b + 2 * db, beta_range[1])

    est = GlrtEstimate(alpha_hat=best_a, beta_hat=best_b, log_score=best,
                       clamped_beta=best_b >= beta_range[1])
    if single:
        est = GlrtEstimate(*(_scalarize(v, True) for v in
                             (est.alpha_hat, est.beta_hat, est.log_score, est.clamped_beta)))
    return est
