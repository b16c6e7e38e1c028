"""Self-checks: closed forms against search oracles, identities, limits.

Each check is a function returning a :class:`Check`; :func:`run_all` runs
the fixed battery used by ``ecspade verify``. Sizes are kept small so the
battery finishes in well under a minute; the test suite calls the same
functions at larger sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import detectors as det
from .evaluation import auc_pairwise, roc
from .sim import FIG_BETAS
from .stats import make_background, make_rng, sample

NU_LIMIT = 1e8


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name:<34s} {self.value:10.3e} (tol {self.tol:.0e}) {self.detail}"


def fig1_setup(nu: float = 10.0, d: int = 10, mu_fill: float = 2.0, T: float = 15.0):
    model = make_background(np.full(d, mu_fill), np.eye(d), nu)
    t = np.full(d, mu_fill)
    t[0] += T
    return model, det.make_target_context(model, t)


def mixed_pixels(model, ctx, n: int, seed: int = 0, alpha: float = 0.2,
                 betas=FIG_BETAS) -> np.ndarray:
    """Half pure background, half ``beta z + alpha t`` with beta drawn from ``betas``."""
    rng = make_rng(seed, 1)
    z = sample(model, n, seed=seed, stream=2).data
    beta = rng.choice(np.asarray(betas, dtype=float), n)
    with_target = rng.uniform(size=n) < 0.5
    x1 = beta[:, None] * z + alpha * ctx.target
    return np.where(with_target[:, None], x1, z)


def wide_pixels(model, ctx, n: int, seed: int = 0) -> np.ndarray:
    """Like ``mixed_pixels`` but alpha ~ U(0, 1) and beta ~ U(0.05, 1) per pixel."""
    rng = make_rng(seed, 1)
    z = sample(model, n, seed=seed, stream=2).data
    alpha = rng.uniform(0.0, 1.0, n)
    beta = rng.uniform(0.05, 1.0, n)
    with_target = rng.uniform(size=n) < 0.5
    x1 = beta[:, None] * z + alpha[:, None] * ctx.target
    return np.where(with_target[:, None], x1, z)


def random_spd(rng, d: int, cond: float = 50.0) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = np.geomspace(1.0, cond, d) * rng.uniform(0.5, 2.0)
    return (q * eig) @ q.T


def check_oracle(n: int = 40, seed: int = 0, gaussian: bool = False) -> Check:
    model, ctx = fig1_setup()
    X = mixed_pixels(model, ctx, n, seed)
    if gaussian:
        fast = det.gauss2spade_score(ctx, model, X).log_score
    else:
        fast = det.ec2spade_score(ctx, model, X).log_score
    slow = det.brute_force_glrt(ctx, model, X, alpha_range=(-3.0, 3.0),
                                beta_range=(1e-4, 1.0), gaussian=gaussian).log_score
    err = float(np.max(np.abs(fast - slow)))
    name = "grid oracle, " + ("2SPADE" if gaussian else "EC-2SPADE")
    return Check(name, err <= 1e-6, err, 1e-6, f"n={n}")


def check_q_identities(n_models: int = 20, seed: int = 0) -> Check:
    rng = make_rng(seed, 3)
    worst = 0.0
    for _ in range(n_models):
        d = int(rng.integers(1, 12))
        R = random_spd(rng, d)
        model = make_background(rng.normal(size=d), R, 7.0)
        t = rng.normal(size=d)
        ctx = det.make_target_context(model, t)
        scale = np.max(np.abs(model.cov_inv))
        worst = max(worst,
                    np.max(np.abs(ctx.Q @ t)) / (scale * np.max(np.abs(t))),
                    np.max(np.abs(ctx.Q - (model.cov_inv - np.outer(ctx.q, ctx.q)))) / scale)
    return Check("Q t = 0 and Q = R^-1 - qq'", worst <= 1e-10, float(worst), 1e-10,
                 f"{n_models} random models")


def _profile_loglike(pq: det.PixelQuadratic, beta, d, nu):
    q = pq.a + pq.b / beta + pq.c / beta ** 2
    return -d * np.log(beta) - 0.5 * (d + nu) * np.log(nu - 2 + q)


def check_stationarity(n: int = 2000, seed: int = 0) -> Check:
    model, ctx = fig1_setup()
    X = mixed_pixels(model, ctx, n, seed)
    pq = det.pixel_quadratic(ctx, model, X)
    beta, clamped = det.beta_hat(pq)
    interior = (beta > 1e-6) & (beta < 1 - 1e-6)
    h = 1e-6
    b = beta[interior]
    sub = det.PixelQuadratic(*(np.asarray(v)[interior] if np.ndim(v) else v
                               for v in (pq.a, pq.b, pq.c, pq.A, pq.B, pq.C)))
    grad = (_profile_loglike(sub, b + h, model.d, model.nu)
            - _profile_loglike(sub, b - h, model.d, model.nu)) / (2 * h)
    worst = float(np.max(np.abs(grad))) if grad.size else 0.0
    return Check("beta-hat stationarity", worst < 1e-6, worst, 1e-6,
                 f"{int(interior.sum())} interior of {n}")


def check_clamp(n: int = 2000, seed: int = 0) -> Check:
    model, ctx = fig1_setup()
    X = mixed_pixels(model, ctx, n, seed)
    pq = det.pixel_quadratic(ctx, model, X)
    beta, clamped = det.beta_hat(pq)
    rule = -pq.C >= pq.A + pq.B
    mismatches = int(np.sum(clamped != rule))
    positive = bool(np.all(beta[pq.c > 0] > 0))
    return Check("clamp iff -C >= A+B, beta > 0", mismatches == 0 and positive,
                 float(mismatches), 0.0, f"{int(clamped.sum())} clamped of {n}")


def _rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-12)))


def check_gaussian_limit(n: int = 1000, seed: int = 0) -> Check:
    model, ctx = fig1_setup()
    big, _ = fig1_setup(nu=NU_LIMIT)
    X = mixed_pixels(model, ctx, n, seed)
    alpha, beta = 0.2, 0.6
    errs = {
        "2spade": _rel_err(det.ec2spade_score(ctx, big, X).log_score,
                           det.gauss2spade_score(ctx, model, X).log_score),
        "amf": _rel_err(det.ec_amf_score(ctx, big, X), det.amf_score(ctx, X)),
        "ftmf": _rel_err(det.ec_ftmf_score(ctx, big, X), det.ftmf_score(ctx, model, X)),
        "clairvoyant": _rel_err(det.clairvoyant_score(ctx, big, X, alpha, beta),
                                det.clairvoyant_score(ctx, model, X, alpha, beta,
                                                      gaussian=True)),
    }
    worst = max(errs.values())
    which = max(errs, key=errs.get)
    return Check("EC -> Gaussian at nu=1e8", worst < 1e-3, worst, 1e-3, f"worst: {which}")


def check_dominance(n: int = 2000, seed: int = 0) -> Check:
    model, ctx = fig1_setup()
    X = mixed_pixels(model, ctx, n, seed)
    top = det.ec2spade_score(ctx, model, X).log_score
    others = np.maximum(det.ec_amf_score(ctx, model, X), det.ec_ftmf_score(ctx, model, X))
    gap = float(np.max(others - top))
    return Check("EC-2SPADE >= EC-AMF, EC-FTMF", gap <= 1e-9, max(gap, 0.0), 1e-9, f"n={n}")


def check_ftmf_dense(n: int = 10, seed: int = 0, n_grid: int = 1_000_000) -> Check:
    model, ctx = fig1_setup()
    X = mixed_pixels(model, ctx, n, seed)
    fast = det.ec_ftmf_score(ctx, model, X)
    grid = np.linspace(0.0, det.FTMF_ALPHA_MAX, n_grid)
    worst = 0.0
    for i, x in enumerate(X):
        xs = (x[None, :] - grid[:, None] * ctx.target) / (1 - grid[:, None])
        w = model.whiten(xs) - ctx.w_mu
        d1 = np.einsum("ij,ij->i", w, w)
        d0 = float(np.sum((model.whiten(x) - ctx.w_mu) ** 2))
        vals = (-model.d * np.log1p(-grid)
                - 0.5 * (model.d + model.nu) * np.log((model.nu - 2 + d1) / (model.nu - 2 + d0)))
        worst = max(worst, abs(max(float(vals.max()), 0.0) - fast[i]))
    return Check("EC-FTMF vs dense alpha grid", worst <= 1e-6, worst, 1e-6,
                 f"n={n}, grid={n_grid}")


def check_auc(n: int = 1000, seed: int = 0) -> Check:
    rng = make_rng(seed, 4)
    h0 = np.round(rng.normal(size=n), 2)
    h1 = np.round(rng.normal(0.7, 1.0, size=n), 2)
    err = abs(roc(h0, h1).auc - auc_pairwise(h0, h1))
    return Check("AUC = Mann-Whitney (ties 1/2)", err <= 1e-12, err, 1e-12, f"n={n}")


def check_normalization(seed: int = 0) -> Check:
    from .stats import log_density
    model = make_background([0.0], [[1.0]], 5.0)
    x = np.linspace(-400, 400, 800_001)
    dens = np.exp(log_density(model, x[:, None]))
    err = abs(float(np.sum(dens) * (x[1] - x[0])) - 1.0)
    return Check("density integrates to 1 (d=1)", err < 1e-3, err, 1e-3)


def run_all(seed: int = 0) -> list[Check]:
    return [
        check_oracle(seed=seed),
        check_oracle(seed=seed, gaussian=True),
        check_q_identities(seed=seed),
        check_stationarity(seed=seed),
        check_clamp(seed=seed),
        check_gaussian_limit(seed=seed),
        check_dominance(seed=seed),
        check_ftmf_dense(seed=seed),
        check_auc(seed=seed),
        check_normalization(seed=seed),
    ]
