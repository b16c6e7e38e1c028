"""Matched-pair Monte-Carlo experiments.

Each trial draws ``n_pairs`` background pixels z and scores both ``x0 = z``
and ``x1 = beta*z + alpha*t`` with every requested detector, so that the two
hypotheses share their clutter realization.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from . import detectors as det
from .errors import ConfigError, NumericalError
from .stats import make_background, sample

DETECTOR_IDS = ("amf", "ec-amf", "ftmf", "ec-ftmf", "2spade", "ec-2spade",
                "clairvoyant", "clairvoyant-gauss")
CLAIRVOYANT_IDS = ("clairvoyant", "clairvoyant-gauss")
GAUSSIAN_COUNTERPART = {"ec-amf": "amf", "ec-ftmf": "ftmf", "ec-2spade": "2spade",
                        "clairvoyant": "clairvoyant-gauss"}
FIG_BETAS = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
DEFAULT_N_PAIRS = 100_000
CHUNK = 1 << 17  # pixels per background draw; bounds memory for 1e7-pair runs


@dataclass(frozen=True)
class Scenario:
    d: int = 10
    nu: float = 10.0
    mu_fill: float = 2.0
    target_T: float = 15.0
    alpha: float = 0.2
    beta: float = 0.3
    n_pairs: int = DEFAULT_N_PAIRS
    n_trials: int = 3
    seed: int = 0
    detectors: tuple = DETECTOR_IDS
    constrained_alpha: bool = False

    def __post_init__(self):
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError(f"d must be a positive integer, got {self.d}")
        if not self.nu > 2:
            raise ConfigError(f"nu must be > 2, got {self.nu}")
        if not self.alpha >= 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 < self.beta <= 1:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")
        if self.n_pairs < 1 or self.n_trials < 1:
            raise ConfigError("n_pairs and n_trials must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        unknown = [name for name in self.detectors if name not in DETECTOR_IDS]
        if unknown or not self.detectors:
            raise ConfigError(f"unknown detector(s) {unknown}; choose from {DETECTOR_IDS}")

    @property
    def mean(self) -> np.ndarray:
        return np.full(self.d, float(self.mu_fill))

    @property
    def target(self) -> np.ndarray:
        t = self.mean.copy()
        t[0] += self.target_T
        return t

    def model(self):
        return make_background(self.mean, np.eye(self.d), self.nu)

    def fingerprint(self) -> str:
        return hashlib.sha256(dump_scenario(self).encode()).hexdigest()[:16]


PRESETS = {
    "fig1": Scenario(alpha=0.2, target_T=15.0),
    "fig2": Scenario(alpha=0.6, target_T=5.0),
}


@dataclass(frozen=True, eq=False)
class ScorePairs:
    beta: float
    trial: int
    fingerprint: str
    h0: dict = field(default_factory=dict)
    h1: dict = field(default_factory=dict)


def beta_stream_key(beta: float) -> int:
    return int(round(beta * 1_000_000_000))


def score_batch(name: str, ctx, model, X, scenario: Scenario) -> np.ndarray:
    """Score pixels with one detector; larger always means more target-like."""
    ca = scenario.constrained_alpha
    if name == "amf":
        return det.amf_score(ctx, X, constrained_alpha=ca)
    if name == "ec-amf":
        return det.ec_amf_score(ctx, model, X, constrained_alpha=ca)
    if name == "ftmf":
        return det.ftmf_score(ctx, model, X)
    if name == "ec-ftmf":
        return det.ec_ftmf_score(ctx, model, X)
    if name == "2spade":
        return det.gauss2spade_score(ctx, model, X, constrained_alpha=ca).log_score
    if name == "ec-2spade":
        return det.ec2spade_score(ctx, model, X, constrained_alpha=ca).log_score
    if name == "clairvoyant":
        return -det.clairvoyant_score(ctx, model, X, scenario.alpha, scenario.beta)
    if name == "clairvoyant-gauss":
        return -det.clairvoyant_score(ctx, model, X, scenario.alpha, scenario.beta,
                                      gaussian=True)
    raise ConfigError(f"unknown detector {name!r}")


def _check_finite(name, scores, X, hypothesis, offset=0):
    bad = np.flatnonzero(~np.isfinite(scores))
    if bad.size:
        i = int(bad[0])
        raise NumericalError(
            f"detector {name} produced {bad.size} non-finite score(s) under {hypothesis}; "
            f"first at pixel {offset + i}: x={np.array2string(X[i], precision=6)} "
            f"score={scores[i]}")


def run_trial(scenario: Scenario, trial_index: int) -> ScorePairs:
    """Score one trial. Backgrounds are drawn in blocks of ``CHUNK`` pixels,
    block k from stream ``(beta key, trial, k)``, so results depend only on the
    scenario and never on memory or scheduling."""
    if not 0 <= trial_index < scenario.n_trials:
        raise ValueError(f"trial_index {trial_index} outside [0, {scenario.n_trials})")
    model = scenario.model()
    t = scenario.target
    ctx = det.make_target_context(model, t)
    n = scenario.n_pairs
    pairs = ScorePairs(beta=scenario.beta, trial=trial_index,
                       fingerprint=scenario.fingerprint())
    for name in scenario.detectors:
        pairs.h0[name] = np.empty(n)
        pairs.h1[name] = np.empty(n)
    key = beta_stream_key(scenario.beta)
    for k, start in enumerate(range(0, n, CHUNK)):
        stop = min(start + CHUNK, n)
        z = sample(model, stop - start, seed=scenario.seed, stream=(key, trial_index, k)).data
        x1 = scenario.beta * z + scenario.alpha * t
        for name in scenario.detectors:
            s0 = np.asarray(score_batch(name, ctx, model, z, scenario), dtype=float)
            s1 = np.asarray(score_batch(name, ctx, model, x1, scenario), dtype=float)
            _check_finite(name, s0, z, "H0", start)
            _check_finite(name, s1, x1, "H1", start)
            pairs.h0[name][start:stop] = s0
            pairs.h1[name][start:stop] = s1
    return pairs


def iter_sweep(template: Scenario, beta_values) -> Iterator[ScorePairs]:
    """Yield ScorePairs for every (beta, trial), beta-major."""
    betas = list(beta_values)
    if not betas:
        raise ValueError("beta_values must be nonempty")
    scenarios = [dataclasses.replace(template, beta=float(b)) for b in betas]
    for sc in scenarios:
        for trial in range(sc.n_trials):
            yield run_trial(sc, trial)


def sweep(template: Scenario, beta_values) -> list[list[ScorePairs]]:
    out: dict[float, list] = {}
    for pairs in iter_sweep(template, beta_values):
        out.setdefault(pairs.beta, []).append(pairs)
    return list(out.values())


# ---- scenario files -------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(Scenario)}
_INT_FIELDS = ("d", "n_pairs", "n_trials", "seed")
_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_value(key: str, raw: str):
    if key in _INT_FIELDS:
        return int(raw)
    if key == "detectors":
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    if key == "constrained_alpha":
        try:
            return _BOOL_WORDS[raw.lower()]
        except KeyError:
            raise ValueError(f"not a boolean: {raw!r}") from None
    return float(raw)


def parse_scenario(text: str, base: Scenario | None = None):
    """Parse ``key = value`` lines into ``(Scenario, beta_values)``.

    ``beta`` may hold a comma-separated list; the returned scenario carries
    the first value and ``beta_values`` all of them. A ``preset = fig1`` line
    selects the starting values for every unspecified key.
    """
    values: dict = {}
    betas = None
    preset = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in values or (key == "beta" and betas is not None):
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key == "preset":
                if raw not in PRESETS:
                    raise ValueError(f"unknown preset {raw!r}")
                preset = PRESETS[raw]
            elif key == "beta":
                betas = [float(v) for v in raw.split(",") if v.strip()]
                if not betas:
                    raise ValueError("empty beta list")
            elif key in _FIELD_TYPES:
                values[key] = _parse_value(key, raw)
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    start = preset or base or Scenario()
    if betas is None:
        betas = list(FIG_BETAS) if preset is not None else [start.beta]
    scenario = dataclasses.replace(start, beta=betas[0], **values)
    for b in betas[1:]:
        dataclasses.replace(scenario, beta=b)  # validates every beta
    return scenario, betas


def load_scenario(path) -> tuple[Scenario, list]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    return parse_scenario(text)


def dump_scenario(scenario: Scenario, betas=None) -> str:
    lines = []
    for f in dataclasses.fields(Scenario):
        value = getattr(scenario, f.name)
        if f.name == "beta" and betas is not None:
            value = ", ".join(repr(float(b)) for b in betas)
        elif f.name == "detectors":
            value = ", ".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
