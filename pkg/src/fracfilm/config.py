"""Run configuration: flat ``key = value`` files, validation, initial data."""

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import spectral as sp
from .entropy import MobilitySpec
from .stepper import ModelParams, project_initial

PRESETS = ("constant", "bump", "cosine_mix", "custom")


class ConfigError(ValueError):
    pass


def _float_list(value):
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    text = str(value).strip()
    if not text:
        return []
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1.0
    n: float = 3.0
    epsilon: tuple = (1e-4,)
    T: float = 0.01
    n_steps: int = 20
    n_modes: int = 32
    initial_condition: str = "cosine_mix"
    ic_level: float = 1.0
    ic_coeffs: tuple = (0.2,)
    bump_height: float = 1.0
    bump_offset: float = 0.05
    noise: float = 0.0
    seed: int = 0
    output_dir: str = "fracfilm-out"
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    damping_min: float = 1.0 / 1024
    positivity_floor: float = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "epsilon", tuple(_float_list(self.epsilon)))
            object.__setattr__(self, "ic_coeffs", tuple(_float_list(self.ic_coeffs)))
            for f in fields(self):
                v = getattr(self, f.name)
                if f.type is float and v is not None:
                    object.__setattr__(self, f.name, float(v))
                elif f.type is int:
                    iv = int(float(v))
                    if iv != float(v):
                        raise ConfigError(f"{f.name} must be an integer, got {v}")
                    object.__setattr__(self, f.name, iv)
                elif f.type is str:
                    object.__setattr__(self, f.name, str(v))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        self.validate()

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(0.0 < self.alpha < 2.0, f"alpha must lie in (0, 2), got {self.alpha}")
        need(self.n >= 1.0, f"n must be >= 1, got {self.n}")
        need(len(self.epsilon) >= 1, "epsilon needs at least one value")
        need(all(e >= 0 and math.isfinite(e) for e in self.epsilon),
             f"epsilon values must be >= 0, got {list(self.epsilon)}")
        if len(self.epsilon) > 1:
            need(all(e > 0 for e in self.epsilon), "an epsilon schedule must be positive")
            need(all(b < a for a, b in zip(self.epsilon, self.epsilon[1:])),
                 "an epsilon schedule must be strictly decreasing")
        need(self.T > 0 and math.isfinite(self.T), f"T must be > 0, got {self.T}")
        need(self.n_steps >= 1, f"n_steps must be >= 1, got {self.n_steps}")
        need(self.n_modes >= 4, f"n_modes must be >= 4, got {self.n_modes}")
        need(self.initial_condition in PRESETS,
             f"initial_condition must be one of {', '.join(PRESETS)}")
        if self.initial_condition == "custom":
            need(len(self.ic_coeffs) >= 1, "custom initial condition needs ic_coeffs")
        need(self.noise >= 0, "noise must be >= 0")
        need(self.newton_tol > 0, "newton_tol must be > 0")
        need(self.newton_max_iter >= 1, "newton_max_iter must be >= 1")
        need(0 < self.damping_min <= 1, "damping_min must lie in (0, 1]")

    @property
    def is_schedule(self):
        return len(self.epsilon) > 1

    def params(self, eps=None):
        eps = self.epsilon[-1] if eps is None else eps
        return ModelParams(
            alpha=self.alpha,
            mobility=MobilitySpec(self.n, eps),
            n_modes=self.n_modes,
            newton_tol=self.newton_tol,
            newton_max_iter=self.newton_max_iter,
            damping_min=self.damping_min,
        )

    def to_dict(self):
        d = asdict(self)
        d["epsilon"] = list(self.epsilon)
        d["ic_coeffs"] = list(self.ic_coeffs)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        return RunConfig.from_dict(d)


def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def load_config(path=None, overrides=None):
    values = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    if values.get("positivity_floor") in ("", "none", "None"):
        values["positivity_floor"] = None
    return RunConfig.from_dict(values)


def initial_field(cfg):
    """Coefficients of the configured initial condition on n_modes modes."""
    n = cfg.n_modes
    c = np.zeros(n)
    ic = cfg.initial_condition
    if ic == "constant":
        c[0] = cfg.ic_level
    elif ic == "cosine_mix":
        c[0] = cfg.ic_level
        a = np.asarray(cfg.ic_coeffs[: n - 1])
        c[1 : 1 + a.size] = a
    elif ic == "custom":
        a = np.asarray(cfg.ic_coeffs[:n])
        c[: a.size] = a
    else:  # bump: max(0, offset + height (1 - cos 2 pi x) / 2), projected
        x = sp.nodes(8 * n)
        vals = np.maximum(0.0, cfg.bump_offset + cfg.bump_height * (1.0 - np.cos(2 * np.pi * x)) / 2.0)
        c = project_initial(vals, cfg.params()).field.coeffs.copy()
    if cfg.noise > 0:
        rng = np.random.default_rng(cfg.seed)
        k = np.arange(1, n)
        c[1:] += cfg.noise * rng.standard_normal(n - 1) / (1.0 + k) ** 2
    return sp.SpectralField(c)
