"""Run configuration: flat key-value files with dotted section prefixes.

A config file holds lines like ``model.lambda1 = 0.1``; the same keys are
accepted as command-line flags (``--model.lambda1 0.1``), which take
precedence.  Unknown keys are an error, never silently absorbed.

The model block comes in exactly one of two forms: dimensionless
(model.lambda1/lambda2 and optionally mu1/mu2) or dimensionful
(model.Lambda1/Lambda2/Lambda3/m1/m2/phi0, stripped by
:func:`glshoot.model.nondimensionalize`).  The eps sign flags belong to
both forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .integrator import IntegratorConfig
from .model import DimensionfulParams, ModelParams, nondimensionalize
from .shooting import ShootSpec

__all__ = ["ConfigError", "RunConfig", "CONFIG_SCHEMA", "PAPER_DEFAULT_CHI0"]


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to exit code 2."""


# chi0 values of the bundled reference sweep, loaded by --paper-defaults
PAPER_DEFAULT_CHI0 = (
    0.3,
    math.sqrt(0.2),
    math.sqrt(0.4),
    math.sqrt(0.6),
    math.sqrt(0.8),
    1.0,
    math.sqrt(1.2),
    math.sqrt(1.4),
)


def _to_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}") from None


def _to_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}") from None


def _to_sign(raw: str) -> int:
    val = _to_int(raw)
    if val not in (1, -1):
        raise ConfigError(f"expected +1 or -1, got {raw!r}")
    return val


def _to_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _to_float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError("expected a comma-separated list of numbers")
    return tuple(_to_float(p) for p in parts)


def _to_formats(raw: str) -> tuple[str, ...]:
    parts = tuple(p.strip().lower() for p in raw.split(",") if p.strip())
    for p in parts:
        if p not in ("csv", "json"):
            raise ConfigError(f"unknown output format {p!r} (use csv or json)")
    if not parts:
        raise ConfigError("output.formats must not be empty")
    return parts


def _to_str(raw: str) -> str:
    return raw.strip()


# key -> (converter, help text)
CONFIG_SCHEMA: dict[str, tuple] = {
    "model.eps1": (_to_sign, "kinetic sign flag of phi (+1 usual, -1 phantom)"),
    "model.eps2": (_to_sign, "kinetic sign flag of chi"),
    "model.lambda1": (_to_float, "dimensionless phi self-coupling"),
    "model.lambda2": (_to_float, "dimensionless chi self-coupling"),
    "model.mu1": (_to_float, "dimensionless phi mass (fixed-points command)"),
    "model.mu2": (_to_float, "dimensionless chi mass (fixed-points command)"),
    "model.Lambda1": (_to_float, "dimensionful phi self-coupling"),
    "model.Lambda2": (_to_float, "dimensionful chi self-coupling"),
    "model.Lambda3": (_to_float, "dimensionful interaction coupling (> 0)"),
    "model.m1": (_to_float, "dimensionful phi mass"),
    "model.m2": (_to_float, "dimensionful chi mass"),
    "model.phi0": (_to_float, "dimensionful field scale phi(r=0)"),
    "shooting.phi0": (_to_float, "phi(0) in units of the field scale"),
    "shooting.chi0": (_to_float_list, "chi(0) values, comma separated"),
    "shooting.mu1_lo": (_to_float, "lower mu1 bracket endpoint"),
    "shooting.mu1_hi": (_to_float, "upper mu1 bracket endpoint"),
    "shooting.mu2_lo": (_to_float, "lower mu2 bracket endpoint"),
    "shooting.mu2_hi": (_to_float, "upper mu2 bracket endpoint"),
    "shooting.mu_tol": (_to_float, "bisection tolerance on each eigenvalue"),
    "shooting.constraint_tol": (_to_float, "allowed |V(phi0, chi0)| at convergence"),
    "shooting.nesting": (_to_str, "mu1_outer (default) or mu2_outer"),
    "shooting.warm_start": (_to_bool, "seed sweep brackets from the previous row"),
    "shooting.workers": (_to_int, "concurrent sweep rows (needs warm_start=false)"),
    "integrator.rel_tol": (_to_float, "relative local error tolerance"),
    "integrator.abs_tol": (_to_float, "absolute local error tolerance"),
    "integrator.initial_step": (_to_float, "first step size"),
    "integrator.max_step": (_to_float, "step size cap"),
    "integrator.x_max": (_to_float, "integration horizon"),
    "integrator.escape_radius": (_to_float, "divergence cutoff on |phi|, |chi|"),
    "integrator.max_samples": (_to_int, "output sample cap"),
    "output.directory": (_to_str, "export directory"),
    "output.formats": (_to_formats, "csv, json or both (comma separated)"),
}

_DIMENSIONLESS_KEYS = ("model.lambda1", "model.lambda2", "model.mu1", "model.mu2")
_DIMENSIONFUL_KEYS = (
    "model.Lambda1",
    "model.Lambda2",
    "model.Lambda3",
    "model.m1",
    "model.m2",
    "model.phi0",
)

_DEFAULTS: dict[str, Any] = {
    "model.eps1": 1,
    "model.eps2": 1,
    "shooting.phi0": 1.0,
    "shooting.chi0": (0.3,),
    "shooting.mu2_lo": 0.5,
    "shooting.mu2_hi": 5.0,
    "shooting.mu_tol": 1e-8,
    "shooting.constraint_tol": 1e-4,
    "shooting.nesting": "mu1_outer",
    "shooting.warm_start": True,
    "shooting.workers": 1,
    "integrator.rel_tol": 1e-10,
    "integrator.abs_tol": 1e-10,
    "integrator.initial_step": 1e-4,
    "integrator.max_step": 0.1,
    "integrator.x_max": 40.0,
    "integrator.max_samples": 100_000,
    "output.directory": ".",
    "output.formats": ("csv",),
}

PAPER_DEFAULTS = {
    "model.eps1": 1,
    "model.eps2": 1,
    "model.lambda1": 0.1,
    "model.lambda2": 1.0,
    "shooting.phi0": 1.0,
    "shooting.chi0": PAPER_DEFAULT_CHI0,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse ``key = value`` lines; comments start with '#'."""
    values: dict[str, Any] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_val = line.partition("=")
        key = key.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        conv, _help = CONFIG_SCHEMA[key]
        try:
            values[key] = conv(raw_val.strip())
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    return values


def convert_override(key: str, raw: str) -> Any:
    if key not in CONFIG_SCHEMA:
        raise ConfigError(f"unknown key {key!r}")
    conv, _help = CONFIG_SCHEMA[key]
    return conv(raw)


@dataclass
class RunConfig:
    """Validated, merged configuration for one CLI invocation."""

    values: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, file_values: Optional[dict[str, Any]] = None,
              overrides: Optional[dict[str, Any]] = None,
              paper_defaults: bool = False) -> "RunConfig":
        merged = dict(_DEFAULTS)
        if file_values:
            merged.update(file_values)
        if paper_defaults:
            merged.update(PAPER_DEFAULTS)
        if overrides:
            merged.update(overrides)
        cfg = cls(merged)
        cfg._validate()
        return cfg

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def _validate(self) -> None:
        has_dimless = any(k in self.values for k in _DIMENSIONLESS_KEYS)
        has_dimful = any(k in self.values for k in _DIMENSIONFUL_KEYS)
        if has_dimless and has_dimful:
            raise ConfigError(
                "give either the dimensionless model block (model.lambda*/mu*) "
                "or the dimensionful one (model.Lambda*/m*/phi0), not both"
            )
        if not has_dimless and not has_dimful:
            raise ConfigError(
                "no model block: set model.lambda1/lambda2 (or the dimensionful "
                "inputs), or pass --paper-defaults"
            )
        if has_dimful:
            missing = [k for k in _DIMENSIONFUL_KEYS if k not in self.values]
            if missing:
                raise ConfigError(f"dimensionful model block incomplete, missing {missing}")
        else:
            for k in ("model.lambda1", "model.lambda2"):
                if k not in self.values:
                    raise ConfigError(f"dimensionless model block needs {k}")
        if self.get("shooting.workers") > 1 and self.get("shooting.warm_start"):
            raise ConfigError(
                "shooting.workers > 1 requires shooting.warm_start = false "
                "(warm starting is inherently sequential)"
            )
        nesting = self.get("shooting.nesting")
        if nesting not in ("mu1_outer", "mu2_outer"):
            raise ConfigError(f"shooting.nesting must be mu1_outer or mu2_outer, got {nesting!r}")

    # -- derived objects ----------------------------------------------------

    def _dimensionless_model(self) -> dict[str, float]:
        if "model.Lambda1" in self.values:
            d = DimensionfulParams(
                Lambda1=self.get("model.Lambda1"),
                Lambda2=self.get("model.Lambda2"),
                Lambda3=self.get("model.Lambda3"),
                m1=self.get("model.m1"),
                m2=self.get("model.m2"),
                phi0=self.get("model.phi0"),
            )
            p = nondimensionalize(d, self.get("model.eps1"), self.get("model.eps2"))
            return {
                "lambda1": p.lambda1,
                "lambda2": p.lambda2,
                "mu1": p.mu1,
                "mu2": p.mu2,
            }
        out = {
            "lambda1": self.get("model.lambda1"),
            "lambda2": self.get("model.lambda2"),
        }
        if self.get("model.mu1") is not None:
            out["mu1"] = self.get("model.mu1")
        if self.get("model.mu2") is not None:
            out["mu2"] = self.get("model.mu2")
        return out

    def model_params(self) -> ModelParams:
        """Full ModelParams; requires the masses (fixed-points command)."""
        m = self._dimensionless_model()
        if "mu1" not in m or "mu2" not in m:
            raise ConfigError("this command needs model.mu1 and model.mu2")
        try:
            return ModelParams(
                eps1=self.get("model.eps1"),
                eps2=self.get("model.eps2"),
                lambda1=m["lambda1"],
                lambda2=m["lambda2"],
                mu1=m["mu1"],
                mu2=m["mu2"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def integrator_config(self) -> IntegratorConfig:
        try:
            return IntegratorConfig(
                rel_tol=self.get("integrator.rel_tol"),
                abs_tol=self.get("integrator.abs_tol"),
                initial_step=self.get("integrator.initial_step"),
                max_step=self.get("integrator.max_step"),
                x_max=self.get("integrator.x_max"),
                escape_radius=self.get("integrator.escape_radius"),
                max_samples=self.get("integrator.max_samples"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def shoot_spec(self, chi0: float) -> ShootSpec:
        m = self._dimensionless_model()
        mu1_bracket = None
        if self.get("shooting.mu1_lo") is not None or self.get("shooting.mu1_hi") is not None:
            if self.get("shooting.mu1_lo") is None or self.get("shooting.mu1_hi") is None:
                raise ConfigError("set both shooting.mu1_lo and shooting.mu1_hi or neither")
            mu1_bracket = (self.get("shooting.mu1_lo"), self.get("shooting.mu1_hi"))
        try:
            return ShootSpec(
                chi0=chi0,
                phi0=self.get("shooting.phi0"),
                eps1=self.get("model.eps1"),
                eps2=self.get("model.eps2"),
                lambda1=m["lambda1"],
                lambda2=m["lambda2"],
                mu1_bracket=mu1_bracket,
                mu2_bracket=(self.get("shooting.mu2_lo"), self.get("shooting.mu2_hi")),
                mu_tol=self.get("shooting.mu_tol"),
                constraint_tol=self.get("shooting.constraint_tol"),
                integrator=self.integrator_config(),
                nesting=self.get("shooting.nesting"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def chi0_values(self) -> tuple[float, ...]:
        return tuple(self.get("shooting.chi0"))

    @property
    def formats(self) -> tuple[str, ...]:
        return tuple(self.get("output.formats"))

    @property
    def out_dir(self) -> str:
        return self.get("output.directory")
