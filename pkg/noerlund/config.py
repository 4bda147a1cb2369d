from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic_settings import BaseSettings

from noerlund import __version__
from noerlund.models import NormKind


class Settings(BaseSettings):
    # Application
    app_name: str = "noerlund"
    app_version: str = __version__
    log_level: str = "WARNING"

    # Sequences
    generator_rtol: float = 1e-12
    generator_samples: int = 64
    h_index_min_horizon: int = 16

    # Concave majorants
    contact_rtol: float = 1e-9

    # Operators
    default_norm: NormKind = NormKind.INDUCED_SUP
    rank_tol: float = 1e-10
    rank_gap_factor: float = 10.0
    resolvent_residual_rtol: float = 1e-8
    resolvent_cond_factor: float = 100.0
    spectral_radius_slack: float = 1e-6
    spectral_radius_squarings: int = 40

    # Growth-property verifier
    thm47_ratio_tol: float = 1e-2
    thm47_l1_tail_fraction: float = 1e-3

    # Convergence diagnostics
    convergence_atol: float = 5e-2
    convergence_decay_ratio: float = 0.9
    convergence_noise_floor: float = 1e-12
    divergence_factor: float = 10.0
    power_drift_rtol: float = 1e-8
    limit_match_tol: float = 1e-5
    abel_match_tol: float = 1e-3

    # Reproductions
    reproduction_l1_tail_fraction: float = 1e-2

    # Ensembles
    ensemble_horizon: int = 4096
    ensemble_workers: int = 1

    model_config = {
        "env_file": ".env",
        "env_prefix": "NOERLUND_",
        "case_sensitive": False,
    }

    @property
    def machine_epsilon(self) -> float:
        """Double-precision unit roundoff used by the conditioning cap."""
        return sys.float_info.epsilon

    @property
    def resolvent_cond_cap(self) -> float:
        """Largest condition number accepted by :func:`resolvent`."""
        return 1.0 / (self.resolvent_cond_factor * self.machine_epsilon)

    def tolerances(self) -> Dict[str, Any]:
        """Return every numeric threshold, keyed by field name."""
        return {
            name: value
            for name, value in self.model_dump(mode="json").items()
            if name not in {"app_name", "app_version", "log_level"}
        }

    def tolerance_overrides(self) -> Dict[str, Any]:
        """Return the thresholds that deviate from the declared defaults."""
        defaults = {name: field.default for name, field in type(self).model_fields.items()}
        current = self.model_dump()
        return {
            name: self.tolerances()[name]
            for name in self.tolerances()
            if current[name] != defaults[name]
        }


def load_settings(config_path: Optional[Path] = None, **overrides: Any) -> Settings:
    """Build settings from an optional JSON run file plus flag overrides.

    Precedence, lowest first: field defaults, environment / ``.env``, the
    run file, then ``overrides``. Overrides whose value is ``None`` are
    ignored so unset CLI flags do not mask the file.
    """

    values: Dict[str, Any] = {}
    if config_path is not None:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError(f"Config file {config_path} must contain a JSON object")
        values.update(raw.get("settings", raw))
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)


settings = Settings()


def configure(new: Settings) -> Settings:
    """Copy ``new`` onto the shared ``settings`` instance used as module default."""

    for name in Settings.model_fields:
        setattr(settings, name, getattr(new, name))
    return settings
