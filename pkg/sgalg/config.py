"""
Runtime settings, read from the environment (and a local .env) at call time.

  SG_ALG_THREADS=0            # 0 = auto, 1 = sequential
  SG_ALG_TOL=1e-9             # value-iteration tolerance
  SG_ALG_PRECISION=1e-9       # width of reported isolating intervals
  SG_ALG_GRID_BITS=128        # value-iteration rounding grid 2^-bits
  SG_ALG_MAX_ITER=100000      # value-iteration cap
  SG_ALG_RETRIES=3            # tolerance tightenings on ambiguity
  SG_ALG_KERNEL_CANDIDATES=64 # fallback kernel selections tried
  SG_ALG_K0=1                 # limit schedule 1 - 10^-k, k = K0..KMAX
  SG_ALG_KMAX=6
  SG_ALG_KMAX_CAP=8           # limit solver escalates KMAX up to this
  SG_ALG_DRIFT_C=10           # drift envelope C * (1 - beta)^(1/M)
  SG_ALG_DRIFT_M=4
  SG_ALG_LOG_LEVEL=INFO
  SG_ALG_REPORT_TTL_MIN=30    # service: minutes an idle job is kept
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from fractions import Fraction

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    return int(raw) if raw else default


def _env_fraction(name: str, default: str) -> Fraction:
    raw = os.getenv(name, "").strip() or default
    return Fraction(raw)


@dataclass(frozen=True)
class Settings:
    threads: int = 0
    tol: Fraction = Fraction(1, 10**9)
    precision: Fraction = Fraction(1, 10**9)
    grid_bits: int = 128
    max_iter: int = 100_000
    retries: int = 3
    kernel_candidates: int = 64
    k0: int = 1
    kmax: int = 6
    kmax_cap: int = 8
    drift_c: Fraction = Fraction(10)
    drift_m: int = 4
    log_level: str = "INFO"
    report_ttl_min: float = 30.0

    @property
    def workers(self) -> int:
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1

    def with_overrides(self, **changes) -> "Settings":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def load_settings() -> Settings:
    return Settings(
        threads=_env_int("SG_ALG_THREADS", 0),
        tol=_env_fraction("SG_ALG_TOL", "1e-9"),
        precision=_env_fraction("SG_ALG_PRECISION", "1e-9"),
        grid_bits=_env_int("SG_ALG_GRID_BITS", 128),
        max_iter=_env_int("SG_ALG_MAX_ITER", 100_000),
        retries=_env_int("SG_ALG_RETRIES", 3),
        kernel_candidates=_env_int("SG_ALG_KERNEL_CANDIDATES", 64),
        k0=_env_int("SG_ALG_K0", 1),
        kmax=_env_int("SG_ALG_KMAX", 6),
        kmax_cap=_env_int("SG_ALG_KMAX_CAP", 8),
        drift_c=_env_fraction("SG_ALG_DRIFT_C", "10"),
        drift_m=_env_int("SG_ALG_DRIFT_M", 4),
        log_level=(os.getenv("SG_ALG_LOG_LEVEL") or "INFO").upper(),
        report_ttl_min=float(os.getenv("SG_ALG_REPORT_TTL_MIN", "30") or 30),
    )


def configure_logging(settings: Settings) -> None:
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
