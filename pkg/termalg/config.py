from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from termalg.theory.types import Budget


def repo_root() -> Path:
    return Path(__file__).resolve().parents[1]


def data_dir() -> Path:
    return Path(os.getenv("TERMALG_DATA_DIR", repo_root() / "data"))


def theories_dir() -> Path:
    return data_dir() / "theories"


def algebras_dir() -> Path:
    return data_dir() / "algebras"


def proofs_dir() -> Path:
    return data_dir() / "proofs"


@dataclass
class Settings:
    n_jobs: int = 1
    term_size: int = 12
    steps: int = 5000
    model_size: int = 3
    probe_samples: int = 0
    log_level: str = "WARNING"
    sigma_r_side_conditions: str = "base"

    @property
    def default_budget(self) -> Budget:
        return Budget(max_term_size=self.term_size, max_steps=self.steps, max_model_size=self.model_size)


def load_settings() -> Settings:
    return Settings(
        n_jobs=int(os.getenv("TERMALG_N_JOBS", "1")),
        term_size=int(os.getenv("TERMALG_TERM_SIZE", "12")),
        steps=int(os.getenv("TERMALG_STEPS", "5000")),
        model_size=int(os.getenv("TERMALG_MODEL_SIZE", "3")),
        probe_samples=int(os.getenv("TERMALG_PROBE_SAMPLES", "0")),
        log_level=os.getenv("TERMALG_LOG_LEVEL", "WARNING").upper(),
        sigma_r_side_conditions=os.getenv("TERMALG_SIGMA_R_CLOSURE", "base").lower(),
    )
