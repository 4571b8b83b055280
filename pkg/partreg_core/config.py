"""
Configuration module for partreg-core.

Provides the window sizes, search caps and stabilization settings shared by the
sumset engine, the colouring search and the constructive solver.
"""

import os
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml


@dataclass
class EngineConfig:
    """
    Tunable settings for finite-window computations.

    Every infinite object in the underlying arguments (densities, stabilization,
    "infinitely many levels") is rendered on a finite window; these values fix
    how large the windows are and how much evidence counts as stable.

    Attributes:
        # Windows
        window: Size N of the integer colouring window [1..N]
        levels: Number of dyadic levels (levels 0..levels-1)
        dyadic_window: Numerator window [1..W] at every dyadic level
        stabilize_window: Prefix of each colour class used for stabilization
        extension_window: Prefix of a colour class searched for extension witnesses
        max_window_bits: Optional clip on the stored window of sumset results

        # Stabilization
        probe_fraction: Probe region is this fraction of the certified half-width
        persistence_steps: Extra k for which a stable value must repeat
        k_max: Largest k tried before a stabilization is declared inconclusive
        min_dyadic_levels: Qualifying levels required by dyadic stabilization

        # Solver
        l_cap: Largest progression length tried when searching for the prefix system
        density_floor: Minimum window density of a dense class (None derives 1/(4*l_cap^2))
        search_bound: Default value bound for monochromatic solution search

        # Runtime
        seed: Seed for every randomized routine
        threads: Worker threads for per-class stages
    """

    # Windows
    window: int = 2_000_000
    levels: int = 25
    dyadic_window: int = 20_000
    stabilize_window: int = 100_000
    extension_window: int = 100_000
    max_window_bits: Optional[int] = None

    # Stabilization
    probe_fraction: float = 0.5
    persistence_steps: int = 1
    k_max: int = 64
    min_dyadic_levels: int = 3

    # Solver
    l_cap: int = 12
    density_floor: Optional[float] = None
    search_bound: int = 64

    # Runtime
    seed: int = 20240917
    threads: int = 1

    def dense_threshold(self) -> Fraction:
        """Density floor for dense colour classes, as an exact rational."""
        if self.density_floor is not None:
            return Fraction(self.density_floor).limit_denominator(10**9)
        return Fraction(1, 4 * self.l_cap * self.l_cap)

    @classmethod
    def from_env(cls) -> "EngineConfig":
        """
        Load settings from environment variables.

        Environment variables:
            PARTREG_WINDOW: Integer colouring window size
            PARTREG_LEVELS: Number of dyadic levels
            PARTREG_DYADIC_WINDOW: Numerator window per dyadic level
            PARTREG_STABILIZE_WINDOW: Class prefix used for stabilization
            PARTREG_EXTENSION_WINDOW: Class prefix used for extension witnesses
            PARTREG_PROBE_FRACTION: Probe fraction of the certified region
            PARTREG_PERSISTENCE_STEPS: Extra confirmations of a stable value
            PARTREG_K_MAX: Largest k tried by stabilization
            PARTREG_L_CAP: Largest progression length for the prefix system
            PARTREG_DENSITY_FLOOR: Dense-class threshold
            PARTREG_SEARCH_BOUND: Default monochromatic search bound
            PARTREG_SEED: Seed for randomized routines
            PARTREG_THREADS: Worker threads

        Returns:
            EngineConfig instance with values from environment
        """
        floor = os.getenv("PARTREG_DENSITY_FLOOR")
        return cls(
            window=int(os.getenv("PARTREG_WINDOW", 2_000_000)),
            levels=int(os.getenv("PARTREG_LEVELS", 25)),
            dyadic_window=int(os.getenv("PARTREG_DYADIC_WINDOW", 20_000)),
            stabilize_window=int(os.getenv("PARTREG_STABILIZE_WINDOW", 100_000)),
            extension_window=int(os.getenv("PARTREG_EXTENSION_WINDOW", 100_000)),
            probe_fraction=float(os.getenv("PARTREG_PROBE_FRACTION", 0.5)),
            persistence_steps=int(os.getenv("PARTREG_PERSISTENCE_STEPS", 1)),
            k_max=int(os.getenv("PARTREG_K_MAX", 64)),
            l_cap=int(os.getenv("PARTREG_L_CAP", 12)),
            density_floor=float(floor) if floor else None,
            search_bound=int(os.getenv("PARTREG_SEARCH_BOUND", 64)),
            seed=int(os.getenv("PARTREG_SEED", 20240917)),
            threads=int(os.getenv("PARTREG_THREADS", 1)),
        )

    @classmethod
    def quick(cls) -> "EngineConfig":
        """
        Create a small-window configuration for smoke runs and quick selftests.

        Returns:
            EngineConfig with reduced windows
        """
        return cls(
            window=60_000,
            levels=12,
            dyadic_window=4_000,
            stabilize_window=20_000,
            extension_window=20_000,
            k_max=24,
            l_cap=8,
        )

    @classmethod
    def thorough(cls) -> "EngineConfig":
        """
        Create a configuration with larger windows and stricter stability evidence.

        Returns:
            EngineConfig with enlarged windows
        """
        return cls(
            window=4_000_000,
            levels=25,
            dyadic_window=50_000,
            stabilize_window=400_000,
            extension_window=400_000,
            persistence_steps=2,
            k_max=128,
            l_cap=16,
        )

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "EngineConfig":
        """
        Load settings from a YAML mapping; unknown keys are rejected.

        Args:
            path: Path to a YAML file whose top level is a mapping of field names

        Returns:
            EngineConfig with the file's values over the defaults

        Raises:
            ValueError: If the file is not a mapping or names an unknown field
        """
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"Config file {path} must contain a mapping")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EngineConfig":
        """Build a config from a plain mapping."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        """Serialize to dictionary."""
        return asdict(self)
