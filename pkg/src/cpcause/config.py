"""
Configuration management for cpcause.

This module provides a centralized, type-safe configuration system using dataclasses.
Configuration can be loaded from a JSON file or used with defaults.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

ORDER_POLICIES = ("canonical", "reverse", "random")
DEFINITIONS = ("working", "hh", "intermediate", "final")
TYPICALITY_MODES = ("normative", "statistical")
OUTPUT_FORMATS = ("table", "json")


@dataclass
class EngineConfig:
    """Configuration for probability-tree construction and sampling."""

    order_policy: str = "canonical"  # Law selection at tree nodes
    policy_seed: int = 0  # Seed of the random order policy
    sample_count: int = 100_000  # Monte-Carlo samples for cross-checks

    def validate(self) -> None:
        """Validate configuration values."""
        if self.order_policy not in ORDER_POLICIES:
            raise ValueError(
                f"order_policy must be one of {ORDER_POLICIES}, got {self.order_policy!r}"
            )
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")


@dataclass
class CausationConfig:
    """Configuration for causal judgements."""

    default_definition: str = "final"

    def validate(self) -> None:
        """Validate configuration values."""
        if self.default_definition not in DEFINITIONS:
            raise ValueError(
                f"default_definition must be one of {DEFINITIONS}, got {self.default_definition!r}"
            )


@dataclass
class CheckConfig:
    """Configuration for the generated-instance sweeps."""

    seed: int = 0
    order_invariance_count: int = 500
    theorem2_count: int = 200
    lemma2_count: int = 100
    theorem1_count: int = 100

    # Generator bounds
    max_laws: int = 6
    max_atoms: int = 6
    random_policies: int = 3  # Seeded random orders compared besides canonical and reverse
    typicality_mode: str = "normative"  # "statistical" ignores norms when comparing worlds

    def validate(self) -> None:
        """Validate configuration values."""
        for name in ("order_invariance_count", "theorem2_count", "lemma2_count", "theorem1_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.max_laws < 1:
            raise ValueError(f"max_laws must be >= 1, got {self.max_laws}")
        if self.max_atoms < 2:
            raise ValueError(f"max_atoms must be >= 2, got {self.max_atoms}")
        if self.random_policies < 1:
            raise ValueError(f"random_policies must be >= 1, got {self.random_policies}")
        if self.typicality_mode not in TYPICALITY_MODES:
            raise ValueError(
                f"typicality_mode must be one of {TYPICALITY_MODES}, got {self.typicality_mode!r}"
            )


@dataclass
class OutputConfig:
    """Configuration for rendering results."""

    decimal_digits: int = 6  # Significant digits of decimal renderings
    format: str = "table"

    def validate(self) -> None:
        """Validate configuration values."""
        if not 1 <= self.decimal_digits <= 30:
            raise ValueError(f"decimal_digits must be in [1, 30], got {self.decimal_digits}")
        if self.format not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")


@dataclass
class Config:
    """
    Main configuration for cpcause.

    This configuration can be used with defaults or loaded from a JSON file.

    Example JSON file (cpcause.config.json):
    {
        "engine": {
            "order_policy": "canonical",
            "sample_count": 100000
        },
        "causation": {
            "default_definition": "final"
        },
        "check": {
            "seed": 7,
            "theorem2_count": 200,
            "typicality_mode": "normative"
        },
        "output": {
            "decimal_digits": 6
        }
    }
    """

    engine: EngineConfig = field(default_factory=EngineConfig)
    causation: CausationConfig = field(default_factory=CausationConfig)
    check: CheckConfig = field(default_factory=CheckConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> None:
        """Validate all configuration sections."""
        self.engine.validate()
        self.causation.validate()
        self.check.validate()
        self.output.validate()

    @classmethod
    def load_from_file(cls, config_path: Path) -> "Config":
        """
        Load configuration from a JSON file.

        Args:
            config_path: Path to the JSON configuration file

        Returns:
            Config instance with values from file (falling back to defaults for missing values)

        Raises:
            FileNotFoundError: If config_path doesn't exist
            json.JSONDecodeError: If file is not valid JSON
            ValueError: If configuration values are invalid
        """
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(config_path) as f:
            data = json.load(f)

        # Create config with partial data (missing keys use defaults)
        config = cls(
            engine=EngineConfig(**data.get("engine", {})),
            causation=CausationConfig(**data.get("causation", {})),
            check=CheckConfig(**data.get("check", {})),
            output=OutputConfig(**data.get("output", {})),
        )

        config.validate()

        return config

    @classmethod
    def load_from_file_or_default(cls, config_path: Path | None = None) -> "Config":
        """
        Load configuration from file if it exists, otherwise use defaults.

        Args:
            config_path: Optional path to config file. If None, looks for
                        'cpcause.config.json' in current directory.

        Returns:
            Config instance
        """
        if config_path is None:
            config_path = Path("cpcause.config.json")

        if config_path.exists():
            try:
                return cls.load_from_file(config_path)
            except Exception as e:
                logger.warning("Failed to load config from %s: %s", config_path, e)
                print(f"⚠️  Warning: Failed to load config from {config_path}: {e}")
                print("   Using default configuration.")
                return cls()

        return cls()

    def save_to_file(self, config_path: Path) -> None:
        """Save current configuration to a JSON file."""
        with open(config_path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    def to_dict(self) -> dict:
        """Convert configuration to dictionary."""
        return {
            "engine": asdict(self.engine),
            "causation": asdict(self.causation),
            "check": asdict(self.check),
            "output": asdict(self.output),
        }


# Global configuration instance (lazy-loaded singleton)
_config: Config | None = None


def get_config(config_path: Path | None = None, reload: bool = False) -> Config:
    """
    Get the global configuration instance (singleton pattern).

    Args:
        config_path: Optional path to config file. Only used on first call or if reload=True
        reload: If True, reload configuration from file even if already loaded

    Returns:
        Config instance

    Example:
        >>> config = get_config()
        >>> config.causation.default_definition
        'final'
    """
    global _config

    if _config is None or reload:
        _config = Config.load_from_file_or_default(config_path)

    return _config


def reset_config() -> None:
    """Reset the global configuration to defaults."""
    global _config
    _config = None
