#!/usr/bin/env python3
"""
config.py - Configuration management for cubiclin

Loads, saves and merges analysis settings, including the INI profiles
shipped in the package's ``profiles`` directory.
"""

import os
import configparser
from fractions import Fraction
from typing import Dict, Any, Optional, List

from ..errors import MalformedInput
from ..core.exact import to_scalar

# Default configuration values
DEFAULT_CONFIG = {
    "ANALYSIS": {
        "exact": "true",
        "tolerance": "1e-9",  # membership tolerance for float vectors
        "seed": "0",
        "multithreading": "true",
        "max_workers": "4",
        "timings": "true",
    },
    "DRUZKOWSKI": {
        "trials": "50",
        "sample_bound": "1000000",  # points drawn from [-bound, bound]^m
    },
    "PROBE": {
        "lambdas": "-1000,-100,-10,-1,-0.1,-0.01,0,0.01,0.1,1,10,100,1000",
        "starts_per_lambda": "6",
        "radii": "1,10,100",
        "max_iterations": "200",
        "max_halvings": "40",
        "divergence_radius": "1e12",
        "escape_radius": "1e6",
        "residual_tolerance": "1e-12",
        "min_root_norm": "1e-6",
    },
    "WITNESS": {
        "gammas": "10,100,1000,10000",
        "decay_gammas": "100,1000,10000,100000",
        "line_ts": "-2,-1,1,2",
        "randomized_candidates": "16",
    },
    "FAMILY": {
        "sample_bound": "100",
        "max_retries": "100",
    },
    "OUTPUT": {
        "indent": "2",
    },
}

SEED_ENV_VAR = "CUBICLIN_SEED"

# Profile directory
PROFILE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "profiles")


def parse_number_list(text: str) -> List[Fraction]:
    """Parse a comma-separated list such as "10,100,1/3" into exact numbers

    Decimal and exponent forms ("0.01", "1e6") are read exactly.

    Raises:
        MalformedInput: If the list is empty or an item is not a number
    """
    items = [item.strip() for item in str(text).split(",")]
    if not any(items):
        raise MalformedInput("Empty number list")
    values = []
    for item in items:
        if not item:
            raise MalformedInput(f"Empty item in number list {text!r}")
        try:
            values.append(to_scalar(item))
        except MalformedInput:
            try:
                values.append(to_scalar(float(item)))
            except ValueError:
                raise MalformedInput(f"Not a number: {item!r}")
    return values


class ConfigManager:
    """Manages configuration settings for cubiclin"""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration manager

        Args:
            config_path: Path to configuration file (optional)
        """
        self.config = configparser.ConfigParser()

        for section, options in DEFAULT_CONFIG.items():
            if section not in self.config:
                self.config[section] = {}
            for option, value in options.items():
                self.config[section][option] = value

        if config_path and os.path.exists(config_path):
            self.config.read(config_path)
            self.config_path = config_path
        else:
            self.config_path = "config.cfg"

    def save(self, config_path: Optional[str] = None) -> str:
        """Save current configuration to file

        Returns:
            Path where configuration was saved
        """
        save_path = config_path or self.config_path
        with open(save_path, 'w') as f:
            self.config.write(f)
        return save_path

    def overlay(self, path: str) -> None:
        """Read ``path`` on top of the current values"""
        self.config.read(path)

    def get_value(self, section: str, option: str, fallback: Any = None) -> Any:
        return self.config.get(section, option, fallback=fallback)

    def set_value(self, section: str, option: str, value: Any) -> None:
        if section not in self.config:
            self.config[section] = {}
        self.config[section][option] = str(value)

    def _typed(self, reader, section: str, option: str):
        try:
            return reader(section, option)
        except (ValueError, configparser.Error) as e:
            raise MalformedInput(f"Bad value for [{section}] {option}: {e}")

    def get_int(self, section: str, option: str) -> int:
        return self._typed(self.config.getint, section, option)

    def get_float(self, section: str, option: str) -> float:
        return self._typed(self.config.getfloat, section, option)

    def get_bool(self, section: str, option: str) -> bool:
        return self._typed(self.config.getboolean, section, option)

    def get_fraction_list(self, section: str, option: str) -> List[Fraction]:
        return parse_number_list(self.get_value(section, option, ""))

    def get_list(self, section: str, option: str) -> List[float]:
        return [float(x) for x in self.get_fraction_list(section, option)]

    def seed(self, override: Optional[int] = None) -> int:
        """Seed from the flag, then the environment, then [ANALYSIS] seed"""
        if override is not None:
            return override
        env = os.environ.get(SEED_ENV_VAR)
        if env:
            try:
                return int(env)
            except ValueError:
                raise MalformedInput(f"{SEED_ENV_VAR} is not an integer: {env!r}")
        return self.get_int("ANALYSIS", "seed")

    def workers(self) -> int:
        if not self.get_bool("ANALYSIS", "multithreading"):
            return 1
        return max(1, self.get_int("ANALYSIS", "max_workers"))

    def as_dict(self) -> Dict[str, Dict[str, str]]:
        """Export configuration as nested dictionary"""
        result = {}
        for section in self.config.sections():
            result[section] = {}
            for option in self.config[section]:
                result[section][option] = self.config[section][option]
        return result


class ProfileManager:
    """Manages analysis profiles"""

    def __init__(self, profile_dir: str = PROFILE_DIR):
        self.profile_dir = profile_dir
        os.makedirs(self.profile_dir, exist_ok=True)

    def list_profiles(self) -> List[str]:
        profiles = []
        for filename in sorted(os.listdir(self.profile_dir)):
            if filename.endswith('.ini') or filename.endswith('.cfg'):
                profiles.append(os.path.splitext(filename)[0])
        return profiles

    def profile_path(self, profile_name: str) -> Optional[str]:
        for ext in (".ini", ".cfg"):
            path = os.path.join(self.profile_dir, f"{profile_name}{ext}")
            if os.path.exists(path):
                return path
        return None

    def load_profile(self, profile_name: str) -> Optional[ConfigManager]:
        """Load a profile

        Returns:
            ConfigManager with profile settings, or None if not found
        """
        path = self.profile_path(profile_name)
        return ConfigManager(path) if path else None

    def apply_profile(self, profile_name: str, config: ConfigManager) -> bool:
        """Overlay a profile onto ``config``; False if it does not exist"""
        path = self.profile_path(profile_name)
        if path is None:
            return False
        config.overlay(path)
        return True

    def save_profile(self, profile_name: str, config: ConfigManager) -> str:
        """Save a profile

        Returns:
            Path where profile was saved
        """
        profile_path = os.path.join(self.profile_dir, f"{profile_name}.ini")
        if "PROFILE" not in config.config:
            config.config["PROFILE"] = {}
        config.config["PROFILE"]["name"] = profile_name
        return config.save(profile_path)

    def get_profile_info(self, profile_name: str) -> Optional[Dict[str, str]]:
        profile_config = self.load_profile(profile_name)
        if not profile_config:
            return None
        if "PROFILE" in profile_config.config:
            return dict(profile_config.config["PROFILE"])
        return {"name": profile_name}
