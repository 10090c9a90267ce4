"""Configuration management for the record linkage engine."""

import os
import yaml
import logging
from typing import Dict, Any, Optional

from historical_record_linker.errors import ConfigError
from historical_record_linker.model import MatchConfig
from historical_record_linker.rules import EMPTY_RULESET, RoleRuleSet, load_ruleset

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_ENV = "HRL_CONFIG"
DEFAULT_JOBS_ENV = "HRL_JOBS"
DEFAULT_LOG_FILE_ENV = "HRL_LOG_FILE"

MATCHING_KEYS = {
    "name_metric": str,
    "name_threshold": (int, float),
    "location_threshold": (int, float),
    "window_years": int,
    "min_relationship_support": int,
    "relationship_required": bool,
    "missing_location_matches": bool,
    "fuzzy_keys": bool,
    "missing_first_name_penalty": (int, float),
}
SECTIONS = {"matching", "rules", "inputs", "jobs"}


def _is_type(value: Any, expected) -> bool:
    # bool is an int subclass; only accept it where a bool is asked for
    if isinstance(value, bool):
        return expected is bool
    return isinstance(value, expected)


def validate_config(config: Dict[str, Any]) -> bool:
    """Validate the configuration structure."""
    if not isinstance(config, dict):
        logger.error("Configuration must be a mapping of sections")
        return False

    valid = True
    for key in config:
        if key not in SECTIONS:
            logger.error(f"Unknown configuration section '{key}'; expected one of {sorted(SECTIONS)}")
            valid = False

    matching = config.get("matching", {}) or {}
    if not isinstance(matching, dict):
        logger.error("'matching' must be a mapping")
        valid = False
    else:
        for key, value in matching.items():
            if key not in MATCHING_KEYS:
                logger.error(f"Unknown matching option '{key}'")
                valid = False
            elif not _is_type(value, MATCHING_KEYS[key]):
                logger.error(f"Matching option '{key}' has invalid value {value!r}")
                valid = False

    rules = config.get("rules", {}) or {}
    if not isinstance(rules, dict):
        logger.error("'rules' must be a mapping")
        valid = False
    else:
        if "file" in rules and not isinstance(rules["file"], str):
            logger.error("'rules.file' must be a path")
            valid = False
        if "enabled" in rules and not isinstance(rules["enabled"], bool):
            logger.error("'rules.enabled' must be true or false")
            valid = False

    inputs = config.get("inputs", {}) or {}
    if not isinstance(inputs, dict):
        logger.error("'inputs' must be a mapping")
        valid = False
    else:
        for key, value in inputs.items():
            if key not in ("aliases", "role_map") or not isinstance(value, str):
                logger.error(f"Invalid input entry '{key}': {value!r}")
                valid = False

    jobs = config.get("jobs")
    if jobs is not None and (not _is_type(jobs, int) or jobs < 1):
        logger.error(f"'jobs' must be a positive integer, got {jobs!r}")
        valid = False

    if valid:
        logger.info("Configuration validated successfully")
    return valid


def load_config(config_path: str) -> Optional[Dict[str, Any]]:
    """Load and validate configuration from YAML file."""
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f)

        # an empty file means all defaults
        if config is None:
            config = {}

        if not validate_config(config):
            return None

        return config
    except FileNotFoundError:
        logger.error(f"Configuration file '{config_path}' not found")
        return None
    except yaml.YAMLError as e:
        logger.error(f"Error parsing YAML configuration: {e}")
        return None


def default_config_path() -> Optional[str]:
    return os.environ.get(DEFAULT_CONFIG_ENV) or None


def default_log_file() -> Optional[str]:
    return os.environ.get(DEFAULT_LOG_FILE_ENV) or None


def resolve_jobs(cli_jobs: Optional[int], config: Optional[Dict[str, Any]] = None) -> int:
    """Worker count: CLI flag, then config file, then HRL_JOBS, then 1."""
    if cli_jobs is not None:
        jobs = cli_jobs
    elif config and config.get("jobs") is not None:
        jobs = config["jobs"]
    else:
        raw = os.environ.get(DEFAULT_JOBS_ENV)
        try:
            jobs = int(raw) if raw else 1
        except ValueError:
            raise ConfigError(f"{DEFAULT_JOBS_ENV} must be an integer, got '{raw}'")
    if jobs < 1:
        raise ConfigError(f"jobs must be at least 1, got {jobs}")
    return jobs


def resolve_input(name: str, cli_value: Optional[str], config: Optional[Dict[str, Any]] = None) -> Optional[str]:
    """Path of an optional input file ('aliases' or 'role_map'), CLI first."""
    if cli_value:
        return cli_value
    return ((config or {}).get("inputs") or {}).get(name)


def resolve_ruleset(rules_file: Optional[str], config: Optional[Dict[str, Any]] = None) -> Optional[RoleRuleSet]:
    """
    Ruleset named on the command line or in the config file.

    None selects the built-in rules; `rules.enabled: false` turns every
    rule off.
    """
    section = (config or {}).get("rules") or {}
    path = rules_file or section.get("file")
    if path:
        return load_ruleset(path)
    if section.get("enabled", True) is False:
        logger.info("Role rules disabled in configuration")
        return EMPTY_RULESET
    return None


def build_match_config(
    config: Optional[Dict[str, Any]] = None,
    rules_file: Optional[str] = None,
    **overrides: Any,
) -> MatchConfig:
    """
    MatchConfig from built-in defaults, then the config file's `matching`
    section, then non-None keyword overrides (the CLI flags).

    Raises:
        ConfigError: out-of-range values
        RuleConfigError: the ruleset cannot be loaded
    """
    matching = dict((config or {}).get("matching") or {})
    match_config = MatchConfig(**matching, role_rules=resolve_ruleset(rules_file, config))
    match_config = match_config.with_overrides(**overrides)
    logger.debug(f"Effective match configuration: {match_config}")
    return match_config
