"""
Experiment config parsing.

Configs are INI-style: bracketed sections with flat `key = value` lines.
configparser does the tokenizing, the pydantic models in
schemas.experiment do the typing, and every violation is reported with
the line it came from.
"""
import configparser
import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple, Union

from pydantic import ValidationError

from ..core.exceptions import ConfigError
from ..schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

SECTIONS = ("experiment", "family", "adversary", "learner")

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]\s*$")
_KEY_RE = re.compile(r"^([A-Za-z_][\w-]*)\s*[=:]")


def _line_index(text: str) -> Tuple[Dict[str, int], Dict[Tuple[str, str], int]]:
    """Line numbers of section headers and of keys"""
    sections: Dict[str, int] = {}
    keys: Dict[Tuple[str, str], int] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            current = match.group(1).strip().lower()
            sections.setdefault(current, lineno)
            continue
        match = _KEY_RE.match(line)
        if match and current is not None:
            keys.setdefault((current, match.group(1).lower()), lineno)
    return sections, keys


def _where(loc: Tuple, sections: Dict[str, int], keys: Dict[Tuple[str, str], int]) -> str:
    if len(loc) >= 2 and (loc[0], loc[1]) in keys:
        return f"line {keys[(loc[0], loc[1])]}: [{loc[0]}] {loc[1]}"
    if len(loc) >= 2:
        return f"[{loc[0]}] {loc[1]}"
    if len(loc) == 1 and loc[0] in sections:
        return f"line {sections[loc[0]]}: [{loc[0]}]"
    if len(loc) == 1:
        return f"[{loc[0]}]"
    return "config"


def validate_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document; ConfigError lists every violation"""
    parser = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        strict=True,
    )
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError([str(e).replace("\n", " ")], "config is not well formed") from e

    sections, keys = _line_index(text)
    violations: List[str] = []
    data: Dict[str, Dict[str, str]] = {}
    for name in parser.sections():
        if name.lower() not in SECTIONS:
            violations.append(f"line {sections.get(name.lower(), '?')}: unknown section [{name}]")
            continue
        data[name.lower()] = {key: value for key, value in parser.items(name)}
    if "experiment" not in data:
        violations.append("missing [experiment] section")
    if violations:
        raise ConfigError(violations)

    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        for error in e.errors():
            loc = tuple(str(part) for part in error["loc"])
            message = error["msg"]
            if error["type"] == "extra_forbidden":
                message = "unknown key"
            violations.append(f"{_where(loc, sections, keys)}: {message}")
        raise ConfigError(violations) from e

    logger.debug("validated %s config %r", config.experiment.kind, config.experiment.run_name)
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([f"cannot read {path}: {e.strerror}"]) from e
    return validate_config(text)
