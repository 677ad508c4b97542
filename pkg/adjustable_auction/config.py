"""Scenario files: parsing, validation and conversion into typed settings."""

import json
from pathlib import Path
from typing import Union

import attr
from attrs_strict import type_validator
from box import Box
from loguru import logger

from .errors import ConfigError
from .model import AuctionScenario
from .utils_data import normalize

OPTIMAL = 'optimal'
"""Scenario value of `control_value` requesting the optimal control from `solver.maximize_control`."""

SCENARIO_SCHEMA = {
    'beta': {'type': 'number', 'min': 0, 'required': True},
    'control_value': {
        'required': True,
        'oneof': [{'type': 'number', 'min': 0}, {'type': 'string', 'allowed': [OPTIMAL]}],
    },
    'n_bidders': {'type': 'integer', 'min': 2, 'default': 2},
    'replications': {'type': 'integer', 'min': 1, 'default': 100_000},
    'seed': {'type': 'integer', 'default': 0},
    'output_path': {'type': 'string', 'empty': False, 'default': 'report'},
}
"""Cerberus schema of a scenario file. Unknown keys are rejected."""


@attr.s(frozen=True)
class ScenarioFile:  # noqa: H601
    """Validated contents of a scenario file."""

    beta: float = attr.ib(converter=float, validator=type_validator())
    control_value: Union[float, str] = attr.ib(validator=type_validator())
    n_bidders: int = attr.ib(validator=type_validator())
    replications: int = attr.ib(validator=type_validator())
    seed: int = attr.ib(validator=type_validator())
    output_path: Path = attr.ib(converter=Path, validator=type_validator())

    @property
    def wants_optimal_control(self) -> bool:
        """True if the control value should be found by optimization.

        Returns:
            bool: True when `control_value` is `optimal`

        """
        return self.control_value == OPTIMAL

    def scenario(self, control_value: float) -> AuctionScenario:
        """Build the uniform `[0, 1]` scenario at a resolved control value.

        Args:
            control_value: numeric control value

        Returns:
            AuctionScenario: new instance

        """
        return AuctionScenario.uniform(beta=self.beta, control_value=control_value, n_bidders=self.n_bidders)


def _parse_scalar(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_key_values(text: str) -> dict:
    """Parse a flat key-value document.

    Accepts either a flat JSON object or `key = value` lines (blank lines and `#` comments ignored) whose values are
    JSON scalars. Any other value, such as `optimal` or an unquoted path, is kept as a string.

    Args:
        text: document contents

    Returns:
        dict: raw key-value pairs

    Raises:
        ConfigError: if the document is malformed or a key is repeated

    """
    if text.lstrip().startswith('{'):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f'Scenario file is not valid JSON: {err}') from None
        nested = [key for key, value in document.items() if isinstance(value, (dict, list))]
        if nested:
            raise ConfigError(f'Scenario values must be scalars: `{nested[0]}`', key=nested[0])
        return document

    document = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        key, sep, raw = (part.strip() for part in content.partition('='))
        if not sep or not key:
            raise ConfigError(f'Line {line_number} is not `key = value`: `{line}`')
        if key in document:
            raise ConfigError(f'Key `{key}` is repeated on line {line_number}', key=key)
        document[key] = _parse_scalar(raw)
    return document


def load_scenario_text(text: str, base_dir: Path = Path('.')) -> ScenarioFile:
    """Validate a scenario document and convert it into a `ScenarioFile`.

    Args:
        text: document contents
        base_dir: directory that relative `output_path` values resolve against. Default is the working directory

    Returns:
        ScenarioFile: validated settings

    Raises:
        ConfigError: naming the first offending key

    """
    document, errors = normalize(parse_key_values(text), SCENARIO_SCHEMA)
    if errors:
        key = sorted(errors)[0]
        raise ConfigError(f'Invalid scenario key `{key}`: {errors[key]}', key=key)
    settings = Box(document, frozen_box=True)
    logger.debug('Scenario settings: {settings}', settings=settings)
    output_path = Path(settings.output_path)
    return ScenarioFile(
        beta=settings.beta,
        control_value=settings.control_value if settings.control_value == OPTIMAL else float(settings.control_value),
        n_bidders=settings.n_bidders,
        replications=settings.replications,
        seed=settings.seed,
        output_path=output_path if output_path.is_absolute() else base_dir / output_path,
    )


def load_scenario(path: Path) -> ScenarioFile:
    """Read and validate a UTF-8 scenario file.

    Args:
        path: path to the scenario file

    Returns:
        ScenarioFile: validated settings

    Raises:
        ConfigError: if the file cannot be read or is invalid

    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as err:
        raise ConfigError(f'Cannot read scenario file `{path}`: {err}') from None
    return load_scenario_text(text, base_dir=path.resolve().parent)
