"""Helpers for validating documents and writing report files."""

import csv
import json
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from cerberus import Validator

# ----------------------------------------------------------------------------------------------------------------------
# For Working with Data


def validate(document, schema, **validator_kwargs):
    """Validate a data structure. Return errors if any found.

    Cerberus Documentation: https://docs.python-cerberus.org/en/stable/validation-rules.html

    Args:
        document: data structure to validate
        schema: expected structure
        validator_kwargs: additional keyword arguments for Validator class

    Returns:
        dict: validation errors keyed by field name

    """
    validator = Validator(schema, **validator_kwargs)
    validator.validate(document)
    return validator.errors


def normalize(document, schema, **validator_kwargs) -> Tuple[dict, dict]:
    """Validate a data structure and fill in schema defaults.

    Args:
        document: data structure to validate
        schema: expected structure, may declare `default` values
        validator_kwargs: additional keyword arguments for Validator class

    Returns:
        tuple: `(normalized document, errors)`. The document is empty when errors were found

    """
    validator = Validator(schema, **validator_kwargs)
    if validator.validate(document):
        return validator.document, {}
    return {}, validator.errors


# ----------------------------------------------------------------------------------------------------------------------
# Report Files


def format_number(value: float) -> str:
    """Format a float with 17 significant digits so that parsing it recovers the same float.

    Args:
        value: number to format

    Returns:
        str: formatted number

    """
    return f'{value:.17g}'


def write_pretty_json(filename, obj):
    """Write indented JSON file.

    Floats use Python's shortest round-trip representation rather than the 17 significant digits of
    `format_number`; both parse back to the identical float.

    Args:
        filename: Path or plain string filename to write (should end with `.json`)
        obj: JSON object to write

    """
    Path(filename).write_text(json.dumps(obj, indent=4, separators=(',', ': ')) + '\n', encoding='utf-8')


def write_csv(csv_path, rows: Iterable[Sequence]):
    """Write a csv file with LF line endings and UTF-8 encoding.

    Args:
        csv_path: path to CSV file
        rows: list of lists to write to CSV file

    """
    with open(csv_path, 'w', newline='', encoding='utf-8') as csv_file:
        writer = csv.writer(csv_file, delimiter=',', quoting=csv.QUOTE_MINIMAL, lineterminator='\n')
        for row in rows:
            writer.writerow(row)


def read_csv(csv_path) -> List[dict]:
    """Read a csv file with a header row.

    Args:
        csv_path: path to CSV file

    Returns:
        list: one dictionary per data row, values as strings

    """
    with open(csv_path, newline='', encoding='utf-8') as csv_file:
        return [*csv.DictReader(csv_file)]
