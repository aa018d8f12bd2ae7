"""
Verification reports: a list of named checks, each with a short reference tag, a pass flag and
JSON-encodable details, written as JSON and optionally rendered to HTML.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import markdown
import numpy as np

import utils
from backends import ArithmeticBackend

logger = logging.getLogger(__name__)


def encode(value, backend: ArithmeticBackend):
    """
    Convert a value into plain JSON types; exact scalars become "p/q" strings
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return backend.encode_array(value)
    if isinstance(value, dict):
        return {str(k): encode(v, backend) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        items = sorted(value) if isinstance(value, set) else value
        return [encode(v, backend) for v in items]
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return backend.encode(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"Cannot encode {type(value).__name__} in a report")


@dataclass
class Check:
    name: str
    ref: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "ref": self.ref, "passed": self.passed, "details": self.details}


class Report(object):
    """
    Result of one command run
    """

    def __init__(self, command: str, backend: ArithmeticBackend, parameters: dict | None = None, schema: int = 1):
        self.command = command
        self.backend = backend
        self.parameters = parameters or {}
        self.schema = schema
        self.checks = []
        self.results = {}

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> list[Check]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, ref: str, passed, **details) -> Check:
        """
        Record a check
        :param name: Unique name of the check inside the report
        :param ref: Reference tag of the verified statement
        :param passed: Outcome
        :param details: Values to keep in the report, encoded with the backend of the report
        :return: The recorded check
        """
        check = Check(name, ref, bool(passed), encode(details, self.backend))
        self.checks.append(check)
        if check.passed:
            logger.debug(f"Check {name} passed")
        else:
            logger.error(f"Check {name} ({ref}) failed: {check.details}")
        return check

    def add_result(self, key: str, value):
        self.results[key] = encode(value, self.backend)

    def extend(self, other: Report, prefix: str):
        """
        Merge the checks and results of a sub-report under a name prefix
        """
        for check in other.checks:
            self.checks.append(Check(f"{prefix}.{check.name}", check.ref, check.passed, check.details))
        for key, value in other.results.items():
            self.results[f"{prefix}.{key}"] = value

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "command": self.command,
            "mode": self.backend.mode,
            "parameters": encode(self.parameters, self.backend),
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "results": self.results,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=4)

    @property
    def message(self) -> str:
        """
        Markdown summary of the report
        """
        status = "PASSED" if self.passed else "FAILED"
        result = f"# qcweyl {self.command}: {status}\n\n"
        result += f"Mode: {self.backend.mode}, parameters: {json.dumps(self.parameters, sort_keys=True)}\n\n"
        result += "| Check | Reference | Result |\n|---|---|---|\n"
        for check in self.checks:
            result += f"| {check.name} | {check.ref} | {'ok' if check.passed else 'FAILED'} |\n"
        for check in self.failed_checks:
            result += f"\n## {check.name}\n\n```\n{json.dumps(check.details, sort_keys=True, indent=2)}\n```\n"
        return result

    def to_html(self) -> str:
        return markdown.markdown(self.message, extensions=["tables", "fenced_code"])

    def write(self, path: str | None, html: bool = False):
        """
        Write the JSON report to path (stdout if None) and optionally an HTML file next to it
        """
        text = self.to_json()
        if path is None:
            print(text)
            return
        with open(path, "w") as f:
            f.write(text + "\n")
        logger.info(f"Wrote report to {path}")
        if html:
            html_path = utils.suffixed_path(path, extension=".html")
            with open(html_path, "w") as f:
                f.write(self.to_html())
            logger.info(f"Wrote HTML report to {html_path}")
