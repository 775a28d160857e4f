"""Python access to the aclab numerical core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment as _run_experiment

__version__ = code_version()  # noqa: F405


def run(ini_text: str, output_dir: str = ""):
    """Run a scenario and return (exit_code, message, report dict)."""
    code, message, report = _run_experiment(ini_text, output_dir)
    return code, message, _json.loads(report)
