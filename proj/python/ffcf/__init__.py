"""Python access to the ffcf library.

``run`` mirrors the command-line tool: it takes a subcommand name and the
same options as keyword arguments and returns the parsed JSON report.
"""

from __future__ import annotations

import json
from typing import Any

from ._ffcf import (
    Error,
    RunConfig,
    __version__,
    cf_expand,
    count_G,
    count_Gprime,
    exit_code,
    is_convergent,
    measure_H,
    run_json,
)

__all__ = [
    "Error",
    "RunConfig",
    "__version__",
    "cf_expand",
    "count_G",
    "count_Gprime",
    "exit_code",
    "is_convergent",
    "measure_H",
    "run",
    "run_json",
]


def run(command: str, **options: Any) -> dict:
    """Run ``command`` with ``options`` set on a fresh RunConfig."""
    cfg = RunConfig()
    for key, value in options.items():
        if not hasattr(cfg, key):
            raise TypeError(f"unknown option {key!r}")
        setattr(cfg, key, value)
    return json.loads(run_json(command, cfg))
