"""Brute-force bounds. Each can be overridden by an environment variable."""

from __future__ import annotations

import os
from dataclasses import dataclass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        from .errors import UserInputError

        raise UserInputError(
            f"environment variable {name}={raw!r} is not an integer",
            location=f"env:{name}",
            hint="set it to a positive integer",
        ) from None


@dataclass(frozen=True)
class Limits:
    max_subgroup_order: int = 64
    max_isomorphism_order: int = 24
    max_group_order: int = 512
    max_degree: int = 5
    max_cells: int = 1_500_000
    max_module_order: int = 4096


def limits() -> Limits:
    """Current limits, re-read from the environment on every call."""
    d = Limits()
    return Limits(
        max_subgroup_order=_env_int("SYLOWTOWER_MAX_SUBGROUP_ORDER", d.max_subgroup_order),
        max_isomorphism_order=_env_int("SYLOWTOWER_MAX_ISOMORPHISM_ORDER", d.max_isomorphism_order),
        max_group_order=_env_int("SYLOWTOWER_MAX_GROUP_ORDER", d.max_group_order),
        max_degree=_env_int("SYLOWTOWER_MAX_DEGREE", d.max_degree),
        max_cells=_env_int("SYLOWTOWER_MAX_CELLS", d.max_cells),
        max_module_order=_env_int("SYLOWTOWER_MAX_MODULE_ORDER", d.max_module_order),
    )
