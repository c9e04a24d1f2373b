"""Enumeration and search caps.

``DAISYFORGE_BUDGET`` overrides the defaults.  Accepted forms: a bare
integer (member slots) or comma-separated ``key=value`` pairs with keys
``members``, ``nodes`` and ``hitting_n``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_MEMBER_BUDGET = 2**28
DEFAULT_NODE_BUDGET = 10**9
DEFAULT_HITTING_MAX_N = 25


@dataclass(frozen=True)
class Budget:
    members: int = DEFAULT_MEMBER_BUDGET
    nodes: int = DEFAULT_NODE_BUDGET
    hitting_n: int = DEFAULT_HITTING_MAX_N

    def __post_init__(self):
        if self.members <= 0 or self.nodes <= 0 or self.hitting_n <= 0:
            raise ValueError("budget caps must be positive")


def parse_budget(text: str, base: Budget | None = None) -> Budget:
    base = base or Budget()
    values = {"members": base.members, "nodes": base.nodes, "hitting_n": base.hitting_n}
    text = text.strip()
    if not text:
        return base
    if "=" not in text:
        values["members"] = int(text)
    else:
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip().replace("-", "_")
            if key not in values:
                raise ValueError(f"unknown budget key {key!r}")
            values[key] = int(val)
    return Budget(**values)


def budget_from_env() -> Budget:
    return parse_budget(os.environ.get("DAISYFORGE_BUDGET", ""))
