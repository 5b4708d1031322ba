"""Resource caps, overridable through the FACTLAT_CAP environment variable.

FACTLAT_CAP accepts either a bare integer (sets ``poset_cap``) or a comma
separated list such as ``poset_cap=10,aut_cap=400,search_budget=5000``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "FACTLAT_CAP"


@dataclass(frozen=True)
class Caps:
    poset_cap: int = 12       # largest ground size enumerate_fact accepts
    order_cap: int = 10       # largest ground size whose order is materialized
    verify_cap: int = 10      # largest ground size for count --verify
    aut_cap: int = 200        # largest poset handed to brute_force_aut
    search_budget: int = 10_000


def parse_caps(text: str | None, base: Caps | None = None) -> Caps:
    caps = base or Caps()
    if not text:
        return caps
    text = text.strip()
    if text.isdigit():
        return replace(caps, poset_cap=int(text))
    names = {f.name for f in fields(Caps)}
    updates = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in names or not value.strip().isdigit():
            raise ValueError(f"bad {ENV_VAR} entry {item!r}")
        updates[key] = int(value)
    return replace(caps, **updates)


def get_caps() -> Caps:
    return parse_caps(os.environ.get(ENV_VAR))
