"""Size caps, overridable through environment variables."""

import os

_DEFAULTS = {
    "MAX_ARITY": 22,
    "NODE_BUDGET": 20000,
    "MAX_GROUP": 2 ** 14,
    "MAX_DISC_SIDE": 20,
}


def cap(name: str) -> int:
    """Return cap ``name``; ``ADEG_LAB_<name>`` in the environment overrides it."""
    raw = os.environ.get("ADEG_LAB_" + name)
    if raw is None:
        return _DEFAULTS[name]
    value = int(raw)
    if value <= 0:
        raise ValueError(f"ADEG_LAB_{name} must be positive, got {raw!r}")
    return value
