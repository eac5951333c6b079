"""Desk-scale guards shared by every module."""
import json
import os
from dataclasses import dataclass, fields, replace

CAPS_ENV_VAR = "POU_LAB_CAPS_JSON"


@dataclass(frozen=True)
class Caps:
    paths: int = 10_000
    responses: int = 200_000
    support: int = 1_000_000
    grid: int = 5_000_000

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"cap {f.name!r} must be a positive integer, got {value!r}")

    @classmethod
    def from_env(cls, environ=None):
        """Default caps, overridden by the JSON object in ``POU_LAB_CAPS_JSON``."""
        environ = os.environ if environ is None else environ
        raw = environ.get(CAPS_ENV_VAR)
        if not raw:
            return cls()
        overrides = json.loads(raw)
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown caps in {CAPS_ENV_VAR}: {sorted(unknown)}")
        return replace(cls(), **overrides)


DEFAULT_CAPS = Caps()
