from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import List, Optional

from sympy import isprime

from .exceptions import ConfigError

CACHE_ENV = "WITTDISP_CACHE_DIR"


@dataclass
class WittConfig:
    p: int = 2
    f: int = 1
    n: int = 4
    guard: int = 1


@dataclass
class GroupConfig:
    h: int = 2
    d: int = 1
    weights: Optional[List[int]] = None
    subgroup: Optional[str] = None  # "SL" | path to a GroupSpec JSON file

    def weight_vector(self) -> List[int]:
        if self.weights is not None:
            return list(self.weights)
        return [0] * self.d + [1] * (self.h - self.d)


@dataclass
class SearchConfig:
    window: int = 1
    extension: int = 1
    max_extension: int = 1
    orbit_cap: int = 200_000
    entry_digits: int = 1
    threads: int = 1
    seed: int = 0


@dataclass
class JobConfig:
    witt: WittConfig = field(default_factory=WittConfig)
    group: GroupConfig = field(default_factory=GroupConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    output: Optional[str] = None
    cache_dir: Optional[str] = None

    def resolved_cache_dir(self) -> Optional[str]:
        return self.cache_dir or os.environ.get(CACHE_ENV) or None

    def validate(self) -> "JobConfig":
        w = self.witt
        if not isprime(w.p):
            raise ConfigError(f"p={w.p} is not prime")
        for name in ("f", "n", "guard"):
            if getattr(w, name) < 1:
                raise ConfigError(f"witt.{name} must be positive")
        g = self.group
        if g.h < 1:
            raise ConfigError("group.h must be positive")
        if g.weights is not None:
            if len(g.weights) != g.h or any(x not in (0, 1) for x in g.weights):
                raise ConfigError("weights must be a 0/1 vector of length h")
        elif not 0 <= g.d < g.h:
            raise ConfigError(f"d={g.d} must satisfy d < h={g.h}")
        s = self.search
        for name in ("extension", "max_extension", "orbit_cap", "entry_digits", "threads"):
            if getattr(s, name) < 1:
                raise ConfigError(f"search.{name} must be positive")
        if s.window < 0:
            raise ConfigError("search.window must be non-negative")
        return self
