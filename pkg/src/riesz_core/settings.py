"""
Named limits and defaults.

Exhaustive checks enumerate band projections, time tuples and index subsets,
all of which grow exponentially. Every such enumeration is bounded by one of the
caps below. ``Settings.from_env()`` lets a ``.env`` file or the environment
override them:

  RIESZ_CAP_BLOCKS               blocks per enumerated partition (default 16)
  RIESZ_INDEPENDENCE_CAP_BLOCKS  blocks per partition in independence checks (12)
  RIESZ_FAMILY_CAP               members of an independent family (4)
  RIESZ_MAX_PAIR_SIZE            size of index subsets in family checks (2)
  RIESZ_WALK_CAP                 steps of a Rademacher walk (5)
  RIESZ_FUTURE_CAP               future times in joint-future checks (2)
  RIESZ_SEED                     seed of the random scenario generator (0)
"""

import logging
import os
from dataclasses import dataclass, fields
from typing import Mapping, Optional

from riesz_core.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_CAP_BLOCKS = 16
INDEPENDENCE_CAP_BLOCKS = 12
FAMILY_CAP = 4
MAX_PAIR_SIZE = 2
WALK_CAP = 5
FUTURE_CAP = 2
DEFAULT_SEED = 0

ENV_PREFIX = "RIESZ_"


@dataclass(frozen=True)
class Settings:
    """
    Resolved caps used by the verification suite.

    Attributes:
        cap_blocks: Max blocks of a partition whose band projections are enumerated
        independence_cap_blocks: Same limit, for pairwise independence scans
        family_cap: Max members of a family in ``family_independent``
        max_pair_size: Max size of each index subset in family checks
        walk_cap: Max steps of ``rademacher_walk``
        future_cap: Max future times in ``future_products``
        seed: Seed for randomized scenario generation
    """

    cap_blocks: int = DEFAULT_CAP_BLOCKS
    independence_cap_blocks: int = INDEPENDENCE_CAP_BLOCKS
    family_cap: int = FAMILY_CAP
    max_pair_size: int = MAX_PAIR_SIZE
    walk_cap: int = WALK_CAP
    future_cap: int = FUTURE_CAP
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        Build settings from ``RIESZ_*`` environment variables.

        Args:
            environ: Mapping to read instead of ``os.environ``

        Returns:
            Settings with every present variable applied

        Raises:
            DomainError: If a variable is not a non-negative integer
        """
        environ = os.environ if environ is None else environ
        values: dict[str, int] = {}
        for f in fields(cls):
            key = ENV_PREFIX + f.name.upper()
            raw = environ.get(key)
            if raw is None:
                continue
            try:
                value = int(raw)
            except ValueError:
                raise DomainError(f"{key} must be an integer, got {raw!r}") from None
            if value < 0:
                raise DomainError(f"{key} must be non-negative, got {value}")
            values[f.name] = value
            logger.debug(f"Setting {f.name} = {value} from {key}")
        return cls(**values)

    def with_overrides(self, **overrides: Optional[int]) -> "Settings":
        """Return a copy with every non-None override applied."""
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update({k: v for k, v in overrides.items() if v is not None})
        return Settings(**current)
