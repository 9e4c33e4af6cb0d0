import os, time, yaml, logging, hashlib
import numpy as np
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .types import Settings

DEFAULT_CONFIG = "config.yaml"


def load_yaml(path):
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


@lru_cache(maxsize=8)
def _load_settings_cached(path):
    if path is None:
        return Settings()
    return Settings.model_validate(load_yaml(path))


def load_settings(path: Optional[str] = None) -> Settings:
    """Settings from `path`, else ./config.yaml if present, else defaults."""
    if path is None and os.path.exists(DEFAULT_CONFIG):
        path = DEFAULT_CONFIG
    return _load_settings_cached(os.path.abspath(path) if path else None)


def setup_logging(level="INFO"):
    root = logging.getLogger("semiradius")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)-7s %(name)s | %(message)s", "%H:%M:%S"))
        root.addHandler(handler)
    root.setLevel(level)
    return root


@dataclass
class Timer:
    t0: float
    @classmethod
    def start(cls):
        return cls(time.perf_counter())
    def ms(self):
        return (time.perf_counter() - self.t0) * 1000.0


def rng_stream(seed, *roles):
    """Philox generator keyed by (seed, roles); adding a role never shifts another stream."""
    tag = "|".join([str(int(seed))] + [str(r) for r in roles])
    key = int.from_bytes(hashlib.blake2b(tag.encode("utf-8"), digest_size=16).digest(), "little")
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed, *roles):
    tag = "|".join([str(int(seed))] + [str(r) for r in roles])
    return int.from_bytes(hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest(), "little") >> 1


def complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
