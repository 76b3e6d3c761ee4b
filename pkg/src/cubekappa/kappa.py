"""Sublinear gauges kappa: monotone, concave-ish, sublinear, never below 1."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import KappaError

NAMES = ("constant", "log2p1", "sqrt", "power")


@dataclass(frozen=True)
class KappaFunction:
    """kappa(t) = max(1, scale * raw(t)) for a named raw function.

    ``power`` uses raw(t) = t ** exponent with exponent in [0, 1).
    """

    name: str
    scale: float = 1.0
    exponent: float = field(default=0.5)

    def raw(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "constant":
            return np.full_like(t, self.scale)
        if self.name == "log2p1":
            return self.scale * np.log2(t + 1.0)
        if self.name == "sqrt":
            return self.scale * np.sqrt(t)
        return self.scale * np.power(t, self.exponent)

    def __call__(self, t):
        out = np.maximum(1.0, self.raw(t))
        return float(out) if out.ndim == 0 else out

    @property
    def label(self) -> str:
        tag = f"power:{self.exponent:g}" if self.name == "power" else self.name
        return tag if self.scale == 1.0 else f"{tag}*{self.scale:g}"

    def check(self, t_max: float = 1e6, seed: int = 0) -> "KappaChecks":
        return check_kappa(self, t_max=t_max, seed=seed)


def make_kappa(name: str, params: dict | None = None) -> KappaFunction:
    """Build a gauge by name; ``params`` may hold ``scale`` and ``exponent``."""
    params = dict(params or {})
    if name not in NAMES:
        raise KappaError(f"unknown kappa {name!r}; expected one of {NAMES}")
    scale = float(params.pop("scale", 1.0))
    exponent = float(params.pop("exponent", 0.5))
    if params:
        raise KappaError(f"unexpected kappa parameters {sorted(params)}")
    if not scale > 0 or not math.isfinite(scale):
        raise KappaError("kappa scale must be positive")
    if name == "power" and not 0.0 <= exponent < 1.0:
        raise KappaError("power exponent must lie in [0, 1) to be sublinear")
    return KappaFunction(name, scale, exponent if name == "power" else 0.5)


def parse_kappa(spec: str) -> KappaFunction:
    """``constant``, ``log2p1``, ``sqrt`` or ``power:<p>``."""
    if spec.startswith("power:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise KappaError(f"bad power exponent in {spec!r}") from exc
        return make_kappa("power", {"exponent": p})
    return make_kappa(spec)


SUBLINEAR = ("log2p1", "sqrt", "power:0.5")
BUILTIN = ("constant",) + SUBLINEAR


@dataclass(frozen=True)
class KappaChecks:
    monotone: bool
    concave_scaling: bool
    sublinear: bool
    d1: float
    d2: float

    @property
    def ok(self) -> bool:
        return self.monotone and self.concave_scaling and self.sublinear and math.isfinite(self.d2)


def check_kappa(kappa: KappaFunction, *, t_max: float = 1e6, d0: float = 1.0,
                seed: int = 0) -> KappaChecks:
    """Sampled checks of the gauge axioms plus comparability constants.

    d1, d2 bound kappa(y) / kappa(x) over sampled pairs with |x - y| <= d0 * kappa(x).
    """
    grid = np.concatenate([[0.0], np.geomspace(1e-3, t_max, 400)])
    vals = kappa(grid)
    monotone = bool(np.all(np.diff(vals) >= -1e-12))
    a = np.array([1.5, 2.0, 3.0, 10.0])
    scaled = kappa(np.outer(a, grid))
    concave = bool(np.all(scaled <= a[:, None] * vals[None, :] + 1e-9))
    doubling = 2.0 ** np.arange(10, 41)
    ratio = kappa(doubling) / doubling
    sublinear = bool(np.all(np.diff(ratio) <= 1e-15) and ratio[-1] < 1e-3)
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, t_max, 2000)
    kx = kappa(x)
    y = np.maximum(0.0, x + rng.uniform(-1.0, 1.0, x.size) * d0 * kx)
    q = kappa(y) / kx
    return KappaChecks(monotone, concave, sublinear, float(q.min()), float(q.max()))
