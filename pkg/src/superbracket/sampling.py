"""Seeded momentum sampling and statistical zero-testing.

Zero-testing is by sampling, not by symbolic canonicalisation: an expression
counts as zero when its maximum modulus over the sampled points stays below
the tolerance.  Every report records the seed that produced it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .expressions import Expr

# Points the sampler must stay away from: zeros of sin(p/2) and the poles of
# cot/tan that the expression grammar can produce on (-4*pi, 4*pi).
_DEFAULT_LOCI = tuple(k * math.pi for k in range(-8, 9))
_SINGULAR_LOCI: list[float] = list(_DEFAULT_LOCI)
_MARGIN = 0.05


def register_singular_locus(value: float) -> None:
    """Register an extra point the sampler must avoid."""
    _SINGULAR_LOCI.append(float(value))


def registered_singular_loci() -> Tuple[float, ...]:
    return tuple(_SINGULAR_LOCI)


def _clear_of_loci(arr: np.ndarray) -> np.ndarray:
    ok = np.ones(arr.shape, dtype=bool)
    for locus in _SINGULAR_LOCI:
        ok &= np.abs(arr - locus) >= _MARGIN
    return ok


@dataclass(frozen=True)
class MomentumPoint:
    """A single evaluation point, optionally constrained to p_R = f(p_L)."""

    p_L: float
    p_R: float
    constraint: Optional[Tuple[Expr, Expr]] = None  # (f, df/dp_L)

    def __post_init__(self):
        if self.constraint is not None:
            f, _ = self.constraint
            expected = complex(f.eval({"pL": complex(self.p_L)}))
            if abs(expected - self.p_R) > 1e-12:
                raise ValueError(
                    f"constrained point has p_R={self.p_R} but f(p_L)={expected}"
                )

    def env(self) -> dict:
        return {"pL": complex(self.p_L), "pR": complex(self.p_R)}


@dataclass(frozen=True)
class Sampler:
    """Deterministic sample generator for the open momentum domain."""

    seed: int = 42
    count: int = 100
    domain: Tuple[float, float] = (0.1, math.pi - 0.1)
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        lo, hi = self.domain
        out: list[np.ndarray] = []
        have = 0
        for _ in range(200):
            if have >= n:
                break
            batch = rng.uniform(lo, hi, size=max(n, 16))
            batch = batch[_clear_of_loci(batch)]
            out.append(batch)
            have += batch.size
        arr = np.concatenate(out) if out else np.empty(0)
        if arr.size < n:
            raise ValueError("sampling domain is too thin around the singular loci")
        return arr[:n]

    def momenta(self, n: Optional[int] = None) -> np.ndarray:
        n = self.count if n is None else n
        return self._draw(np.random.default_rng(self.seed), n)

    def pairs(self, constraint: Optional[Tuple[Expr, Expr]] = None):
        """Sample (p_L, p_R) arrays; with a constraint, p_R = f(p_L).

        Constrained draws are rejected until the induced p_R also clears the
        singular loci, so downstream evaluations never sit on a pole.
        """
        rng = np.random.default_rng(self.seed)
        if constraint is None:
            return self._draw(rng, self.count), self._draw(rng, self.count)
        f, _ = constraint
        collected_l: list[np.ndarray] = []
        collected_r: list[np.ndarray] = []
        have = 0
        for _ in range(200):
            if have >= self.count:
                break
            pl = self._draw(rng, max(self.count, 16))
            pr = np.asarray(f.eval({"pL": pl + 0j}))
            ok = _clear_of_loci(pr.real) & (np.abs(pr.imag) < 1e-9)
            collected_l.append(pl[ok])
            collected_r.append(pr.real[ok])
            have += int(np.count_nonzero(ok))
        if have < self.count:
            raise ValueError("constraint pushes too many samples onto singular loci")
        pl = np.concatenate(collected_l)[: self.count]
        pr = np.concatenate(collected_r)[: self.count]
        return pl, pr

    def two_site(self):
        """Independent (p1, p2) site-momentum arrays."""
        rng = np.random.default_rng(self.seed)
        return self._draw(rng, self.count), self._draw(rng, self.count)

    def replace(self, **kw) -> "Sampler":
        data = {
            "seed": self.seed,
            "count": self.count,
            "domain": self.domain,
            "tolerance": self.tolerance,
        }
        data.update(kw)
        return Sampler(**data)


@dataclass
class ZeroReport:
    passed: bool
    max_residual: float
    worst_point: Optional[dict]
    seed: int
    count: int
    tolerance: float
    note: str = ""

    @property
    def vacuous(self) -> bool:
        return self.count == 0


def _env_for(e: Expr, s: Sampler, constraint=None) -> dict:
    names = sorted(e.variables())
    if set(names) <= {"pL", "pR"}:
        pl, pr = s.pairs(constraint)
        return {"pL": pl + 0j, "pR": pr + 0j}
    rng = np.random.default_rng(s.seed)
    return {name: s._draw(rng, s.count) + 0j for name in names}


def is_zero(e: Expr, s: Sampler, constraint=None) -> ZeroReport:
    """Statistically test whether an expression vanishes on the domain."""
    if s.count == 0:
        return ZeroReport(True, 0.0, None, s.seed, 0, s.tolerance, note="no samples")
    env = _env_for(e, s, constraint)
    values = np.atleast_1d(np.asarray(e.eval(env)))
    residuals = np.abs(values)
    worst = int(np.argmax(residuals))
    max_res = float(residuals[worst])
    point = {
        name: complex(np.atleast_1d(np.asarray(v))[worst % np.atleast_1d(np.asarray(v)).size])
        for name, v in env.items()
    }
    return ZeroReport(
        passed=max_res <= s.tolerance,
        max_residual=max_res,
        worst_point=point,
        seed=s.seed,
        count=s.count,
        tolerance=s.tolerance,
    )


def constancy(e: Expr, s: Sampler, constraint=None, var_tol: float = 1e-18):
    """Test whether an expression is constant over samples.

    Returns (is_constant, mean_value); constancy means the variance of the
    sampled values does not exceed ``var_tol``.
    """
    if s.count == 0:
        return True, 0j
    env = _env_for(e, s, constraint)
    values = np.atleast_1d(np.asarray(e.eval(env)))
    mean = complex(np.mean(values))
    variance = float(np.mean(np.abs(values - mean) ** 2))
    return variance <= var_tol, mean
