"""The argument of zeta or L(s, chi) from a truncated Euler product.

    a(t) ~ -Im sum_p log(1 - chi(p) p^{-(1/2 + delta + it)})

Each factor has |chi(p) p^{-1/2-delta}| < 1, so every logarithm is on the
principal branch and its imaginary part is atan2 of the factor.  The prime
cutoff is either fixed or grows like t^2 (Gonek's truncation).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import CutoffExceeded, DomainError
from .primes import default_table

DEFAULT_PRIME_CAP = 10**8
_BLOCK = 1 << 18


@dataclasses.dataclass(frozen=True)
class FixedN:
    n_primes: int

    def resolve(self, t, cap=DEFAULT_PRIME_CAP):
        if self.n_primes > cap:
            raise CutoffExceeded(f"{self.n_primes} primes exceeds the cap {cap}")
        return self.n_primes


@dataclasses.dataclass(frozen=True)
class GonekTSquared:
    constant: float = 1.0

    def resolve(self, t, cap=DEFAULT_PRIME_CAP):
        n = math.ceil(self.constant * t * t)
        if n > cap:
            raise CutoffExceeded(f"t = {t} needs {n} primes, cap is {cap}")
        return n


@dataclasses.dataclass(frozen=True)
class EulerArgConfig:
    cutoff_rule: FixedN | GonekTSquared = GonekTSquared()
    delta: float = 1e-6
    prime_cap: int = DEFAULT_PRIME_CAP


def _char_at(chi, p):
    if chi is None:
        return np.ones(p.size, dtype=complex)
    return np.asarray(chi.values, dtype=complex)[(p % np.uint64(chi.q)).astype(np.int64)]


def _factor_args(t, sigma, p, chi):
    """Im log(1 - chi(p) p^-s) for every prime, in prime order."""
    lp = np.log(p.astype(float))
    c = _char_at(chi, p) * np.exp(-sigma * lp - 1j * t * lp)
    mag = np.abs(c)
    if np.any(mag >= 1):
        raise DomainError("Euler factor outside the principal disc")
    w = 1.0 - c
    return np.arctan2(w.imag, w.real)


def euler_arg_sigma(t, chi=None, sigma=0.5, n_primes=1000, primes=None):
    """-Im sum over the first ``n_primes`` primes at real part ``sigma`` (any t).

    Summation is in prime order with ``math.fsum`` so the result does not
    depend on how the primes are blocked.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    p = default_table().first(n_primes) if primes is None else primes[:n_primes]
    parts = []
    for k in range(0, p.size, _BLOCK):
        parts.extend(_factor_args(float(t), sigma, p[k:k + _BLOCK], chi).tolist())
    return -math.fsum(parts)


def euler_arg(t, chi=None, cfg: EulerArgConfig = EulerArgConfig()):
    """Truncated Euler-product argument at 1/2 + delta + it.

    Parameters
    ----------
    t : float
        Ordinate, positive.
    chi : DirichletCharacter or None
        ``None`` selects zeta (the trivial character).
    cfg : EulerArgConfig

    Raises
    ------
    CutoffExceeded
        If the cutoff rule asks for more primes than ``cfg.prime_cap``.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    n = cfg.cutoff_rule.resolve(t, cfg.prime_cap)
    return euler_arg_sigma(t, chi, 0.5 + cfg.delta, n)


def char_walk(chi, x):
    """C(x) = sum of chi(p) over primes p <= x, and C / (sqrt(x) log^2 x)."""
    if chi is None or chi.is_principal:
        raise DomainError("char_walk needs a non-principal character")
    if x < 2:
        raise DomainError("x must be at least 2")
    p = default_table().up_to(int(x))
    v = _char_at(chi, p)
    re = math.fsum(v.real.tolist())
    im = math.fsum(v.imag.tolist())
    c = complex(re, im) if chi.is_complex else re
    if not chi.is_complex:
        c = float(round(c))
    return c, c / (math.sqrt(x) * math.log(x) ** 2)
