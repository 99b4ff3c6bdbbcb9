"""Dirichlet characters and L-functions, gap normalizations per family, zero ingestion.

Characters mod q are labelled by their exponents on a fixed generating set
of (Z/qZ)^*: for each prime power p^e || q a primitive root (or -1 and 5 for
2^e, e >= 3), lifted by the Chinese remainder theorem.  The integer index is
the mixed-radix encoding of those exponents.
"""

from __future__ import annotations

import cmath
import dataclasses
import enum
import io
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.special import loggamma

from . import riemann_siegel as rs
from .arg_tracker import track_arg
from .errors import (ConfigError, CountMismatch, DomainError, MalformedLine, NonInteger,
                     NonMonotone, NonpositiveNorm)
from .zeta_engine import Method, ZeroRecord, sign_changes

TWO_PI = 2.0 * math.pi
LOG_2PI_E = math.log(TWO_PI) + 1.0
MAX_MODULUS = 13
MAX_HEIGHT = 1e4
# B_2, ..., B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


# ---------------------------------------------------------------- characters

def _factor(q):
    out = []
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            out.append((p, e))
        p += 1
    if q > 1:
        out.append((q, 1))
    return out


def _primitive_root(m):
    phi = sum(1 for a in range(1, m) if math.gcd(a, m) == 1)
    for g in range(2, m):
        if math.gcd(g, m) == 1 and all(pow(g, phi // r, m) != 1 for r, _ in _factor(phi)):
            return g
    return 1


def _crt_lift(x, m, q):
    """Residue mod q congruent to x mod m and 1 mod q/m (gcd(m, q/m) = 1)."""
    rest = q // m
    if rest == 1:
        return x % q
    inv = pow(rest, -1, m)
    return (1 + rest * ((x - 1) * inv % m)) % q


@lru_cache(maxsize=None)
def unit_generators(q):
    """Generators and their orders, giving (Z/qZ)^* as a direct product of cyclic groups."""
    gens = []
    for p, e in _factor(q):
        m = p ** e
        if p == 2 and e >= 3:
            gens.append((_crt_lift(m - 1, m, q), 2))
            gens.append((_crt_lift(5, m, q), 2 ** (e - 2)))
        elif m > 2:
            gens.append((_crt_lift(_primitive_root(m), m, q), m // p * (p - 1)))
    return tuple(gens)


@lru_cache(maxsize=None)
def _discrete_logs(q):
    """Map each unit residue to its exponent tuple on the generating set."""
    gens = unit_generators(q)
    table = {1 % q: ()}
    for g, order in gens:
        new = {}
        for r, ex in table.items():
            x = r
            for k in range(order):
                new[x] = ex + (k,)
                x = x * g % q
        table = new
    return table


def _root_of_unity(frac: Fraction):
    frac = frac % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if frac in exact:
        return exact[frac]
    return cmath.exp(2j * math.pi * float(frac))


@dataclasses.dataclass(frozen=True)
class DirichletCharacter:
    q: int
    index: int
    values: tuple

    def __call__(self, n):
        return self.values[n % self.q]

    @property
    def exponents(self):
        out = []
        k = self.index
        for _, order in unit_generators(self.q):
            out.append(k % order)
            k //= order
        return tuple(out)

    @property
    def is_principal(self):
        return all(v == 1 for v in self.values if v != 0)

    @property
    def is_complex(self):
        return any(v.imag != 0 for v in self.values)

    @property
    def parity(self):
        """kappa = 0 for even characters, 1 for odd ones."""
        return 0 if self.values[(self.q - 1) % self.q] == 1 else 1

    @property
    def is_primitive(self):
        for d in range(1, self.q):
            if self.q % d:
                continue
            if all(self.values[a] == 1 for a in range(self.q)
                   if math.gcd(a, self.q) == 1 and a % d == 1 % d):
                return False
        return True

    def conjugate(self):
        ex = [(-k) % order for k, (_, order) in zip(self.exponents, unit_generators(self.q))]
        return character(self.q, _encode(self.q, ex))

    def gauss_sum(self):
        return sum(v * cmath.exp(2j * math.pi * a / self.q) for a, v in enumerate(self.values))

    def root_number(self):
        """epsilon with Lambda(s, chi) = epsilon Lambda(1 - s, conj chi)."""
        return self.gauss_sum() / (1j ** self.parity * math.sqrt(self.q))

    @property
    def label(self):
        return f"dirichlet:{self.q}:{self.index}"


def _encode(q, exponents):
    idx = 0
    scale = 1
    for k, (_, order) in zip(exponents, unit_generators(q)):
        idx += k * scale
        scale *= order
    return idx


def n_characters(q):
    return math.prod(order for _, order in unit_generators(q))


@lru_cache(maxsize=None)
def character(q, index):
    """The character mod q with the given label."""
    if q < 1:
        raise DomainError("modulus must be positive")
    if not 0 <= index < n_characters(q):
        raise DomainError(f"no character {index} mod {q}")
    gens = unit_generators(q)
    k = []
    i = index
    for _, order in gens:
        k.append(i % order)
        i //= order
    logs = _discrete_logs(q)
    vals = []
    for a in range(q):
        if math.gcd(a, q) != 1:
            vals.append(0j)
            continue
        frac = sum((Fraction(kj * ej, order) for kj, ej, (_, order) in zip(k, logs[a], gens)),
                   Fraction(0))
        vals.append(_root_of_unity(frac))
    return DirichletCharacter(q=q, index=index, values=tuple(vals))


def characters(q, primitive_only=True):
    out = [character(q, i) for i in range(n_characters(q))]
    return [c for c in out if c.is_primitive] if primitive_only else out


# ---------------------------------------------------------------- families

class FamilyKind(enum.Enum):
    ZETA = "zeta"
    DIRICHLET = "dirichlet"
    CUSP = "cusp"


@dataclasses.dataclass(frozen=True)
class LFamily:
    kind: FamilyKind
    q: int = 1
    index: int = 0
    k: int | None = None

    def __post_init__(self):
        if self.kind is FamilyKind.DIRICHLET:
            if not 1 <= self.q <= MAX_MODULUS:
                raise ConfigError(f"modulus {self.q} outside 1..{MAX_MODULUS}")
            if not character(self.q, self.index).is_primitive:
                raise ConfigError(f"character {self.index} mod {self.q} is not primitive")
        if self.kind is FamilyKind.CUSP and (self.k is None or self.k < 1):
            raise ConfigError("cusp family needs a positive weight")

    @classmethod
    def parse(cls, spec):
        """Parse ``zeta``, ``dirichlet:<q>:<index>`` or ``cusp:<k>``."""
        parts = spec.strip().split(":")
        try:
            if parts == ["zeta"]:
                return cls(FamilyKind.ZETA)
            if parts[0] == "dirichlet" and len(parts) == 3:
                return cls(FamilyKind.DIRICHLET, q=int(parts[1]), index=int(parts[2]))
            if parts[0] == "cusp" and len(parts) == 2:
                return cls(FamilyKind.CUSP, k=int(parts[1]))
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"bad family {spec!r}: {exc}") from exc
        raise ConfigError(f"bad family {spec!r}")

    @property
    def label(self):
        if self.kind is FamilyKind.DIRICHLET:
            return f"dirichlet:{self.q}:{self.index}"
        if self.kind is FamilyKind.CUSP:
            return f"cusp:{self.k}"
        return "zeta"

    @property
    def character(self):
        return character(self.q, self.index) if self.kind is FamilyKind.DIRICHLET else None

    @property
    def critical_real_part(self):
        return self.k / 2 if self.kind is FamilyKind.CUSP else 0.5

    def normalization(self, t):
        """Factor turning an ordinate difference at height t into a normalized gap."""
        if self.kind is FamilyKind.DIRICHLET:
            return (math.log(self.q * t) - LOG_2PI_E) / TWO_PI
        if self.kind is FamilyKind.CUSP:
            return (math.log(t) - LOG_2PI_E) / math.pi
        return (math.log(t) - LOG_2PI_E) / TWO_PI


def normalized_gap(family: LFamily, t_lo, t_hi):
    """(t_hi - t_lo) times the family normalization at t_lo.

    Raises
    ------
    NonpositiveNorm
        If the normalization at t_lo is not positive.
    """
    if not t_hi > t_lo > 0:
        raise DomainError("normalized_gap requires t_hi > t_lo > 0")
    f = family.normalization(t_lo)
    if f <= 0:
        raise NonpositiveNorm(f"normalization {f} at t = {t_lo} for {family.label}")
    return (t_hi - t_lo) * f


# ---------------------------------------------------------------- L-values

def l_terms(t):
    """Euler-Maclaurin block count N per height (the sum runs to qN)."""
    return np.maximum(10, np.ceil(0.5 * np.abs(t))).astype(np.int64) + 10


def dirichlet_l(s, chi: DirichletCharacter, n_terms=None):
    """L(s, chi) = q^-s sum_a chi(a) zeta_H(s, a/q) by Euler-Maclaurin.

    The Hurwitz sums are taken jointly as sum_{n <= qN} chi(n) n^-s plus a
    Bernoulli tail at each X = qN + a.
    """
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(s.imag) > MAX_HEIGHT):
        raise DomainError(f"|Im s| above the supported height {MAX_HEIGHT:g}")
    if chi.is_principal and np.any(s == 1):
        raise DomainError("pole at s = 1")
    shape = s.shape
    s = s.ravel()
    q = chi.q
    nn = l_terms(s.imag) if n_terms is None else np.broadcast_to(
        np.asarray(n_terms, dtype=np.int64), s.shape)
    nmax = int(nn.max()) if s.size else 0
    vals = np.asarray(chi.values, dtype=complex)
    n = np.arange(1, q * nmax + 1)
    cn = vals[n % q]
    keep = cn != 0
    n, cn = n[keep], cn[keep]
    ln = np.log(n.astype(float))
    a_res = np.array([a for a in range(1, q + 1) if vals[a % q] != 0])
    ca = vals[a_res % q]
    principal = chi.is_principal
    out = np.empty_like(s)
    for sl in rs._row_blocks(s.size, max(n.size, 1)):
        ss = s[sl]
        top = (q * nn[sl]).astype(float)
        mask = n[None, :] <= top[:, None]
        head = (np.where(mask, cn[None, :] * np.exp(-ss[:, None] * ln[None, :]), 0.0)).sum(axis=1)
        x = top[:, None] + a_res[None, :]
        lx = np.log(x)
        xs = np.exp(-ss[:, None] * lx)  # X^-s
        if principal:
            tail = x * xs / (q * (ss[:, None] - 1.0)) + 0.5 * xs
        else:
            # sum_a chi(a) = 0, so X^(1-s)/(s-1) may be replaced by the
            # regular (X^(1-s) - 1)/(s-1), which stays finite at s = 1
            u = (1.0 - ss[:, None]) * lx
            small = np.abs(u) < 1e-8
            ratio = np.where(small, 1.0 + 0.5 * u, np.expm1(u) / np.where(small, 1.0, u))
            tail = -lx * ratio / q + 0.5 * xs
        poch = ss[:, None].copy()
        xk = xs / x
        qk = float(q)
        fact = 2.0
        for k, b in enumerate(_BERNOULLI, start=1):
            tail = tail + (b / fact) * poch * qk * xk
            poch = poch * (ss[:, None] + 2 * k - 1) * (ss[:, None] + 2 * k)
            xk = xk / (x * x)
            qk *= q * q
            fact *= (2 * k + 1) * (2 * k + 2)
        out[sl] = head + (tail * ca[None, :]).sum(axis=1)
    return out.reshape(shape)


def _log_gamma_factor(s, chi):
    w = 0.5 * (np.asarray(s, dtype=complex) + chi.parity)
    return w * math.log(chi.q / math.pi) + loggamma(w)


def completed_l(s, chi: DirichletCharacter):
    """Lambda(s) = (q/pi)^((s+kappa)/2) Gamma((s+kappa)/2) L(s, chi)."""
    return np.exp(_log_gamma_factor(s, chi)) * dirichlet_l(s, chi)


def functional_equation_residual(s, chi: DirichletCharacter):
    """|Lambda(s, chi) - eps Lambda(1 - s, conj chi)| / |Lambda(s, chi)|.

    Evaluated as |1 - ratio| with the gamma factors combined in log form so
    large heights do not underflow.
    """
    s = np.asarray(s, dtype=complex)
    ratio = (chi.root_number()
             * np.exp(_log_gamma_factor(1.0 - s, chi) - _log_gamma_factor(s, chi))
             * dirichlet_l(1.0 - s, chi.conjugate()) / dirichlet_l(s, chi))
    return np.abs(1.0 - ratio)


def theta_chi(t, chi: DirichletCharacter):
    """Phase making Z_chi real: (t/2) log(q/pi) + Im log Gamma((1/2 + kappa + it)/2)."""
    t = np.asarray(t, dtype=float)
    return 0.5 * t * math.log(chi.q / math.pi) + loggamma(0.5 * (0.5 + chi.parity + 1j * t)).imag


def z_chi(t, chi: DirichletCharacter, return_imag=False):
    """Real rotation eps^(-1/2) e^(i theta_chi) L(1/2 + it, chi)."""
    t = np.asarray(t, dtype=float)
    rot = np.exp(1j * (theta_chi(t, chi) - 0.5 * cmath.phase(chi.root_number())))
    w = rot * dirichlet_l(0.5 + 1j * t, chi)
    return (w.real, w.imag) if return_imag else w.real


def average_gap_chi(t, q):
    return TWO_PI / np.log(np.maximum(q * np.asarray(t, dtype=float) / TWO_PI, 2 * math.e))


def _phase(t, chi, delta):
    a, _ = track_arg(lambda s: dirichlet_l(s, chi), np.atleast_1d(t), delta)
    return theta_chi(np.atleast_1d(t), chi) + a


def dirichlet_count(chi: DirichletCharacter, T, delta=1e-9):
    """Number of zeros of L(s, chi) with 0 < Im rho <= T.

    The phase theta_chi + arg L (horizontally continued) increases by pi at
    each zero and is otherwise constant on the line, so the count is the
    change over (0, T] divided by pi.
    """
    if T < 0:
        raise DomainError("T must be nonnegative")
    if T == 0:
        return 0
    ph = _phase(np.array([0.0, T]), chi, delta)
    value = (ph[1] - ph[0]) / math.pi
    nearest = round(value)
    if abs(value - nearest) > 1e-3:
        raise NonInteger(f"N_chi({T}) evaluates to {value:.6f}")
    return int(nearest)


def _count_safe(chi, T):
    for k in range(8):
        for sgn in (1, -1):
            shift = 0.0 if k == 0 else sgn * 1e-6 * 10 ** k
            if T + shift < 0:
                continue
            try:
                return dirichlet_count(chi, T + shift), T + shift
            except NonInteger:
                if k == 0:
                    break
    raise NonInteger(f"could not evaluate N_chi(T) near {T}")


def dirichlet_scan(chi: DirichletCharacter, t_lo, t_hi, fraction=0.125, max_halvings=6, tol=1e-9):
    """Zeros of L(1/2 + it, chi) on [t_lo, t_hi] from sign changes of Z_chi.

    The number found must equal the change of the counting function over the
    window; the grid is halved on mismatch.

    Raises
    ------
    CountMismatch
        If the counts still disagree after ``max_halvings`` halvings.
    """
    if not 0 <= t_lo < t_hi <= MAX_HEIGHT:
        raise DomainError(f"dirichlet_scan requires 0 <= t_lo < t_hi <= {MAX_HEIGHT:g}")
    n_lo, t_lo = _count_safe(chi, t_lo) if t_lo > 0 else (0, t_lo)
    n_hi, t_hi = _count_safe(chi, t_hi)
    expected = n_hi - n_lo

    def zfun(x):
        return z_chi(x, chi)

    def gapfun(x):
        return average_gap_chi(x, chi.q)

    frac = fraction
    for _ in range(max_halvings + 1):
        ts, widths = sign_changes(t_lo, t_hi, frac, max_halvings, tol, zfun=zfun, gapfun=gapfun)
        if ts.size == expected:
            return [ZeroRecord(n=n_lo + k + 1, t=float(x), method=Method.SIGN_SCAN,
                               bracket_width=float(w)) for k, (x, w) in enumerate(zip(ts, widths))]
        frac /= 2
    raise CountMismatch(f"{chi.label} on [{t_lo}, {t_hi}]: {ts.size} sign changes, "
                        f"counting function gives {expected}")


# ---------------------------------------------------------------- ingestion

def _lines(source):
    if isinstance(source, (str, Path)):
        return Path(source).read_text().splitlines()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source.read().splitlines()
    return list(source)


def ingest_zeros(source, family: LFamily):
    """Read ordinates (one per line) into ZeroRecords.

    Blank lines and lines starting with '#' are skipped; an optional
    ``start_index=<int>`` line before the first ordinate sets the first index.
    The ordinates are not checked numerically.

    Raises
    ------
    MalformedLine
        Unparseable line (with its 1-based number).
    NonMonotone
        Ordinate not strictly above its predecessor.
    """
    start = 1
    out = []
    prev = None
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("start_index="):
            if out:
                raise MalformedLine(lineno, raw)
            try:
                start = int(line.split("=", 1)[1])
            except ValueError as exc:
                raise MalformedLine(lineno, raw) from exc
            continue
        try:
            t = float(line)
        except ValueError as exc:
            raise MalformedLine(lineno, raw) from exc
        if not math.isfinite(t) or "," in line or "_" in line:
            raise MalformedLine(lineno, raw)
        if prev is not None and not t > prev:
            raise NonMonotone(lineno, prev, t)
        out.append(ZeroRecord(n=start + len(out), t=t, method=Method.INGESTED))
        prev = t
    return out
