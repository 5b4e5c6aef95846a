"""Sweep over subsets S of the primes above p: build the modulus
(prod_{P in S} P^e_P)^n, read the p-part of the ray class group at n and
n + Delta, and classify invariants into the growing part (Z_p-rank) and
the stabilized torsion.

Classification matches entries greedily from the small end; equal
entries are torsion, unmatched entries must have grown by at least a
factor p.  Instability escalates Delta (doubling, capped) and is finally
reported as data, never as an exception.  The rank reported is the
p-rank at exponent n, which by the stabilization theorem is independent
of n once n >= 3 for p = 2 and n >= 2 for odd p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rayclass as rc
from . import zabgroup as zg
from .numutil import primes_in


@dataclass(frozen=True)
class SweepConfig:
    bp: int = 2
    Bp: int = 5000
    n0: int = 6
    delta: int = 4
    max_escalations: int = 3
    guard: int = 2

    def n_for(self, p: int) -> int:
        return max(self.n0 + 30 // p, n_min(p))


def n_min(p: int) -> int:
    return 3 if p == 2 else 2


def modulus_for(F, S, n: int) -> rc.Modulus:
    """Modulus (prod_{P in S} P^e_P)^n."""
    if n < 1 and S:
        raise ValueError("n must be >= 1")
    ps = {pr.p for pr in S}
    if len(ps) > 1:
        raise ValueError("mixed residue characteristics in S")
    p = ps.pop() if ps else 0
    return rc.make_modulus(F, p, {pr: pr.e * n for pr in S}) if S else rc.Modulus(p, ())


@dataclass
class SRamReport:
    p: int
    mask: tuple[int, ...]
    n: int
    delta: int
    invariants_n: list[int]
    invariants_nd: list[int]
    rtilde: int
    torsion: list[int]
    stable: bool
    ambiguous: bool
    error: str | None = None

    @property
    def rank(self) -> int:
        return len(self.invariants_n)

    @property
    def s_rational(self) -> bool:
        return not self.torsion

    @property
    def torsion_order(self) -> int:
        n = 1
        for t in self.torsion:
            n *= t
        return n


def classify(inv_n: list[int], inv_nd: list[int], p: int) -> tuple[int, list[int], bool, bool]:
    """(rtilde, torsion, stable, ambiguous) from invariant lists at
    exponents n < n + Delta."""
    a = sorted(inv_n)
    b = sorted(inv_nd)
    torsion: list[int] = []
    grew_a: list[int] = []
    grew_b: list[int] = []
    shrunk = False
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            torsion.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            grew_a.append(a[i])
            i += 1
        else:
            shrunk = True
            j += 1
    grew_a.extend(a[i:])
    grew_b.extend(b[j:])
    rtilde = len(grew_a)
    stable = (
        not shrunk
        and len(grew_a) == len(grew_b)
        and all(gb >= ga * p for ga, gb in zip(sorted(grew_a), sorted(grew_b)))
    )
    ambiguous = bool(torsion) and bool(grew_a) and max(torsion) >= min(grew_a)
    torsion.sort(reverse=True)
    return rtilde, torsion, stable, ambiguous


def compute_AKS(F, p: int, S, n: int) -> list[int]:
    """Descending p-power invariants of Cl_K(m(S)^n) (one-shot path)."""
    if n < n_min(p) and S:
        raise ValueError(f"n = {n} below the stabilization floor {n_min(p)}")
    levels = {pr: pr.e * n for pr in S}
    calc = rc.PPartCalculator(F, p, levels or {})
    return calc.invariants(levels)


def mask_subsets(primes):
    """(mask, subset) pairs in the binary order of the reference tables:
    mask digits are most-significant-first over the prime list."""
    d = len(primes)
    for z in range(2**d):
        bits = tuple((z >> (d - 1 - i)) & 1 for i in range(d))
        yield bits, [pr for pr, b in zip(primes, bits) if b]


def analyze_subset(calc: rc.PPartCalculator, primes, bits, cfg: SweepConfig, p: int) -> SRamReport:
    S = [pr for pr, b in zip(primes, bits) if b]
    n = cfg.n_for(p)
    delta = cfg.delta
    attempts = 0
    while True:
        inv_n = calc.invariants({pr: pr.e * n for pr in S})
        inv_nd = calc.invariants({pr: pr.e * (n + delta) for pr in S})
        rtilde, torsion, stable, ambiguous = classify(inv_n, inv_nd, p)
        if stable or attempts >= cfg.max_escalations:
            break
        delta *= 2
        attempts += 1
    local_degree = sum(pr.e * pr.f for pr in S)
    if rtilde > local_degree:
        raise AssertionError(
            f"rtilde = {rtilde} exceeds the local degree bound {local_degree}"
        )
    return SRamReport(p, bits, n, delta, inv_n, inv_nd, rtilde, torsion, stable, ambiguous)


def sweep_prime(F, p: int, cfg: SweepConfig) -> list[SRamReport]:
    """All 2^d subset reports for one p, in binary mask order."""
    primes = F.primes_above(p)
    n_top = cfg.n_for(p) + cfg.delta * 2**cfg.max_escalations
    calc = rc.PPartCalculator(
        F, p, {pr: pr.e * n_top for pr in primes}, guard=cfg.guard
    )
    out = []
    for bits, S in mask_subsets(primes):
        try:
            out.append(analyze_subset(calc, primes, bits, cfg, p))
        except Exception as exc:  # isolated per (p, S)
            out.append(
                SRamReport(p, bits, cfg.n_for(p), cfg.delta, [], [], 0, [], False,
                           False, error=f"{type(exc).__name__}: {exc}")
            )
    return out


def sweep(F, cfg: SweepConfig) -> list[SRamReport]:
    out = []
    for p in primes_in(cfg.bp, cfg.Bp):
        out.extend(sweep_prime(F, p, cfg))
    return out
