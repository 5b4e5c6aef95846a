"""p-rationality scanner for real quadratic fields.

The filter computes eps^(p - chi_D(p)) mod p^2 in the rank-2 ring
Z[w]/(p^2) by square-and-multiply.  A pass (value not +-1) certifies the
normalized regulator is a p-unit, which for p coprime to 2 D h forces
T_{K,P} = 1; suspects and the excluded primes are verified through the
full ray-class pipeline.  The +-1 test is forced by the inert case with
N(eps) = -1, where eps^(p+1) = -1 mod p exactly; on split primes a -1
value cannot occur, and the verdict is conjugation-symmetric because the
arithmetic happens globally mod p^2.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import quadfield as qf
from . import sramdriver as sd
from .backend import QuadBackend
from .numutil import kronecker, primes_in, valuation


@dataclass(frozen=True)
class ScanResult:
    d: int
    p_min: int
    p_max: int
    suspects: tuple[int, ...]
    confirmed: tuple[int, ...]
    skipped: tuple[tuple[int, str], ...]
    verified: tuple[tuple[int, tuple[int, ...]], ...] = ()


def fermat_quotient_filter(d: int, p: int):
    """'pass', 'suspect', or ('excluded', reason) for one odd prime."""
    if p == 2:
        return ("excluded", "p = 2 goes through the pipeline only")
    k = qf.make_quadratic_field(d)
    if k.d < 0:
        raise ValueError("scanner is for real quadratic fields")
    h = qf.class_number(k)
    if k.disc % p == 0:
        return ("excluded", "p ramifies")
    if h % p == 0:
        return ("excluded", "p divides the class number")
    eps = qf.fundamental_unit(k).fundamental_unit
    return _filter_inner(k, eps, p)


def _filter_inner(k, eps, p: int) -> str:
    m = p - kronecker(k.disc, p)
    p2 = p * p
    u = qf.elem_pow_mod(k, eps, m, p2)
    if u == (1, 0) or u == (p2 - 1, 0):
        return "suspect"
    return "pass"


def _verify_prime(F: QuadBackend, p: int, cfg: sd.SweepConfig):
    """Full-pipeline check of T_{K,P}; returns the torsion invariants."""
    primes = F.primes_above(p)
    n_top = cfg.n_for(p) + cfg.delta * 2**cfg.max_escalations
    from . import rayclass as rc

    calc = rc.PPartCalculator(F, p, {pr: pr.e * n_top for pr in primes}, guard=cfg.guard)
    bits = tuple(1 for _ in primes)
    rep = sd.analyze_subset(calc, primes, bits, cfg, p)
    if not rep.stable:
        raise AssertionError(f"verification unstable at p={p}")
    return tuple(rep.torsion)


def _filter_chunk(d: int, lo: int, hi: int):
    k = qf.make_quadratic_field(d)
    eps = qf.fundamental_unit(k).fundamental_unit
    h = qf.class_number(k)
    suspects, skipped = [], []
    for p in primes_in(lo, hi):
        if p == 2:
            skipped.append((p, "p = 2 goes through the pipeline only"))
            continue
        if k.disc % p == 0:
            skipped.append((p, "p ramifies"))
            continue
        if h % p == 0:
            skipped.append((p, "p divides the class number"))
            continue
        if _filter_inner(k, eps, p) == "suspect":
            suspects.append(p)
    return suspects, skipped


def scan_range(d: int, p_min: int, p_max: int, cfg: sd.SweepConfig | None = None,
               jobs: int = 1) -> ScanResult:
    """Filter every odd prime in [p_min, p_max], then verify suspects and
    skipped odd primes through the pipeline.  Deterministic for any job
    count."""
    cfg = cfg or sd.SweepConfig()
    k = qf.make_quadratic_field(d)
    if k.d < 0:
        raise ValueError("scanner is for real quadratic fields")
    suspects: list[int] = []
    skipped: list[tuple[int, str]] = []
    if jobs <= 1 or p_max - p_min < 10**5:
        s, sk = _filter_chunk(d, p_min, p_max)
        suspects.extend(s)
        skipped.extend(sk)
    else:
        step = (p_max - p_min) // jobs + 1
        spans = [
            (d, p_min + i * step, min(p_max, p_min + (i + 1) * step - 1))
            for i in range(jobs)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for s, sk in pool.map(_filter_chunk_star, spans):
                suspects.extend(s)
                skipped.extend(sk)
    suspects.sort()
    skipped.sort()
    F = QuadBackend(d)
    confirmed = []
    verified = []
    for p in suspects + [p for p, _ in skipped if p != 2]:
        torsion = _verify_prime(F, p, cfg)
        verified.append((p, torsion))
        if torsion:
            confirmed.append(p)
    confirmed.sort()
    verified.sort()
    return ScanResult(
        d, p_min, p_max, tuple(suspects), tuple(confirmed), tuple(skipped),
        tuple(verified),
    )


def _filter_chunk_star(args):
    return _filter_chunk(*args)
