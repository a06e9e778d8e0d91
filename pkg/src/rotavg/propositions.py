"""Exhaustive rank enumeration and machine checks of the vanishing rules.

The number of exponent matrices of rank n is binom(n+8, 8), small enough to
sweep completely through rank 13 and beyond.  The checks below confirm, per
rank, when "nonzero" coincides with the parity selection rule (even ranks)
or with the rule plus a nonvanishing determinant (odd ranks), and they
report the orbits that break the pattern.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, Optional

from .evaluator import ValueCache, closed_form, double_factorial
from .power_matrix import (
    Flat,
    PowerMatrix,
    _det_flat,
    _selection_flat,
    canonical_flat,
    determinant,
    selection_rule,
)

# the two rank-specific exceptions to the simple vanishing rules: a rank-8
# matrix whose average vanishes although the selection rule holds, and a
# rank-9 matrix with zero determinant but nonvanishing average
RANK8_EXCEPTION = PowerMatrix(((0, 0, 0), (1, 1, 2), (1, 1, 2)))
RANK9_EXCEPTION = PowerMatrix(((1, 1, 1), (1, 2, 0), (1, 0, 2)))


def enumeration_count(n: int) -> int:
    """Number of 3x3 nonnegative integer matrices with entry sum n."""
    if n < 0:
        raise ValueError("rank must be nonnegative")
    return comb(n + 8, 8)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_power_matrices(n: int) -> Iterator[PowerMatrix]:
    """All rank-n exponent matrices exactly once, in lexicographic flat order."""
    if n < 0:
        raise ValueError("rank must be nonnegative")
    for flat in _compositions(n, 9):
        yield PowerMatrix.from_flat(flat)


def canonical_representatives(n: int) -> list[PowerMatrix]:
    """The orbit-minimal matrices of rank n, in lexicographic order."""
    return [
        PowerMatrix.from_flat(flat)
        for flat in _compositions(n, 9)
        if canonical_flat(flat)[0] == flat
    ]


@dataclass
class PropositionReport:
    """Outcome of one exhaustive rank check."""

    rank: int
    claim: str
    checked: int
    violations: list[PowerMatrix]
    verdict: str  # "holds" | "fails-with-witnesses"

    def to_json_obj(self) -> dict:
        return {
            "rank": self.rank,
            "claim": self.claim,
            "checked": self.checked,
            "violations": [chi.to_lists() for chi in self.violations],
            "verdict": self.verdict,
        }


def _make_report(rank: int, claim: str, checked: int, violations: set[Flat]) -> PropositionReport:
    witnesses = [PowerMatrix.from_flat(flat) for flat in sorted(violations)]
    verdict = "holds" if not witnesses else "fails-with-witnesses"
    return PropositionReport(rank, claim, checked, witnesses, verdict)


def _rep_value(flat: Flat, cache: ValueCache) -> Fraction:
    """Value of the orbit containing flat (selection rule assumed to hold)."""
    rep, sign = canonical_flat(flat)
    if sign == 0:
        return Fraction(0)
    value = cache.get(rep)
    if value is None:
        value = closed_form(PowerMatrix.from_flat(rep))
        cache.put(rep, value)
    return -value if sign < 0 else value


def verify_even_rule(n: int, cache: Optional[ValueCache] = None) -> PropositionReport:
    """Check "average nonzero iff the selection rule holds" over all rank-n matrices.

    Violating orbits (selection rule holds, value 0) are reported through one
    canonical witness each.  Expected to hold for n in {0, 2, 4, 6, 10, 12};
    at n = 8 the witnesses are exactly the orbit of RANK8_EXCEPTION.
    """
    if n % 2:
        raise ValueError("even rank required")
    cache = cache if cache is not None else ValueCache()
    checked = 0
    violations: set[Flat] = set()
    for flat in _compositions(n, 9):
        checked += 1
        if not _selection_flat(flat):
            continue  # value is 0 by parity, consistent with the claim
        if _rep_value(flat, cache) == 0:
            violations.add(canonical_flat(flat)[0])
    return _make_report(n, "nonzero-iff-selection-rule", checked, violations)


def verify_odd_rule(n: int, cache: Optional[ValueCache] = None) -> PropositionReport:
    """Check "average nonzero iff selection rule holds and det != 0" at odd rank n.

    Expected to hold for n in {1, 3, 5, 7, 11, 13}; at n = 9 the witnesses
    are exactly the orbit of RANK9_EXCEPTION.
    """
    if n % 2 == 0:
        raise ValueError("odd rank required")
    cache = cache if cache is not None else ValueCache()
    checked = 0
    violations: set[Flat] = set()
    for flat in _compositions(n, 9):
        checked += 1
        if not _selection_flat(flat):
            continue
        nonzero = _rep_value(flat, cache) != 0
        if nonzero != (_det_flat(flat) != 0):
            violations.add(canonical_flat(flat)[0])
    return _make_report(n, "nonzero-iff-selection-rule-and-det", checked, violations)


def _is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def verify_prime_nonvanishing(n: int, cache: Optional[ValueCache] = None) -> PropositionReport:
    """At odd prime rank n: nonzero whenever the selection rule holds and n ∤ det."""
    if not _is_odd_prime(n):
        raise ValueError("odd prime rank required")
    cache = cache if cache is not None else ValueCache()
    checked = 0
    violations: set[Flat] = set()
    for flat in _compositions(n, 9):
        checked += 1
        if not _selection_flat(flat) or _det_flat(flat) % n == 0:
            continue
        if _rep_value(flat, cache) == 0:
            violations.add(canonical_flat(flat)[0])
    return _make_report(n, "nonzero-when-selection-holds-and-rank-coprime-det", checked, violations)


def prop_converse_witnesses(n: int, cache: Optional[ValueCache] = None) -> list[PowerMatrix]:
    """Orbits at odd prime rank n with selection rule, n | det, and nonzero average.

    These witness that divisibility of the determinant by the rank does not
    force the average to vanish.  Found by scanning; nothing is hard-coded.
    """
    if not _is_odd_prime(n):
        raise ValueError("odd prime rank required")
    cache = cache if cache is not None else ValueCache()
    found: set[Flat] = set()
    for flat in _compositions(n, 9):
        if not _selection_flat(flat) or _det_flat(flat) % n != 0:
            continue
        if _rep_value(flat, cache) != 0:
            found.add(canonical_flat(flat)[0])
    return [PowerMatrix.from_flat(flat) for flat in sorted(found)]


def counterexample_family(v: int, y: int, w: int) -> PowerMatrix:
    """A family of even-rank matrices whose average vanishes despite the selection rule.

    Requires even v, y >= 2 and odd 1 <= w <= v*y - 3; the rank comes out to
    (v+1)(y+1) - 1.  The caller can confirm selection_rule(result) is True
    and evaluate(result) == 0.
    """
    if v < 2 or v % 2:
        raise ValueError("v must be even and >= 2")
    if y < 2 or y % 2:
        raise ValueError("y must be even and >= 2")
    if w < 1 or w > v * y - 3 or w % 2 == 0:
        raise ValueError("w must be odd with 1 <= w <= v*y - 3")
    return PowerMatrix(((0, 0, 0), (1, 1, v), (w, v * y - w - 2, y)))


def first_order_term(chi: PowerMatrix) -> Fraction:
    """Aggregate of the four q+r+t+u = 1 summands of the closed-form sum.

    Only defined at odd rank with the selection rule holding (the summands
    exist only there).  The aggregate collapses to a determinant bracket:
    a product of five double factorials times det - n*(QU - RT), over n!!.
    """
    Q, R, S, T, U, V, W, X, Y = chi.flat
    n = chi.rank
    if n % 2 == 0:
        raise ValueError("odd rank required")
    if not selection_rule(chi):
        raise ValueError("selection rule must hold")
    bracket = determinant(chi) - n * (Q * U - R * T)
    num = (
        double_factorial(Q + R + T + U + Y - 2)
        * double_factorial(T + U + V - 2)
        * double_factorial(Q + R + S - 2)
        * double_factorial(R + U + X - 2)
        * double_factorial(Q + T + W - 2)
    )
    return Fraction(num * bracket, double_factorial(n))


def rank_table(
    n: int,
    cache: Optional[ValueCache] = None,
    nonzero: bool = False,
    canonical_only: bool = False,
    threads: int = 1,
) -> Iterator[tuple[PowerMatrix, Fraction]]:
    """All rank-n matrices with their exact averages, in lexicographic order.

    Values match :func:`rotavg.evaluator.evaluate` exactly.  With threads > 1
    the per-orbit closed forms are precomputed concurrently; the emitted
    stream is identical regardless of thread count.
    """
    cache = cache if cache is not None else ValueCache()
    det_rank = n in (3, 5)
    entries: list[tuple[Flat, Optional[Flat], int, bool]] = []
    for flat in _compositions(n, 9):
        sel = _selection_flat(flat)
        if canonical_only or (sel and not det_rank):
            rep, sign = canonical_flat(flat)
            if canonical_only and rep != flat:
                continue
        else:
            rep, sign = None, 1
        entries.append((flat, rep, sign, sel))
    if not det_rank:
        missing = list(
            dict.fromkeys(
                rep
                for _, rep, sign, sel in entries
                if sel and sign != 0 and cache.get(rep) is None
            )
        )
        if threads > 1 and missing:
            def _fill(rep: Flat) -> None:
                cache.put(rep, closed_form(PowerMatrix.from_flat(rep)))

            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(_fill, missing))
        else:
            for rep in missing:
                cache.put(rep, closed_form(PowerMatrix.from_flat(rep)))
    for flat, rep, sign, sel in entries:
        if not sel or sign == 0:
            value = Fraction(0)
        elif det_rank:
            value = Fraction(_det_flat(flat), 6 if n == 3 else 30)
        else:
            value = cache.get(rep)
            if sign < 0:
                value = -value
        if nonzero and value == 0:
            continue
        yield PowerMatrix.from_flat(flat), value
