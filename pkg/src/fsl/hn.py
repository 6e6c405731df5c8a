"""Harder-Narasimhan polygon arithmetic for Frobenius pullbacks.

An :class:`HNType` is the numerical shadow of an HN filtration: the
(rank, degree) of each graded piece, ordered by strictly decreasing slope.
The enumeration routines search all types compatible with a stable bundle
``E`` of rank ``r*p`` whose pullback ``F^*E`` has maximal instability
``nu = (p-1)(2g-2)``, and discard those ruled out by the descent argument
(a prefix of the filtration preserved by the canonical connection descends
to a destabilising subbundle of ``E``).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import List, Optional, Tuple

from fsl.errors import InvariantViolation
from fsl.numerics import BundleNumerics, CurveContext

Part = Tuple[int, int]


@dataclass(frozen=True)
class HNType:
    parts: Tuple[Part, ...]

    def __post_init__(self):
        parts = tuple((int(r), int(d)) for r, d in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise InvariantViolation("an HN type needs at least one part")
        for r, _ in parts:
            if r < 1:
                raise InvariantViolation(f"part ranks must be positive, got {r}")
        sl = self.slopes()
        for i in range(len(sl) - 1):
            if not sl[i] > sl[i + 1]:
                raise InvariantViolation(
                    f"slopes must be strictly decreasing, got {sl[i]} then {sl[i + 1]}"
                )

    @classmethod
    def of(cls, parts) -> "HNType":
        return cls(tuple(tuple(p) for p in parts))

    def __len__(self):
        return len(self.parts)

    def slopes(self) -> List[Fraction]:
        return [Fraction(d, r) for r, d in self.parts]

    @property
    def ranks(self) -> List[int]:
        return [r for r, _ in self.parts]

    @property
    def total_rank(self) -> int:
        return sum(r for r, _ in self.parts)

    @property
    def total_degree(self) -> int:
        return sum(d for _, d in self.parts)

    def slope(self) -> Fraction:
        return Fraction(self.total_degree, self.total_rank)

    def dual(self) -> "HNType":
        return HNType(tuple((r, -d) for r, d in reversed(self.parts)))

    def sort_key(self):
        return (len(self.parts), self.parts)

    def to_json(self) -> dict:
        return {"parts": [list(p) for p in self.parts]}

    @classmethod
    def from_json(cls, obj) -> "HNType":
        parts = obj["parts"] if isinstance(obj, dict) else obj
        try:
            return cls.of(parts)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvariantViolation):
                raise
            raise InvariantViolation(f"malformed part list: {parts!r}") from exc


@dataclass(frozen=True)
class ProofTrace:
    """Outcome of the descent argument on one HN type.

    ``k`` is the 1-based index of the first negative gap ``delta_k`` (None
    when every gap is nonnegative).  ``prefix_slope`` is the slope of the
    filtration step ``V_k`` and ``C`` the rank-weighted mean of ``i - 1``
    over its pieces.  ``any_k_destabilizes`` runs the same test at every
    negative gap instead of only the first one.
    """

    k: Optional[int]
    C: Optional[Fraction]
    prefix_slope: Optional[Fraction]
    destabilizes: bool
    dual_applied: bool = False
    negative_gaps: Tuple[int, ...] = ()
    any_k_destabilizes: bool = False

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "C": None if self.C is None else str(self.C),
            "prefix_slope": None if self.prefix_slope is None else str(self.prefix_slope),
            "destabilizes": self.destabilizes,
            "dual_applied": self.dual_applied,
            "negative_gaps": list(self.negative_gaps),
            "any_k_destabilizes": self.any_k_destabilizes,
        }


def nu(t: HNType) -> Fraction:
    sl = t.slopes()
    return sl[0] - sl[-1]


def nu_bound(ctx: CurveContext, r: int) -> int:
    w = ctx.canonical_degree
    return min((r - 1) * w, (ctx.p - 1) * w)


def canonical_type(ctx: CurveContext, e: BundleNumerics) -> HNType:
    """HN type of ``F^* F_* E``: pieces ``E (x) omega^(p-i)`` for i = 1..p."""
    w = ctx.canonical_degree
    return HNType(
        tuple((e.rank, e.degree + e.rank * (ctx.p - i) * w) for i in range(1, ctx.p + 1))
    )


def delta_sequence(ctx: CurveContext, t: HNType) -> List[Fraction]:
    if len(t) < 2:
        raise InvariantViolation("delta sequence needs at least two parts")
    sl = t.slopes()
    w = ctx.canonical_degree
    return [sl[i + 1] - sl[i] + w for i in range(len(sl) - 1)]


def _prefix_test(t: HNType, k: int, mu_E: Fraction, p: int):
    ranks = t.ranks[:k]
    rk = sum(ranks)
    deg = sum(d for _, d in t.parts[:k])
    C = Fraction(sum(r * i for i, r in enumerate(ranks)), rk)
    prefix = Fraction(deg, rk)
    # equality also contradicts stability of E
    return C, prefix, prefix >= p * mu_E


def descent_filter(ctx: CurveContext, t: HNType, mu_E: Fraction, dual_applied: bool = False) -> ProofTrace:
    mu_E = Fraction(mu_E)
    gaps = delta_sequence(ctx, t)
    negative = tuple(i + 1 for i, x in enumerate(gaps) if x < 0)
    if not negative:
        return ProofTrace(None, None, None, False, dual_applied)
    k = negative[0]
    C, prefix, destab = _prefix_test(t, k, mu_E, ctx.p)
    any_k = any(_prefix_test(t, j, mu_E, ctx.p)[2] for j in negative)
    return ProofTrace(k, C, prefix, destab, dual_applied, negative, any_k)


def dual_trace(ctx: CurveContext, t: HNType, mu_E: Fraction) -> ProofTrace:
    return descent_filter(ctx, t.dual(), -Fraction(mu_E), dual_applied=True)


@dataclass
class EnumerationReport:
    survivors: List[HNType] = field(default_factory=list)
    examined: int = 0
    excluded_descent: int = 0
    excluded_dual: int = 0
    excluded_delta_sum: int = 0
    excluded_single_part: int = 0
    # types where testing every negative gap would change the verdict
    all_k_disagreements: List[HNType] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "survivors": [t.to_json() for t in self.survivors],
            "examined": self.examined,
            "excluded": {
                "single_part": self.excluded_single_part,
                "delta_sum": self.excluded_delta_sum,
                "descent": self.excluded_descent,
                "descent_dual": self.excluded_dual,
            },
            "all_k_disagreements": [t.to_json() for t in self.all_k_disagreements],
        }


def _compositions(n: int, l: int, min_end: int):
    """Ordered tuples of ``l`` positive ints summing to ``n``, ends >= min_end."""

    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(1, remaining - slots + 2):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    for comp in rec(n, l):
        if comp[0] >= min_end and comp[-1] >= min_end:
            yield comp


def _middle_degrees(ranks, total, upper, lower):
    """Integer degrees for the interior parts with slopes strictly between
    ``lower`` and ``upper``, strictly decreasing, summing to ``total``."""
    if not ranks:
        if total == 0:
            yield ()
        return
    r = ranks[0]
    rest = ranks[1:]
    rest_rank = sum(rest)
    # slope strictly inside (lower, upper)
    lo = math.floor(lower * r) + 1
    hi = math.ceil(upper * r) - 1
    for deg in range(hi, lo - 1, -1):
        s = Fraction(deg, r)
        remaining = total - deg
        # remaining interior parts have slopes in (lower, s)
        if rest:
            if not (lower * rest_rank < remaining < s * rest_rank):
                continue
        for tail in _middle_degrees(rest, remaining, s, lower):
            yield (deg,) + tail


def _candidate_types(total_rank, total_degree, mu_first, mu_last, min_end_rank, max_l):
    for l in range(2, max_l + 1):
        for ranks in _compositions(total_rank, l, min_end_rank):
            first = mu_first * ranks[0]
            last = mu_last * ranks[-1]
            if first.denominator != 1 or last.denominator != 1:
                continue
            interior = total_degree - int(first) - int(last)
            for mids in _middle_degrees(ranks[1:-1], interior, mu_first, mu_last):
                degs = (int(first),) + mids + (int(last),)
                yield HNType(tuple(zip(ranks, degs)))


def search_report(ctx: CurveContext, r: int, d: int, max_l: int) -> EnumerationReport:
    """Exhaustive search over HN types of ``F^*E`` for stable ``E`` of rank
    ``r*p``, slope ``g - 1 + d/(r*p)`` and ``nu(E) = (p-1)(2g-2)``.

    End slopes are pinned to ``(2p-1)(g-1) + d/r`` and ``g - 1 + d/r``.
    A candidate survives when neither it nor its dual is excluded by
    :func:`descent_filter`.
    """
    if r < 1:
        raise InvariantViolation(f"rank must be positive, got {r!r}")
    g, p = ctx.g, ctx.p
    rank_E = r * p
    mu_E = Fraction(g - 1) + Fraction(d, rank_E)
    total_rank = rank_E
    total_degree = p * (rank_E * (g - 1) + d)
    mu_first = Fraction((2 * p - 1) * (g - 1)) + Fraction(d, r)
    mu_last = Fraction(g - 1) + Fraction(d, r)
    target_nu = (p - 1) * ctx.canonical_degree

    rep = EnumerationReport()
    if max_l >= 1:
        # a single piece has nu = 0, never the maximal value
        rep.examined += 1
        if target_nu != 0:
            rep.excluded_single_part += 1

    for t in _candidate_types(total_rank, total_degree, mu_first, mu_last, r, max_l):
        rep.examined += 1
        l = len(t)
        if sum(delta_sequence(ctx, t)) != 2 * (l - p) * (g - 1) or nu(t) != target_nu:
            rep.excluded_delta_sum += 1
            continue
        fwd = descent_filter(ctx, t, mu_E)
        bwd = dual_trace(ctx, t, mu_E)
        if fwd.any_k_destabilizes != fwd.destabilizes or bwd.any_k_destabilizes != bwd.destabilizes:
            rep.all_k_disagreements.append(t)
        if fwd.destabilizes:
            rep.excluded_descent += 1
        elif bwd.destabilizes:
            rep.excluded_dual += 1
        else:
            rep.survivors.append(t)
    rep.survivors.sort(key=HNType.sort_key)
    return rep


def search_general_types(ctx: CurveContext, r: int, d: int, max_l: int) -> List[HNType]:
    return search_report(ctx, r, d, max_l).survivors


def enumerate_report(ctx: CurveContext, d: int) -> EnumerationReport:
    # ranks sum to p, so no type has more than p parts
    return search_report(ctx, 1, d, ctx.p)


def enumerate_rank_p_types(ctx: CurveContext, d: int) -> List[HNType]:
    return enumerate_report(ctx, d).survivors


def line_bundle_type(ctx: CurveContext, d: int) -> HNType:
    """The type predicted for ``E = F_*L``, ``deg L = g - 1 + d``."""
    g, p = ctx.g, ctx.p
    return HNType(tuple((1, (2 * (p - i) + 1) * (g - 1) + d) for i in range(1, p + 1)))


def prefix_slopes(t: HNType) -> List[Fraction]:
    """Slopes of the filtration steps ``V_1, ..., V_l``."""
    ranks = list(accumulate(t.ranks))
    degs = list(accumulate(d for _, d in t.parts))
    return [Fraction(d, r) for r, d in zip(ranks, degs)]
