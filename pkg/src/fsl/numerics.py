"""Exact degree/slope calculus for bundles on a curve in characteristic p.

Only numerical shadows are modelled: a bundle is its (rank, degree), a curve
is its (genus, characteristic).  Every quantity is an ``int`` or a
``fractions.Fraction``; nothing here touches floating point.
"""

from dataclasses import dataclass
from fractions import Fraction

from fsl.errors import InvariantViolation


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CurveContext:
    """Genus ``g >= 2`` and prime characteristic ``p``."""

    g: int
    p: int

    def __post_init__(self):
        if not isinstance(self.g, int) or self.g < 2:
            raise InvariantViolation(f"genus must be an integer >= 2, got {self.g!r}")
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise InvariantViolation(f"characteristic must be prime, got {self.p!r}")

    @property
    def canonical_degree(self) -> int:
        return 2 * self.g - 2


@dataclass(frozen=True)
class BundleNumerics:
    rank: int
    degree: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise InvariantViolation(f"rank must be a positive integer, got {self.rank!r}")
        if not isinstance(self.degree, int):
            raise InvariantViolation(f"degree must be an integer, got {self.degree!r}")

    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def excess(self, ctx: CurveContext) -> int:
        """The integer s with slope = g - 1 + s/rank."""
        return self.degree - self.rank * (ctx.g - 1)

    def to_json(self) -> dict:
        return {"rank": self.rank, "degree": self.degree, "slope": str(self.slope())}

    @classmethod
    def from_json(cls, obj) -> "BundleNumerics":
        b = cls(obj["rank"], obj["degree"])
        if "slope" in obj and Fraction(obj["slope"]) != b.slope():
            raise InvariantViolation(f"slope {obj['slope']} disagrees with {b.rank}, {b.degree}")
        return b


@dataclass(frozen=True)
class ReductionPlan:
    """Certificate that a bundle can be moved to slope ``covered_genus - 1``.

    The bundle is pulled back along an etale cover of degree
    ``covering_degree = p**covering_exponent * p * rank``, then twisted by the
    Frobenius pullback of a line bundle of degree ``twist_degree``.  Both the
    twisted bundle and its Frobenius pushforward sit at slope
    ``covered_genus - 1``.
    """

    covering_exponent: int
    covering_degree: int
    twist_degree: int
    covered_genus: int
    excess: int
    reduced: BundleNumerics
    pushed: BundleNumerics

    def to_json(self) -> dict:
        return {
            "covering_exponent": self.covering_exponent,
            "covering_degree": self.covering_degree,
            "twist_degree": self.twist_degree,
            "covered_genus": self.covered_genus,
            "s": self.excess,
            "reduced": self.reduced.to_json(),
            "pushed": self.pushed.to_json(),
        }


def slope(b: BundleNumerics) -> Fraction:
    return b.slope()


def frobenius_pushforward(ctx: CurveContext, b: BundleNumerics) -> BundleNumerics:
    """Numerics of ``F_* E``: rank ``p*r``, degree ``deg + r(p-1)(g-1)``.

    Equivalent to preserving the Euler characteristic ``deg + rank*(1-g)``
    under the finite map F.
    """
    return BundleNumerics(ctx.p * b.rank, b.degree + b.rank * (ctx.p - 1) * (ctx.g - 1))


def frobenius_pullback(ctx: CurveContext, b: BundleNumerics) -> BundleNumerics:
    return BundleNumerics(b.rank, ctx.p * b.degree)


def etale_pullback(ctx: CurveContext, n: int, b: BundleNumerics):
    """Pull back along a connected etale cover of degree ``n``.

    Returns ``(bundle, covered_genus)`` where ``covered_genus - 1 = n(g - 1)``.
    """
    if not isinstance(n, int) or n < 1:
        raise InvariantViolation(f"covering degree must be a positive integer, got {n!r}")
    return BundleNumerics(b.rank, n * b.degree), n * (ctx.g - 1) + 1


def twist(b: BundleNumerics, line_degree: int) -> BundleNumerics:
    return BundleNumerics(b.rank, b.degree + b.rank * line_degree)


def reduction_plan(ctx: CurveContext, b: BundleNumerics, k: int = 0) -> ReductionPlan:
    r = b.rank
    s = b.excess(ctx)
    m = ctx.p * r
    n = ctx.p**k * m
    # n*s/(p*r) = p**k * s, integral for every k >= 0
    d = -(n * s) // m

    pulled, g_cov = etale_pullback(ctx, n, b)
    reduced = twist(pulled, ctx.p * d)
    cov = CurveContext(g_cov, ctx.p)
    pushed = frobenius_pushforward(cov, reduced)

    target = Fraction(g_cov - 1)
    if reduced.slope() != target or pushed.slope() != target:
        raise ArithmeticError(f"reduction of {b} missed slope {target}")
    return ReductionPlan(k, n, d, g_cov, s, reduced, pushed)


def faltings_rank_bound(ctx: CurveContext, r: int) -> int:
    """Least integer strictly greater than ``r**2 * (g - 1) / 4``."""
    if r < 1:
        raise InvariantViolation(f"rank must be positive, got {r!r}")
    return r * r * (ctx.g - 1) // 4 + 1


def adjunction_bounds(ctx: CurveContext, b: BundleNumerics):
    """Bounds on the HN extremes of ``F^*E`` for semistable ``E``.

    Returns ``(lower bound for mu_min, upper bound for mu_max)``; these come
    from the adjunction maps ``E -> F_*Q`` and the dual argument, and are not
    the actual extreme slopes.
    """
    centre = ctx.p * b.slope()
    spread = (ctx.p - 1) * (ctx.g - 1)
    return centre - spread, centre + spread
