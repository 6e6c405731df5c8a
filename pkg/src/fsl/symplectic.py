"""Isotropic 2-planes in the standard symplectic space F_l^{2g}.

Vectors are tuples of residues mod ``l``.  The first ``g`` coordinates pair
with the last ``g``: ``omega(x, y) = sum_i x_i y_{g+i} - x_{g+i} y_i``.
Everything is additive; an l-torsion point written ``beta (x) alpha^i`` in
the Jacobian is the vector ``beta + i*alpha`` here.

Planes are stored by their reduced row-echelon basis, so two planes are
equal exactly when their bases are.  Each vector also has an integer code
(its coordinates read as a base-l numeral, most significant first), which
orders codes the same way as coordinate tuples.
"""

import functools
import os
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fsl.errors import BudgetExceeded, InvariantViolation, NoAdmissiblePair
from fsl.numerics import is_prime

FVector = Tuple[int, ...]

DEFAULT_BUDGET = 10**8


def resolve_budget(budget: Optional[int] = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("FSL_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class SymplecticSpace:
    l: int
    g: int

    def __post_init__(self):
        if not isinstance(self.l, int) or not is_prime(self.l):
            raise InvariantViolation(f"l must be prime, got {self.l!r}")
        if not isinstance(self.g, int) or self.g < 2:
            raise InvariantViolation(f"g must be an integer >= 2, got {self.g!r}")

    @property
    def dim(self) -> int:
        return 2 * self.g

    @property
    def size(self) -> int:
        return self.l**self.dim

    def vector(self, coords: Iterable[int]) -> FVector:
        v = tuple(int(c) % self.l for c in coords)
        if len(v) != self.dim:
            raise InvariantViolation(f"expected {self.dim} coordinates, got {len(v)}")
        return v

    def zero(self) -> FVector:
        return (0,) * self.dim

    def basis_vector(self, i: int) -> FVector:
        return tuple(int(j == i) for j in range(self.dim))

    def add(self, x: FVector, y: FVector) -> FVector:
        return tuple((a + b) % self.l for a, b in zip(x, y))

    def scale(self, c: int, x: FVector) -> FVector:
        return tuple((c * a) % self.l for a in x)

    def encode(self, x: FVector) -> int:
        code = 0
        for c in x:
            code = code * self.l + c
        return code

    def decode(self, code: int) -> FVector:
        out = []
        for _ in range(self.dim):
            code, c = divmod(code, self.l)
            out.append(c)
        return tuple(reversed(out))

    def nonzero_vectors(self):
        for code in range(1, self.size):
            yield self.decode(code)


def omega(sp: SymplecticSpace, x: Sequence[int], y: Sequence[int]) -> int:
    g = sp.g
    if len(x) != sp.dim or len(y) != sp.dim:
        raise InvariantViolation(f"vectors must have {sp.dim} coordinates")
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g)) % sp.l


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def isotropic_plane_count(g: int, l: int) -> int:
    """Closed form for the number of isotropic 2-planes in F_l^{2g}."""
    num = (l ** (2 * g) - 1) * (l ** (2 * g - 2) - 1)
    den = (l**2 - 1) * (l - 1)
    assert num % den == 0
    return num // den


def planes_through_count(g: int, l: int) -> int:
    """Closed form for the number of isotropic 2-planes through a nonzero vector."""
    return (l ** (2 * g - 2) - 1) // (l - 1)


def rref_pair(sp: SymplecticSpace, x: FVector, y: FVector):
    """Reduced echelon basis of span(x, y), or None if x, y are dependent."""
    l = sp.l
    rows = [list(x), list(y)]
    pivots = []
    r = 0
    for col in range(sp.dim):
        if r == 2:
            break
        sel = next((i for i in range(r, 2) if rows[i][col]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][col], -1, l)
        rows[r] = [(v * inv) % l for v in rows[r]]
        for i in range(2):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % l for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if r < 2:
        return None
    return tuple(rows[0]), tuple(rows[1])


@dataclass(frozen=True)
class IsotropicPlane:
    """An isotropic 2-plane given by its reduced row-echelon basis."""

    basis: Tuple[FVector, FVector]

    @property
    def pivots(self) -> Tuple[int, int]:
        b1, b2 = self.basis
        return next(i for i, c in enumerate(b1) if c), next(i for i, c in enumerate(b2) if c)

    def coefficients(self, x: FVector) -> Tuple[int, int]:
        c1, c2 = self.pivots
        return x[c1], x[c2]

    def contains(self, sp: SymplecticSpace, x: FVector) -> bool:
        a, b = self.coefficients(x)
        b1, b2 = self.basis
        return all((xi - a * u - b * v) % sp.l == 0 for xi, u, v in zip(x, b1, b2))

    def point(self, sp: SymplecticSpace, a: int, b: int) -> FVector:
        b1, b2 = self.basis
        return tuple((a * u + b * v) % sp.l for u, v in zip(b1, b2))

    def points(self, sp: SymplecticSpace) -> List[FVector]:
        return [self.point(sp, a, b) for a in range(sp.l) for b in range(sp.l)]

    def to_json(self):
        return [list(v) for v in self.basis]


def make_plane(sp: SymplecticSpace, x: FVector, y: FVector) -> IsotropicPlane:
    basis = rref_pair(sp, x, y)
    if basis is None:
        raise InvariantViolation("vectors are linearly dependent")
    if omega(sp, *basis) != 0:
        raise InvariantViolation("span is not isotropic")
    return IsotropicPlane(basis)


def _schubert_cells(sp: SymplecticSpace):
    """All reduced echelon 2-row matrices, one per 2-plane of F_l^{2g}."""
    n, l = sp.dim, sp.l
    for c1 in range(n):
        for c2 in range(c1 + 1, n):
            free1 = [j for j in range(c1 + 1, n) if j != c2]
            free2 = list(range(c2 + 1, n))
            for vals1 in product(range(l), repeat=len(free1)):
                b1 = [0] * n
                b1[c1] = 1
                for j, v in zip(free1, vals1):
                    b1[j] = v
                b1 = tuple(b1)
                for vals2 in product(range(l), repeat=len(free2)):
                    b2 = [0] * n
                    b2[c2] = 1
                    for j, v in zip(free2, vals2):
                        b2[j] = v
                    yield b1, tuple(b2)


def enumeration_cost(sp: SymplecticSpace) -> int:
    """Number of form evaluations the plane enumeration performs."""
    return gaussian_binomial(sp.dim, 2, sp.l)


def enumerate_isotropic_planes(sp: SymplecticSpace, budget: Optional[int] = None) -> List[IsotropicPlane]:
    """Every isotropic 2-plane exactly once, sorted by basis."""
    budget = resolve_budget(budget)
    cost = enumeration_cost(sp)
    if cost > budget:
        raise BudgetExceeded(cost, budget)
    return list(_catalog(sp).planes)


class PlaneCatalog:
    """Isotropic planes of one space plus array views used for fast scans."""

    def __init__(self, sp: SymplecticSpace):
        self.sp = sp
        self.planes = [IsotropicPlane((b1, b2)) for b1, b2 in _schubert_cells(sp) if omega(sp, b1, b2) == 0]
        self.planes.sort(key=lambda pl: pl.basis)
        l = sp.l
        n = len(self.planes)
        self.b1 = np.array([pl.basis[0] for pl in self.planes], dtype=np.int64).reshape(n, sp.dim)
        self.b2 = np.array([pl.basis[1] for pl in self.planes], dtype=np.int64).reshape(n, sp.dim)
        piv = np.array([pl.pivots for pl in self.planes], dtype=np.int64).reshape(n, 2)
        self.piv1, self.piv2 = piv[:, 0], piv[:, 1]
        weights = l ** np.arange(sp.dim - 1, -1, -1, dtype=np.int64)
        coeffs = [(a, b) for a in range(l) for b in range(l) if (a, b) != (0, 0)]
        a = np.array([c[0] for c in coeffs], dtype=np.int64)
        b = np.array([c[1] for c in coeffs], dtype=np.int64)
        pts = (a[None, :, None] * self.b1[:, None, :] + b[None, :, None] * self.b2[:, None, :]) % l
        # (planes, l^2 - 1) codes of the nonzero points of each plane
        self.point_codes = pts @ weights
        # (planes, l^2) codes indexed by a*l + b for the point a*b1 + b*b2
        a, b = np.divmod(np.arange(l * l, dtype=np.int64), l)
        full = (a[None, :, None] * self.b1[:, None, :] + b[None, :, None] * self.b2[:, None, :]) % l
        self.chart = full @ weights

    def containing(self, x: FVector) -> np.ndarray:
        """Boolean mask over planes: which ones contain ``x``."""
        xv = np.asarray(x, dtype=np.int64)
        a = xv[self.piv1][:, None]
        b = xv[self.piv2][:, None]
        resid = (xv[None, :] - a * self.b1 - b * self.b2) % self.sp.l
        return ~resid.any(axis=1)

    def containing_counts(self, xs: Sequence[FVector]) -> np.ndarray:
        """Number of planes containing each vector of ``xs``.

        ``x`` lies in a plane iff the plane's point with coefficients
        ``(x[pivot1], x[pivot2])`` is ``x`` itself.
        """
        sp = self.sp
        rows = np.arange(len(self.planes))
        out = np.empty(len(xs), dtype=np.int64)
        for i, x in enumerate(xs):
            xv = np.asarray(x, dtype=np.int64)
            col = xv[self.piv1] * sp.l + xv[self.piv2]
            out[i] = int((self.chart[rows, col] == sp.encode(x)).sum())
        return out

    def hits(self, mask: np.ndarray) -> np.ndarray:
        """Per-plane count of nonzero points flagged in ``mask`` (indexed by code)."""
        return mask[self.point_codes].sum(axis=1)


@functools.lru_cache(maxsize=16)
def _catalog(sp: SymplecticSpace) -> PlaneCatalog:
    return PlaneCatalog(sp)


def catalog(sp: SymplecticSpace, budget: Optional[int] = None) -> PlaneCatalog:
    budget = resolve_budget(budget)
    cost = enumeration_cost(sp)
    if cost > budget:
        raise BudgetExceeded(cost, budget)
    return _catalog(sp)


def planes_through(sp: SymplecticSpace, x: FVector, budget: Optional[int] = None) -> int:
    x = sp.vector(x)
    if not any(x):
        raise InvariantViolation("planes_through needs a nonzero vector")
    return int(catalog(sp, budget).containing(x).sum())


@dataclass(frozen=True)
class ObstructionSet:
    """A finite set of nonzero vectors the pair search must avoid."""

    l: int
    g: int
    points: FrozenSet[FVector]
    label: str = ""

    def __post_init__(self):
        sp = self.space
        pts = set()
        for v in self.points:
            v = tuple(v)
            if len(v) != sp.dim:
                raise InvariantViolation(f"point {list(v)} does not have {sp.dim} coordinates")
            if any(not isinstance(c, int) or c < 0 or c >= self.l for c in v):
                raise InvariantViolation(f"point {list(v)} has residues outside [0, {self.l})")
            if not any(v):
                raise InvariantViolation("obstruction set may not contain the zero vector")
            pts.add(v)
        object.__setattr__(self, "points", frozenset(pts))

    @property
    def space(self) -> SymplecticSpace:
        return SymplecticSpace(self.l, self.g)

    def __len__(self):
        return len(self.points)

    def __contains__(self, v):
        return tuple(v) in self.points

    def mask(self) -> np.ndarray:
        sp = self.space
        m = np.zeros(sp.size, dtype=bool)
        for v in self.points:
            m[sp.encode(v)] = True
        return m

    def to_json(self) -> dict:
        out = {"l": self.l, "g": self.g, "points": [list(v) for v in sorted(self.points)]}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj) -> "ObstructionSet":
        try:
            l, g, pts = obj["l"], obj["g"], obj["points"]
        except (KeyError, TypeError) as exc:
            raise InvariantViolation("obstruction set needs 'l', 'g' and 'points'") from exc
        return cls(l, g, frozenset(tuple(v) for v in pts), obj.get("label", ""))

    @classmethod
    def empty(cls, sp: SymplecticSpace) -> "ObstructionSet":
        return cls(sp.l, sp.g, frozenset(), "empty")


def random_obstruction_set(sp: SymplecticSpace, size: int, rng: np.random.Generator, label: str = "") -> ObstructionSet:
    if not 0 <= size < sp.size:
        raise InvariantViolation(f"size must lie in [0, {sp.size - 1}], got {size}")
    codes = rng.choice(np.arange(1, sp.size), size=size, replace=False)
    return ObstructionSet(sp.l, sp.g, frozenset(sp.decode(int(c)) for c in codes), label)


def incidence_count(sp: SymplecticSpace, sigma: ObstructionSet, order: str = "plane", budget: Optional[int] = None) -> int:
    """Size of ``{(x, P) : x in P and x in sigma, P isotropic}``.

    ``order="plane"`` walks the planes and counts flagged points in each;
    ``order="point"`` sums :func:`planes_through` over sigma.
    """
    cat = catalog(sp, budget)
    if order == "plane":
        return int(cat.hits(sigma.mask()).sum())
    if order == "point":
        return int(cat.containing_counts(sorted(sigma.points)).sum())
    raise ValueError(f"unknown order {order!r}")


@dataclass(frozen=True)
class Threshold:
    lhs: int
    rhs: int
    contradiction: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "contradiction": self.contradiction}


def threshold_check(g: int, p: int, l: int) -> Threshold:
    """Compare the cardinality bound ``l^(2g-2) g (p-1)`` on the obstruction
    set with the lower bound ``(l^(2g) - 1)/(l + 1)`` forced when every
    isotropic plane carries at least ``l - 1`` obstructed points."""
    if g < 2 or not is_prime(p) or not is_prime(l):
        raise InvariantViolation(f"need g >= 2 and p, l prime; got g={g}, p={p}, l={l}")
    lhs = l ** (2 * g - 2) * g * (p - 1)
    num = l ** (2 * g) - 1
    assert num % (l + 1) == 0
    rhs = num // (l + 1)
    return Threshold(lhs, rhs, lhs < rhs)


def in_regime(g: int, p: int, l: int, size: int) -> bool:
    return l >= g * (p - 1) + 1 and size <= l ** (2 * g - 2) * g * (p - 1)


@dataclass(frozen=True)
class PairCheck:
    conditions: Dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return dict(self.conditions)


def check_pair(sp: SymplecticSpace, sigma: ObstructionSet, alpha: Sequence[int], beta: Sequence[int]) -> PairCheck:
    """Validate a candidate pair directly from coordinates."""
    l = sp.l
    alpha = sp.vector(alpha)
    beta = sp.vector(beta)
    multiples = [sp.scale(i, alpha) for i in range(l)]
    conditions = {
        "alpha_nonzero": any(alpha),
        "orthogonal": omega(sp, alpha, beta) == 0,
        "beta_outside_span": beta not in multiples,
        "alpha_line_avoids_sigma": all(m not in sigma for m in multiples[1:]),
        "beta_coset_avoids_sigma": all(sp.add(beta, m) not in sigma for m in multiples),
    }
    return PairCheck(conditions)


@dataclass(frozen=True)
class AdmissiblePair:
    alpha: FVector
    beta: FVector
    plane: IsotropicPlane
    method: str
    checks: PairCheck

    def to_json(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "plane": self.plane.to_json(),
            "method": self.method,
            "checks": self.checks.to_json(),
        }

    @classmethod
    def from_json(cls, sp: SymplecticSpace, obj) -> "AdmissiblePair":
        plane = make_plane(sp, sp.vector(obj["plane"][0]), sp.vector(obj["plane"][1]))
        checks = PairCheck({k: bool(v) for k, v in obj["checks"].items()})
        return cls(sp.vector(obj["alpha"]), sp.vector(obj["beta"]), plane, obj["method"], checks)


def _pair_in_plane(sp: SymplecticSpace, plane: IsotropicPlane, sigma: ObstructionSet):
    """Least admissible (alpha, beta) inside ``plane``, or None.

    Lines are indexed by their least nonzero point; cosets of a line by
    their least element, so the choice is lexicographically minimal.
    """
    l = sp.l
    nonzero = sorted(v for v in plane.points(sp) if any(v))
    for alpha in nonzero:
        line = {sp.scale(i, alpha) for i in range(1, l)}
        if line & sigma.points:
            continue
        pts = set(nonzero) - line
        cosets = []
        while pts:
            beta = min(pts)
            coset = {sp.add(beta, sp.scale(i, alpha)) for i in range(l)}
            pts -= coset
            cosets.append((beta, coset))
        for beta, coset in cosets:
            if not coset & sigma.points:
                return alpha, beta
    return None


def find_admissible_pair(sp: SymplecticSpace, sigma: ObstructionSet, budget: Optional[int] = None, exhaustive: bool = True) -> AdmissiblePair:
    """Find (alpha, beta) with alpha nonzero, omega(alpha, beta) = 0,
    beta outside the line of alpha, the line of alpha free of sigma and
    the coset ``beta + <alpha>`` free of sigma.

    Planes meeting sigma in at most ``l - 2`` nonzero points always yield a
    pair: the obstructed points lie on at most ``l - 2`` of the ``l + 1``
    lines through the origin, so a free line exists, and they meet at most
    ``l - 2`` of its ``l - 1`` parallel cosets.  The first such plane in
    canonical order is used.  If there is none, ``exhaustive`` falls back
    to scanning every pair in every isotropic plane.
    """
    if (sigma.l, sigma.g) != (sp.l, sp.g):
        raise InvariantViolation("obstruction set lives in a different space")
    cat = catalog(sp, budget)
    hits = cat.hits(sigma.mask())
    good = np.flatnonzero(hits <= sp.l - 2)
    if good.size:
        plane = cat.planes[int(good[0])]
        found = _pair_in_plane(sp, plane, sigma)
        if found is None:
            raise AssertionError(f"plane {plane.basis} with {hits[good[0]]} hits yielded no pair")
        method = "sparse-plane"
    else:
        found = None
        if exhaustive:
            for plane in cat.planes:
                found = _pair_in_plane(sp, plane, sigma)
                if found:
                    break
        if found is None:
            total = int(hits.sum())
            n = len(cat.planes)
            diag = {
                "sigma_size": len(sigma),
                "planes": n,
                "min_hits": int(hits.min()),
                "incidences": total,
                "incidence_lower": (sp.l - 1) * n,
                "incidence_upper": planes_through_count(sp.g, sp.l) * len(sigma),
                "forced_sigma_size": (sp.l ** (2 * sp.g) - 1) // (sp.l + 1),
                "exhaustive": exhaustive,
            }
            raise NoAdmissiblePair("every isotropic plane meets sigma in >= l-1 points", diag)
        method = "exhaustive"
    alpha, beta = found
    checks = check_pair(sp, sigma, alpha, beta)
    if not checks.ok:
        raise AssertionError(f"constructed pair fails {checks.conditions}")
    return AdmissiblePair(alpha, beta, plane, method, checks)
