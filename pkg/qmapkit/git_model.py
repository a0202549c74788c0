"""GIT data ``(V, G, T, theta)`` and King stability of coordinate supports.

A point of ``V`` with support ``S`` is theta-semistable for the torus iff theta lies in the cone spanned by the weights
indexed by ``S``, and stable iff theta is interior to a full-dimensional such cone. Cones are described by exact
Fourier-Motzkin elimination.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import sympy
from loguru import logger
from sympy.matrices.normalforms import smith_normal_form

from qmapkit import utils
from qmapkit.errors import MalformedDatum, TooLarge


Vector = Tuple[int, ...]
Matrix = Tuple[Tuple[int, ...], ...]
Support = FrozenSet[int]

WEYL_CLOSURE_CAP = 10**5


class EffectivityMode(str, Enum):
    TORIC = "toric"
    NONNEGATIVE_GL = "nonnegative_gl"
    CUSTOM_BOUNDED = "custom_bounded"


def pairing(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def mat_vec(m: Matrix, v: Sequence[int]) -> Vector:
    return tuple(pairing(row, v) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(pairing(row, col) for col in cols) for row in a)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def identity(r: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r))


def matrix_group_closure(gens: Sequence[Matrix], r: int, cap: int = WEYL_CLOSURE_CAP) -> Tuple[Matrix, ...]:
    """All products of the generators, identity first, in breadth-first order."""
    one = identity(r)
    seen = {one: None}
    frontier = [one]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(s, g)
                if h not in seen:
                    seen[h] = None
                    nxt.append(h)
                    if len(seen) > cap:
                        raise MalformedDatum(f"Weyl generators generate more than {cap} elements")
        frontier = nxt
    return tuple(seen)


@dataclass(frozen=True)
class Target:
    """A GIT datum seen through the maximal torus: weights of V, theta, roots, Weyl generators and tau."""

    name: str
    r: int
    weights: Tuple[Vector, ...]
    theta: Vector
    roots: Tuple[Vector, ...] = ()
    weyl_gens: Tuple[Matrix, ...] = ()
    tau: Matrix = ()
    effectivity_mode: EffectivityMode = EffectivityMode.TORIC
    chern_names: Tuple[str, ...] = ()
    certified_free: Optional[bool] = None
    preset: str = "custom"
    preset_params: Tuple[int, ...] = ()
    bound: Optional[int] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"Target(name={self.name}, r={self.r}, n={self.n}, mode={self.effectivity_mode.value})"

    def __post_init__(self):
        set_ = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        set_("weights", tuple(tuple(int(v) for v in w) for w in self.weights))
        set_("theta", tuple(int(v) for v in self.theta))
        set_("roots", tuple(tuple(int(v) for v in a) for a in self.roots))
        set_("weyl_gens", tuple(tuple(tuple(int(v) for v in row) for row in g) for g in self.weyl_gens))
        set_("tau", tuple(tuple(int(v) for v in row) for row in self.tau) or identity(self.r))
        set_("effectivity_mode", EffectivityMode(self.effectivity_mode))
        if not self.chern_names:
            names = ("H",) if self.r == 1 else tuple(f"x{i + 1}" for i in range(self.r))
            set_("chern_names", names)
        self._validate()

    def _validate(self):
        r = self.r
        if r < 1:
            raise MalformedDatum(f"Torus rank must be positive, got {r}")
        if not self.weights:
            raise MalformedDatum("A target needs at least one weight")
        for w in self.weights + (self.theta,) + self.roots:
            if len(w) != r:
                raise MalformedDatum(f"Vector {list(w)} does not have length r={r}")
        if len(self.chern_names) != r:
            raise MalformedDatum(f"Expected {r} Chern root names, got {len(self.chern_names)}")
        roots = set(self.roots)
        if len(roots) != len(self.roots):
            raise MalformedDatum("Roots must be distinct")
        for a in self.roots:
            if not any(a):
                raise MalformedDatum("Zero is not a root")
            if tuple(-v for v in a) not in roots:
                raise MalformedDatum(f"Roots are not closed under negation: {list(a)}")
        m = len(self.tau)
        if any(len(row) != r for row in self.tau):
            raise MalformedDatum(f"tau must be an m x {r} matrix")
        if sympy.Matrix(self.tau).rank() != m:
            raise MalformedDatum(f"tau must have full rank {m}")
        if self.effectivity_mode == EffectivityMode.TORIC:
            if self.roots:
                raise MalformedDatum("Toric targets have no roots")
            if m != r or sympy.Matrix(self.tau).det() == 0:
                raise MalformedDatum("Toric targets need an invertible tau")
        for g in self.weyl_gens:
            if len(g) != r or any(len(row) != r for row in g):
                raise MalformedDatum(f"Weyl generator {g} is not {r} x {r}")
            if sorted(mat_vec(g, w) for w in self.weights) != sorted(self.weights):
                raise MalformedDatum(f"Weyl generator {g} does not permute the weights")
            if {mat_vec(g, a) for a in self.roots} != roots:
                raise MalformedDatum(f"Weyl generator {g} does not permute the roots")
        matrix_group_closure(self.weyl_gens, r)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.tau)

    @property
    def nvars(self) -> int:
        return self.r + 1

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return self.chern_names + ("z",)


def make_preset(kind: str, **params) -> Target:
    """Build a target from a preset: ``projective`` (n), ``grassmannian`` (k, n), ``toric`` or ``custom``."""
    if kind == "projective":
        n = int(params["n"])
        if n < 1:
            raise MalformedDatum(f"P^n needs n >= 1, got {n}")
        return Target(
            name=params.get("name") or f"P{n}",
            r=1,
            weights=((1,),) * (n + 1),
            theta=(1,),
            tau=((1,),),
            effectivity_mode=EffectivityMode.TORIC,
            certified_free=True,
            preset="projective",
            preset_params=(n,),
        )
    if kind == "grassmannian":
        k, n = int(params["k"]), int(params["n"])
        if not 1 <= k <= n:
            raise MalformedDatum(f"Gr(k, n) needs 1 <= k <= n, got k={k}, n={n}")
        basis = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
        roots = sorted(
            (tuple(a - b for a, b in zip(basis[i], basis[j])) for i in range(k) for j in range(k) if i != j),
            reverse=True,
        )
        gens = []
        for i in range(k - 1):
            perm = list(range(k))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(tuple(tuple(1 if perm[a] == b else 0 for b in range(k)) for a in range(k)))
        return Target(
            name=params.get("name") or f"Gr({k},{n})",
            r=k,
            weights=tuple(b for b in basis for _ in range(n)),
            theta=(1,) * k,
            roots=tuple(roots),
            weyl_gens=tuple(gens),
            tau=((1,) * k,),
            effectivity_mode=EffectivityMode.NONNEGATIVE_GL,
            certified_free=True,
            preset="grassmannian",
            preset_params=(k, n),
        )
    if kind == "toric":
        matrix = [list(row) for row in params["weight_matrix"]]
        if not matrix or len({len(row) for row in matrix}) != 1:
            raise MalformedDatum("The toric weight matrix must be a nonempty rectangular r x n matrix")
        r = len(matrix)
        return Target(
            name=params.get("name") or "toric",
            r=r,
            weights=tuple(zip(*matrix)),
            theta=tuple(params["theta"]),
            tau=identity(r),
            effectivity_mode=EffectivityMode.TORIC,
            preset="toric",
        )
    if kind == "custom":
        return Target(
            name=params.get("name") or "custom",
            r=int(params["r"]),
            weights=tuple(map(tuple, params["weights"])),
            theta=tuple(params["theta"]),
            roots=tuple(map(tuple, params.get("roots", ()))),
            weyl_gens=tuple(params.get("weyl_gens", ())),
            tau=tuple(map(tuple, params.get("tau", ()))),
            effectivity_mode=EffectivityMode(params.get("effectivity_mode", EffectivityMode.CUSTOM_BOUNDED)),
            chern_names=tuple(params.get("chern_names", ())),
            certified_free=params.get("certified_free"),
            preset="custom",
            bound=params.get("bound"),
        )
    raise MalformedDatum(f"Unknown preset {kind!r}")


def _primitive(row: Sequence[Fraction]) -> Optional[Vector]:
    if not any(row):
        return None
    lcm = 1
    for v in row:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in row]
    content = reduce(gcd, (abs(v) for v in ints))
    return tuple(v // content for v in ints)


@lru_cache(maxsize=4096)
def cone_constraints(generators: Tuple[Vector, ...], r: int) -> Tuple[Tuple[Vector, ...], Tuple[Vector, ...]]:
    """H-description ``(equalities, inequalities)`` of the cone spanned by ``generators``.

    ``x`` is in the cone iff ``a . x == 0`` for each equality and ``a . x >= 0`` for each inequality.
    """
    s = len(generators)
    eqs: List[List[Fraction]] = []
    for i in range(r):
        row = [Fraction(0)] * (r + s)
        row[i] = Fraction(1)
        for j, g in enumerate(generators):
            row[r + j] = Fraction(-g[i])
        eqs.append(row)
    ges: List[List[Fraction]] = []
    for j in range(s):
        row = [Fraction(0)] * (r + s)
        row[r + j] = Fraction(1)
        ges.append(row)

    for col in range(r, r + s):
        pivot = next((row for row in eqs if row[col]), None)
        if pivot is not None:
            eqs.remove(pivot)

            def eliminate(row):
                factor = row[col] / pivot[col]
                return [a - factor * b for a, b in zip(row, pivot)]

            eqs = [eliminate(row) if row[col] else row for row in eqs]
            ges = [eliminate(row) if row[col] else row for row in ges]
            continue
        pos = [row for row in ges if row[col] > 0]
        neg = [row for row in ges if row[col] < 0]
        ges = [row for row in ges if row[col] == 0]
        for p in pos:
            for q in neg:
                ges.append([-q[col] * a + p[col] * b for a, b in zip(p, q)])
        unique = {}
        for row in ges:
            prim = _primitive(row)
            if prim is not None:
                unique[prim] = None
        ges = [[Fraction(v) for v in row] for row in unique]

    equalities = {p[:r] for p in (_primitive(row) for row in eqs) if p is not None}
    inequalities = {p[:r] for p in (_primitive(row) for row in ges) if p is not None and any(p[:r])}
    logger.debug(f"cone of {s} generators: {len(equalities)} equalities, {len(inequalities)} inequalities")
    return tuple(sorted(equalities)), tuple(sorted(inequalities))


def _support_generators(t: Target, support) -> Tuple[Vector, ...]:
    return tuple(sorted({t.weights[j] for j in support}))


def _cone_contains(generators: Tuple[Vector, ...], r: int, theta: Vector) -> bool:
    eqs, ges = cone_constraints(generators, r)
    return all(pairing(a, theta) == 0 for a in eqs) and all(pairing(a, theta) >= 0 for a in ges)


def _cone_interior(generators: Tuple[Vector, ...], r: int, theta: Vector) -> bool:
    if not generators or sympy.Matrix(generators).rank() != r:
        return False
    eqs, ges = cone_constraints(generators, r)
    return not eqs and all(pairing(a, theta) > 0 for a in ges)


def semistable_support(t: Target, support) -> bool:
    """True iff theta lies in the cone of the weights indexed by ``support``."""
    return _cone_contains(_support_generators(t, support), t.r, t.theta)


def stable_support(t: Target, support) -> bool:
    """True iff that cone is full-dimensional with theta in its interior."""
    return _cone_interior(_support_generators(t, support), t.r, t.theta)


def _distinct_weight_classes(t: Target) -> List[Tuple[Vector, Tuple[int, ...]]]:
    classes: Dict[Vector, List[int]] = {}
    for j, w in enumerate(t.weights):
        classes.setdefault(w, []).append(j)
    return [(w, tuple(idx)) for w, idx in classes.items()]


def _weight_subsets(t: Target):
    cap = utils.enumeration_cap()
    if t.n > cap:
        raise TooLarge(f"{t.name} has {t.n} weights, above the enumeration cap {cap} (set QMAP_ENUM_CAP)")
    classes = _distinct_weight_classes(t)
    for size in range(len(classes) + 1):
        for chosen in combinations(classes, size):
            generators = tuple(sorted(w for w, _ in chosen))
            support = frozenset(j for _, idx in chosen for j in idx)
            yield generators, support


def maximal_unstable_supports(t: Target) -> List[Support]:
    """Inclusion-maximal supports that are not semistable."""
    unstable = [s for gens, s in _weight_subsets(t) if not _cone_contains(gens, t.r, t.theta)]
    maximal = [s for s in unstable if not any(s < other for other in unstable)]
    return sorted(maximal, key=lambda s: (tuple(sorted(s)), len(s)))


def lattice_saturated(generators: Sequence[Vector], r: int) -> bool:
    """True iff the integer span of ``generators`` is all of Z^r (Smith form has r unit invariants)."""
    if len(generators) < r:
        return False
    snf = smith_normal_form(sympy.Matrix(r, len(generators), lambda i, j: generators[j][i]), domain=sympy.ZZ)
    diagonal = [abs(snf[i, i]) for i in range(r)]
    return all(d == 1 for d in diagonal)


@dataclass(frozen=True)
class AssumptionReport:
    ss_equals_s: bool
    semistable_nonempty: bool
    action_free_on_stable: bool
    witnesses: Tuple[Support, ...] = ()
    nonabelian_free_certified: Optional[bool] = None

    @property
    def all_hold(self) -> bool:
        return (
            self.ss_equals_s
            and self.semistable_nonempty
            and self.action_free_on_stable
            and self.nonabelian_free_certified is not False
        )


def verify_assumptions(t: Target) -> AssumptionReport:
    ss_equals_s = True
    free = True
    witnesses: List[Support] = []
    full_semistable = False
    for gens, support in _weight_subsets(t):
        semistable = _cone_contains(gens, t.r, t.theta)
        stable = _cone_interior(gens, t.r, t.theta)
        if len(support) == t.n:
            full_semistable = semistable
        if semistable and not stable:
            ss_equals_s = False
            witnesses.append(support)
        if stable and not lattice_saturated(gens, t.r):
            free = False
            witnesses.append(support)
    if t.certified_free is None and t.roots:
        logger.warning(f"{t.name}: freeness of the nonabelian action is not certified, only the torus part is checked")
    report = AssumptionReport(
        ss_equals_s=ss_equals_s,
        semistable_nonempty=full_semistable,
        action_free_on_stable=free,
        witnesses=tuple(sorted(set(witnesses), key=lambda s: tuple(sorted(s)))),
        nonabelian_free_certified=t.certified_free,
    )
    logger.debug(f"{t.name}: {report}")
    return report


def root_pairs(t: Target) -> List[Vector]:
    """One fixed representative (the lexicographically larger one) of each pair of opposite roots."""
    return sorted({max(a, tuple(-v for v in a)) for a in t.roots}, reverse=True)


def levi_roots(t: Target, beta_t: Sequence[int]) -> Tuple[List[Vector], List[Vector]]:
    """Roots pairing to zero with ``beta_t``, and the positively paired member of every other pair."""
    levi = [a for a in t.roots if pairing(beta_t, a) == 0]
    positive = sorted((a for a in t.roots if pairing(beta_t, a) > 0), reverse=True)
    return levi, positive


@lru_cache(maxsize=256)
def weyl_group(t: Target) -> Tuple[Matrix, ...]:
    return matrix_group_closure(t.weyl_gens, t.r)


def inverse_in_group(t: Target, g: Matrix) -> Matrix:
    one = identity(t.r)
    for h in weyl_group(t):
        if mat_mul(h, g) == one:
            return h
    raise MalformedDatum(f"{g} is not an element of the Weyl group of {t.name}")


@lru_cache(maxsize=256)
def degree_action(t: Target) -> Tuple[Matrix, ...]:
    """The Weyl group acting on degree vectors: ``g`` acts by the inverse transpose so that pairings are kept."""
    return tuple(transpose(inverse_in_group(t, g)) for g in weyl_group(t))
