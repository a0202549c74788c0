"""Lifted degrees, fixed components of the graph space and their Weyl orbits."""
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import sympy
from loguru import logger

from qmapkit.errors import MalformedDatum, NotClosed, NotEffective, UnboundedEnumeration
from qmapkit.git_model import (
    EffectivityMode,
    Matrix,
    Target,
    degree_action,
    mat_vec,
    pairing,
    semistable_support,
    weyl_group,
)


DegreeVec = Tuple[int, ...]
GroupDegree = Tuple[int, ...]


def _as_degree(beta_t: Sequence[int], length: int, what: str = "degree") -> Tuple[int, ...]:
    beta_t = tuple(int(v) for v in beta_t)
    if len(beta_t) != length:
        raise MalformedDatum(f"Expected a {what} vector of length {length}, got {list(beta_t)}")
    return beta_t


def nonnegative_support(t: Target, beta_t: Sequence[int]) -> frozenset:
    """Indices of the weights on which ``beta_t`` pairs nonnegatively."""
    return frozenset(j for j, w in enumerate(t.weights) if pairing(beta_t, w) >= 0)


def is_effective(t: Target, beta_t: Sequence[int]) -> bool:
    """Whether the lifted degree ``beta_t`` carries a fixed quasimap.

    For ``CUSTOM_BOUNDED`` targets only the torus condition is checked, which over-approximates the effective set.
    """
    beta_t = _as_degree(beta_t, t.r)
    if t.effectivity_mode == EffectivityMode.NONNEGATIVE_GL:
        return all(v >= 0 for v in beta_t)
    return semistable_support(t, nonnegative_support(t, beta_t))


def _apply_tau(t: Target, beta_t: Sequence[int]) -> GroupDegree:
    return mat_vec(t.tau, beta_t)


def _unique_preimage(t: Target, beta: GroupDegree) -> Optional[DegreeVec]:
    solution = sympy.Matrix(t.tau).LUsolve(sympy.Matrix(beta))
    if any(not v.is_integer for v in solution):
        return None
    return tuple(int(v) for v in solution)


def _nonnegative_preimages(t: Target, beta: GroupDegree) -> List[DegreeVec]:
    # a row of tau with no negative entry caps every coordinate it weights positively
    caps = [None] * t.r
    for row, target in zip(t.tau, beta):
        if any(v < 0 for v in row):
            continue
        if target < 0:
            return []
        for i, v in enumerate(row):
            if v > 0:
                c = target // v
                caps[i] = c if caps[i] is None else min(caps[i], c)
    uncapped = [i + 1 for i, c in enumerate(caps) if c is None]
    if uncapped:
        raise UnboundedEnumeration(
            f"{t.name}: no nonnegative row of tau bounds coordinates {uncapped}, "
            f"the nonnegative lifts of {list(beta)} are unbounded"
        )
    return [x for x in product(*(range(c + 1) for c in caps)) if _apply_tau(t, x) == beta]


def enumerate_effective(t: Target, beta: Sequence[int], bound: Optional[int] = None) -> List[DegreeVec]:
    """All effective lifts of ``beta`` through tau, lexicographically descending."""
    beta = _as_degree(beta, t.m, "group degree")
    full_rank = sympy.Matrix(t.tau).rank() == t.r
    if t.effectivity_mode == EffectivityMode.NONNEGATIVE_GL:
        lifts = _nonnegative_preimages(t, beta)
    elif full_rank:
        lift = _unique_preimage(t, beta)
        lifts = [lift] if lift is not None else []
    else:
        bound = bound if bound is not None else t.bound
        if bound is None:
            raise UnboundedEnumeration(
                f"{t.name}: tau has a kernel and no enumeration bound was given, pass a bound to list the lifts"
            )
        logger.warning(f"{t.name}: effectivity uses the torus condition only, the lifts may over-count")
        lifts = [x for x in product(range(-bound, bound + 1), repeat=t.r) if _apply_tau(t, x) == beta]
    effective = sorted((x for x in lifts if is_effective(t, x)), reverse=True)
    logger.debug(f"{t.name}: {len(effective)} effective lifts of {list(beta)}")
    return effective


@dataclass(frozen=True)
class FixedComponent:
    beta_t: DegreeVec
    dim_V: int
    dim_P: int

    @property
    def dim_F(self) -> int:
        return self.dim_V - self.dim_P

    def __str__(self):
        dims = f"dim_V={self.dim_V}, dim_P={self.dim_P}, dim_F={self.dim_F}"
        return f"FixedComponent(beta_t={list(self.beta_t)}, {dims})"


def dim_fixed_component(t: Target, beta_t: Sequence[int]) -> FixedComponent:
    beta_t = _as_degree(beta_t, t.r)
    if not is_effective(t, beta_t):
        raise NotEffective(f"{list(beta_t)} is not an effective lifted degree of {t.name}")
    dim_v = sum(1 for w in t.weights if pairing(beta_t, w) >= 0)
    dim_p = t.r + sum(1 for a in t.roots if pairing(beta_t, a) >= 0)
    return FixedComponent(beta_t=beta_t, dim_V=dim_v, dim_P=dim_p)


def graph_space_dim_pn(n: int, d: int) -> int:
    """Dimension of the quasimap graph space of P^n in degree d, which is a projective space."""
    if n < 1 or d < 0:
        raise MalformedDatum(f"Graph space of P^n in degree d needs n >= 1 and d >= 0, got n={n}, d={d}")
    return d * n + d + n


@dataclass(frozen=True)
class WeylOrbit:
    representative: DegreeVec
    size: int
    stabilizer: int
    members: Tuple[DegreeVec, ...] = ()

    def __str__(self):
        return f"WeylOrbit(representative={list(self.representative)}, size={self.size}, stabilizer={self.stabilizer})"


def orbit_of(t: Target, beta_t: Sequence[int]) -> Tuple[DegreeVec, ...]:
    return tuple(sorted({mat_vec(g, beta_t) for g in degree_action(t)}, reverse=True))


def coset_representatives(t: Target, beta_t: Sequence[int]) -> List[Matrix]:
    """One Weyl element per point of the orbit of ``beta_t``, as matrices acting on characters."""
    beta_t = tuple(beta_t)
    chosen = {}
    for g, d in zip(weyl_group(t), degree_action(t)):
        image = mat_vec(d, beta_t)
        if image not in chosen:
            chosen[image] = g
    return [chosen[image] for image in sorted(chosen, reverse=True)]


def weyl_orbit_partition(t: Target, degs: Sequence[Sequence[int]]) -> List[WeylOrbit]:
    """Split a Weyl-stable set of lifted degrees into orbits with lexicographically maximal representatives."""
    pool = {_as_degree(d, t.r) for d in degs}
    group = degree_action(t)
    orbits = []
    seen = set()
    for beta_t in sorted(pool, reverse=True):
        if beta_t in seen:
            continue
        members = orbit_of(t, beta_t)
        missing = [m for m in members if m not in pool]
        if missing:
            raise NotClosed(f"{list(missing[0])} is in the Weyl orbit of {list(beta_t)} but not in the given set")
        seen.update(members)
        stabilizer = sum(1 for g in group if mat_vec(g, beta_t) == beta_t)
        orbits.append(WeylOrbit(representative=members[0], size=len(members), stabilizer=stabilizer, members=members))
    return orbits
