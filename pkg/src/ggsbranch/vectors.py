"""Defining vectors over Z/p^nZ and the branch-structure classification."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property

from .tree import Element, GGSGroup, TreeShape, conjugate, equal_at_depth, power, recursive_atom

__all__ = [
    'DefiningVector', 'VectorError', 'NotApplicable', 'Route', 'ClassificationReport',
    'ReductionData', 'r0', 'invertible_set', 't_value', 'k_value', 'is_periodic',
    'periodicity_sums', 'is_symmetric', 'y_maximal', 'in_F', 'in_E', 'in_Eprime',
    'is_constant', 'partially_constant', 'delta', 'delta_values', 'reduce_vector',
    'check_reduction', 'classify',
]


class VectorError(ValueError):
    pass


class NotApplicable(ValueError):
    """Raised when an operation's hypothesis on the defining vector fails."""


def _valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError('valuation of 0')
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class DefiningVector:
    """A non-zero tuple ``(e_1, ..., e_{m-1})`` of residues mod ``m = p^n``.

    Entries are stored as least non-negative residues.
    """

    p: int
    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        shape = TreeShape(self.p, self.n)
        m = shape.m
        if len(self.entries) != m - 1:
            raise VectorError(f'expected {m - 1} entries for p={self.p}, n={self.n}, got {len(self.entries)}')
        entries = tuple(int(e) % m for e in self.entries)
        if not any(entries):
            raise VectorError('the defining vector must be non-zero modulo p^n')
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def parse(cls, text: str) -> DefiningVector:
        """Parse ``"p=3 n=2 e=0,0,1,0,0,2,0,0"``."""
        match = re.fullmatch(r'\s*p\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s+e\s*=\s*([\d,\s]+?)\s*', text)
        if not match:
            raise VectorError(f'cannot parse defining vector {text!r}')
        p, n = int(match.group(1)), int(match.group(2))
        entries = tuple(int(x) for x in match.group(3).split(',') if x.strip())
        return cls(p, n, entries)

    def to_text(self) -> str:
        return f'p={self.p} n={self.n} e={",".join(map(str, self.entries))}'

    @property
    def shape(self) -> TreeShape:
        return TreeShape(self.p, self.n)

    @property
    def m(self) -> int:
        return self.p ** self.n

    def __getitem__(self, i: int) -> int:
        """1-based access ``e_i``; indices are read mod m and ``e_0`` is undefined."""
        i %= self.m
        if i == 0:
            raise IndexError('e_0 (= e_m) is not an entry of the defining vector')
        return self.entries[i - 1]

    def scaled(self, lam: int) -> DefiningVector:
        return DefiningVector(self.p, self.n, tuple(lam * e for e in self.entries))

    @cached_property
    def group(self) -> GGSGroup:
        return GGSGroup(self.shape, self.entries)

    def __str__(self):
        return self.to_text()


def r0(e: DefiningVector) -> int:
    """Largest R with p^R dividing every entry."""
    return min(_valuation(x, e.p) for x in e.entries if x)


def in_F(e: DefiningVector) -> bool:
    return any(x % e.p for x in e.entries)


def invertible_set(e: DefiningVector) -> frozenset[int]:
    return frozenset(i for i in range(1, e.m) if e[i] % e.p)


def t_value(e: DefiningVector) -> int:
    ys = invertible_set(e)
    if not ys:
        raise NotApplicable(f'{e} is not in F: no invertible entry')
    return min(_valuation(i, e.p) for i in ys)


def k_value(e: DefiningVector) -> int:
    return e.p ** t_value(e)


def periodicity_sums(e: DefiningVector) -> list[int]:
    """``S_i = e_{p^i} + e_{2p^i} + ... + e_{p^n - p^i}`` as integers, i = 0..n-1."""
    return [sum(e[j] for j in range(e.p ** i, e.m, e.p ** i)) for i in range(e.n)]


def is_periodic(e: DefiningVector) -> bool:
    return all(s % e.p ** (i + 1) == 0 for i, s in enumerate(periodicity_sums(e)))


def is_symmetric(e: DefiningVector) -> bool:
    """The invertible-symmetric (IS) property of Y."""
    ys = invertible_set(e)
    return all((e.m - i) in ys for i in ys)


def y_maximal(e: DefiningVector) -> bool:
    k = k_value(e)
    return invertible_set(e) == frozenset(range(k, e.m, k))


def in_E(e: DefiningVector) -> bool:
    if not in_F(e) or not y_maximal(e):
        return False
    k = k_value(e)
    return len({e[j] % e.p for j in range(k, e.m, k)}) == 1


def in_Eprime(e: DefiningVector) -> bool:
    return e.p == 2 and in_F(e) and t_value(e) == e.n - 1


def is_constant(e: DefiningVector) -> bool:
    return len(set(e.entries)) == 1


def partially_constant(e: DefiningVector) -> bool:
    """For e in E: constant (exactly) on Y, exactly zero off Y, and not constant."""
    if not in_E(e) or is_constant(e):
        return False
    ys = invertible_set(e)
    return (len({e[i] for i in ys}) == 1
            and all(e[i] == 0 for i in range(1, e.m) if i not in ys))


def _admissible_delta_indices(e: DefiningVector) -> list[int]:
    k = k_value(e)
    return sorted(i for i in invertible_set(e) if i not in (k, e.m - k))


def delta(e: DefiningVector, m: int) -> int:
    """``e_{m-k} e_{m+k} - e_m^2`` mod p, for Y maximal and m in Y minus {k, p^n-k}."""
    if not in_F(e) or not y_maximal(e):
        raise NotApplicable(f'delta needs Y maximal; not the case for {e}')
    if m not in _admissible_delta_indices(e):
        raise NotApplicable(f'm={m} is not in Y \\ {{k, p^n-k}} for {e}')
    k = k_value(e)
    return (e[m - k] * e[m + k] - e[m] ** 2) % e.p


def delta_values(e: DefiningVector) -> dict[int, int]:
    if not in_F(e) or not y_maximal(e):
        return {}
    return {m: delta(e, m) for m in _admissible_delta_indices(e)}


@dataclass(frozen=True)
class ReductionData:
    """Conjugation data normalising an entry of the defining vector to 1.

    ``delta_perm[i-1]`` is the image of letter ``i`` (letters 1..p^n, with
    ``delta(i) = r i mod p^n`` and p^n read as 0).  ``alpha[i-1]`` is the
    inverse permutation on 1..p^n-1.  ``conjugator`` is the automorphism
    ``f = d h`` with ``d`` rooted for ``delta_perm`` and every first-level
    section of ``h`` equal to ``f``.
    """

    vector: DefiningVector
    k: int
    s: int
    unit: int
    r: int
    delta_perm: tuple[int, ...]
    alpha: tuple[int, ...]
    reduced: DefiningVector
    conjugator: Element = field(repr=False, compare=False)

    @property
    def scale(self) -> int:
        """The exponent λ with ``(b^f)^λ`` equal to the reduced generator b'."""
        return pow(self.r * self.vector[self.k], -1, self.vector.m)


def reduce_vector(e: DefiningVector) -> ReductionData:
    if not in_F(e):
        raise NotApplicable(f'{e} is not in F')
    p, m = e.p, e.m
    t = t_value(e)
    # smallest invertible index of minimal valuation, so that s == t
    k = min(i for i in invertible_set(e) if _valuation(i, p) == t)
    s = t
    unit = k // p ** s
    r = pow(unit, -1, p ** (e.n - s))
    delta_perm = tuple(((r * i - 1) % m) + 1 for i in range(1, m + 1))
    inv = {img: i for i, img in enumerate(delta_perm, start=1)}
    alpha = tuple(inv[i] for i in range(1, m))
    ek_inv = pow(e[k], -1, m)
    reduced = DefiningVector(p, e.n, tuple(ek_inv * e[alpha[i - 1]] for i in range(1, m)))

    shape = e.shape
    key = ('reduction-conjugator', delta_perm)
    holder: list[Element] = []
    f = recursive_atom(shape, key, [x - 1 for x in delta_perm], lambda x: holder[0],
                       name=f'f[r={r}]')
    holder.append(f)
    return ReductionData(e, k, s, unit, r, delta_perm, alpha, reduced, f)


def check_reduction(data: ReductionData, depth: int = 3) -> dict[str, bool]:
    """Finite-depth checks of the reduction: index conditions and conjugation identities."""
    e, m = data.vector, data.vector.m
    G = e.group
    f = data.conjugator
    alpha = data.alpha
    checks = {
        'alpha_maps_p^s_to_k': alpha[e.p ** data.s - 1] == data.k,
        'alpha_symmetric': all(alpha[m - i - 1] == m - alpha[i - 1] for i in range(1, m)),
        'reduced_entry_is_one': data.reduced[e.p ** data.s] == 1,
        'reduced_in_F': in_F(data.reduced),
        'a^f == a^r': equal_at_depth(conjugate(G.a, f), power(G.a, data.r), depth),
        '(b^f)^scale == b_reduced': equal_at_depth(
            power(conjugate(G.b, f), data.scale), data.reduced.group.b, depth),
    }
    return checks


class Route(str, enum.Enum):
    NOT_TRANSITIVE = 'NOT_TRANSITIVE'
    REGULAR_BRANCH_G1 = 'REGULAR_BRANCH_G1'
    REGULAR_BRANCH_GAMMA3 = 'REGULAR_BRANCH_GAMMA3'
    WEAKLY_BRANCH_G2_ONLY = 'WEAKLY_BRANCH_G2_ONLY'
    CONSTANT_NOT_BRANCH = 'CONSTANT_NOT_BRANCH'
    OPEN_EPRIME = 'OPEN_EPRIME'


ROUTE_NOTES = {
    Route.NOT_TRANSITIVE: 'not spherically transitive, hence neither fractal nor (weakly) branch',
    Route.REGULAR_BRANCH_G1: "regular branch over G' (and over gamma_3(G))",
    Route.REGULAR_BRANCH_GAMMA3: 'regular branch over gamma_3(G)',
    Route.WEAKLY_BRANCH_G2_ONLY: "weakly regular branch over G''; branch status: unknown",
    Route.CONSTANT_NOT_BRANCH: 'constant defining vector: not a branch group',
    Route.OPEN_EPRIME: 'E\'(2^n) vector: weak branchness is open in the literature',
}


@dataclass(frozen=True)
class ClassificationReport:
    vector: DefiningVector
    R0: int
    Y: tuple[int, ...]
    t: int | None
    k: int | None
    in_F: bool
    Y_maximal: bool
    is_IS: bool
    in_E: bool
    in_Eprime: bool
    is_constant: bool
    is_periodic: bool
    partially_constant: bool
    delta_values: dict
    route: Route
    theorems: tuple[str, ...]

    @property
    def note(self) -> str:
        note = ROUTE_NOTES[self.route]
        if self.in_Eprime and self.route != Route.OPEN_EPRIME:
            note += "; the vector lies in E'(2^n), whose general case is open in the literature"
        return note

    def to_dict(self) -> dict:
        return {
            'p': self.vector.p, 'n': self.vector.n, 'e': list(self.vector.entries),
            'R0': self.R0, 'Y': list(self.Y), 't': self.t, 'k': self.k,
            'in_F': self.in_F, 'Y_maximal': self.Y_maximal, 'is_IS': self.is_IS,
            'in_E': self.in_E, 'in_Eprime': self.in_Eprime, 'is_constant': self.is_constant,
            'is_periodic': self.is_periodic, 'partially_constant': self.partially_constant,
            'delta_values': {str(m): v for m, v in sorted(self.delta_values.items())},
            'route': self.route.value, 'note': self.note, 'theorems': list(self.theorems),
        }


def classify(e: DefiningVector) -> ClassificationReport:
    f = in_F(e)
    ys = tuple(sorted(invertible_set(e)))
    t = t_value(e) if f else None
    k = e.p ** t if f else None
    ymax = f and y_maximal(e)
    sym = f and is_symmetric(e)
    E = in_E(e)
    Ep = in_Eprime(e)
    const = is_constant(e)
    periodic = is_periodic(e)
    pc = partially_constant(e)
    deltas = delta_values(e) if ymax else {}
    some_delta = any(v % e.p for v in deltas.values())

    theorems = []
    if f:
        theorems.append('transitive_and_fractal')
        if not sym:
            theorems.append('not_IS_regular_branch_G1')
        if sym and not ymax:
            theorems.append('IS_Y_not_maximal_regular_branch_gamma3')
        if ymax and some_delta:
            theorems.append('delta_invertible_regular_branch_gamma3')
        if ymax and not some_delta and not E:
            theorems.append('delta_zero_not_E_regular_branch_gamma3')
        if pc:
            theorems.append('partially_constant_regular_branch_gamma3')
        if not E:
            theorems.append('not_E_regular_branch_gamma3')
        if not Ep:
            theorems.append('not_Eprime_weakly_regular_branch_G2')
        if periodic:
            theorems.append('periodic_regular_branch_gamma3')
    else:
        theorems.append('not_F_not_transitive')
    if const:
        theorems.append('constant_not_branch')

    if not f:
        route = Route.NOT_TRANSITIVE
    elif const:
        route = Route.CONSTANT_NOT_BRANCH
    elif not sym:
        route = Route.REGULAR_BRANCH_G1
    elif not ymax:
        route = Route.REGULAR_BRANCH_GAMMA3
    elif some_delta:
        route = Route.REGULAR_BRANCH_GAMMA3
    elif not E:
        route = Route.REGULAR_BRANCH_GAMMA3
    elif pc:
        route = Route.REGULAR_BRANCH_GAMMA3
    elif Ep:
        route = Route.OPEN_EPRIME
    else:
        route = Route.WEAKLY_BRANCH_G2_ONLY

    return ClassificationReport(
        vector=e, R0=r0(e), Y=ys, t=t, k=k, in_F=f, Y_maximal=ymax, is_IS=sym,
        in_E=E, in_Eprime=Ep, is_constant=const, is_periodic=periodic,
        partially_constant=pc, delta_values=deltas, route=route, theorems=tuple(theorems),
    )
