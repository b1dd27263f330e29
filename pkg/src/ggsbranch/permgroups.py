"""Finite permutation groups on tree leaves.

Two exact engines live here.

``TreeChain``
    A chain of level stabilizers for subgroups of the iterated wreath
    product ``C_m wr ... wr C_m`` acting on the ``m**depth`` leaves.  Each
    factor of the chain is a Z/mZ-module of portrait exponents, kept in an
    echelon form closed under annihilating powers and commutators, so
    sifting decides membership and the order is a product of relative
    orders.  This is what the congruence quotients use.

``PermGroup``
    A deterministic Schreier-Sims stabilizer chain for arbitrary
    permutation groups, with an optional prescribed base prefix.  It is
    generic (and slower) and serves as an independent cross-check.

Permutations are integer numpy arrays ``perm`` with ``perm[i]`` the image
of point ``i``.  Products are left to right: ``mul(x, y)`` applies ``x``
first, which as arrays is ``y[x]``.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

__all__ = ['mul', 'inv', 'comm', 'perm_power', 'identity_perm', 'is_identity',
           'TreeChain', 'PermGroup', 'closure_by_bfs']


def identity_perm(degree: int) -> np.ndarray:
    return np.arange(degree, dtype=np.int64)


def is_identity(x: np.ndarray) -> bool:
    return bool(np.array_equal(x, np.arange(x.size)))


def mul(*xs: np.ndarray) -> np.ndarray:
    out = xs[0]
    for y in xs[1:]:
        out = y[out]
    return out


def inv(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    out[x] = np.arange(x.size, dtype=x.dtype)
    return out


def comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return mul(inv(x), inv(y), x, y)


def perm_power(x: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        x, k = inv(x), -k
    out = np.arange(x.size, dtype=x.dtype)
    base = x
    while k:
        if k & 1:
            out = base[out]
        base = base[base]
        k >>= 1
    return out


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class _Row:
    __slots__ = ('stage', 'col', 'v', 'pivot', 'rel', 'perm', 'vec', '_neg')

    def __init__(self, stage, col, v, p, n, perm, vec):
        self.stage = stage
        self.col = col
        self.v = v
        self.pivot = p ** v
        self.rel = p ** (n - v)
        self.perm = perm
        self.vec = vec
        self._neg = {}

    def neg_power(self, t: int) -> np.ndarray:
        x = self._neg.get(t)
        if x is None:
            x = perm_power(self.perm, -t)
            self._neg[t] = x
        return x


class TreeChain:
    """Level-stabilizer chain for a subgroup of the iterated wreath product of C_m.

    ``schedule`` is a sequence of stages ``(level, columns)``: the portrait
    exponents of the given level restricted to the given vertex indices.
    The default uses all vertices of each level, top-down, which gives the
    chain ``H >= H ∩ st(1) >= ... >= 1``.  Any schedule must describe a
    series of subgroups, each normal in its predecessor, whose stage
    exponents are additive; the rigid-stabilizer schedule in
    :mod:`ggsbranch.quotient` is the other one used here.

    Every generator must lie in the iterated wreath product of the cyclic
    group generated by the m-cycle; this is not re-checked.
    """

    def __init__(self, p: int, n: int, depth: int, gens: Iterable[np.ndarray] = (),
                 schedule: Sequence[tuple[int, np.ndarray]] | None = None):
        self.p, self.n, self.m = p, n, p ** n
        self.depth = depth
        self.degree = self.m ** depth
        if schedule is None:
            schedule = [(j, np.arange(self.m ** j)) for j in range(depth)]
        self.schedule = [(j, np.asarray(cols, dtype=np.int64)) for j, cols in schedule]
        self._probe = []
        for j, cols in self.schedule:
            first = cols * self.m ** (depth - j)
            self._probe.append((first, self.m ** (depth - j - 1)))
        self.stages: list[dict[int, _Row]] = [dict() for _ in self.schedule]
        self.generators: list[np.ndarray] = []
        for g in gens:
            self.add(g)

    @classmethod
    def _from_rows(cls, parent: TreeChain, rows: list[_Row], gens: list[np.ndarray]) -> TreeChain:
        new = cls.__new__(cls)
        new.p, new.n, new.m = parent.p, parent.n, parent.m
        new.depth, new.degree = parent.depth, parent.degree
        new.schedule, new._probe = parent.schedule, parent._probe
        new.stages = [dict() for _ in parent.schedule]
        for r in rows:
            new.stages[r.stage][r.col] = r
        new.generators = list(gens)
        return new

    def _exps(self, x: np.ndarray, stage: int) -> np.ndarray:
        first, div = self._probe[stage]
        return (x[first] // div) % self.m

    def rows(self) -> list[_Row]:
        out = []
        for st in self.stages:
            out.extend(st[c] for c in sorted(st))
        return out

    def strong_generators(self) -> list[np.ndarray]:
        return [r.perm for r in self.rows()]

    def order(self) -> int:
        out = 1
        for r in self.rows():
            out *= r.rel
        return out

    def sift(self, x: np.ndarray):
        """Reduce ``x``; return ``None`` if it reduces to the identity.

        Otherwise return ``(residue, stage, exponent_vector)`` at the first
        stage where the residue cannot be reduced further.
        """
        m = self.m
        for s in range(len(self.schedule)):
            vec = self._exps(x, s)
            if not vec.any():
                continue
            table = self.stages[s]
            while True:
                nz = np.flatnonzero(vec)
                if nz.size == 0:
                    break
                c = int(nz[0])
                row = table.get(c)
                val = int(vec[c])
                if row is None or val % row.pivot:
                    return x, s, vec
                t = (val // row.pivot) % row.rel
                x = row.neg_power(t)[x]
                vec = (vec - t * row.vec) % m
        if not is_identity(x):
            raise ValueError('element is outside the iterated wreath product of C_m')
        return None

    def contains(self, x: np.ndarray) -> bool:
        return self.sift(x) is None

    def _insert(self, x, s, vec, queue):
        p, n, m = self.p, self.n, self.m
        c = int(np.flatnonzero(vec)[0])
        val = int(vec[c])
        v = _valuation(val, p)
        u = val // p ** v
        w = pow(u, -1, m)
        if w != 1:
            x = perm_power(x, w)
            vec = (vec * w) % m
        row = _Row(s, c, v, p, n, x, vec)
        old = self.stages[s].get(c)
        self.stages[s][c] = row
        if old is not None:
            queue.append(old.perm)
        queue.append(perm_power(x, row.rel))
        for other in self.rows():
            if other is not row:
                queue.append(comm(x, other.perm))

    def _drain(self, queue) -> bool:
        changed = False
        while queue:
            res = self.sift(queue.pop())
            if res is not None:
                self._insert(*res, queue)
                changed = True
        return changed

    def add(self, g: np.ndarray) -> bool:
        """Adjoin ``g``; return whether the group grew."""
        g = np.asarray(g, dtype=np.int64)
        if g.size != self.degree:
            raise ValueError(f'degree {g.size} does not match {self.degree}')
        self.generators.append(g)
        grew = self._drain([g])
        while grew and self._verify_pass():
            pass
        return grew

    def _verify_pass(self) -> bool:
        """Check every annihilating power and pairwise commutator; return whether anything was added."""
        rows = self.rows()
        changed = False
        for i, r in enumerate(rows):
            changed |= self._drain([perm_power(r.perm, r.rel)])
            for r2 in rows[i + 1:]:
                changed |= self._drain([comm(r.perm, r2.perm)])
        return changed

    def tail(self, first_stage: int) -> TreeChain:
        """Chain of the subgroup generated by rows at stages ``>= first_stage``."""
        rows = [r for r in self.rows() if r.stage >= first_stage]
        return TreeChain._from_rows(self, rows, [r.perm for r in rows])


def closure_by_bfs(gens: Sequence[np.ndarray], limit: int = 200_000) -> set[bytes]:
    """All elements of ``<gens>`` by breadth-first closure (as byte strings)."""
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    if not gens:
        raise ValueError('need at least one generator')
    ident = identity_perm(gens[0].size)
    seen = {ident.tobytes()}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g[x]
            key = y.tobytes()
            if key not in seen:
                if len(seen) >= limit:
                    raise RuntimeError(f'closure exceeded {limit} elements')
                seen.add(key)
                queue.append(y)
    return seen


class PermGroup:
    """Deterministic Schreier-Sims stabilizer chain.

    Base points are taken from ``base`` first and then, when needed, the
    smallest point moved by the new strong generator.
    """

    def __init__(self, gens: Sequence[np.ndarray], degree: int | None = None,
                 base: Sequence[int] = ()):
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError('degree is required for the trivial group')
            degree = gens[0].size
        self.degree = degree
        self.gens = [g for g in gens if not is_identity(g)]
        self.base: list[int] = [int(b) for b in base]
        self.strong: list[np.ndarray] = list(self.gens)
        self._trans: list[dict[int, np.ndarray]] = []
        self._build()

    def _fixes_prefix(self, g, i):
        return all(g[b] == b for b in self.base[:i])

    def _level_gens(self, i):
        return [g for g in self.strong if self._fixes_prefix(g, i)]

    def _extend_orbit(self, i):
        trans = self._trans[i]
        gens = self._level_gens(i)
        queue = deque(trans)
        while queue:
            beta = queue.popleft()
            u = trans[beta]
            for g in gens:
                gamma = int(g[beta])
                if gamma not in trans:
                    trans[gamma] = g[u]
                    queue.append(gamma)

    def _new_level(self, point):
        self.base.append(point)
        self._trans.append({point: identity_perm(self.degree)})

    def _strip(self, g, start):
        for i in range(start, len(self.base)):
            beta = int(g[self.base[i]])
            u = self._trans[i].get(beta)
            if u is None:
                return g, i
            g = inv(u)[g]
        return g, len(self.base)

    def _build(self):
        self._trans = [{b: identity_perm(self.degree)} for b in self.base]
        for g in self.strong:
            if self._fixes_prefix(g, len(self.base)):
                self._new_level(int(np.flatnonzero(g != np.arange(self.degree))[0]))
        for i in range(len(self.base)):
            self._extend_orbit(i)
        checked: list[set] = [set() for _ in self.base]
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            gens = self._level_gens(i)
            for beta in list(self._trans[i]):
                u = self._trans[i][beta]
                for g in gens:
                    key = (beta, id(g))
                    if key in checked[i]:
                        continue
                    checked[i].add(key)
                    gamma = int(g[beta])
                    sg = inv(self._trans[i][gamma])[g[u]]
                    h, j = self._strip(sg, i + 1)
                    if is_identity(h):
                        continue
                    if j == len(self.base):
                        self._new_level(int(np.flatnonzero(h != np.arange(self.degree))[0]))
                        checked.append(set())
                    self.strong.append(h)
                    for lvl in range(i + 1, j + 1):
                        self._extend_orbit(lvl)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    def order(self) -> int:
        out = 1
        for t in self._trans:
            out *= len(t)
        return out

    def contains(self, x: np.ndarray) -> bool:
        h, _ = self._strip(np.asarray(x, dtype=np.int64), 0)
        return is_identity(h)

    def basic_orbit_lengths(self) -> list[int]:
        return [len(t) for t in self._trans]

    def pointwise_stabilizer(self, points: Sequence[int]) -> PermGroup:
        """Subgroup fixing every point of ``points``."""
        points = [int(x) for x in points]
        chain = PermGroup(self.strong or self.gens, self.degree, base=points)
        gens = [g for g in chain.strong if all(g[b] == b for b in points)]
        return PermGroup(gens, self.degree)
