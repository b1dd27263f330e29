"""Automorphisms of the p^n-adic rooted tree.

Elements are immutable expression DAGs over a small set of node kinds
(identity, atoms, inverses, products).  Nodes are hash-consed per tree
shape, so structurally equal expressions are the same Python object and
all caches can be keyed by node identity.

Conventions
-----------
* Letters are 1-based integers ``1..m``; a vertex is a tuple of letters.
* Products are read left to right: ``f * g`` applies ``f`` first, then
  ``g``.  :func:`conjugate` returns ``g^-1 f g`` and commutators are
  left-normed with ``[x, y] = x^-1 y^-1 x y``.
* Leaves of level ``l`` are indexed ``0..m^l-1`` in lexicographic order,
  and a level permutation is an integer array ``perm`` with
  ``perm[i]`` the image of leaf ``i``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    'TreeShape', 'TreeError', 'MalformedVertex', 'ShapeMismatch',
    'DepthLimitExceeded', 'Element', 'Portrait', 'GGSGroup',
    'DEFAULT_DEPTH_CAP', 'rooted', 'recursive_atom', 'compose', 'invert',
    'power', 'conjugate', 'commutator', 'product', 'apply', 'section',
    'root_permutation', 'portrait', 'level_permutation', 'equal_at_depth',
    'is_trivial_at_depth',
]

DEFAULT_DEPTH_CAP = 6


class TreeError(ValueError):
    pass


class MalformedVertex(TreeError):
    pass


class ShapeMismatch(TreeError):
    pass


class DepthLimitExceeded(RuntimeError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class TreeShape:
    """The p^n-adic tree: alphabet ``1..m`` with ``m = p**n``."""

    p: int
    n: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise TreeError(f'p={self.p} is not prime')
        if self.n < 1:
            raise TreeError(f'n={self.n} must be at least 1')

    @property
    def m(self) -> int:
        return self.p ** self.n

    def check_vertex(self, v: Sequence[int]) -> tuple[int, ...]:
        v = tuple(v)
        for x in v:
            if not isinstance(x, (int, np.integer)) or not 1 <= x <= self.m:
                raise MalformedVertex(f'letter {x!r} outside 1..{self.m} in vertex {v}')
        return tuple(int(x) for x in v)

    def vertices(self, level: int) -> Iterable[tuple[int, ...]]:
        """Vertices of ``level`` in lexicographic order."""
        if level == 0:
            yield ()
            return
        for u in self.vertices(level - 1):
            for x in range(1, self.m + 1):
                yield u + (x,)

    def leaf_index(self, v: Sequence[int]) -> int:
        idx = 0
        for x in v:
            idx = idx * self.m + (x - 1)
        return idx

    def leaf_word(self, idx: int, level: int) -> tuple[int, ...]:
        out = []
        for _ in range(level):
            idx, r = divmod(idx, self.m)
            out.append(r + 1)
        return tuple(reversed(out))


class _Interner:
    """Hash-consing table plus memo caches for one tree shape.

    The caches only ever gain deterministic entries, so concurrent writers
    can race harmlessly (last writer wins with an identical value).
    """

    def __init__(self, shape: TreeShape):
        self.shape = shape
        self.nodes: dict[tuple, Element] = {}
        self.roots: dict[int, tuple[int, ...]] = {}
        self.sections: dict[tuple[int, int], Element] = {}
        self.levels: dict[tuple[int, int], np.ndarray] = {}
        self._next = 0
        self.identity = self.intern(('id',), lambda uid: Element(self, uid, 'id', ()))

    def intern(self, key, make):
        node = self.nodes.get(key)
        if node is None:
            node = make(self._next)
            self._next += 1
            self.nodes[key] = node
        return node


_INTERNERS: dict[TreeShape, _Interner] = {}


def _interner(shape: TreeShape) -> _Interner:
    it = _INTERNERS.get(shape)
    if it is None:
        it = _INTERNERS.setdefault(shape, _Interner(shape))
    return it


class Element:
    """A tree automorphism given by an expression node.

    Do not instantiate directly; use :func:`rooted`, :class:`GGSGroup` and
    the combinators in this module.
    """

    __slots__ = ('_tab', 'uid', 'kind', 'args', 'name', 'order', '_atom_root', '_atom_sections')

    def __init__(self, tab: _Interner, uid: int, kind: str, args: tuple,
                 name: str | None = None):
        self._tab = tab
        self.uid = uid
        self.kind = kind
        self.args = args
        self.name = name
        self.order: int | None = 1 if kind == 'id' else None
        self._atom_root: tuple[int, ...] | None = None
        self._atom_sections: Callable[[int], Element] | None = None

    @property
    def shape(self) -> TreeShape:
        return self._tab.shape

    def __mul__(self, other: Element) -> Element:
        return compose(self, other)

    def __pow__(self, k: int) -> Element:
        return power(self, k)

    def inverse(self) -> Element:
        return invert(self)

    def conj(self, g: Element) -> Element:
        return conjugate(self, g)

    def is_identity_node(self) -> bool:
        return self.kind == 'id'

    def __repr__(self) -> str:
        return f'Element({self})'

    def __str__(self) -> str:
        if self.kind == 'id':
            return '1'
        if self.kind == 'atom':
            return self.name or f'atom{self.uid}'
        if self.kind == 'inv':
            return f'({self.args[0]})^-1'
        left, right = self.args
        s = f'{left}*{right}'
        return s if len(s) < 120 else f'<word #{self.uid}>'


def _same_shape(*xs: Element) -> _Interner:
    tab = xs[0]._tab
    for x in xs[1:]:
        if x._tab is not tab:
            raise ShapeMismatch(f'elements live on different trees: {tab.shape} vs {x.shape}')
    return tab


def recursive_atom(shape: TreeShape, key, root: Sequence[int],
                   sections: Callable[[int], Element], name: str | None = None,
                   order: int | None = None) -> Element:
    """Atom defined by a root permutation (0-based images) and a section rule.

    ``sections(x)`` returns the section at the 1-based letter ``x`` and may
    refer back to the atom itself, which is how recursively defined
    automorphisms such as a GGS generator ``b`` are expressed.
    """
    tab = _interner(shape)
    root = tuple(int(i) for i in root)
    if sorted(root) != list(range(shape.m)):
        raise TreeError(f'root {root} is not a permutation of {shape.m} letters')

    def make(uid):
        node = Element(tab, uid, 'atom', (), name=name)
        node._atom_root = root
        node._atom_sections = sections
        node.order = order
        return node

    return tab.intern(('atom', key), make)


def rooted(shape: TreeShape, perm: Sequence[int], name: str | None = None) -> Element:
    """Rooted automorphism for ``perm`` given in 1-based one-line notation."""
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(1, shape.m + 1)):
        raise TreeError(f'{perm} is not a permutation of 1..{shape.m}')
    if perm == tuple(range(1, shape.m + 1)):
        return identity(shape)
    ident = identity(shape)
    return recursive_atom(shape, ('rooted', perm), [x - 1 for x in perm],
                          lambda x: ident, name=name or f'rooted{perm}')


def identity(shape: TreeShape) -> Element:
    return _interner(shape).identity


def compose(f: Element, g: Element) -> Element:
    """The product ``f g`` (apply ``f`` first)."""
    tab = _same_shape(f, g)
    if f.kind == 'id':
        return g
    if g.kind == 'id':
        return f
    if (g.kind == 'inv' and g.args[0] is f) or (f.kind == 'inv' and f.args[0] is g):
        return tab.identity
    return tab.intern(('mul', f.uid, g.uid), lambda uid: Element(tab, uid, 'mul', (f, g)))


def invert(f: Element) -> Element:
    tab = f._tab
    if f.kind == 'id':
        return f
    if f.kind == 'inv':
        return f.args[0]
    node = tab.intern(('inv', f.uid), lambda uid: Element(tab, uid, 'inv', (f,)))
    node.order = f.order
    return node


def product(*xs: Element) -> Element:
    """Balanced product ``x1 x2 ... xr``; the empty product needs a shape."""
    if not xs:
        raise TreeError('empty product has no shape; use identity(shape)')
    _same_shape(*xs)
    xs = list(xs)
    while len(xs) > 1:
        nxt = [compose(xs[i], xs[i + 1]) for i in range(0, len(xs) - 1, 2)]
        if len(xs) % 2:
            nxt.append(xs[-1])
        xs = nxt
    return xs[0]


def power(f: Element, k: int) -> Element:
    """``f**k`` as a balanced product tree; exponents reduced mod a known order."""
    k = int(k)
    if f.order is not None:
        k %= f.order
    if k < 0:
        return power(invert(f), -k)
    if k == 0:
        return identity(f.shape)
    if k == 1:
        return f
    half = power(f, k // 2)
    sq = compose(half, half)
    return compose(sq, f) if k % 2 else sq


def conjugate(f: Element, g: Element) -> Element:
    """``f^g = g^-1 f g``."""
    _same_shape(f, g)
    return compose(compose(invert(g), f), g)


def commutator(*xs: Element) -> Element:
    """Left-normed commutator: ``[x, y] = x^-1 y^-1 x y``, ``[x, y, z] = [[x, y], z]``."""
    if len(xs) < 2:
        raise TreeError('a commutator needs at least two entries')
    c = xs[0]
    for y in xs[1:]:
        _same_shape(c, y)
        c = product(invert(c), invert(y), c, y)
    return c


def root_permutation(f: Element) -> tuple[int, ...]:
    """The permutation of level 1, as 0-based images."""
    tab = f._tab
    cached = tab.roots.get(f.uid)
    if cached is not None:
        return cached
    m = tab.shape.m
    if f.kind == 'id':
        r = tuple(range(m))
    elif f.kind == 'atom':
        r = f._atom_root
    elif f.kind == 'inv':
        s = root_permutation(f.args[0])
        inv = [0] * m
        for i, j in enumerate(s):
            inv[j] = i
        r = tuple(inv)
    else:
        s, t = root_permutation(f.args[0]), root_permutation(f.args[1])
        r = tuple(t[s[i]] for i in range(m))
    tab.roots[f.uid] = r
    return r


def _section_letter(f: Element, x: int) -> Element:
    """Section at the 1-based letter ``x`` (no validation)."""
    tab = f._tab
    key = (f.uid, x)
    cached = tab.sections.get(key)
    if cached is not None:
        return cached
    if f.kind == 'id':
        s = f
    elif f.kind == 'atom':
        s = f._atom_sections(x)
        if s._tab is not tab:
            raise ShapeMismatch('atom section lives on another tree')
    elif f.kind == 'inv':
        g = f.args[0]
        y = root_permutation(f)[x - 1] + 1
        s = invert(_section_letter(g, y))
    else:
        g, h = f.args
        s = compose(_section_letter(g, x), _section_letter(h, root_permutation(g)[x - 1] + 1))
    tab.sections[key] = s
    return s


def section(f: Element, v: Sequence[int]) -> Element:
    """The section ``f_v``, defined by ``f(vz) = f(v) f_v(z)``."""
    v = f.shape.check_vertex(v)
    for x in v:
        f = _section_letter(f, x)
    return f


def apply(f: Element, v: Sequence[int]) -> tuple[int, ...]:
    """Image of the vertex ``v`` under ``f``."""
    v = f.shape.check_vertex(v)
    out = []
    for x in v:
        out.append(root_permutation(f)[x - 1] + 1)
        f = _section_letter(f, x)
    return tuple(out)


def _check_depth(depth: int, cap: int | None):
    cap = DEFAULT_DEPTH_CAP if cap is None else cap
    if depth < 0:
        raise TreeError('depth must be non-negative')
    if depth > cap:
        raise DepthLimitExceeded(f'depth {depth} exceeds the cap {cap}; pass cap= to override')


def level_permutation(f: Element, depth: int, cap: int | None = None) -> np.ndarray:
    """Permutation induced by ``f`` on the leaves of level ``depth``.

    Products and inverses are evaluated homomorphically; atoms recurse
    through their sections.  The returned array is shared with the cache
    and must not be mutated.
    """
    _check_depth(depth, cap)
    return _level(f, depth)


def _level(f: Element, depth: int) -> np.ndarray:
    tab = f._tab
    key = (f.uid, depth)
    cached = tab.levels.get(key)
    if cached is not None:
        return cached
    m = tab.shape.m
    size = m ** depth
    if depth == 0 or f.kind == 'id':
        out = np.arange(size, dtype=np.int64)
    elif f.kind == 'mul':
        left, right = _level(f.args[0], depth), _level(f.args[1], depth)
        out = right[left]
    elif f.kind == 'inv':
        fwd = _level(f.args[0], depth)
        out = np.empty(size, dtype=np.int64)
        out[fwd] = np.arange(size, dtype=np.int64)
    else:
        block = m ** (depth - 1)
        root = root_permutation(f)
        out = np.empty(size, dtype=np.int64)
        for x in range(m):
            sub = _level(_section_letter(f, x + 1), depth - 1)
            out[x * block:(x + 1) * block] = root[x] * block + sub
    out.setflags(write=False)
    tab.levels[key] = out
    return out


def equal_at_depth(f: Element, g: Element, depth: int, cap: int | None = None) -> bool:
    """Whether ``f`` and ``g`` agree on every vertex of level ``<= depth``."""
    _same_shape(f, g)
    if f is g:
        _check_depth(depth, cap)
        return True
    return bool(np.array_equal(level_permutation(f, depth, cap), level_permutation(g, depth, cap)))


def is_trivial_at_depth(f: Element, depth: int, cap: int | None = None) -> bool:
    lp = level_permutation(f, depth, cap)
    return bool(np.array_equal(lp, np.arange(lp.size)))


@dataclass(frozen=True)
class Portrait:
    """Depth-bounded portrait: the level-1 permutation of every section above ``depth``.

    ``table`` maps each vertex of level ``< depth`` to a 1-based one-line
    permutation of the alphabet.
    """

    shape: TreeShape
    depth: int
    table: dict = field(compare=True)

    def to_json(self) -> str:
        data = {
            'p': self.shape.p, 'n': self.shape.n, 'depth': self.depth,
            'table': {'.'.join(map(str, u)): list(perm) for u, perm in self.table.items()},
        }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Portrait:
        data = json.loads(text)
        shape = TreeShape(data['p'], data['n'])
        table = {}
        for key, perm in data['table'].items():
            u = tuple(int(x) for x in key.split('.')) if key else ()
            table[shape.check_vertex(u)] = tuple(int(x) for x in perm)
        return cls(shape, int(data['depth']), table)

    def act(self, v: Sequence[int]) -> tuple[int, ...]:
        """Image of a vertex of level ``<= depth`` computed from the table alone."""
        v = self.shape.check_vertex(v)
        if len(v) > self.depth:
            raise TreeError(f'vertex {v} is below the portrait depth {self.depth}')
        out = []
        for i, x in enumerate(v):
            out.append(self.table[v[:i]][x - 1])
        return tuple(out)

    def is_trivial(self) -> bool:
        ident = tuple(range(1, self.shape.m + 1))
        return all(perm == ident for perm in self.table.values())


def portrait(f: Element, depth: int, cap: int | None = None) -> Portrait:
    """Top-down portrait of ``f`` down to (not including) level ``depth``."""
    _check_depth(depth, cap)
    shape = f.shape
    table = {}
    frontier = [((), f)]
    for _ in range(depth):
        nxt = []
        for u, g in frontier:
            table[u] = tuple(i + 1 for i in root_permutation(g))
            for x in range(1, shape.m + 1):
                nxt.append((u + (x,), _section_letter(g, x)))
        frontier = nxt
    return Portrait(shape, depth, table)


class GGSGroup:
    """The GGS-group ``<a, b>`` on the p^n-adic tree for a defining vector.

    ``a`` is the rooted m-cycle ``x1 -> x2 -> ... -> xm -> x1``; ``b`` fixes
    level 1 with sections ``(a^e1, ..., a^e_{m-1}, b)``.
    """

    def __init__(self, shape: TreeShape, entries: Sequence[int]):
        m = shape.m
        entries = tuple(int(e) % m for e in entries)
        if len(entries) != m - 1:
            raise TreeError(f'defining vector needs {m - 1} entries, got {len(entries)}')
        if not any(entries):
            raise TreeError('defining vector must be non-zero modulo p^n')
        self.shape = shape
        self.entries = entries
        ident = identity(shape)
        self.identity = ident
        self.a = recursive_atom(shape, ('a',), [(i + 1) % m for i in range(m)],
                                lambda x: ident, name='a', order=m)
        d = m
        for e in entries:
            d = _gcd(d, e)
        a = self.a

        def b_sections(x):
            if x == m:
                return self.b
            return power(a, entries[x - 1])

        self.b = recursive_atom(shape, ('b', entries), range(m), b_sections,
                                name='b', order=m // d)

    def b_(self, i: int) -> Element:
        """``b_i = b^(a^i)``; indices are taken mod m."""
        return conjugate(self.b, power(self.a, i % self.shape.m))

    def __repr__(self):
        return f'GGSGroup(p={self.shape.p}, n={self.shape.n}, e={self.entries})'


def _gcd(x: int, y: int) -> int:
    while y:
        x, y = y, x % y
    return x
