"""Concrete groups with canonical element encodings.

Elements are plain hashable Python values in canonical form, so two elements
are equal exactly when their encodings are equal:

* ``Z^k`` and ``Zmod:...``: tuples of ints (coordinates reduced mod m_i)
* ``Dinf``: ``(t, f)`` meaning the affine map ``x -> (-1)**f * x + t``
* ``D:m``: the same pair with ``t`` reduced mod m
* ``Sym:m``: permutation image tuples, composed right to left
* ``table:<path>`` and quotients: row indices of the multiplication table
"""

from __future__ import annotations

import itertools
import math
import re
import struct
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

from .errors import GroupError, GroupOverflowError, GroupSpecError

Element = Hashable

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
TABLE_ORDER_CAP = 2048


def checked(x: int) -> int:
    if not INT64_MIN <= x <= INT64_MAX:
        raise GroupOverflowError(f"coordinate {x} does not fit in a signed 64-bit integer")
    return x


# --------------------------------------------------------------------------
# integer linear algebra
# --------------------------------------------------------------------------

def smith_diagonalize(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """Diagonalize an integer matrix by unimodular row and column operations.

    Returns ``(diag, Q)`` where ``P @ M @ Q`` is diagonal with non-negative
    entries ``diag`` (length ``min(len(rows), ncols)``, zeros for missing
    rank) for some unimodular ``P`` that is not tracked.  Entries satisfy the
    divisibility chain of the Smith normal form.
    """
    A = [list(map(int, r)) for r in rows]
    m, n = len(A), ncols
    Q = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(a, b):
        for r in A:
            r[a], r[b] = r[b], r[a]
        for r in Q:
            r[a], r[b] = r[b], r[a]

    def add_col(dst, src, c):
        for r in A:
            r[dst] += c * r[src]
        for r in Q:
            r[dst] += c * r[src]

    diag: list[int] = []
    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, pi, pj = min(nz)
            A[t], A[pi] = A[pi], A[t]
            swap_cols(t, pj)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    c = A[i][t] // p
                    A[i] = [a - c * b for a, b in zip(A[i], A[t])]
                    clean &= A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        if t < m and A[t][t] < 0:
            for r in A:
                r[t] = -r[t]
            for r in Q:
                r[t] = -r[t]
        diag.append(A[t][t] if t < m else 0)
    return diag, Q


def _row_times(x: Sequence[int], M: Sequence[Sequence[int]]) -> list[int]:
    return [sum(a * M[i][j] for i, a in enumerate(x)) for j in range(len(M[0]))]


def _lattice_is_everything(rows: Sequence[Sequence[int]], k: int) -> bool:
    if not rows:
        return k == 0
    diag, _ = smith_diagonalize(rows, k)
    return len(diag) >= k and all(d == 1 for d in diag[:k])


# --------------------------------------------------------------------------
# subgroups
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup given by generators and a decidable membership test."""

    group: "Group"
    generators: tuple
    contains: Callable[[Element], bool] = field(repr=False)
    elements: frozenset | None = field(default=None, repr=False)
    description: str = ""

    def __contains__(self, g) -> bool:
        return self.contains(g)

    @property
    def order(self) -> float:
        return len(self.elements) if self.elements is not None else math.inf

    def is_trivial(self) -> bool:
        return all(self.group.is_identity(g) for g in self.generators)


# --------------------------------------------------------------------------
# group base classes
# --------------------------------------------------------------------------

class Group:
    kind: str = "abstract"
    spec: str = "?"

    # -- basic operations (overridden) -------------------------------------
    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def encode(self, a) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def validate(self, a):
        """Return ``a`` if it is a canonical element, else raise GroupError."""
        raise NotImplementedError

    def is_generating(self, elems: Sequence) -> bool:
        raise NotImplementedError

    def center(self) -> Subgroup:
        raise NotImplementedError

    @property
    def order(self) -> float:
        raise NotImplementedError

    @property
    def rank(self) -> int | None:
        """d(G), the minimum number of generators, or None if unknown."""
        return None

    # -- derived -----------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.order != math.inf

    def is_identity(self, a) -> bool:
        return a == self.identity

    def conj(self, g, x):
        """Return ``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def power(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        result, base = self.identity, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def product(self, elems: Iterable):
        out = self.identity
        for e in elems:
            out = self.mul(out, e)
        return out

    def random_element(self, rng, bound: int = 10):
        """Random element; infinite kinds draw coordinates from [-bound, bound]."""
        raise NotImplementedError

    def trivial_subgroup(self) -> Subgroup:
        e = self.identity
        return Subgroup(self, (e,), lambda g: g == e, frozenset([e]), "trivial")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return self.spec

    # struct codecs are not picklable; rebuild them on load (process pools)
    def __getstate__(self):
        state = dict(self.__dict__)
        fmt = state.pop("_fmt", None)
        if fmt is not None:
            state["_fmt_text"] = fmt.format
        return state

    def __setstate__(self, state):
        fmt = state.pop("_fmt_text", None)
        self.__dict__.update(state)
        if fmt is not None:
            self._fmt = struct.Struct(fmt)


class FiniteGroup(Group):
    """Finite group with an explicit element list; ``elements[0]`` is the identity."""

    def _enumerate(self) -> list:
        raise NotImplementedError

    @cached_property
    def elements(self) -> list:
        elems = self._enumerate()
        if elems[0] != self.identity:
            raise GroupError("element enumeration must start with the identity")
        return elems

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def random_element(self, rng, bound: int = 10):
        return self.elements[int(rng.integers(0, self.order))]

    def closure(self, gens: Iterable) -> frozenset:
        gens = list(gens)
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = self.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def is_generating(self, elems: Sequence) -> bool:
        for e in elems:
            self.validate(e)
        return len(self.closure(elems)) == self.order

    def subgroup(self, gens: Iterable, description: str = "") -> Subgroup:
        gens = tuple(gens)
        elems = self.closure(gens)
        return Subgroup(self, gens or (self.identity,), elems.__contains__, elems, description)

    def center(self) -> Subgroup:
        z = [g for g in self.elements if all(self.mul(g, h) == self.mul(h, g) for h in self.elements)]
        return self.subgroup(z, "center")

    def is_normal(self, sub: Subgroup) -> bool:
        return all(self.conj(g, x) in sub for g in self.elements for x in sub.generators)

    @cached_property
    def rank(self) -> int | None:
        if self.order == 1:
            return 0
        elems = self.elements
        budget = 200_000
        for size in (1, 2, 3):
            n_combos = math.comb(len(elems) + size - 1, size)
            if n_combos > budget:
                return None
            for combo in itertools.combinations_with_replacement(elems, size):
                if len(self.closure(combo)) == self.order:
                    return size
        return None

    def cayley_table(self) -> list[list[int]]:
        idx = self.index
        return [[idx[self.mul(a, b)] for b in self.elements] for a in self.elements]


# --------------------------------------------------------------------------
# concrete groups
# --------------------------------------------------------------------------

class FreeAbelianGroup(Group):
    """The free abelian group Z^k with checked 64-bit coordinates."""

    kind = "free-abelian"

    def __init__(self, k: int):
        if k < 1:
            raise GroupSpecError("rank must be >= 1")
        self.k = k
        self.spec = f"Z^{k}"
        self._fmt = struct.Struct(f">{k}q")

    @property
    def identity(self):
        return (0,) * self.k

    @property
    def order(self):
        return math.inf

    @property
    def rank(self):
        return self.k

    def random_element(self, rng, bound: int = 10):
        return tuple(int(x) for x in rng.integers(-bound, bound + 1, size=self.k))

    def mul(self, a, b):
        return tuple(checked(x + y) for x, y in zip(a, b))

    def inv(self, a):
        return tuple(checked(-x) for x in a)

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == self.k and all(type(x) is int for x in a)):
            raise GroupError(f"{a!r} is not an element of {self.spec}")
        for x in a:
            checked(x)
        return a

    def encode(self, a):
        return self._fmt.pack(*a)

    def decode(self, data):
        return tuple(self._fmt.unpack(data))

    def format(self, a):
        return ",".join(map(str, a))

    def parse(self, text):
        try:
            vals = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise GroupError(f"cannot parse {text!r} as an element of {self.spec}") from None
        return self.validate(vals)

    def is_generating(self, elems):
        for e in elems:
            self.validate(e)
        return _lattice_is_everything(list(elems), self.k)

    def center(self):
        return Subgroup(self, tuple(_unit_vectors(self.k)), lambda g: True, None, "whole group")

    def lattice_subgroup(self, rows: Sequence[Sequence[int]]) -> Subgroup:
        """Sublattice spanned by ``rows``; membership via Smith form."""
        rows = [tuple(r) for r in rows]
        if not rows:
            return self.trivial_subgroup()
        diag, Q = smith_diagonalize(rows, self.k)
        diag = diag + [0] * (self.k - len(diag))

        def contains(x):
            y = _row_times(x, Q)
            return all((yi == 0) if d == 0 else (yi % d == 0) for yi, d in zip(y, diag))

        return Subgroup(self, tuple(rows), contains, None, f"lattice{rows}")

    def scalar_subgroup(self, m: int) -> Subgroup:
        """The sublattice m Z^k."""
        return self.lattice_subgroup([tuple(m * int(i == j) for j in range(self.k)) for i in range(self.k)])


def _unit_vectors(k):
    return [tuple(int(i == j) for j in range(k)) for i in range(k)]


class FiniteAbelianGroup(FiniteGroup):
    """Z/m_1 x ... x Z/m_k, written additively as coordinate tuples."""

    kind = "finite-abelian"

    def __init__(self, moduli: Sequence[int]):
        moduli = tuple(int(m) for m in moduli)
        if any(m < 1 for m in moduli):
            raise GroupSpecError("moduli must be >= 1")
        self.moduli = moduli
        self.spec = "Zmod:" + "x".join(map(str, moduli)) if moduli else "Zmod:1"
        self._fmt = struct.Struct(f">{len(moduli)}q")

    @property
    def identity(self):
        return (0,) * len(self.moduli)

    @property
    def order(self):
        return math.prod(self.moduli)

    def _enumerate(self):
        return list(itertools.product(*(range(m) for m in self.moduli)))

    @cached_property
    def rank(self):
        # max over primes p of the number of moduli divisible by p
        primes = {p for m in self.moduli for p in _prime_factors(m)}
        return max((sum(1 for m in self.moduli if m % p == 0) for p in primes), default=0)

    def random_element(self, rng, bound: int = 10):
        return tuple(int(rng.integers(0, m)) for m in self.moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple(-x % m for x, m in zip(a, self.moduli))

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == len(self.moduli)
                and all(type(x) is int and 0 <= x < m for x, m in zip(a, self.moduli))):
            raise GroupError(f"{a!r} is not a canonical element of {self.spec}")
        return a

    def encode(self, a):
        return self._fmt.pack(*a)

    def decode(self, data):
        return self.validate(tuple(self._fmt.unpack(data)))

    def format(self, a):
        return ",".join(map(str, a))

    def parse(self, text):
        try:
            vals = tuple(int(x) % m for x, m in zip(text.split(","), self.moduli))
        except ValueError:
            raise GroupError(f"cannot parse {text!r} as an element of {self.spec}") from None
        if len(text.split(",")) != len(self.moduli):
            raise GroupError(f"{text!r} has the wrong number of coordinates for {self.spec}")
        return vals

    def is_generating(self, elems):
        for e in elems:
            self.validate(e)
        k = len(self.moduli)
        rows = list(elems) + [tuple(m * int(i == j) for j in range(k)) for i, m in enumerate(self.moduli)]
        return _lattice_is_everything(rows, k)

    def center(self):
        return Subgroup(self, tuple(self.elements), lambda g: True, frozenset(self.elements), "whole group")


def _prime_factors(m: int) -> set[int]:
    out, p = set(), 2
    while p * p <= m:
        while m % p == 0:
            out.add(p)
            m //= p
        p += 1
    if m > 1:
        out.add(m)
    return out


class InfiniteDihedralGroup(Group):
    """D_inf as Z x| Z/2: ``(t, f)`` acts on Z by ``x -> (-1)**f * x + t``."""

    kind = "dihedral-infinite"
    spec = "Dinf"
    _fmt = struct.Struct(">qB")

    @property
    def identity(self):
        return (0, 0)

    @property
    def order(self):
        return math.inf

    @property
    def rank(self):
        return 2

    def random_element(self, rng, bound: int = 10):
        return (int(rng.integers(-bound, bound + 1)), int(rng.integers(0, 2)))

    def mul(self, a, b):
        t1, f1 = a
        t2, f2 = b
        return (checked(t1 - t2 if f1 else t1 + t2), f1 ^ f2)

    def inv(self, a):
        t, f = a
        return (t, 1) if f else (checked(-t), 0)

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == 2 and type(a[0]) is int and a[1] in (0, 1)):
            raise GroupError(f"{a!r} is not an element of Dinf")
        checked(a[0])
        return a

    def encode(self, a):
        return self._fmt.pack(*a)

    def decode(self, data):
        return self.validate(tuple(self._fmt.unpack(data)))

    def format(self, a):
        return f"{a[0]},{a[1]}"

    def parse(self, text):
        try:
            t, f = (int(x) for x in text.split(","))
        except ValueError:
            raise GroupError(f"cannot parse {text!r} as an element of Dinf") from None
        return self.validate((t, f))

    def is_generating(self, elems):
        for e in elems:
            self.validate(e)
        reflections = [t for t, f in elems if f]
        if not reflections:
            return False
        g = 0
        for t, f in elems:
            g = math.gcd(g, t - reflections[0] if f else t)
        return g == 1

    def center(self):
        return self.trivial_subgroup()

    def translation_subgroup(self, m: int = 1) -> Subgroup:
        """Translations by multiples of m (normal; index 2m)."""
        if m < 1:
            raise GroupError("translation step must be >= 1")
        return Subgroup(self, ((m, 0),), lambda g: g[1] == 0 and g[0] % m == 0, None, f"translations {m}Z")


class DihedralGroup(FiniteGroup):
    """Dihedral group of order 2m, with the same ``(t, f)`` pairs as Dinf mod m."""

    kind = "dihedral"

    def __init__(self, m: int):
        if m < 1:
            raise GroupSpecError("dihedral parameter must be >= 1")
        self.m = m
        self.spec = f"D:{m}"

    @property
    def identity(self):
        return (0, 0)

    def _enumerate(self):
        return [(t, f) for f in (0, 1) for t in range(self.m)]

    def mul(self, a, b):
        t1, f1 = a
        t2, f2 = b
        return ((t1 - t2 if f1 else t1 + t2) % self.m, f1 ^ f2)

    def inv(self, a):
        t, f = a
        return (t, 1) if f else (-t % self.m, 0)

    def validate(self, a):
        if not (isinstance(a, tuple) and len(a) == 2 and type(a[0]) is int
                and 0 <= a[0] < self.m and a[1] in (0, 1)):
            raise GroupError(f"{a!r} is not a canonical element of {self.spec}")
        return a

    def encode(self, a):
        return struct.pack(">qB", *a)

    def decode(self, data):
        return self.validate(struct.unpack(">qB", data))

    def format(self, a):
        return f"{a[0]},{a[1]}"

    def parse(self, text):
        try:
            t, f = (int(x) for x in text.split(","))
        except ValueError:
            raise GroupError(f"cannot parse {text!r} as an element of {self.spec}") from None
        return self.validate((t % self.m, f))


class SymmetricGroup(FiniteGroup):
    """Sym(m) on {0..m-1}; ``mul(a, b)`` applies b first, then a.

    Text form is 1-based cycle notation, e.g. ``(1 2 3)`` or ``(12)(34)``.
    """

    kind = "permutation"

    def __init__(self, m: int):
        if m < 1:
            raise GroupSpecError("degree must be >= 1")
        if math.factorial(m) > TABLE_ORDER_CAP:
            raise GroupSpecError(f"Sym:{m} exceeds the order cap {TABLE_ORDER_CAP}")
        self.m = m
        self.spec = f"Sym:{m}"

    @property
    def identity(self):
        return tuple(range(self.m))

    def _enumerate(self):
        return list(itertools.permutations(range(self.m)))

    @property
    def rank(self):
        return 0 if self.m == 1 else 1 if self.m == 2 else 2

    def mul(self, a, b):
        return tuple(a[x] for x in b)

    def inv(self, a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def validate(self, a):
        if not (isinstance(a, tuple) and sorted(a) == list(range(self.m))):
            raise GroupError(f"{a!r} is not a permutation of degree {self.m}")
        return a

    def encode(self, a):
        return bytes(a)

    def decode(self, data):
        return self.validate(tuple(data))

    def format(self, a):
        seen, cycles = set(), []
        for i in range(self.m):
            if i in seen or a[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j + 1)
                j = a[j]
            cycles.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(cycles) or "()"

    def parse(self, text):
        text = text.strip()
        if not re.fullmatch(r"(\([\d ]*\))+", text):
            raise GroupError(f"cannot parse {text!r} as a permutation")
        perm = list(range(self.m))
        # cycles compose right to left like products
        for body in reversed(re.findall(r"\(([\d ]*)\)", text)):
            pts = [int(x) for x in (body.split() if " " in body.strip() else list(body.strip()))]
            if any(not 1 <= p <= self.m for p in pts) or len(set(pts)) != len(pts):
                raise GroupError(f"bad cycle ({body}) for degree {self.m}")
            cyc = list(range(self.m))
            for x, y in zip(pts, pts[1:] + pts[:1]):
                cyc[x - 1] = y - 1
            perm = [cyc[p] for p in perm]
        return tuple(perm)


class TableGroup(FiniteGroup):
    """A finite group given by its multiplication table on 0..N-1 (0 = identity)."""

    kind = "table"

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 spec: str = "table", check: bool = True):
        n = len(table)
        if n < 1:
            raise GroupSpecError("table must be non-empty")
        if n > TABLE_ORDER_CAP:
            raise GroupSpecError(f"table order {n} exceeds cap {TABLE_ORDER_CAP}")
        self.table = [list(map(int, row)) for row in table]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        self.spec = spec
        if check:
            self._check_axioms()
        self._inv = [row.index(0) for row in self.table]

    def _check_axioms(self):
        n = len(self.table)
        rng = range(n)
        for row in self.table:
            if len(row) != n or sorted(row) != list(rng):
                raise GroupSpecError("each table row must be a permutation of 0..N-1")
        for c in rng:
            if sorted(self.table[r][c] for r in rng) != list(rng):
                raise GroupSpecError("each table column must be a permutation of 0..N-1")
        if self.table[0] != list(rng) or [r[0] for r in self.table] != list(rng):
            raise GroupSpecError("row 0 and column 0 must be the identity")
        T = self.table
        if any(T[T[a][b]][c] != T[a][T[b][c]] for a in rng for b in rng for c in rng):
            raise GroupSpecError("table is not associative")

    def _key(self):
        return tuple(map(tuple, self.table))

    @property
    def identity(self):
        return 0

    def _enumerate(self):
        return list(range(len(self.table)))

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def validate(self, a):
        if not (type(a) is int and 0 <= a < len(self.table)):
            raise GroupError(f"{a!r} is not an element of {self.spec}")
        return a

    def encode(self, a):
        return struct.pack(">I", a)

    def decode(self, data):
        return self.validate(struct.unpack(">I", data)[0])

    def format(self, a):
        return self.labels[a]

    def parse(self, text):
        text = text.strip()
        if text in self._label_index:
            return self._label_index[text]
        try:
            return self.validate(int(text))
        except ValueError:
            raise GroupError(f"unknown element {text!r} of {self.spec}") from None

    @classmethod
    def from_group(cls, G: FiniteGroup, spec: str | None = None) -> "TableGroup":
        return cls(G.cayley_table(), [G.format(g) for g in G.elements], spec or G.spec, check=False)

    @classmethod
    def from_file(cls, path: str | Path) -> "TableGroup":
        try:
            tokens = Path(path).read_text().split()
        except OSError as exc:
            raise GroupSpecError(f"cannot read table file {path}: {exc}") from None
        try:
            nums = [int(t) for t in tokens]
        except ValueError:
            raise GroupSpecError("table file must contain integers only") from None
        if not nums:
            raise GroupSpecError("empty table file")
        n = nums[0]
        if n < 1 or len(nums) != 1 + n * n:
            raise GroupSpecError(f"expected {n}x{n} entries after the order line")
        rows = [nums[1 + i * n: 1 + (i + 1) * n] for i in range(n)]
        return cls(rows, spec=f"table:{path}")

    def to_text(self) -> str:
        lines = [str(len(self.table))] + [" ".join(map(str, r)) for r in self.table]
        return "\n".join(lines) + "\n"


def quaternion_group() -> TableGroup:
    """Q8 = {±1, ±i, ±j, ±k} as a table group."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    unit = {"1": (1, "1"), "i": (1, "i"), "j": (1, "j"), "k": (1, "k")}
    prod = {("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
            ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")}

    def split(name):
        return (-1, name[1:]) if name.startswith("-") else unit[name]

    def mul(a, b):
        sa, ua = split(a)
        sb, ub = split(b)
        if ua == "1":
            s, u = 1, ub
        elif ub == "1":
            s, u = 1, ua
        elif ua == ub:
            s, u = -1, "1"
        else:
            s, u = prod[(ua, ub)]
        s *= sa * sb
        return u if s == 1 else "-" + u

    idx = {n: i for i, n in enumerate(names)}
    table = [[idx[mul(a, b)] for b in names] for a in names]
    return TableGroup(table, names, spec="Q8")


def random_generating_tuple(G: Group, n: int, rng, bound: int = 10, max_tries: int = 10_000) -> tuple:
    """Rejection-sample a generating n-tuple."""
    for _ in range(max_tries):
        T = tuple(G.random_element(rng, bound) for _ in range(n))
        if G.is_generating(T):
            return T
    raise GroupError(f"no generating {n}-tuple of {G.spec} found in {max_tries} tries")


# --------------------------------------------------------------------------
# quotients
# --------------------------------------------------------------------------

def quotient(G: Group, N: Subgroup) -> tuple[Group, Callable]:
    """Return ``(G/N, projection)`` for the supported cases.

    Finite groups go through a coset table; Z^k accepts full-rank lattices;
    Dinf accepts translation subgroups mZ.
    """
    if N.group is not G and N.group != G:
        raise GroupError("subgroup belongs to a different group")
    if isinstance(G, FiniteGroup):
        return _finite_quotient(G, N)
    if isinstance(G, FreeAbelianGroup):
        rows = [tuple(r) for r in N.generators if any(r)]
        if not rows:
            return G, lambda x: x
        diag, Q = smith_diagonalize(rows, G.k)
        if len(diag) < G.k or 0 in diag:
            raise GroupError("only finite-index sublattices of Z^k are supported")
        keep = [i for i, d in enumerate(diag) if d > 1]
        H = FiniteAbelianGroup([diag[i] for i in keep])

        def project(x):
            y = _row_times(x, Q)
            return tuple(y[i] % diag[i] for i in keep)

        return H, project
    if isinstance(G, InfiniteDihedralGroup):
        if N.is_trivial():
            return G, lambda x: x
        gens = N.generators
        if any(f for _, f in gens):
            raise GroupError("only translation subgroups of Dinf are supported")
        m = 0
        for t, _ in gens:
            m = math.gcd(m, t)
        H = DihedralGroup(m)
        return H, lambda x: (x[0] % m, x[1])
    raise GroupError(f"quotients of {G.spec} are not supported")


def _finite_quotient(G: FiniteGroup, N: Subgroup) -> tuple[TableGroup, Callable]:
    members = N.elements if N.elements is not None else frozenset(g for g in G.elements if g in N)
    sub = Subgroup(G, tuple(members), members.__contains__, members)
    if not G.is_normal(sub):
        raise GroupError("subgroup is not normal")
    coset_of: dict = {}
    reps = []
    for g in G.elements:
        if g in coset_of:
            continue
        c = len(reps)
        reps.append(g)
        for h in members:
            coset_of[G.mul(g, h)] = c
    table = [[coset_of[G.mul(a, b)] for b in reps] for a in reps]
    labels = [G.format(r) if len(members) == 1 else f"[{G.format(r)}]" for r in reps]
    H = TableGroup(table, labels, spec=f"{G.spec}/N", check=False)
    return H, coset_of.__getitem__


# --------------------------------------------------------------------------
# spec grammar
# --------------------------------------------------------------------------

def parse_group_spec(spec: str) -> Group:
    """Build a group from ``Z^k | Zmod:m1xm2.. | Dinf | D:m | Sym:m | table:path``.

    ``Z`` alone is accepted as ``Z^1``.
    """
    s = spec.strip()
    if s == "Z":
        return FreeAbelianGroup(1)
    if s == "Dinf":
        return InfiniteDihedralGroup()
    m = re.fullmatch(r"Z\^(-?\d+)", s)
    if m:
        return FreeAbelianGroup(int(m.group(1)))
    m = re.fullmatch(r"Zmod:(-?\d+(?:x-?\d+)*)", s)
    if m:
        return FiniteAbelianGroup([int(x) for x in m.group(1).split("x")])
    m = re.fullmatch(r"D:(-?\d+)", s)
    if m:
        return DihedralGroup(int(m.group(1)))
    m = re.fullmatch(r"Sym:(-?\d+)", s)
    if m:
        return SymmetricGroup(int(m.group(1)))
    if s.startswith("table:"):
        return TableGroup.from_file(s[len("table:"):])
    head = re.match(r"[A-Za-z]+", s)
    if head and head.group(0) not in {"Z", "Zmod", "D", "Dinf", "Sym", "table"}:
        raise GroupSpecError(f"unsupported group kind {head.group(0)!r}")
    raise GroupSpecError(f"cannot parse group spec {spec!r}")
