"""Exact sparse tensors of arbitrary order.

Indices are 1-based throughout, so ``e_1, ..., e_n`` address positions
``1..n``.  Entries are exact rationals; zero entries are never stored, which
makes equality structural.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InvalidArgument

__all__ = [
    "Tensor",
    "RankOneTerm",
    "det_tensor",
    "perm_tensor",
    "expand_rank_one",
    "linear_combine",
    "verify_decomposition",
    "permutation_sign",
    "basis_vector",
    "dumps_terms",
    "loads_terms",
]


def _exact(value) -> int | Fraction:
    """Coerce to an exact rational, keeping integers as ``int`` for speed."""
    if isinstance(value, bool):
        raise InvalidArgument("booleans are not tensor entries")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return _exact(Fraction(value))
    if isinstance(value, float):
        raise InvalidArgument("floating-point entries are not allowed; use Fraction or str")
    try:
        return _exact(Fraction(value))
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"not an exact rational: {value!r}") from exc


def permutation_sign(images: Sequence[int]) -> int:
    """Sign of a permutation given by its images, via cycle counting."""
    n = len(images)
    seen = [False] * n
    sign = 1
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = images[k] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class Tensor:
    """Immutable sparse tensor with exact rational entries.

    >>> t = Tensor((2, 2), {(1, 2): 1, (2, 1): -1})
    >>> t.order, t.nnz
    (2, 2)
    """

    __slots__ = ("_dims", "_entries", "_hash")

    def __init__(self, dims: Sequence[int], entries: Mapping[tuple, object] | Iterable = ()):
        dims = tuple(int(m) for m in dims)
        if not dims or any(m < 1 for m in dims):
            raise InvalidArgument(f"dims must be a non-empty list of positive integers, got {dims}")
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[tuple[int, ...], int | Fraction] = {}
        for index, value in items:
            index = tuple(int(i) for i in index)
            if len(index) != len(dims):
                raise InvalidArgument(f"index {index} has wrong length for dims {dims}")
            for i, m in zip(index, dims):
                if not 1 <= i <= m:
                    raise InvalidArgument(f"index {index} out of range for dims {dims}")
            value = _exact(value)
            total = store.get(index, 0) + value
            if total:
                store[index] = _exact(total)
            else:
                store.pop(index, None)
        self._dims = dims
        self._entries = store
        self._hash = None

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def order(self) -> int:
        return len(self._dims)

    @property
    def entries(self) -> Mapping[tuple[int, ...], int | Fraction]:
        return MappingProxyType(self._entries)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, index) -> int | Fraction:
        return self._entries.get(tuple(index), 0)

    def items(self):
        """Entries sorted lexicographically by index tuple."""
        return sorted(self._entries.items())

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self._entries.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._dims == other._dims and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._dims, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Tensor(dims={self._dims}, nnz={self.nnz})"

    def __add__(self, other: Tensor) -> Tensor:
        return linear_combine(1, self, 1, other)

    def __sub__(self, other: Tensor) -> Tensor:
        return linear_combine(1, self, -1, other)

    def __neg__(self) -> Tensor:
        return self.scale(-1)

    def scale(self, a) -> Tensor:
        a = _exact(a)
        return Tensor(self._dims, {k: a * v for k, v in self._entries.items()})

    # text format -------------------------------------------------------
    def dumps(self) -> str:
        """Serialize to the line-based text format (``tensor d m1 ... md`` header)."""
        lines = ["tensor " + " ".join(str(x) for x in (self.order, *self._dims))]
        for index, value in self.items():
            lines.append(" ".join(map(str, index)) + " " + _fmt_rational(value))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Tensor:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InvalidArgument("empty tensor file")
        head = lines[0].split()
        if head[0] != "tensor" or len(head) < 3:
            raise InvalidArgument(f"bad tensor header: {lines[0]!r}")
        try:
            d = int(head[1])
            dims = tuple(int(x) for x in head[2:])
        except ValueError as exc:
            raise InvalidArgument(f"bad tensor header: {lines[0]!r}") from exc
        if len(dims) != d:
            raise InvalidArgument(f"header declares order {d} but lists {len(dims)} dims")
        entries = {}
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != d + 1:
                raise InvalidArgument(f"bad tensor entry line: {ln!r}")
            index = tuple(int(x) for x in parts[:d])
            if index in entries:
                raise InvalidArgument(f"duplicate entry {index}")
            entries[index] = Fraction(parts[d])
        return cls(dims, entries)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> Tensor:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _fmt_rational(value) -> str:
    if isinstance(value, Fraction) and value.denominator != 1:
        return f"{value.numerator}/{value.denominator}"
    return str(int(value))


@dataclass(frozen=True)
class RankOneTerm:
    """A decomposable tensor ``v_1 (x) v_2 (x) ... (x) v_d`` with dense factors."""

    vectors: tuple[tuple[int | Fraction, ...], ...]

    def __init__(self, vectors):
        vecs = tuple(tuple(_exact(x) for x in v) for v in vectors)
        if not vecs:
            raise InvalidArgument("a rank-one term needs at least one factor")
        for v in vecs:
            if not v:
                raise InvalidArgument("empty factor vector")
            if not any(v):
                raise InvalidArgument("every factor of a rank-one term must be nonzero")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.vectors)

    @property
    def order(self) -> int:
        return len(self.vectors)


def basis_vector(n: int, i: int, scale=1) -> tuple:
    """Dense coordinates of ``scale * e_i`` in dimension ``n`` (1-based ``i``)."""
    if not 1 <= i <= n:
        raise InvalidArgument(f"e_{i} does not exist in dimension {n}")
    v = [0] * n
    v[i - 1] = _exact(scale)
    return tuple(v)


def _sym_tensor(n: int, signed: bool) -> Tensor:
    if not isinstance(n, int) or n < 2:
        raise InvalidArgument(f"n must be an integer >= 2, got {n!r}")
    entries = {}
    for images in itertools.permutations(range(1, n + 1)):
        entries[images] = permutation_sign(images) if signed else 1
    return Tensor((n,) * n, entries)


def det_tensor(n: int) -> Tensor:
    """The determinant tensor: signed sum of ``e_s(1) (x) ... (x) e_s(n)`` over S_n."""
    return _sym_tensor(n, signed=True)


def perm_tensor(n: int) -> Tensor:
    """The permanent tensor: unsigned sum of ``e_s(1) (x) ... (x) e_s(n)`` over S_n."""
    return _sym_tensor(n, signed=False)


def expand_rank_one(term: RankOneTerm, dims: Sequence[int] | None = None) -> Tensor:
    if dims is not None and tuple(dims) != term.dims:
        raise InvalidArgument(f"term dims {term.dims} do not match {tuple(dims)}")
    supports = [[(i + 1, x) for i, x in enumerate(v) if x] for v in term.vectors]
    entries = {}
    for combo in itertools.product(*supports):
        value = 1
        for _, x in combo:
            value *= x
        entries[tuple(i for i, _ in combo)] = value
    return Tensor(term.dims, entries)


def linear_combine(a, t1: Tensor, b, t2: Tensor) -> Tensor:
    """Entrywise ``a*t1 + b*t2`` in canonical sparse form."""
    if t1.dims != t2.dims:
        raise InvalidArgument(f"shape mismatch: {t1.dims} vs {t2.dims}")
    a, b = _exact(a), _exact(b)
    acc = {k: a * v for k, v in t1.entries.items()}
    for k, v in t2.entries.items():
        acc[k] = acc.get(k, 0) + b * v
    return Tensor(t1.dims, acc)


def verify_decomposition(t: Tensor, terms: Sequence[RankOneTerm]) -> bool:
    """True iff the rank-one terms sum exactly to ``t``."""
    acc: dict[tuple, int | Fraction] = {}
    for term in terms:
        if term.dims != t.dims:
            raise InvalidArgument(f"term dims {term.dims} do not match tensor dims {t.dims}")
        for k, v in expand_rank_one(term).entries.items():
            acc[k] = acc.get(k, 0) + v
    return Tensor(t.dims, acc) == t


def dumps_terms(terms: Sequence[RankOneTerm]) -> str:
    """Text form of a decomposition: ``terms d m1 ... md`` then one term per line,
    factors separated by ``|``."""
    if not terms:
        raise InvalidArgument("cannot serialize an empty decomposition without dims")
    dims = terms[0].dims
    lines = ["terms " + " ".join(map(str, (len(dims), *dims)))]
    for term in terms:
        if term.dims != dims:
            raise InvalidArgument("all terms must share dims")
        lines.append(" | ".join(" ".join(_fmt_rational(x) for x in v) for v in term.vectors))
    return "\n".join(lines) + "\n"


def loads_terms(text: str) -> list[RankOneTerm]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0].split()[0] != "terms":
        raise InvalidArgument("decomposition file must start with a 'terms d m1 ... md' header")
    try:
        head = [int(x) for x in lines[0].split()[1:]]
    except ValueError as exc:
        raise InvalidArgument(f"bad decomposition header: {lines[0]!r}") from exc
    d, dims = head[0], tuple(head[1:])
    if len(dims) != d:
        raise InvalidArgument(f"header declares order {d} but lists {len(dims)} dims")
    terms = []
    for ln in lines[1:]:
        factors = [f.split() for f in ln.split("|")]
        if len(factors) != d or any(len(f) != m for f, m in zip(factors, dims)):
            raise InvalidArgument(f"term does not match dims {dims}: {ln!r}")
        try:
            terms.append(RankOneTerm([[Fraction(x) for x in f] for f in factors]))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"bad number in term: {ln!r}") from exc
    return terms
