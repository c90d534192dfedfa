"""Ordered bases of exterior powers and of their tensor products.

A p-subset ``i_1 < ... < i_p`` of ``[n]`` stands for ``e_{i_1} ^ ... ^ e_{i_p}``.
Bases are ordered lexicographically on the increasing index tuples, and a
product basis ``F_1 (x) ... (x) F_k`` is ordered lexicographically on the
concatenated tuples, i.e. mixed radix with the leftmost factor most
significant.  Ranks are 0-based.

Internally a wedge support is a bitmask (bit ``i-1`` set for ``e_i``); the
``raw`` helpers work on those masks and are what the hot loops use.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import NamedTuple

from .errors import InvalidArgument

__all__ = [
    "WedgeIndex",
    "Factor",
    "BasisElement",
    "ProductBasis",
    "lambda_basis",
    "subset_rank",
    "subset_unrank",
    "wedge_insert",
    "product_index",
    "product_unindex",
    "mask_of",
    "support_of",
]


def mask_of(support) -> int:
    m = 0
    for i in support:
        m |= 1 << (i - 1)
    return m


def support_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, order=True)
class WedgeIndex:
    """Basis vector ``e_{i_1} ^ ... ^ e_{i_p}`` of the p-th exterior power of K^n."""

    n: int
    support: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(i) for i in self.support)
        object.__setattr__(self, "support", s)
        if self.n < 1:
            raise InvalidArgument(f"ambient dimension must be positive, got {self.n}")
        if any(a >= b for a, b in zip(s, s[1:])):
            raise InvalidArgument(f"wedge support must be strictly increasing: {s}")
        if s and not (1 <= s[0] and s[-1] <= self.n):
            raise InvalidArgument(f"wedge support {s} out of range for n={self.n}")

    @property
    def p(self) -> int:
        return len(self.support)

    @property
    def mask(self) -> int:
        return mask_of(self.support)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> WedgeIndex:
        return cls(n, support_of(mask))

    def __str__(self) -> str:
        if not self.support:
            return "1"
        body = "^".join(f"e{i}" for i in self.support)
        return f"({body})" if len(self.support) > 1 else body


def _check_np(n: int, p: int) -> None:
    if n < 0 or not 0 <= p <= n:
        raise InvalidArgument(f"need 0 <= p <= n, got n={n}, p={p}")


@lru_cache(maxsize=None)
def wedge_masks(n: int, p: int) -> tuple[int, ...]:
    """Masks of the p-subsets of [n] in lexicographic order."""
    _check_np(n, p)
    return tuple(mask_of(c) for c in itertools.combinations(range(1, n + 1), p))


@lru_cache(maxsize=None)
def wedge_mask_ranks(n: int, p: int) -> dict[int, int]:
    return {m: r for r, m in enumerate(wedge_masks(n, p))}


def lambda_basis(n: int, p: int) -> list[WedgeIndex]:
    _check_np(n, p)
    return [WedgeIndex(n, c) for c in itertools.combinations(range(1, n + 1), p)]


def subset_rank(w: WedgeIndex) -> int:
    """Lexicographic rank of ``w`` among the p-subsets of [n] (0-based)."""
    n, p = w.n, w.p
    r = 0
    prev = 0
    for t, a in enumerate(w.support, start=1):
        for v in range(prev + 1, a):
            r += comb(n - v, p - t)
        prev = a
    return r


def subset_unrank(n: int, p: int, r: int) -> WedgeIndex:
    _check_np(n, p)
    total = comb(n, p)
    if not 0 <= r < total:
        raise InvalidArgument(f"rank {r} out of range [0, {total})")
    out = []
    v = 1
    for t in range(1, p + 1):
        while True:
            block = comb(n - v, p - t)
            if r < block:
                break
            r -= block
            v += 1
        out.append(v)
        v += 1
    return WedgeIndex(n, tuple(out))


def wedge_insert(i: int, w: WedgeIndex) -> tuple[int, WedgeIndex] | None:
    """Compute ``e_i ^ w`` with ``e_i`` wedged on the left.

    Returns ``None`` when ``i`` already occurs in ``w``; otherwise the sign
    ``(-1)^#{j in w : j < i}`` and the sorted support.
    """
    if not 1 <= i <= w.n:
        raise InvalidArgument(f"index {i} out of range for n={w.n}")
    if i in w.support:
        return None
    below = sum(1 for j in w.support if j < i)
    return (-1) ** below, WedgeIndex(w.n, tuple(sorted(w.support + (i,))))


class Factor(NamedTuple):
    """One tensor factor of a product basis.

    ``kind`` is ``"wedge"`` (exterior power of degree ``p``), ``"index"``
    (a plain copy of K^n) or ``"dual"`` (a copy of the dual space, rendered
    with a star).
    """

    kind: str
    n: int
    p: int = 1

    @property
    def size(self) -> int:
        return comb(self.n, self.p) if self.kind == "wedge" else self.n


@dataclass(frozen=True)
class BasisElement:
    """A point of an ordered product basis: one component per factor.

    Wedge factors hold a :class:`WedgeIndex`, plain and dual factors an int.
    """

    components: tuple
    shape: tuple[Factor, ...]

    def __post_init__(self):
        if len(self.components) != len(self.shape):
            raise InvalidArgument(f"expected {len(self.shape)} components, got {len(self.components)}")
        for c, f in zip(self.components, self.shape):
            ok = (isinstance(c, WedgeIndex) and c.n == f.n and c.p == f.p) if f.kind == "wedge" else (
                isinstance(c, int) and 1 <= c <= f.n)
            if not ok:
                raise InvalidArgument(f"component {c!r} does not fit factor {f}")

    def raw(self) -> tuple[int, ...]:
        return tuple(c.mask if f.kind == "wedge" else c for c, f in zip(self.components, self.shape))

    def __str__(self) -> str:
        parts = []
        for c, f in zip(self.components, self.shape):
            if f.kind == "wedge":
                parts.append(str(c))
            elif f.kind == "dual":
                parts.append(f"e{c}*")
            else:
                parts.append(f"e{c}")
        return "(x)".join(parts)


class ProductBasis(Sequence):
    """Lazily indexed ordered basis of a tensor product of factors.

    Acts as a read-only sequence of :class:`BasisElement`; nothing is
    materialized, so it is cheap even with tens of millions of elements.
    """

    def __init__(self, shape):
        self.shape = tuple(Factor(*f) for f in shape)
        for f in self.shape:
            if f.kind not in ("wedge", "index", "dual"):
                raise InvalidArgument(f"unknown factor kind {f.kind!r}")
            if f.kind == "wedge":
                _check_np(f.n, f.p)
            elif f.n < 1:
                raise InvalidArgument(f"factor dimension must be positive: {f}")
        self.sizes = tuple(f.size for f in self.shape)
        strides = []
        acc = 1
        for s in reversed(self.sizes):
            strides.append(acc)
            acc *= s
        self.strides = tuple(reversed(strides))
        self.size = acc
        self._rank_maps = tuple(
            wedge_mask_ranks(f.n, f.p) if f.kind == "wedge" else None for f in self.shape
        )
        self._label_lists = tuple(
            wedge_masks(f.n, f.p) if f.kind == "wedge" else tuple(range(1, f.n + 1)) for f in self.shape
        )

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductBasis) and self.shape == other.shape

    def __hash__(self) -> int:
        return hash(self.shape)

    def __repr__(self) -> str:
        return f"ProductBasis({list(self.shape)}, size={self.size})"

    def raw_index(self, raw) -> int:
        r = 0
        for x, stride, rm, f in zip(raw, self.strides, self._rank_maps, self.shape):
            if rm is None:
                if not 1 <= x <= f.n:
                    raise InvalidArgument(f"index {x} out of range for {f}")
                r += (x - 1) * stride
            else:
                try:
                    r += rm[x] * stride
                except KeyError:
                    raise InvalidArgument(f"mask {x:b} is not a {f.p}-subset of [{f.n}]") from None
        return r

    def raw(self, r: int) -> tuple[int, ...]:
        if not 0 <= r < self.size:
            raise InvalidArgument(f"flat index {r} out of range [0, {self.size})")
        out = []
        for stride, labels in zip(self.strides, self._label_lists):
            q, r = divmod(r, stride)
            out.append(labels[q])
        return tuple(out)

    def raw_elements(self):
        """All raw labels in basis order."""
        return itertools.product(*self._label_lists)

    def element(self, raw) -> BasisElement:
        comps = tuple(
            WedgeIndex.from_mask(f.n, x) if f.kind == "wedge" else x for x, f in zip(raw, self.shape)
        )
        return BasisElement(comps, self.shape)

    def index(self, element) -> int:
        comps = element.components if isinstance(element, BasisElement) else tuple(element)
        if len(comps) != len(self.shape):
            raise InvalidArgument(f"expected {len(self.shape)} components, got {len(comps)}")
        raw = []
        for c, f in zip(comps, self.shape):
            if f.kind == "wedge":
                if not isinstance(c, WedgeIndex):
                    c = WedgeIndex(f.n, tuple(c))
                if c.n != f.n or c.p != f.p:
                    raise InvalidArgument(f"component {c} does not fit factor {f}")
                raw.append(c.mask)
            else:
                raw.append(int(c))
        return self.raw_index(raw)

    def __iter__(self):
        return (self.element(raw) for raw in self.raw_elements())

    def __getitem__(self, r):
        if isinstance(r, slice):
            return [self.element(self.raw(i)) for i in range(*r.indices(self.size))]
        if r < 0:
            r += self.size
        return self.element(self.raw(r))


def product_index(components, shape) -> int:
    """0-based position of ``components`` in the ordered product basis ``shape``."""
    return ProductBasis(shape).index(components)


def product_unindex(r: int, shape) -> tuple:
    basis = ProductBasis(shape)
    return basis.element(basis.raw(r)).components
