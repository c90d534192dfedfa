"""Recursive Koszul flattenings and the border-rank bound they give.

For a tensor ``T`` in ``V_1 (x) ... (x) V_d`` and a plan choosing Koszul modes
``i_1..i_s`` with exponents ``p_t``, a contraction mode ``c`` and an output
mode ``o``, the flattening maps

    Lambda^{p_1} V_{i_1} (x) ... (x) Lambda^{p_s} V_{i_s} (x) V_c^*
      -> Lambda^{p_1+1} V_{i_1} (x) ... (x) Lambda^{p_s+1} V_{i_s}
         (x) (passthrough modes, increasing) (x) V_o

by wedging each tensor factor on the left of the matching Koszul factor,
pairing the dual vector with the contraction factor and keeping the rest.
Column and row bases are the lexicographic product bases of
:mod:`koszulrank.exterior`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import comb, prod

from .errors import InvalidArgument
from .exterior import Factor, ProductBasis, wedge_masks
from .sparse import Q, SparseMatrix
from .tensor import Tensor

__all__ = [
    "FlatteningPlan",
    "KoszulMap",
    "FlatteningState",
    "rkf_matrix",
    "classical_flattening",
    "kf_step",
    "divisor",
    "border_bound",
]


@dataclass(frozen=True)
class FlatteningPlan:
    """Which modes get Koszul factors (with exponents), which is dualized, which is output.

    Modes are 1-based.  ``koszul`` is an ordered tuple of ``(mode, p)``; the
    order fixes the order of the exterior factors in both bases.
    """

    order: int
    koszul: tuple[tuple[int, int], ...]
    contraction: int
    output: int

    def __post_init__(self):
        object.__setattr__(self, "koszul", tuple((int(m), int(p)) for m, p in self.koszul))

    @classmethod
    def default(cls, n: int) -> FlatteningPlan:
        """Koszul modes ``1..n-2`` with ``p_i = i``, contraction ``n-1``, output ``n``."""
        if n < 3:
            raise InvalidArgument(f"the default plan needs n >= 3, got {n}")
        return cls(n, tuple((i, i) for i in range(1, n - 1)), n - 1, n)

    @classmethod
    def parse(cls, order: int, exponents, contraction: int | None = None, output: int | None = None,
              modes=None) -> FlatteningPlan:
        """Convenience constructor: exponents for modes ``1..s`` unless ``modes`` is given."""
        exponents = tuple(exponents)
        modes = tuple(modes) if modes is not None else tuple(range(1, len(exponents) + 1))
        if len(modes) != len(exponents):
            raise InvalidArgument("modes and exponents differ in length")
        return cls(order, tuple(zip(modes, exponents)),
                   order - 1 if contraction is None else contraction,
                   order if output is None else output)

    @property
    def koszul_modes(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.koszul)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(p for _, p in self.koszul)

    @property
    def passthrough(self) -> tuple[int, ...]:
        used = set(self.koszul_modes) | {self.contraction, self.output}
        return tuple(m for m in range(1, self.order + 1) if m not in used)

    def validate(self, dims) -> None:
        dims = tuple(dims)
        d = self.order
        if len(dims) != d:
            raise InvalidArgument(f"plan is for order {d}, tensor has order {len(dims)}")
        if d < 2:
            raise InvalidArgument("flattenings need order >= 2")
        modes = list(self.koszul_modes) + [self.contraction, self.output]
        if any(not 1 <= m <= d for m in modes):
            raise InvalidArgument(f"plan mode out of range 1..{d}: {self}")
        if len(set(modes)) != len(modes):
            raise InvalidArgument(f"plan modes must be distinct: {self}")
        if len(self.koszul) > d - 2:
            raise InvalidArgument(f"at most d-2 = {d - 2} Koszul modes are allowed")
        for m, p in self.koszul:
            if not 1 <= p <= dims[m - 1] - 1:
                raise InvalidArgument(f"exponent {p} for mode {m} must lie in 1..{dims[m - 1] - 1}")

    def column_shape(self, dims) -> tuple[Factor, ...]:
        return tuple(Factor("wedge", dims[m - 1], p) for m, p in self.koszul) + (
            Factor("dual", dims[self.contraction - 1]),)

    def row_shape(self, dims) -> tuple[Factor, ...]:
        return (tuple(Factor("wedge", dims[m - 1], p + 1) for m, p in self.koszul)
                + tuple(Factor("index", dims[m - 1]) for m in self.passthrough)
                + (Factor("index", dims[self.output - 1]),))

    def __str__(self) -> str:
        ks = ",".join(f"{m}:{p}" for m, p in self.koszul)
        return f"koszul[{ks}] contract {self.contraction} out {self.output}"


class KoszulMap:
    """Column-to-rows and row-to-columns evaluation of a recursive Koszul flattening.

    Labels are raw tuples: wedge supports as bitmasks, plain indices as ints.
    Nothing is materialized, which is what lets the symmetry code walk a
    single connected component of a huge flattening.
    """

    def __init__(self, tensor: Tensor, plan: FlatteningPlan):
        plan.validate(tensor.dims)
        self.tensor = tensor
        self.plan = plan
        self.col_basis = ProductBasis(plan.column_shape(tensor.dims))
        self.row_basis = ProductBasis(plan.row_shape(tensor.dims))
        self.s = len(plan.koszul)
        kz = [m - 1 for m in plan.koszul_modes]
        tail = [m - 1 for m in plan.passthrough] + [plan.output - 1]
        c = plan.contraction - 1
        by_dual = defaultdict(list)
        by_tail = defaultdict(list)
        for index, value in tensor.items():
            bits = tuple(1 << (index[m] - 1) for m in kz)
            t = tuple(index[m] for m in tail)
            by_dual[index[c]].append((bits, t, value))
            by_tail[t].append((bits, index[c], value))
        self._by_dual = dict(by_dual)
        self._by_tail = dict(by_tail)

    def column(self, col) -> dict[tuple, object]:
        """Image of one column basis element, as ``{raw row: value}``."""
        ws = col[:-1]
        out: dict[tuple, object] = {}
        for bits, tail, value in self._by_dual.get(col[-1], ()):
            new = []
            for w, b in zip(ws, bits):
                if w & b:
                    break
                if (w & (b - 1)).bit_count() & 1:
                    value = -value
                new.append(w | b)
            else:
                key = (*new, *tail)
                out[key] = out.get(key, 0) + value
        return {k: v for k, v in out.items() if v}

    def row(self, row) -> dict[tuple, object]:
        """Transpose view: ``{raw column: value}`` for one row basis element."""
        s = self.s
        us = row[:s]
        out: dict[tuple, object] = {}
        for bits, j, value in self._by_tail.get(row[s:], ()):
            new = []
            for u, b in zip(us, bits):
                if not u & b:
                    break
                w = u ^ b
                if (w & (b - 1)).bit_count() & 1:
                    value = -value
                new.append(w)
            else:
                key = (*new, j)
                out[key] = out.get(key, 0) + value
        return {k: v for k, v in out.items() if v}

    def matrix(self, columns=None) -> SparseMatrix:
        """Full matrix, or only the listed columns (flat indices, in the given order)."""
        rb, cb = self.row_basis, self.col_basis
        ent = {}
        if columns is None:
            for j, col in enumerate(cb.raw_elements()):
                for row, v in self.column(col).items():
                    ent[(rb.raw_index(row), j)] = v
            return SparseMatrix(rb.size, cb.size, ent, Q, rb, cb)
        for j, ci in enumerate(columns):
            for row, v in self.column(cb.raw(ci)).items():
                ent[(rb.raw_index(row), j)] = v
        return SparseMatrix(rb.size, len(columns), ent, Q, rb, [cb[ci] for ci in columns])


def rkf_matrix(tensor: Tensor, plan: FlatteningPlan | None = None) -> SparseMatrix:
    """Sparse matrix of the recursive Koszul flattening of ``tensor`` under ``plan``.

    Columns follow the lexicographic column basis, rows the lexicographic
    row basis; both are attached as lazy label sequences.
    """
    if plan is None:
        plan = FlatteningPlan.default(tensor.order)
    return KoszulMap(tensor, plan).matrix()


class FlatteningState:
    """A flattening built one Koszul factor at a time.

    ``slots`` are the non-contracted tensor modes in increasing order.  A row
    label has one entry per slot holding either a plain index or, once that
    mode received a Koszul factor, a wedge bitmask.  A column label lists the
    Koszul bitmasks in application order followed by the dual index.
    """

    def __init__(self, dims, contraction, output, koszul, slots, images):
        self.dims = tuple(dims)
        self.contraction = contraction
        self.output = output
        self.koszul = tuple(koszul)
        self.slots = tuple(slots)
        self.images = images

    @property
    def plan(self) -> FlatteningPlan:
        return FlatteningPlan(len(self.dims), self.koszul, self.contraction, self.output)

    def to_matrix(self) -> SparseMatrix:
        """Matrix in the same bases as :func:`rkf_matrix` for :attr:`plan`."""
        plan = self.plan
        cb = ProductBasis(plan.column_shape(self.dims))
        rb = ProductBasis(plan.row_shape(self.dims))
        pos = {m: k for k, m in enumerate(self.slots)}
        order = [pos[m] for m in plan.koszul_modes] + [pos[m] for m in plan.passthrough] + [pos[self.output]]
        ent = {}
        for col, image in self.images.items():
            j = cb.raw_index(col)
            for row, v in image.items():
                ent[(rb.raw_index(tuple(row[k] for k in order)), j)] = v
        return SparseMatrix(rb.size, cb.size, ent, Q, rb, cb)


def classical_flattening(tensor: Tensor, contraction: int, output: int | None = None) -> FlatteningState:
    """The flattening ``V_c^* -> (other modes)`` with no Koszul factor yet."""
    d = tensor.order
    if output is None:
        output = d if contraction != d else d - 1
    if not (1 <= contraction <= d and 1 <= output <= d) or contraction == output:
        raise InvalidArgument(f"bad contraction/output modes {contraction}/{output} for order {d}")
    slots = tuple(m for m in range(1, d + 1) if m != contraction)
    images: dict[tuple, dict] = {(j,): {} for j in range(1, tensor.dims[contraction - 1] + 1)}
    for index, value in tensor.items():
        row = tuple(index[m - 1] for m in slots)
        img = images[(index[contraction - 1],)]
        img[row] = img.get(row, 0) + value
    return FlatteningState(tensor.dims, contraction, output, (), slots, images)


def kf_step(state: FlatteningState, mode: int, p: int) -> FlatteningState:
    """Apply one more Koszul factor ``Lambda^p V_mode -> Lambda^{p+1} V_mode``."""
    used = {m for m, _ in state.koszul}
    if mode in used or mode in (state.contraction, state.output) or mode not in state.slots:
        raise InvalidArgument(f"mode {mode} is not available for a Koszul step")
    m = state.dims[mode - 1]
    if not 1 <= p <= m - 1:
        raise InvalidArgument(f"exponent {p} must lie in 1..{m - 1}")
    k = state.slots.index(mode)
    masks = wedge_masks(m, p)
    images = {}
    for col, image in state.images.items():
        for w in masks:
            new = {}
            for row, v in image.items():
                b = 1 << (row[k] - 1)
                if w & b:
                    continue
                if (w & (b - 1)).bit_count() & 1:
                    v = -v
                key = row[:k] + (w | b,) + row[k + 1:]
                new[key] = new.get(key, 0) + v
            images[col[:-1] + (w, col[-1])] = {r: v for r, v in new.items() if v}
    return FlatteningState(state.dims, state.contraction, state.output,
                           state.koszul + ((mode, p),), state.slots, images)


def divisor(plan: FlatteningPlan, dims) -> int:
    """Rank of the flattening of any rank-one tensor: prod of C(m_i - 1, p_i)."""
    return prod(comb(dims[m - 1] - 1, p) for m, p in plan.koszul)


def border_bound(rank: int, div: int) -> int:
    """``ceil(rank / div)``, the border-rank lower bound."""
    if div < 1:
        raise InvalidArgument(f"divisor must be positive, got {div}")
    return -(-rank // div)
