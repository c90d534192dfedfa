"""Coordinate-form exact sparse matrices over Q or a prime field."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import BadPrime, InvalidArgument

__all__ = ["SparseMatrix", "Q"]

Q = "Q"


def _norm_q(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


class SparseMatrix:
    """Exact sparse matrix; indices are 0-based in memory, 1-based on disk.

    ``field`` is :data:`Q` or a prime ``p`` (entries are then residues in
    ``[0, p)``).  Explicit zeros are dropped on construction.  Optional
    ``row_labels``/``col_labels`` are any sequences of the right length,
    typically a lazy :class:`~koszulrank.exterior.ProductBasis`.
    """

    __slots__ = ("rows", "cols", "entries", "field", "row_labels", "col_labels")

    def __init__(self, rows: int, cols: int, entries: Mapping | Iterable = (), field=Q,
                 row_labels=None, col_labels=None):
        if rows < 0 or cols < 0:
            raise InvalidArgument(f"bad matrix size {rows}x{cols}")
        if field != Q and (not isinstance(field, int) or field < 2):
            raise InvalidArgument(f"field must be 'Q' or a prime, got {field!r}")
        self.rows = rows
        self.cols = cols
        self.field = field
        items = entries.items() if isinstance(entries, Mapping) else entries
        store = {}
        for (r, c), v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise InvalidArgument(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = _norm_q(v) if field == Q else int(v) % field
            if v:
                store[(r, c)] = v
        self.entries = store
        if row_labels is not None and len(row_labels) != rows:
            raise InvalidArgument("row label table has the wrong length")
        if col_labels is not None and len(col_labels) != cols:
            raise InvalidArgument("column label table has the wrong length")
        self.row_labels = row_labels
        self.col_labels = col_labels

    # construction ------------------------------------------------------
    @classmethod
    def from_dense(cls, rows_list, field=Q) -> SparseMatrix:
        nr = len(rows_list)
        nc = len(rows_list[0]) if nr else 0
        if any(len(r) != nc for r in rows_list):
            raise InvalidArgument("ragged dense matrix")
        return cls(nr, nc, {(i, j): v for i, row in enumerate(rows_list) for j, v in enumerate(row) if v}, field)

    @classmethod
    def identity(cls, n: int, field=Q) -> SparseMatrix:
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    # views -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def __getitem__(self, rc):
        return self.entries.get(rc, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.field, self.entries) == (other.rows, other.cols, other.field, other.entries)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz}, field={self.field})"

    def row_dicts(self) -> list[dict[int, object]]:
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def col_dicts(self) -> list[dict[int, object]]:
        out = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def to_dense(self) -> list[list]:
        d = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            d[r][c] = v
        return d

    def transpose(self) -> SparseMatrix:
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()},
                            self.field, self.col_labels, self.row_labels)

    def submatrix(self, rows, cols) -> SparseMatrix:
        """Rows and columns in the given order; labels follow when present."""
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        if len(rpos) != len(rows) or len(cpos) != len(cols):
            raise InvalidArgument("repeated row or column index")
        ent = {}
        for (r, c), v in self.entries.items():
            i = rpos.get(r)
            if i is not None:
                j = cpos.get(c)
                if j is not None:
                    ent[(i, j)] = v
        rl = [self.row_labels[r] for r in rows] if self.row_labels is not None else None
        cl = [self.col_labels[c] for c in cols] if self.col_labels is not None else None
        return SparseMatrix(len(rows), len(cols), ent, self.field, rl, cl)

    def is_integral(self) -> bool:
        return self.field != Q or all(isinstance(v, int) for v in self.entries.values())

    def mod(self, p: int) -> SparseMatrix:
        """Reduce a rational matrix modulo ``p``."""
        if self.field != Q:
            if self.field == p:
                return self
            raise InvalidArgument(f"cannot reduce an F_{self.field} matrix modulo {p}")
        ent = {}
        for rc, v in self.entries.items():
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise BadPrime(f"denominator {v.denominator} vanishes modulo {p}")
                ent[rc] = v.numerator * pow(v.denominator, -1, p) % p
            else:
                ent[rc] = v % p
        return SparseMatrix(self.rows, self.cols, ent, p, self.row_labels, self.col_labels)

    def add(self, other: SparseMatrix, scale=1) -> SparseMatrix:
        if self.shape != other.shape or self.field != other.field:
            raise InvalidArgument("shape or field mismatch")
        ent = dict(self.entries)
        for rc, v in other.entries.items():
            ent[rc] = ent.get(rc, 0) + scale * v
        return SparseMatrix(self.rows, self.cols, ent, self.field, self.row_labels, self.col_labels)

    # text format -------------------------------------------------------
    def dumps(self) -> str:
        fld = "Q" if self.field == Q else f"Fp:{self.field}"
        lines = [f"%%smat {self.rows} {self.cols} {self.nnz} {fld}"]
        for (r, c) in sorted(self.entries):
            v = self.entries[(r, c)]
            vs = f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else str(v)
            lines.append(f"{r + 1} {c + 1} {vs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> SparseMatrix:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise InvalidArgument("empty matrix file")
        head = lines[0].split()
        if len(head) != 5 or head[0] != "%%smat":
            raise InvalidArgument(f"bad smat header: {lines[0]!r}")
        try:
            rows, cols, nnz = int(head[1]), int(head[2]), int(head[3])
        except ValueError as exc:
            raise InvalidArgument(f"bad smat header: {lines[0]!r}") from exc
        if head[4] == "Q":
            field = Q
        elif head[4].startswith("Fp:"):
            field = int(head[4][3:])
        else:
            raise InvalidArgument(f"unknown field {head[4]!r}")
        if len(lines) - 1 != nnz:
            raise InvalidArgument(f"header says {nnz} entries, found {len(lines) - 1}")
        ent = {}
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise InvalidArgument(f"bad smat entry line: {ln!r}")
            r, c = int(parts[0]) - 1, int(parts[1]) - 1
            ent[(r, c)] = Fraction(parts[2]) if field == Q else int(parts[2])
        return cls(rows, cols, ent, field)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> SparseMatrix:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())
