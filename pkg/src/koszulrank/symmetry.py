"""Symmetric-group action on flattening bases and orbit-reduced rank computation.

S_n acts on a basis element by applying the permutation to every index and
re-sorting each wedge factor, which costs a sign.  For a tensor invariant
under S_n (or under S_n up to the sign character, like the determinant) the
flattening commutes with this action, so S_n permutes the connected
components of the flattening matrix and transported components are the
same up to row/column order and signs.  The rank is therefore

    rank(M) = sum over orbit representatives a of n! * rank(M(a)) / |H_a|,

with ``H_a`` the permutations mapping the component of ``a`` to itself.
:func:`symmetric_rank` exploits this without ever building ``M``.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import BudgetExceeded, EquivarianceViolation, InvalidArgument
from .exact.elimination import eliminate
from .exterior import BasisElement, ProductBasis, WedgeIndex
from .flattening import FlatteningPlan, KoszulMap
from .sparse import SparseMatrix
from .tensor import Tensor, permutation_sign

__all__ = [
    "Permutation",
    "SignedBasisElement",
    "Component",
    "ComponentDecomposition",
    "OrbitClass",
    "ClassReport",
    "SymmetricRank",
    "symmetric_group",
    "act",
    "act_tensor",
    "equivariance_check",
    "connected_components",
    "orbit_classes",
    "symmetric_rank",
]


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``[n]`` given by its images ``(s(1), ..., s(n))``."""

    images: tuple[int, ...]

    def __post_init__(self):
        im = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", im)
        if sorted(im) != list(range(1, len(im) + 1)):
            raise InvalidArgument(f"not a permutation of 1..{len(im)}: {im}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition: ``(s * t)(i) = s(t(i))``."""
        if other.n != self.n:
            raise InvalidArgument("composing permutations of different degree")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def sign(self) -> int:
        return permutation_sign(self.images)

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def cycle(cls, n: int, *points: int) -> Permutation:
        """The cycle ``(points[0] points[1] ...)`` in S_n."""
        im = list(range(1, n + 1))
        for a, b in zip(points, points[1:] + points[:1]):
            im[a - 1] = b
        return cls(tuple(im))

    def __str__(self) -> str:
        return "(" + " ".join(map(str, self.images)) + ")"


def symmetric_group(n: int):
    """All of S_n in lexicographic order of image tuples."""
    return (Permutation(p) for p in itertools.permutations(range(1, n + 1)))


@lru_cache(maxsize=8192)
def _mask_table(images: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """``table[mask] = (sign, image mask)`` for the permutation with these images."""
    n = len(images)
    out = []
    for mask in range(1 << n):
        seq = [images[i] for i in range(n) if mask >> i & 1]
        inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
        m = 0
        for j in seq:
            m |= 1 << (j - 1)
        out.append((-1 if inv & 1 else 1, m))
    return tuple(out)


def act_raw(images: tuple[int, ...], kinds: tuple[bool, ...], raw: tuple[int, ...]) -> tuple[int, tuple]:
    """Action on a raw label; ``kinds[k]`` is true for wedge factors."""
    table = _mask_table(images)
    sign = 1
    out = []
    for x, is_wedge in zip(raw, kinds):
        if is_wedge:
            s, m = table[x]
            sign *= s
            out.append(m)
        else:
            out.append(images[x - 1])
    return sign, tuple(out)


@dataclass(frozen=True)
class SignedBasisElement:
    """``sign * element``; the element is always the sorted-support basis vector."""

    sign: int
    element: BasisElement

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + str(self.element)


def act(sigma: Permutation, x) -> SignedBasisElement:
    """Apply ``sigma`` to a (signed) basis element of a product basis."""
    if isinstance(x, BasisElement):
        x = SignedBasisElement(1, x)
    shape = x.element.shape
    for f in shape:
        if f.n != sigma.n:
            raise InvalidArgument(f"factor {f} does not match S_{sigma.n}")
    kinds = tuple(f.kind == "wedge" for f in shape)
    s, raw = act_raw(sigma.images, kinds, x.element.raw())
    comps = tuple(WedgeIndex.from_mask(f.n, r) if f.kind == "wedge" else r for r, f in zip(raw, shape))
    return SignedBasisElement(x.sign * s, BasisElement(comps, shape))


def act_tensor(sigma: Permutation, t: Tensor) -> Tensor:
    """``sigma . t``: every index of every mode is mapped through ``sigma``."""
    if any(m != sigma.n for m in t.dims):
        raise InvalidArgument("all modes must have dimension n for the S_n action")
    return Tensor(t.dims, {tuple(sigma(i) for i in idx): v for idx, v in t.entries.items()})


def _character(t: Tensor, sigma: Permutation) -> int | None:
    st = act_tensor(sigma, t)
    if st == t:
        return 1
    if st == -t:
        return -1
    return None


def equivariance_check(t: Tensor, plan: FlatteningPlan, sigma: Permutation, *, character: int | None = None,
                       budget: int = 200_000, seed: int = 0) -> bool:
    """Check ``Phi(sigma a) = chi(sigma) * sigma(Phi(a))`` on basis columns.

    ``chi`` is taken from how ``sigma`` moves ``t`` (``+1`` if it fixes
    ``t``, ``-1`` if it negates it) unless given.  Every column is checked
    when there are at most ``budget`` of them, otherwise a seeded sample.
    """
    km = KoszulMap(t, plan)
    if any(m != sigma.n for m in t.dims):
        raise InvalidArgument("all modes must have dimension n for the S_n action")
    if character is None:
        character = _character(t, sigma)
        if character is None:
            return False
    cb, rb = km.col_basis, km.row_basis
    ck = tuple(f.kind == "wedge" for f in cb.shape)
    rk = tuple(f.kind == "wedge" for f in rb.shape)
    im = sigma.images
    if cb.size <= budget:
        cols = cb.raw_elements()
    else:
        import random
        rnd = random.Random(seed)
        cols = (cb.raw(rnd.randrange(cb.size)) for _ in range(budget))
    for a in cols:
        sa, ta = act_raw(im, ck, a)
        lhs = {r: sa * v for r, v in km.column(ta).items()}
        rhs = {}
        for r, v in km.column(a).items():
            sb, tb = act_raw(im, rk, r)
            rhs[tb] = character * sb * v
        if lhs != rhs:
            return False
    return True


# -- connected components ------------------------------------------------

class _DisjointSet:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                ra, rb = rb, ra
            self.parent[ra] = rb


@dataclass
class Component:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    matrix: SparseMatrix

    @property
    def representative(self) -> int:
        return self.cols[0]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)


@dataclass
class ComponentDecomposition:
    """Connected components of the bipartite nonzero pattern of a matrix."""

    components: list[Component]
    orphan_cols: tuple[int, ...]
    orphan_rows: tuple[int, ...]
    classes: list = field(default_factory=list)

    def component_of_col(self) -> dict[int, int]:
        return {c: k for k, comp in enumerate(self.components) for c in comp.cols}


def connected_components(m: SparseMatrix) -> ComponentDecomposition:
    """Components by union-find; each sorted, listed by smallest column index."""
    ds = _DisjointSet(m.rows + m.cols)
    for (r, c) in m.entries:
        ds.union(r, m.rows + c)
    groups_r = defaultdict(list)
    groups_c = defaultdict(list)
    seen_r = set()
    seen_c = set()
    for (r, c) in m.entries:
        seen_r.add(r)
        seen_c.add(c)
    for r in sorted(seen_r):
        groups_r[ds.find(r)].append(r)
    for c in sorted(seen_c):
        groups_c[ds.find(m.rows + c)].append(c)
    comps = []
    for root, cols in sorted(groups_c.items(), key=lambda kv: kv[1][0]):
        rows = groups_r[root]
        comps.append(Component(tuple(rows), tuple(cols), m.submatrix(rows, cols)))
    orphan_cols = tuple(c for c in range(m.cols) if c not in seen_c)
    orphan_rows = tuple(r for r in range(m.rows) if r not in seen_r)
    return ComponentDecomposition(comps, orphan_cols, orphan_rows)


@dataclass
class OrbitClass:
    representative: int
    component: int
    stabilizer: list[Permutation]
    orbit: list[int]

    @property
    def class_size(self) -> int:
        return len(self.orbit)


def _assert_subgroup(h: list, compose, key, full_limit: int = 720) -> None:
    keys = {key(x) for x in h}
    sample = h if len(h) <= full_limit else h[:: max(1, len(h) // 50)]
    for a in sample:
        for b in h:
            if key(compose(a, b)) not in keys:
                raise EquivarianceViolation("stabilizer is not closed under composition")


def orbit_classes(m: SparseMatrix, n: int, decomposition: ComponentDecomposition | None = None,
                  *, p: int | None = None) -> list[OrbitClass]:
    """Partition the components of a full flattening into S_n-orbits by brute force.

    ``m.col_labels`` and ``m.row_labels`` must be the full product bases (as
    attached by :func:`~koszulrank.flattening.rkf_matrix`).  Verifies that
    orbit size times stabilizer order is ``n!`` and, when ``p`` is given,
    that every transported component has the same shape and F_p-rank.
    """
    cb, rb = m.col_labels, m.row_labels
    if not isinstance(cb, ProductBasis) or not isinstance(rb, ProductBasis):
        raise InvalidArgument("orbit_classes needs the full column/row product bases as labels")
    dec = decomposition or connected_components(m)
    comp_of = dec.component_of_col()
    kinds = tuple(f.kind == "wedge" for f in cb.shape)
    group = list(symmetric_group(n))
    nfact = math.factorial(n)
    assigned: dict[int, int] = {}
    classes = []
    ranks = {}
    for k, comp in enumerate(dec.components):
        if k in assigned:
            continue
        a = cb.raw(comp.representative)
        stab = []
        orbit = set()
        for sigma in group:
            _, img = act_raw(sigma.images, kinds, a)
            j = comp_of.get(cb.raw_index(img))
            if j is None:
                raise EquivarianceViolation("a transported column lost all its adjacent rows")
            other = dec.components[j]
            if other.shape != comp.shape:
                raise EquivarianceViolation("transported component has a different shape")
            if p is not None:
                if k not in ranks:
                    ranks[k] = _rank_component(comp.matrix, p)
                if j not in ranks:
                    ranks[j] = _rank_component(other.matrix, p)
                if ranks[j] != ranks[k]:
                    raise EquivarianceViolation("transported component has a different rank")
            orbit.add(j)
            if j == k:
                stab.append(sigma)
        if len(orbit) * len(stab) != nfact:
            raise EquivarianceViolation(f"orbit size {len(orbit)} times |H| = {len(stab)} is not {n}!")
        _assert_subgroup(stab, lambda x, y: x * y, lambda x: x.images)
        for j in orbit:
            assigned[j] = len(classes)
        classes.append(OrbitClass(comp.representative, k, stab, sorted(orbit)))
    dec.classes = classes
    return classes


def _rank_component(m: SparseMatrix, p: int) -> int:
    return eliminate(m.mod(p).row_dicts(), p, copy=False).rank


# -- orbit-reduced rank ----------------------------------------------------

@dataclass
class ClassReport:
    representative: int
    label: str
    rows: int
    cols: int
    stabilizer_order: int
    class_size: int
    rank: int

    @property
    def contribution(self) -> int:
        return self.class_size * self.rank

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["representative"] = self.representative + 1
        d["contribution"] = self.contribution
        return d


@dataclass
class SymmetricRank:
    n: int
    prime: int
    plan: FlatteningPlan
    size: tuple[int, int]
    classes: list[ClassReport]
    orphan_columns: int = 0
    complete: bool = True

    @property
    def rank(self) -> int:
        return sum(c.contribution for c in self.classes)

    def report(self) -> str:
        lines = [f"# orbit decomposition, n={self.n}, plan {self.plan}, F_p with p={self.prime}",
                 "# rep(1-based)  dims  |H_a|  class_size  rank  contribution"]
        for c in self.classes:
            lines.append(f"{c.representative + 1}  {c.rows}x{c.cols}  {c.stabilizer_order}  "
                         f"{c.class_size}  {c.rank}  {c.contribution}")
        state = "" if self.complete else "  (partial)"
        lines.append(f"total rank = sum n!*rank(M(a))/|H_a| = {self.rank}{state}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "prime": self.prime, "plan": str(self.plan),
                           "size": list(self.size), "rank": self.rank, "complete": self.complete,
                           "orphan_columns": self.orphan_columns,
                           "classes": [c.as_dict() for c in self.classes]}, indent=1)


def _content_key(t: Tensor):
    contents = {tuple(sorted(idx)) for idx in t.entries}
    return contents.pop() if len(contents) == 1 else None


def _young_subgroup(weight: tuple[int, ...]):
    n = len(weight)
    levels = defaultdict(list)
    for i, w in enumerate(weight, start=1):
        levels[w].append(i)
    blocks = list(levels.values())
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        im = [0] * n
        for block, perm in zip(blocks, choice):
            for a, b in zip(block, perm):
                im[a - 1] = b
        yield tuple(im)


def _columns_with_content(n: int, exps: tuple[int, ...], counts: list[int]):
    """Tuples of wedge masks of sizes ``exps`` whose joint content is ``counts``."""
    s = len(exps)
    out = []
    cur = []

    def rec(t: int):
        if t == s:
            if not any(counts):
                out.append(tuple(cur))
            return
        left = s - t
        if any(c > left for c in counts):
            return
        forced = [i for i in range(n) if counts[i] == left]
        if len(forced) > exps[t]:
            return
        avail = [i for i in range(n) if counts[i] > 0 and counts[i] < left]
        for extra in itertools.combinations(avail, exps[t] - len(forced)):
            chosen = forced + list(extra)
            m = 0
            for i in chosen:
                m |= 1 << i
                counts[i] -= 1
            cur.append(m)
            rec(t + 1)
            cur.pop()
            for i in chosen:
                counts[i] += 1

    rec(0)
    return out


def _canonical_seeds(n: int, exps: tuple[int, ...]):
    """Raw columns whose weight (content minus the dual index) is nonincreasing."""
    s = len(exps)
    total = sum(exps)
    seeds = []
    # contents: counts vectors with entries <= s summing to total
    def contents(i, left, acc):
        if i == n:
            if left == 0:
                yield tuple(acc)
            return
        for c in range(min(s, left), -1, -1):
            acc.append(c)
            yield from contents(i + 1, left - c, acc)
            acc.pop()

    for c in contents(0, total, []):
        for j in range(1, n + 1):
            w = list(c)
            w[j - 1] -= 1
            if any(w[i] < w[i + 1] for i in range(n - 1)):
                continue
            for masks in _columns_with_content(n, exps, list(c)):
                seeds.append(masks + (j,))
    return seeds


def _component_from_seed(km: KoszulMap, seed: tuple):
    """Breadth-first closure of one connected component, columns and rows as raw labels."""
    cols = {seed: 0}
    rows: dict[tuple, int] = {}
    row_dicts: list[dict] = []
    frontier = [seed]
    col_list = [seed]
    while frontier:
        nxt = []
        for col in frontier:
            for row in km.column(col):
                if row in rows:
                    continue
                rows[row] = len(rows)
                row_dicts.append({})
                for c2 in km.row(row):
                    if c2 not in cols:
                        cols[c2] = len(cols)
                        col_list.append(c2)
                        nxt.append(c2)
        frontier = nxt
    for row, ri in rows.items():
        rd = row_dicts[ri]
        for c2, v in km.row(row).items():
            rd[cols[c2]] = v
    return col_list, list(rows), row_dicts


def _rank_job(args):
    """F_p-rank of one component, or ``None`` if the deadline passes first."""
    row_dicts, p, deadline = args
    rows = []
    for r in row_dicts:
        rows.append({c: x for c, v in r.items() if (x := v % p)})
    try:
        return eliminate(rows, p, copy=False, deadline=deadline).rank
    except BudgetExceeded:
        return None


def _out_of_budget(ranker: _Ranker):
    ranker.close()
    result = ranker.result
    result.complete = False
    result.classes.sort(key=lambda c: c.representative)
    exc = BudgetExceeded("symmetric rank ran past its budget")
    exc.partial = result
    raise exc


class _Ranker:
    """Runs component rank jobs inline or in a process pool, recording results as they land."""

    def __init__(self, result: SymmetricRank, p: int, threads: int, deadline, checkpoint):
        self.result = result
        self.p = p
        self.deadline = deadline
        self.checkpoint = checkpoint
        self.timed_out = False
        self.pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
        self.limit = 2 * threads
        self.inflight = []

    def submit(self, report: ClassReport, row_dicts) -> None:
        job = (row_dicts, self.p, self.deadline)
        if self.pool is None:
            self._record(report, _rank_job(job))
            return
        self.inflight.append((report, self.pool.submit(_rank_job, job)))
        while len(self.inflight) >= self.limit:
            report, fut = self.inflight.pop(0)
            self._record(report, fut.result())

    def close(self) -> None:
        for report, fut in self.inflight:
            self._record(report, fut.result())
        self.inflight = []
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None

    def abandon(self) -> None:
        if self.pool is not None:
            self.pool.shutdown(cancel_futures=True)
            self.pool = None

    def _record(self, report: ClassReport, r) -> None:
        if r is None:
            self.timed_out = True
            return
        report.rank = r
        self.result.classes.append(report)
        if self.checkpoint is not None:
            with open(self.checkpoint, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"n": self.result.n, "p": self.p, "plan": str(self.result.plan),
                                     "rep": report.representative, "rank": r}) + "\n")


def symmetric_rank(t: Tensor, plan: FlatteningPlan | None, p: int, *, threads: int = 1,
                   deadline: float | None = None, checkpoint=None) -> SymmetricRank:
    """F_p-rank of the flattening of an S_n-(sign-)invariant tensor via orbit classes.

    Only one component per S_n-orbit is generated (lazily, from a seed
    column) and eliminated.  When every tensor entry has the same index
    content, as for det_n and perm_n, a component's weight (Koszul content
    minus the dual index) is invariant, so only seeds of nonincreasing
    weight are visited and saturation runs over the weight's Young subgroup.

    ``checkpoint`` names a JSON-lines file; finished classes are appended
    and reused on a rerun.  With ``deadline`` hit, :class:`BudgetExceeded`
    is raised carrying the partial result as ``.partial``.
    """
    n = t.order
    if plan is None:
        plan = FlatteningPlan.default(n)
    if any(m != n for m in t.dims):
        raise InvalidArgument("symmetric_rank needs an order-n tensor with all dimensions n")
    for g in (Permutation.cycle(n, 1, 2), Permutation.cycle(n, *range(1, n + 1))):
        if _character(t, g) is None:
            raise EquivarianceViolation("tensor is not S_n-invariant up to sign")
    km = KoszulMap(t, plan)
    cb = km.col_basis
    kinds = tuple(f.kind == "wedge" for f in cb.shape)
    nfact = math.factorial(n)
    done = _read_checkpoint(checkpoint, n, p, plan)

    if _content_key(t) is not None:
        seeds = sorted(_canonical_seeds(n, plan.exponents), key=cb.raw_index)
        # for the default-style plans every Koszul mode is a wedge factor;
        # the weight of a raw column is its content minus the dual index
        def weight_of(raw):
            w = [0] * n
            for m in raw[:-1]:
                for i in range(n):
                    if m >> i & 1:
                        w[i] += 1
            w[raw[-1] - 1] -= 1
            return tuple(w)
    else:
        seeds = list(cb.raw_elements())
        weight_of = None

    result = SymmetricRank(n, p, plan, (km.row_basis.size, cb.size), [])
    covered: set = set()
    ranker = _Ranker(result, p, threads, deadline, checkpoint)
    group_cache: dict = {}
    try:
        for seed in seeds:
            if seed in covered:
                continue
            if ranker.timed_out or (deadline is not None and time.monotonic() > deadline):
                _out_of_budget(ranker)
            col_list, row_list, row_dicts = _component_from_seed(km, seed)
            if not row_list:
                covered.add(seed)
                result.orphan_columns += 1
                continue
            colset = set(col_list)
            if weight_of is None:
                perms = group_cache.setdefault(None, [s.images for s in symmetric_group(n)])
            else:
                wt = weight_of(seed)
                perms = group_cache.get(wt)
                if perms is None:
                    perms = group_cache[wt] = list(_young_subgroup(wt))
            stab = []
            for im in perms:
                _, img = act_raw(im, kinds, seed)
                if img in colset:
                    stab.append(im)
                elif img not in covered:
                    for c in col_list:
                        covered.add(act_raw(im, kinds, c)[1])
            covered.update(colset)
            _assert_subgroup(stab, lambda a, b: tuple(a[j - 1] for j in b), lambda x: x)
            if nfact % len(stab):
                raise EquivarianceViolation(f"|H_a| = {len(stab)} does not divide {n}!")
            rep = cb.raw_index(seed)
            report = ClassReport(rep, str(cb.element(seed)), len(row_list), len(col_list), len(stab),
                                 nfact // len(stab), -1)
            if rep in done:
                report.rank = done[rep]
                result.classes.append(report)
            else:
                ranker.submit(report, row_dicts)
        ranker.close()
        if ranker.timed_out:
            _out_of_budget(ranker)
    finally:
        ranker.abandon()
    result.classes.sort(key=lambda c: c.representative)
    return result


def _read_checkpoint(path, n, p, plan) -> dict[int, int]:
    if path is None:
        return {}
    done = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                if rec["n"] == n and rec["p"] == p and rec["plan"] == str(plan):
                    done[rec["rep"]] = rec["rank"]
    except FileNotFoundError:
        pass
    return done
