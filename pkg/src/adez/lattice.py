"""ADE root lattices: Cartan matrices, fundamental weights, discriminant cosets.

Every vector is stored in simple-root coordinates; the inner product of two
coordinate vectors ``x`` and ``y`` is ``x^T G y`` with ``G`` the Cartan matrix.
All quantities here are exact (``int`` / ``Fraction``).  Norm enumeration uses
floating point only to generate a superset of candidates; membership and norm
values are decided in integer arithmetic.
"""

from __future__ import annotations

import bisect
import functools
import math
import os
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

MAX_RANK = 24
DEFAULT_MAX_VECTORS = 10**7
_CHUNK = 200_000

Matrix = tuple[tuple[int, ...], ...]
QMatrix = tuple[tuple[Fraction, ...], ...]
QVector = tuple[Fraction, ...]


class EnumerationLimitError(RuntimeError):
    """Raised when a norm bound would exceed the configured vector-count ceiling."""


def max_vectors() -> int:
    return int(os.environ.get("ADEZ_MAX_VECTORS", DEFAULT_MAX_VECTORS))


@dataclass(frozen=True, order=True)
class LatticeSpec:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("A", "D", "E"):
            raise ValueError(f"unknown family {self.family!r}; valid families are A, D, E")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool):
            raise ValueError("rank must be an integer")
        if self.family == "A" and self.rank < 1:
            raise ValueError("A_n needs n >= 1")
        if self.family == "D" and self.rank < 3:
            raise ValueError("D_n needs n >= 3")
        if self.family == "E" and self.rank not in (6, 7, 8):
            raise ValueError("E_n exists only for n in {6, 7, 8}")
        if self.rank > MAX_RANK:
            raise ValueError(f"rank {self.rank} exceeds the configured ceiling {MAX_RANK}")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def k(self) -> Fraction:
        return Fraction(self.rank, 2)


_SPEC_RE = re.compile(r"^\s*([A-Za-z])\s*_?\s*(\d+)\s*$")


def parse_spec(text: str) -> LatticeSpec:
    """Parse strings such as ``"A4"``, ``"D5"``, ``"E8"`` (``"e_8"`` also accepted)."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse lattice spec {text!r}; expected e.g. A4, D5, E8 "
                         "(valid families: A, D, E)")
    return LatticeSpec(m.group(1).upper(), int(m.group(2)))


DEFAULT_SPECS: tuple[LatticeSpec, ...] = (
    *(LatticeSpec("A", n) for n in range(1, 9)),
    *(LatticeSpec("D", n) for n in range(4, 9)),
    LatticeSpec("E", 6),
    LatticeSpec("E", 7),
    LatticeSpec("E", 8),
)


# --------------------------------------------------------------------------
# exact linear algebra


def _bourbaki_edges(spec: LatticeSpec) -> list[tuple[int, int]]:
    n = spec.rank
    if spec.family == "A":
        return [(i, i + 1) for i in range(1, n)]
    if spec.family == "D":
        return [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
    # E_n: chain 1-3-4-...-n, node 2 attached to 4
    return [(1, 3)] + [(i, i + 1) for i in range(3, n)] + [(2, 4)]


def cartan_matrix(spec: LatticeSpec) -> Matrix:
    """Cartan matrix in Bourbaki numbering; it is the Gram matrix of the simple roots."""
    n = spec.rank
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in _bourbaki_edges(spec):
        g[i - 1][j - 1] = g[j - 1][i - 1] = -1
    return tuple(tuple(row) for row in g)


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination; exact for integer matrices."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_inverse(m: Sequence[Sequence[int]]) -> QMatrix:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def ldl_diagonal(m: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    """Diagonal of the exact LDL^T factorisation (squared Gram-Schmidt lengths)."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    d = []
    for k in range(n):
        d.append(a[k][k])
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k + 1, n):
                a[i][j] -= f * a[k][j]
    return tuple(d)


def fundamental_weights(spec: LatticeSpec) -> QMatrix:
    """Rows are the fundamental weights in simple-root coordinates.

    Since ``(alpha_j, w_a) = delta_ja``, the coordinate matrix is the inverse
    Cartan matrix, which is also the Gram matrix of the weights.
    """
    return rational_inverse(cartan_matrix(spec))


# --------------------------------------------------------------------------
# discriminant data


@dataclass(frozen=True)
class DiscriminantData:
    spec: LatticeSpec
    gram: Matrix
    weight_gram: QMatrix
    l: int
    cosets: tuple[QVector, ...]
    labels: tuple[str, ...]
    group_type: str  # "cyclic" | "klein_four"
    k: Fraction
    covering_radius_sq_bound: Fraction = field(repr=False)

    @property
    def rank(self) -> int:
        return self.spec.rank

    def inner(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        g = self.gram
        return sum((x[i] * g[i][j] * y[j] for i in range(self.rank) for j in range(self.rank)
                    if g[i][j]), Fraction(0))

    def coset_inner(self, a: int, b: int) -> Fraction:
        return self.inner(self.cosets[a], self.cosets[b])

    def coset_norm(self, a: int) -> Fraction:
        return self.coset_inner(a, a)

    def in_root_lattice(self, x: Sequence[Fraction]) -> bool:
        return all(Fraction(c).denominator == 1 for c in x)

    def coset_of(self, x: Sequence[Fraction]) -> int:
        """Index of the coset containing the weight ``x``."""
        for a, w in enumerate(self.cosets):
            if self.in_root_lattice([xi - wi for xi, wi in zip(x, w)]):
                return a
        raise ValueError("vector is not in the weight lattice")

    def negation_index(self, a: int) -> int:
        return self.coset_of([-c for c in self.cosets[a]])

    @property
    def group_tag(self) -> str:
        return "klein_four" if self.group_type == "klein_four" else f"cyclic({self.l})"


def _coset_indices(spec: LatticeSpec) -> list[int]:
    """1-based fundamental weight indices used as coset representatives, in storage order."""
    n = spec.rank
    if spec.family == "A":
        return list(range(1, n + 1))
    if spec.family == "D":
        if n % 2:
            # spinor, vector, other spinor: class a is a times class 1
            return [n - 1, 1, n]
        return [1, n - 1, n]
    return {6: [1, 6], 7: [7], 8: []}[n]


def discriminant_data(spec: LatticeSpec) -> DiscriminantData:
    gram = cartan_matrix(spec)
    wg = rational_inverse(gram)
    l = determinant(gram)
    idx = _coset_indices(spec)
    zero = tuple(Fraction(0) for _ in range(spec.rank))
    cosets = (zero, *(wg[i - 1] for i in idx))
    labels = ("0", *(f"w{i}" for i in idx))
    group = "klein_four" if spec.family == "D" and spec.rank % 2 == 0 else "cyclic"
    mu2 = sum(ldl_diagonal(gram), Fraction(0)) / 4
    return DiscriminantData(spec, gram, wg, l, cosets, labels, group, spec.k, mu2)


# --------------------------------------------------------------------------
# norm enumeration


@dataclass(frozen=True)
class NormSpectrum:
    """Norm values ``(gamma + w_a, gamma + w_a)`` for ``gamma`` in Q, with multiplicities.

    For coset 0 the zero vector is excluded.  Every vector with norm at most
    ``bound`` is counted.
    """

    coset_index: int
    bound: Fraction
    norms: tuple[Fraction, ...]
    counts: tuple[int, ...]

    def __iter__(self):
        return iter(zip(self.norms, self.counts))

    def __len__(self) -> int:
        return len(self.norms)

    @functools.cached_property
    def norm_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.norms])

    @functools.cached_property
    def count_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=float)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def truncate(self, bound) -> "NormSpectrum":
        bound = Fraction(bound)
        if bound > self.bound:
            raise ValueError("cannot truncate to a larger bound")
        cut = bisect.bisect_right(self.norms, bound)
        return NormSpectrum(self.coset_index, bound, self.norms[:cut], self.counts[:cut])


def count_upper_bound(data: DiscriminantData, x: float) -> float:
    """Upper bound on the number of coset vectors with norm <= x.

    Voronoi cells (volume sqrt(l)) of vectors in the ball of radius sqrt(x)
    lie in the ball of radius sqrt(x) + mu, mu the covering radius.
    """
    r = data.rank
    mu = math.sqrt(data.covering_radius_sq_bound)
    vol = math.pi ** (r / 2) / math.gamma(r / 2 + 1)
    return vol * (math.sqrt(max(x, 0.0)) + mu) ** r / math.sqrt(data.l)


def enumerate_shifted(gram: Matrix, shift: Sequence[Fraction], bound,
                      limit: int | None = None) -> dict[Fraction, int]:
    """Count ``gamma`` in Z^r with ``(gamma+shift)^T G (gamma+shift) <= bound``.

    Depth-first over chunks, breadth-first within a chunk.  Candidates come from a
    float Cholesky factor widened by a slack far above rounding error; the
    final norm test is exact.
    """
    bound = Fraction(bound)
    if bound < 0:
        return {}
    limit = max_vectors() if limit is None else limit
    r = len(gram)
    den = math.lcm(*(Fraction(c).denominator for c in shift)) if r else 1
    p = np.array([int(Fraction(c) * den) for c in shift], dtype=np.int64)
    g_int = np.array(gram, dtype=np.int64)
    bnum = math.floor(bound * den * den)
    rmat = np.linalg.cholesky(g_int.astype(float)).T
    w = p / den
    slack = 1e-7 * (1.0 + float(bound))
    counts: dict[int, int] = {}
    seen = [0]

    def finish(n: np.ndarray) -> None:
        x = den * n + p
        q = np.einsum("ij,jk,ik->i", x, g_int, x)
        q = q[q <= bnum]
        seen[0] += q.size
        if seen[0] > limit:
            raise EnumerationLimitError(
                f"more than {limit} vectors below norm {bound}; raise ADEZ_MAX_VECTORS "
                "or lower the bound")
        vals, cnt = np.unique(q, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c

    def expand(level: int, n: np.ndarray, rem: np.ndarray) -> None:
        if level < 0:
            finish(n)
            return
        rii = rmat[level, level]
        c = (n[:, level + 1:] + w[level + 1:]) @ rmat[level, level + 1:]
        rad = np.sqrt(np.maximum(rem, 0.0) + slack) / rii
        centre = -c / rii - w[level]
        lo = np.ceil(centre - rad).astype(np.int64)
        hi = np.floor(centre + rad).astype(np.int64)
        num = np.maximum(hi - lo + 1, 0)
        total = int(num.sum())
        if total == 0:
            return
        if total > _CHUNK and len(n) > 1:
            edges = np.searchsorted(np.cumsum(num), np.arange(_CHUNK, total, _CHUNK))
            start = 0
            for e in list(edges) + [len(n)]:
                e = max(int(e), start + 1)
                if start < len(n):
                    expand(level, n[start:e], rem[start:e])
                start = e
            return
        rows = np.repeat(np.arange(len(n)), num)
        offs = np.arange(total) - np.repeat(np.cumsum(num) - num, num)
        child = n[rows].copy()
        child[:, level] = lo[rows] + offs
        y = rii * (child[:, level] + w[level]) + c[rows]
        expand(level - 1, child, rem[rows] - y * y)

    expand(r - 1, np.zeros((1, r), dtype=np.int64), np.array([float(bound)]))
    return {Fraction(v, den * den): c for v, c in sorted(counts.items())}


_cache: dict[tuple[LatticeSpec, int], NormSpectrum] = {}
_cache_lock = threading.Lock()


def enumerate_norms(data: DiscriminantData, coset_index: int, bound,
                    limit: int | None = None) -> NormSpectrum:
    """Norm spectrum of coset ``coset_index`` up to ``bound`` (cached per lattice)."""
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    if not 0 <= coset_index < data.l:
        raise ValueError(f"coset index {coset_index} out of range for l = {data.l}")
    key = (data.spec, coset_index)
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None and hit.bound >= bound:
        return hit.truncate(bound) if hit.bound > bound else hit
    limit = max_vectors() if limit is None else limit
    r = data.rank
    vol = math.pi ** (r / 2) / math.gamma(r / 2 + 1)
    if vol * float(bound) ** (r / 2) / math.sqrt(data.l) > limit:
        raise EnumerationLimitError(
            f"norm bound {bound} for {data.spec} needs roughly "
            f"{vol * float(bound) ** (r / 2) / math.sqrt(data.l):.3g} vectors (limit {limit})")
    raw = enumerate_shifted(data.gram, data.cosets[coset_index], bound, limit)
    if coset_index == 0:
        raw.pop(Fraction(0), None)
    spec = NormSpectrum(coset_index, bound, tuple(raw), tuple(raw.values()))
    with _cache_lock:
        old = _cache.get(key)
        if old is None or old.bound < bound:
            _cache[key] = spec
    return spec


def spectra(data: DiscriminantData, bound) -> list[NormSpectrum]:
    return [enumerate_norms(data, a, bound) for a in range(data.l)]


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()
