"""Dense GF(2) linear algebra on machine-word bitsets.

A vector of length ``k`` is a plain ``int``; coordinate ``i`` (0-based) is
bit ``i``.  Lengths are limited to 64 coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_BITS = 64

BitVector = int


def weight(v: BitVector) -> int:
    return v.bit_count()


def parity(v: BitVector) -> int:
    return v.bit_count() & 1


def bits_to_int(bits: Sequence[int]) -> BitVector:
    """Pack a 0/1 sequence (coordinate 0 first) into an int."""
    v = 0
    for i, b in enumerate(bits):
        if b:
            v |= 1 << i
    return v


def int_to_bits(v: BitVector, k: int) -> list[int]:
    return [(v >> i) & 1 for i in range(k)]


def coords_mask(coords: Iterable[int]) -> int:
    m = 0
    for i in coords:
        m |= 1 << i
    return m


def _check_width(k: int) -> None:
    if not 0 <= k <= MAX_BITS:
        raise ValueError(f"vector length {k} outside 0..{MAX_BITS}")


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; each row is an int of ``ncols`` bits."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        _check_width(self.ncols)
        limit = 1 << self.ncols
        for r in self.rows:
            if not 0 <= r < limit:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("rows have unequal length")
        return cls(tuple(bits_to_int(r) for r in rows), ncols)

    def to_lists(self) -> list[list[int]]:
        return [int_to_bits(r, self.ncols) for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def __len__(self) -> int:
        return len(self.rows)


def _rows_of(M) -> tuple[list[int], int]:
    if isinstance(M, BitMatrix):
        return list(M.rows), M.ncols
    basis = getattr(M, "basis", None)
    if basis is not None:
        return list(basis), M.ambient_k
    raise TypeError(f"expected BitMatrix or Subspace, got {type(M).__name__}")


def _reduce(rows: list[int]) -> list[int]:
    """Fully reduced echelon rows, pivot = lowest set bit, sorted by pivot."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            if r & (b & -b):
                r ^= b
        if r == 0:
            continue
        low = r & -r
        # clear the new pivot from the existing rows
        basis = [b ^ r if b & low else b for b in basis]
        basis.append(r)
    basis.sort(key=lambda b: b & -b)
    return basis


def rref(M: BitMatrix) -> BitMatrix:
    """Reduced row echelon form with zero rows removed.

    The pivot of a row is its lowest set coordinate and rows are ordered by
    pivot, so the result is a canonical key for the row space.
    """
    rows, c = _rows_of(M)
    return BitMatrix(tuple(_reduce(rows)), c)


def rank(M: BitMatrix) -> int:
    rows, _ = _rows_of(M)
    return len(_reduce(rows))


def kernel_basis(M: BitMatrix) -> list[BitVector]:
    """Basis of ``{x : Mx = 0}``, one vector per free column."""
    rows, c = _rows_of(M)
    red = _reduce(rows)
    pivots = [(b & -b).bit_length() - 1 for b in red]
    pivot_set = set(pivots)
    out = []
    for f in range(c):
        if f in pivot_set:
            continue
        x = 1 << f
        for p, b in zip(pivots, red):
            if (b >> f) & 1:
                x |= 1 << p
        out.append(x)
    return out


def span_elements(rows: Sequence[int]) -> list[int]:
    """All 2^r elements of the span of linearly independent ``rows``."""
    elems = [0]
    for b in rows:
        elems += [e ^ b for e in elems]
    return elems


def projected_dim(U, coords: Iterable[int]) -> int:
    """``dim U_I``: dimension of the projection of ``U`` onto ``coords``.

    ``U`` may be a Subspace or a BitMatrix whose rows span it.
    """
    rows, _ = _rows_of(U)
    mask = coords_mask(coords)
    return len(_reduce([r & mask for r in rows]))


def matvec(M: BitMatrix, x: BitVector) -> BitVector:
    """``Mx`` as an int with one bit per row of ``M``."""
    out = 0
    for i, r in enumerate(M.rows):
        if parity(r & x):
            out |= 1 << i
    return out


def transpose(M: BitMatrix) -> BitMatrix:
    r, c = M.shape
    cols = []
    for j in range(c):
        v = 0
        for i, row in enumerate(M.rows):
            if (row >> j) & 1:
                v |= 1 << i
        cols.append(v)
    return BitMatrix(tuple(cols), r)
