"""Subspaces of F_2^k: canonical form, lattice enumeration, robustness.

A subspace is identified by its reduced row echelon basis, so equality and
hashing are structural.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .gf2core import (
    BitMatrix,
    _reduce,
    coords_mask,
    projected_dim,
    span_elements,
)

K_MAX = 5


@dataclass(frozen=True)
class Subspace:
    ambient_k: int
    basis: tuple[int, ...]

    def __post_init__(self):
        if list(self.basis) != _reduce(list(self.basis)):
            raise ValueError("basis is not in reduced row echelon form")
        if any(b >> self.ambient_k for b in self.basis):
            raise ValueError("basis vector exceeds ambient dimension")

    @classmethod
    def span(cls, k: int, vectors) -> "Subspace":
        return cls(k, tuple(_reduce(list(vectors))))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def elements(self) -> list[int]:
        return span_elements(self.basis)

    def __contains__(self, v: int) -> bool:
        for b in self.basis:
            if v & (b & -b):
                v ^= b
        return v == 0

    def is_subspace_of(self, other: "Subspace") -> bool:
        return self.ambient_k == other.ambient_k and all(b in other for b in self.basis)

    def as_matrix(self) -> BitMatrix:
        return BitMatrix(self.basis, self.ambient_k)

    def __repr__(self) -> str:
        k = self.ambient_k
        rows = ",".join("".join(str((b >> i) & 1) for i in range(k)) for b in self.basis)
        return f"Subspace(k={k}, [{rows}])"


def zero_space(k: int) -> Subspace:
    return Subspace(k, ())


def full_space(k: int) -> Subspace:
    return Subspace(k, tuple(1 << i for i in range(k)))


def even_space(k: int) -> Subspace:
    """E^k, the even-weight vectors of F_2^k."""
    return Subspace(k, tuple((1 << i) | (1 << (k - 1)) for i in range(k - 1)))


def pairing_space(k: int, pairs) -> Subspace:
    """The subspace ``{v : v_i = v_j for each pair}``; pairs partition range(k)."""
    seen = sorted(i for p in pairs for i in p)
    if seen != list(range(k)) or any(len(p) != 2 for p in pairs):
        raise ValueError("pairs must partition the coordinates into 2-sets")
    return Subspace.span(k, [coords_mask(p) for p in pairs])


def gaussian_binomial(k: int, d: int, q: int = 2) -> int:
    if d < 0 or d > k:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (k - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(k: int, d: int, k_max: int = K_MAX) -> Iterator[Subspace]:
    """Yield every d-dimensional subspace of F_2^k exactly once.

    Walks pivot patterns: for each choice of pivot coordinates every
    assignment of the free entries (non-pivot coordinates above a row's
    pivot) gives a distinct RREF basis.
    """
    if k > k_max:
        raise ValueError(f"k={k} exceeds k_max={k_max}")
    if not 0 <= d <= k:
        raise ValueError(f"need 0 <= d <= k, got d={d}, k={k}")
    for pivots in itertools.combinations(range(k), d):
        pset = set(pivots)
        free = [[c for c in range(p + 1, k) if c not in pset] for p in pivots]
        slots = [(r, c) for r, cols in enumerate(free) for c in cols]
        for fill in range(1 << len(slots)):
            rows = [1 << p for p in pivots]
            for s, (r, c) in enumerate(slots):
                if (fill >> s) & 1:
                    rows[r] |= 1 << c
            yield Subspace(k, tuple(rows))


def all_subspaces(k: int, k_max: int = K_MAX) -> list[Subspace]:
    """Every subspace of F_2^k, ordered by dimension then basis."""
    return [U for d in range(k + 1) for U in enumerate_subspaces(k, d, k_max)]


def subspaces_of(U: Subspace, k_max: int = K_MAX) -> list[Subspace]:
    """All V <= U, by enumerating F_2^dim(U) and mapping through U's basis."""
    out = []
    for W in all_subspaces(U.dim, k_max=max(k_max, U.dim)):
        img = []
        for w in W.basis:
            v = 0
            for i, b in enumerate(U.basis):
                if (w >> i) & 1:
                    v ^= b
            img.append(v)
        out.append(Subspace.span(U.ambient_k, img))
    return out


def sensitive_coords(U: Subspace) -> frozenset[int]:
    """Coordinates whose deletion drops the dimension of U by one."""
    k, d = U.ambient_k, U.dim
    return frozenset(
        i for i in range(k) if projected_dim(U, [j for j in range(k) if j != i]) == d - 1
    )


def is_robust(U: Subspace) -> bool:
    return not sensitive_coords(U)


def mobius_coefficient(j: int) -> int:
    """Moebius function of the subspace lattice over F_2 between ranks differing by j."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return (-1) ** j * 2 ** (j * (j - 1) // 2)


class SubspaceKind(enum.Enum):
    EVEN_SPACE = "EvenSpace"
    PAIRING_PRODUCT = "PairingProduct"
    EVEN_PRODUCT = "EvenProduct"
    OTHER = "Other"


@dataclass(frozen=True)
class SubspaceClass:
    kind: SubspaceKind
    parts: tuple[int, ...] = field(default=())
    blocks: tuple[tuple[int, ...], ...] = field(default=())


def coordinate_blocks(U: Subspace) -> list[tuple[int, ...]]:
    """Finest partition of the coordinates with U the direct sum of its block projections.

    These are the connected components of the column matroid of U: every
    non-pivot coordinate is linked to the pivots of the rows that use it.
    """
    k = U.ambient_k
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in U.basis:
        p = (b & -b).bit_length() - 1
        rest = b ^ (1 << p)
        while rest:
            c = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            parent[find(c)] = find(p)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(g) for g in groups.values())


def _block_is_even(U: Subspace, block) -> bool:
    mask = coords_mask(block)
    proj = _reduce([b & mask for b in U.basis])
    return len(block) >= 2 and len(proj) == len(block) - 1 and all(
        p.bit_count() % 2 == 0 for p in proj
    )


def classify(U: Subspace) -> SubspaceClass:
    """Recognise E^k, pairing spaces and other direct sums of even-weight spaces.

    Detection is up to coordinate permutation; ``parts`` lists the block
    sizes in decreasing order.
    """
    blocks = coordinate_blocks(U)
    if not all(_block_is_even(U, blk) for blk in blocks):
        return SubspaceClass(SubspaceKind.OTHER)
    parts = tuple(sorted((len(b) for b in blocks), reverse=True))
    if len(blocks) == 1:
        return SubspaceClass(SubspaceKind.EVEN_SPACE, parts, tuple(blocks))
    if all(p == 2 for p in parts):
        return SubspaceClass(SubspaceKind.PAIRING_PRODUCT, parts, tuple(blocks))
    return SubspaceClass(SubspaceKind.EVEN_PRODUCT, parts, tuple(blocks))
