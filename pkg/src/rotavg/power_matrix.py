"""Power matrices of direction-cosine products and their symmetry group.

A product of n direction cosines is recorded, after collecting like factors,
by a 3x3 matrix of nonnegative exponents: entry (i, m) counts how many
factors pair lab axis i with molecular axis m.  Row permutations, column
permutations and transposition (72 operations in total) change the uniform
rotational average of the product by at most a sign, so orbit-minimal
representatives make good cache keys for the evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

Rows = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]
Flat = tuple[int, ...]
Perm = tuple[int, int, int]


@dataclass(frozen=True)
class PowerMatrix:
    """3x3 matrix of nonnegative integer exponents, row-major."""

    rows: Rows

    def __post_init__(self):
        rows = tuple(tuple(int(e) for e in row) for row in self.rows)
        if len(rows) != 3 or any(len(row) != 3 for row in rows):
            raise ValueError("power matrix must be 3x3")
        if any(e < 0 for row in rows for e in row):
            raise ValueError("power matrix entries must be nonnegative")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_flat", rows[0] + rows[1] + rows[2])

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "PowerMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def from_flat(cls, flat: Sequence[int]) -> "PowerMatrix":
        flat = tuple(flat)
        if len(flat) != 9:
            raise ValueError("flat power matrix needs exactly 9 entries")
        return cls((flat[0:3], flat[3:6], flat[6:9]))

    @property
    def flat(self) -> Flat:
        """Row-major 9-tuple of the entries."""
        return self._flat

    @property
    def rank(self) -> int:
        """Total number of direction-cosine factors (sum of all entries)."""
        return sum(self._flat)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    def __str__(self) -> str:
        return "[" + ", ".join(str(list(row)) for row in self.rows) + "]"


@dataclass(frozen=True)
class MultiIndex:
    """Paired lab/molecular axis lists, one-based values in {1, 2, 3}."""

    lab: tuple[int, ...]
    mol: tuple[int, ...]

    def __post_init__(self):
        lab = tuple(int(i) for i in self.lab)
        mol = tuple(int(i) for i in self.mol)
        if len(lab) != len(mol):
            raise ValueError("lab and molecular index lists must have equal length")
        if any(i not in (1, 2, 3) for i in lab + mol):
            raise ValueError("indices must lie in {1, 2, 3}")
        object.__setattr__(self, "lab", lab)
        object.__setattr__(self, "mol", mol)

    def __len__(self) -> int:
        return len(self.lab)


def from_multi_index(m: MultiIndex) -> PowerMatrix:
    """Collect like factors: entry (i, lam) counts positions pairing i with lam."""
    flat = [0] * 9
    for i, lam in zip(m.lab, m.mol):
        flat[3 * (i - 1) + (lam - 1)] += 1
    return PowerMatrix.from_flat(flat)


def selection_rule(chi: PowerMatrix) -> bool:
    """True iff every row and column sum of chi has the same parity as its rank.

    This is a necessary condition for the rotational average to be nonzero:
    conjugating by coordinate reflections flips the sign of any product whose
    exponent rows or columns are parity-unbalanced.
    """
    return _selection_flat(chi.flat)


def _selection_flat(f: Flat) -> bool:
    n_par = (f[0] + f[1] + f[2] + f[3] + f[4] + f[5] + f[6] + f[7] + f[8]) & 1
    return (
        (f[0] + f[1] + f[2]) & 1 == n_par
        and (f[3] + f[4] + f[5]) & 1 == n_par
        and (f[6] + f[7] + f[8]) & 1 == n_par
        and (f[0] + f[3] + f[6]) & 1 == n_par
        and (f[1] + f[4] + f[7]) & 1 == n_par
        and (f[2] + f[5] + f[8]) & 1 == n_par
    )


def determinant(chi: PowerMatrix) -> int:
    """Exact integer determinant of the 3x3 exponent matrix."""
    return _det_flat(chi.flat)


def _det_flat(f: Flat) -> int:
    return (
        f[0] * (f[4] * f[8] - f[5] * f[7])
        - f[1] * (f[3] * f[8] - f[5] * f[6])
        + f[2] * (f[3] * f[7] - f[4] * f[6])
    )


def _perm_sign(p: Perm) -> int:
    sign = 1
    for i in range(3):
        for j in range(i + 1, 3):
            if p[i] > p[j]:
                sign = -sign
    return sign


def _compose_perm(p1: Perm, p2: Perm) -> Perm:
    # (p1 after p2): output slot i reads from p1[p2[i]]
    return (p1[p2[0]], p1[p2[1]], p1[p2[2]])


@dataclass(frozen=True)
class SymmetryOp:
    """One of the 72 symmetries: permute rows and columns, then optionally transpose.

    ``row_perm[i]`` is the source row for output row i (likewise for columns).
    The transpose step does not contribute to :attr:`sign`.
    """

    row_perm: Perm
    col_perm: Perm
    transpose: bool = False

    @property
    def sign(self) -> int:
        return _perm_sign(self.row_perm) * _perm_sign(self.col_perm)

    def then(self, other: "SymmetryOp") -> "SymmetryOp":
        """Composite operation: apply ``self`` first, then ``other``."""
        if not self.transpose:
            return SymmetryOp(
                _compose_perm(self.row_perm, other.row_perm),
                _compose_perm(self.col_perm, other.col_perm),
                other.transpose,
            )
        return SymmetryOp(
            _compose_perm(self.row_perm, other.col_perm),
            _compose_perm(self.col_perm, other.row_perm),
            not other.transpose,
        )


_PERMS3: tuple[Perm, ...] = tuple(permutations((0, 1, 2)))

IDENTITY_OP = SymmetryOp((0, 1, 2), (0, 1, 2), False)

ALL_OPS: tuple[SymmetryOp, ...] = tuple(
    SymmetryOp(rp, cp, t) for rp in _PERMS3 for cp in _PERMS3 for t in (False, True)
)


def _flat_source_map(op: SymmetryOp) -> Flat:
    # out[i][j] = in[rp[i]][cp[j]], or in[rp[j]][cp[i]] after a transpose
    src = []
    for i in range(3):
        for j in range(3):
            if op.transpose:
                src.append(3 * op.row_perm[j] + op.col_perm[i])
            else:
                src.append(3 * op.row_perm[i] + op.col_perm[j])
    return tuple(src)


# precomputed index maps make orbit scans cheap: applying an op is one gather
_FLAT_OPS: tuple[tuple[Flat, int], ...] = tuple(
    (_flat_source_map(op), op.sign) for op in ALL_OPS
)


def apply_symmetry(chi: PowerMatrix, op: SymmetryOp) -> PowerMatrix:
    """Permute rows and columns of chi by op, then transpose if flagged."""
    src = _flat_source_map(op)
    flat = chi.flat
    return PowerMatrix.from_flat(tuple(flat[k] for k in src))


@dataclass(frozen=True)
class CanonicalForm:
    """Orbit-minimal representative together with the relating sign.

    The value of chi equals ``sign`` times the value of ``representative``.
    For even rank the sign is always +1.  A sign of 0 means some odd-signed
    symmetry stabilizes the orbit (e.g. two equal rows at odd rank), which
    forces the value itself to vanish.
    """

    representative: PowerMatrix
    sign: int


def canonical_flat(flat: Flat) -> tuple[Flat, int]:
    """Lexicographic orbit minimum of a flat matrix plus the relating sign."""
    best = None
    has_plus = has_minus = False
    for src, sgn in _FLAT_OPS:
        img = (
            flat[src[0]], flat[src[1]], flat[src[2]],
            flat[src[3]], flat[src[4]], flat[src[5]],
            flat[src[6]], flat[src[7]], flat[src[8]],
        )
        if best is None or img < best:
            best = img
            has_plus = sgn > 0
            has_minus = sgn < 0
        elif img == best:
            has_plus = has_plus or sgn > 0
            has_minus = has_minus or sgn < 0
    if sum(flat) % 2 == 0:
        return best, 1
    if has_plus and has_minus:
        return best, 0
    return best, 1 if has_plus else -1


def canonicalize(chi: PowerMatrix) -> CanonicalForm:
    """Orbit-minimal form of chi under all 72 symmetries.

    Ties between opposite-signed operations reaching the minimum at odd rank
    yield sign 0, which downstream short-circuits the value to 0.
    """
    rep, sign = canonical_flat(chi.flat)
    return CanonicalForm(PowerMatrix.from_flat(rep), sign)


def orbit(chi: PowerMatrix) -> list[PowerMatrix]:
    """All distinct images of chi under the 72 symmetries, sorted."""
    flat = chi.flat
    images = {tuple(flat[k] for k in src) for src, _ in _FLAT_OPS}
    return [PowerMatrix.from_flat(f) for f in sorted(images)]
