"""Prime fields and dense exact matrices over them.

Entries are always stored as canonical residues in [0, p), so two matrices
are equal iff their integer payloads are equal and file round-trips are
bit-exact. All arithmetic is int64 numpy; (p-1)^2 must fit in int64, which
holds for every modulus this package uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    """Invalid field element or field construction."""


def is_prime(n: int) -> bool:
    """Trial-division primality check; fine for the small moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    c = max(n, 2)
    while not is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for a prime modulus p."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise FieldError(f"modulus {self.p} is not prime")

    def reduce(self, a: int) -> int:
        return int(a) % self.p

    def inverse(self, a: int) -> int:
        a = self.reduce(a)
        if a == 0:
            raise FieldError("non-invertible element: 0 has no inverse")
        return pow(a, -1, self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


def field_inverse(a: int, field: PrimeField) -> int:
    """Multiplicative inverse of ``a`` in ``field``; rejects zero."""
    return field.inverse(a)


class FieldMatrix:
    """Immutable dense matrix over a prime field.

    Wraps an int64 numpy array of canonical residues. Supports the handful
    of operations the rest of the package needs: matmul, addition and
    subtraction, scalar multiplication, stacking and slicing.
    """

    __slots__ = ("field", "_a")

    def __init__(self, entries, field: PrimeField):
        a = np.asarray(entries, dtype=np.int64)
        if a.ndim != 2:
            raise FieldError(f"matrix must be 2-dimensional, got shape {a.shape}")
        a = np.mod(a, field.p)
        a.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_a", a)

    def __setattr__(self, name, value):
        raise AttributeError("FieldMatrix is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], field: PrimeField, cols: int | None = None) -> "FieldMatrix":
        if len(rows) == 0:
            if cols is None:
                raise FieldError("empty matrix needs an explicit column count")
            return FieldMatrix(np.zeros((0, cols), dtype=np.int64), field)
        return FieldMatrix(np.asarray(rows, dtype=np.int64), field)

    @staticmethod
    def zeros(rows: int, cols: int, field: PrimeField) -> "FieldMatrix":
        return FieldMatrix(np.zeros((rows, cols), dtype=np.int64), field)

    @staticmethod
    def identity(n: int, field: PrimeField) -> "FieldMatrix":
        return FieldMatrix(np.eye(n, dtype=np.int64), field)

    @staticmethod
    def random(rows: int, cols: int, field: PrimeField, rng: np.random.Generator) -> "FieldMatrix":
        return FieldMatrix(rng.integers(0, field.p, size=(rows, cols), dtype=np.int64), field)

    # -- views -------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only int64 array of canonical residues."""
        return self._a

    def to_lists(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self._a]

    def row(self, i: int) -> np.ndarray:
        return self._a[i]

    def take_rows(self, idx: Iterable[int]) -> "FieldMatrix":
        return FieldMatrix(self._a[list(idx), :], self.field)

    # -- arithmetic --------------------------------------------------------

    def _check_same_field(self, other: "FieldMatrix") -> None:
        if self.field != other.field:
            raise FieldError(f"field mismatch: F_{self.field.p} vs F_{other.field.p}")

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise FieldError(f"shape mismatch for matmul: {self.shape} @ {other.shape}")
        return FieldMatrix(np.mod(self._a @ other._a, self.field.p), self.field)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        return FieldMatrix(np.mod(self._a + other._a, self.field.p), self.field)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        return FieldMatrix(np.mod(self._a - other._a, self.field.p), self.field)

    def scale(self, c: int) -> "FieldMatrix":
        return FieldMatrix(np.mod(self._a * self.field.reduce(c), self.field.p), self.field)

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self._a.T.copy(), self.field)

    def vstack(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.cols != other.cols:
            raise FieldError("column count mismatch for vstack")
        return FieldMatrix(np.vstack([self._a, other._a]), self.field)

    def is_zero(self) -> bool:
        return not self._a.any()

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.to_lists()}, F_{self.field.p})"
