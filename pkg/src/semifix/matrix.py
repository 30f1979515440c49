"""Square matrices over a semiring, stored as sparse rows of nonzero entries."""

from __future__ import annotations

from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import InvalidParameter
from .semirings import Semiring


class Matrix:
    """Immutable n x n matrix over a semiring.

    Only nonzero entries are stored; an absent entry means the semiring zero.
    Duplicate coordinates passed to the constructor are combined additively.
    """

    __slots__ = ("semiring", "n", "_rows")

    def __init__(self, semiring: Semiring, n: int, entries: Iterable[Tuple[int, int, Any]] = ()):
        if n < 0:
            raise InvalidParameter("matrix dimension must be >= 0")
        self.semiring = semiring
        self.n = n
        rows: List[Dict[int, Any]] = [{} for _ in range(n)]
        zero = semiring.zero
        for i, j, v in entries:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidParameter(f"entry ({i},{j}) outside a {n}x{n} matrix")
            row = rows[i]
            if j in row:
                v = semiring.add(row[j], v)
            if v == zero:
                row.pop(j, None)
            else:
                row[j] = v
        self._rows = rows

    @classmethod
    def identity(cls, semiring: Semiring, n: int) -> "Matrix":
        return cls(semiring, n, ((i, i, semiring.one) for i in range(n)))

    def get(self, i: int, j: int):
        return self._rows[i].get(j, self.semiring.zero)

    def row(self, i: int) -> Dict[int, Any]:
        return self._rows[i]

    def entries(self) -> Iterator[Tuple[int, int, Any]]:
        """Nonzero entries in row-major sorted order."""
        for i, row in enumerate(self._rows):
            for j in sorted(row):
                yield i, j, row[j]

    def matvec(self, x: Sequence) -> tuple:
        s = self.semiring
        out = []
        for row in self._rows:
            acc = s.zero
            for j, v in row.items():
                acc = s.add(acc, s.mul(v, x[j]))
            out.append(acc)
        return tuple(out)

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise InvalidParameter("dimension mismatch")
        s = self.semiring
        zero = s.zero
        result = Matrix(s, self.n)
        rows = result._rows
        for i, row in enumerate(self._rows):
            target = rows[i]
            for k, a in row.items():
                for j, bv in other._rows[k].items():
                    term = s.mul(a, bv)
                    if j in target:
                        term = s.add(target[j], term)
                    if term == zero:
                        target.pop(j, None)
                    else:
                        target[j] = term
        return result

    def add(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise InvalidParameter("dimension mismatch")
        merged = list(self.entries())
        merged.extend(other.entries())
        return Matrix(self.semiring, self.n, merged)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.semiring.id == other.semiring.id
            and self.n == other.n
            and self._rows == other._rows
        )

    __hash__ = None

    def __repr__(self):
        nnz = sum(len(r) for r in self._rows)
        return f"<{self.n}x{self.n} matrix over {self.semiring.id}, {nnz} nonzero>"


def vec_add(semiring: Semiring, u: Sequence, v: Sequence) -> tuple:
    return tuple(semiring.add(a, b) for a, b in zip(u, v))


def zero_vector(semiring: Semiring, n: int) -> tuple:
    return (semiring.zero,) * n
