"""Naive fixpoint evaluation, matrix power sums and stability measurement.

Two step-counting conventions coexist and differ by exactly one:

* the trace convention counts applications of the update map and reports the
  smallest q with x(q) == x(q+1) starting from the all-zero vector;
* the power-sum convention reports the smallest p with S(p) b == S(p+1) b
  where S(k) = I (+) A (+) ... (+) A^k.

Since x(q) = S(q-1) b for q >= 1, the power-sum index is the trace index minus
one (both are 0 for the all-zero seed). Bound comparisons use the power-sum
convention; traces expose both.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple, Union

from .errors import InvalidParameter, ParseError
from .frontend import (
    GroundAtom,
    GroundedLinearSystem,
    GroundedPolynomialSystem,
)
from .matrix import Matrix, vec_add, zero_vector
from .semirings import Semiring, effective_stability, ordered_chain, semiring_from_id

DEFAULT_EVAL_CAP = 1_000_000


@dataclass(frozen=True)
class IterationTrace:
    """States x(0), x(1), ... of a naive evaluation, with convergence data."""

    states: Tuple[Tuple[Any, ...], ...]
    stability_index: Optional[int]  # smallest q with states[q] == states[q+1]
    capped: bool

    @property
    def wall_steps(self) -> int:
        return len(self.states) - 1

    @property
    def powersum_index(self) -> Optional[int]:
        """The convergence index in the power-sum convention (see module doc)."""
        if self.stability_index is None:
            return None
        return max(self.stability_index - 1, 0)

    @property
    def fixpoint(self) -> Optional[Tuple[Any, ...]]:
        if self.stability_index is None:
            return None
        return self.states[self.stability_index]


@dataclass(frozen=True)
class MatrixPowerSum:
    """S(k) = I (+) A (+) A^2 (+) ... (+) A^k."""

    k: int
    value: Matrix


def linear_step(sys: GroundedLinearSystem, x: Sequence) -> tuple:
    return vec_add(sys.semiring, sys.A.matvec(x), sys.b)


def polynomial_step(psys: GroundedPolynomialSystem, x: Sequence) -> tuple:
    s = psys.semiring
    out = []
    for row in psys.monomials:
        acc = s.zero
        for coeff, cols in row:
            term = coeff
            for c in cols:
                term = s.mul(term, x[c])
            acc = s.add(acc, term)
        out.append(acc)
    return tuple(out)


def _default_cap(semiring: Semiring, n: int) -> int:
    if n == 0:
        return 1
    p, _src = effective_stability(semiring)
    chain = ordered_chain(semiring)
    if p is None and chain is None:
        return DEFAULT_EVAL_CAP
    candidates = []
    if p is not None:
        # cubic step bound counting all n^2 edges (self-loops included),
        # plus one detection step
        candidates.append(n * n * n * (p + 2) + n)
    if chain is not None:
        # per-coordinate strict growth is limited by the chain even when
        # multiplication fails to distribute (monotone iteration suffices)
        candidates.append(n * chain + 2)
    return max(candidates)


def _iterate(semiring, n, step, cap, inflationary) -> IterationTrace:
    if cap is not None and cap < 1:
        raise InvalidParameter("cap must be >= 1")
    if cap is None:
        cap = _default_cap(semiring, n)
    x = zero_vector(semiring, n)
    states = [x]
    for q in range(cap):
        nxt = step(x)
        if inflationary:
            nxt = vec_add(semiring, x, nxt)
        states.append(nxt)
        if nxt == x:
            return IterationTrace(tuple(states), q, False)
        x = nxt
    return IterationTrace(tuple(states), None, True)


def naive_eval_linear(
    sys: GroundedLinearSystem,
    cap: Optional[int] = None,
    *,
    inflationary: bool = False,
) -> IterationTrace:
    """Iterate x <- Ax (+) b from the zero vector until adjacent states repeat.

    Stops at ``cap`` applications without convergence and flags the trace as
    capped instead of raising. ``inflationary`` switches to x <- x (+) f(x).
    """
    return _iterate(sys.semiring, sys.n, lambda x: linear_step(sys, x), cap, inflationary)


def naive_eval_general(
    psys: GroundedPolynomialSystem,
    cap: Optional[int] = None,
    *,
    inflationary: bool = False,
) -> IterationTrace:
    """Same contract as naive_eval_linear, for monomial systems."""
    return _iterate(
        psys.semiring, psys.n, lambda x: polynomial_step(psys, x), cap, inflationary
    )


def matrix_power_sum(A: Matrix, k: int) -> MatrixPowerSum:
    """S(k) by the recurrence S(0) = I, S(m+1) = I (+) A S(m).

    This equals the literal sum I (+) A (+) ... (+) A^k whenever multiplication
    distributes over addition; the capped structure does not distribute, so
    there the recurrence form is the defined semantics.
    """
    if k < 0:
        raise InvalidParameter("k must be >= 0")
    ident = Matrix.identity(A.semiring, A.n)
    value = ident
    for _ in range(k):
        value = ident.add(A.matmul(value))
    return MatrixPowerSum(k, value)


def matrix_stability_index(A: Matrix, cap: Optional[int] = None) -> Optional[int]:
    """Smallest k with S(k) == S(k+1), or None if not reached within cap."""
    if cap is not None and cap < 1:
        raise InvalidParameter("cap must be >= 1")
    if cap is None:
        cap = _default_cap(A.semiring, A.n)
    ident = Matrix.identity(A.semiring, A.n)
    prev = ident
    for k in range(cap + 1):
        nxt = ident.add(A.matmul(prev))
        if nxt == prev:
            return k
        prev = nxt
    return None


# ---------------------------------------------------------------------------
# Matrix file format
# ---------------------------------------------------------------------------
#
#   # optional comment lines (generators embed their parameters here)
#   # atom <index> <label>        optional atom labels
#   semiring <id>
#   n <count>
#   A <i> <j> <literal>           nonzero matrix entries, 0-based
#   b <i> <literal>               nonzero vector entries

def save_system(sys: GroundedLinearSystem, header: Sequence[str] = ()) -> str:
    lines: List[str] = [f"# {h}" for h in header]
    lines.append(f"semiring {sys.semiring.id}")
    lines.append(f"n {sys.n}")
    for i, label in enumerate(sys.atom_labels()):
        lines.append(f"# atom {i} {label}")
    s = sys.semiring
    for i, j, v in sys.A.entries():
        lines.append(f"A {i} {j} {s.show(v)}")
    for i, v in enumerate(sys.b):
        if v != s.zero:
            lines.append(f"b {i} {s.show(v)}")
    return "\n".join(lines) + "\n"


def load_system(text: str) -> GroundedLinearSystem:
    semiring: Optional[Semiring] = None
    n: Optional[int] = None
    entries: List[Tuple[int, int, Any]] = []
    b_entries: List[Tuple[int, Any]] = []
    labels: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(maxsplit=2)
            if len(parts) == 3 and parts[0] == "atom" and parts[1].isdigit():
                labels[int(parts[1])] = parts[2]
            continue
        parts = line.split(maxsplit=1)
        key = parts[0]
        if key == "semiring":
            semiring = semiring_from_id(parts[1].strip())
        elif key == "n":
            n = int(parts[1])
        elif key == "A":
            if semiring is None or n is None:
                raise ParseError("A entry before semiring/n header", lineno, 1)
            i, j, lit = parts[1].split(maxsplit=2)
            entries.append((int(i), int(j), semiring.parse(lit)))
        elif key == "b":
            if semiring is None or n is None:
                raise ParseError("b entry before semiring/n header", lineno, 1)
            i, lit = parts[1].split(maxsplit=1)
            b_entries.append((int(i), semiring.parse(lit)))
        else:
            raise ParseError(f"unrecognized line {raw!r}", lineno, 1)
    if semiring is None or n is None:
        raise ParseError("missing semiring or n header", 1, 1)
    b = [semiring.zero] * n
    for i, v in b_entries:
        if not 0 <= i < n:
            raise ParseError(f"b index {i} outside 0..{n - 1}", 1, 1)
        b[i] = semiring.add(b[i], v)
    atoms: List[GroundAtom] = []
    for i in range(n):
        pred, args = _parse_label(labels.get(i, f"x{i}"))
        atoms.append((pred, args))
    A = Matrix(semiring, n, entries)
    return GroundedLinearSystem(
        semiring,
        tuple(atoms),
        {a: i for i, a in enumerate(atoms)},
        A,
        tuple(b),
        n,
        False,
    )


def _parse_label(label: str) -> GroundAtom:
    if label.endswith(")") and "(" in label:
        pred, inner = label[:-1].split("(", 1)
        return pred, tuple(inner.split(",")) if inner else ()
    return (label, ())


def trace_csv(
    sys: Union[GroundedLinearSystem, GroundedPolynomialSystem],
    trace: IterationTrace,
) -> str:
    """Full trace as CSV rows of step, atom, value."""
    s = sys.semiring
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "atom", "value"])
    labels = sys.atom_labels()
    for step, state in enumerate(trace.states):
        for label, v in zip(labels, state):
            w.writerow([step, label, s.show(v)])
    return out.getvalue()
