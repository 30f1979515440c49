"""Commutative semirings with exact arithmetic, literal codecs and stability analysis.

Every element is an exact Python value (bool, int, Fraction, tuple), so element
equality is decidable and fixpoint detection never needs a tolerance. Semiring
instances are immutable after construction and safe to share between threads;
all operations here are pure functions.

Built-in instances, by configuration id:

    bool                Boolean semiring (or, and)
    trop                min-plus over the non-negative rationals with inf
    trop_p:<p>          bags of the p+1 smallest values over the trop carrier
    trop_p_fin:<p>:<c>  same bag algebra with entries saturating at c (finite)
    capped:<L>          integers 0..L plus O, both operations add and cap at L
    trivial             the one-element semiring
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence, Tuple

from .errors import (
    InvalidParameter,
    MalformedElement,
    NotNaturallyOrdered,
    UnsupportedOperation,
)

DEFAULT_STABILITY_CAP = 512
DEFAULT_AXIOM_BUDGET = 10_000


# ---------------------------------------------------------------------------
# Distinguished carrier values
# ---------------------------------------------------------------------------

def _restore_inf():
    return INF


class _Infinity:
    """Top of the min-plus carriers: absorbing under +, neutral under min."""

    __slots__ = ()

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        # keep the singleton identity across pickling
        return (_restore_inf, ())


INF = _Infinity()


def _restore_capped_o():
    return CAPPED_O


class _CappedO:
    """Additive identity of the capped semiring, distinct from the integer 0."""

    __slots__ = ()

    def __repr__(self):
        return "O"

    def __reduce__(self):
        return (_restore_capped_o, ())


CAPPED_O = _CappedO()


def _ext_key(v):
    # sort key that places inf after every finite value
    return (1, Fraction(0)) if v is INF else (0, v)


def _ext_add(u, v):
    if u is INF or v is INF:
        return INF
    return u + v


def _parse_extended_rational(text: str):
    t = text.strip()
    if t == "inf":
        return INF
    try:
        v = Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise MalformedElement(f"not a rational literal: {text!r}") from None
    if v < 0:
        raise MalformedElement(f"negative value {text!r} is outside the carrier")
    return v


def _show_extended_rational(v) -> str:
    return "inf" if v is INF else str(v)


# ---------------------------------------------------------------------------
# Truncated-bag arithmetic
# ---------------------------------------------------------------------------

def min_p_truncate(p: int, entries) -> tuple:
    """The p+1 smallest entries of a bag, ascending, padded with inf."""
    kept = sorted(entries, key=_ext_key)[: p + 1]
    return tuple(kept) + (INF,) * (p + 1 - len(kept))


def _check_bag(p: int, x):
    if not isinstance(x, tuple) or len(x) != p + 1:
        raise MalformedElement(f"expected a bag of exactly {p + 1} entries, got {x!r}")


def trop_p_add(p: int, x: tuple, y: tuple) -> tuple:
    """Bag union truncated to the p+1 smallest entries."""
    _check_bag(p, x)
    _check_bag(p, y)
    return min_p_truncate(p, x + y)


def trop_p_mul(p: int, x: tuple, y: tuple) -> tuple:
    """Pairwise entry sums truncated to the p+1 smallest entries."""
    _check_bag(p, x)
    _check_bag(p, y)
    return min_p_truncate(p, (_ext_add(u, v) for u in x for v in y))


# ---------------------------------------------------------------------------
# Semiring instances
# ---------------------------------------------------------------------------

class Semiring:
    """A commutative semiring with decidable equality and a literal codec.

    Subclasses provide ``add``, ``mul``, ``zero``, ``one``, ``parse``/``show``
    and, when the carrier is finite, ``elements``. ``known_stability`` records
    an analytically known stability index for carriers that cannot be
    enumerated; it is None when stability must be computed exhaustively.
    """

    id: str = "?"
    zero: Any = None
    one: Any = None
    known_stability: Optional[int] = None

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def show(self, a) -> str:
        raise NotImplementedError

    def elements(self) -> Optional[Sequence]:
        """The full carrier as a sequence, or None when not enumerable."""
        return None

    def random_element(self, rng: random.Random):
        raise NotImplementedError

    def weight(self, k: int):
        """A canonical element representing an integer edge weight k >= 0."""
        raise NotImplementedError

    def sum(self, items):
        acc = self.zero
        for it in items:
            acc = self.add(acc, it)
        return acc

    def __repr__(self):
        return f"<semiring {self.id}>"


class BoolSemiring(Semiring):
    id = "bool"
    zero = False
    one = True
    known_stability = 0

    def add(self, a, b):
        return a or b

    def mul(self, a, b):
        return a and b

    def parse(self, text):
        t = text.strip()
        if t == "true":
            return True
        if t == "false":
            return False
        raise MalformedElement(f"expected true or false, got {text!r}")

    def show(self, a):
        return "true" if a else "false"

    def elements(self):
        return (False, True)

    def random_element(self, rng):
        return rng.random() < 0.5

    def weight(self, k):
        return True


class TropSemiring(Semiring):
    """Min-plus over the non-negative rationals extended with inf."""

    id = "trop"
    zero = INF
    one = Fraction(0)
    # 1 (+) u = min(0, u) = 0 for every u in the carrier, so each element is
    # 0-stable even though the carrier cannot be enumerated.
    known_stability = 0

    def add(self, a, b):
        if a is INF:
            return b
        if b is INF:
            return a
        return a if a <= b else b

    def mul(self, a, b):
        return _ext_add(a, b)

    def parse(self, text):
        return _parse_extended_rational(text)

    def show(self, a):
        return _show_extended_rational(a)

    def random_element(self, rng):
        if rng.random() < 0.1:
            return INF
        return Fraction(rng.randint(0, 12), rng.choice((1, 1, 2, 3)))

    def weight(self, k):
        return Fraction(k)


class TropBagSemiring(Semiring):
    """Bags of the p+1 smallest values; union for add, pairwise sums for mul."""

    def __init__(self, p: int):
        if p < 0:
            raise InvalidParameter("bag order p must be >= 0")
        self.p = p
        self.id = f"trop_p:{p}"
        self.zero = (INF,) * (p + 1)
        self.one = min_p_truncate(p, (Fraction(0),))
        self.known_stability = p

    def add(self, a, b):
        return trop_p_add(self.p, a, b)

    def mul(self, a, b):
        return trop_p_mul(self.p, a, b)

    def _parse_entry(self, text):
        return _parse_extended_rational(text)

    def parse(self, text):
        t = text.strip()
        if not (t.startswith("[") and t.endswith("]")):
            raise MalformedElement(f"expected a bag literal [..], got {text!r}")
        inner = t[1:-1].strip()
        entries = [self._parse_entry(e) for e in inner.split(",")] if inner else []
        if len(entries) > self.p + 1:
            raise MalformedElement(
                f"bag literal has {len(entries)} entries, carrier holds at most {self.p + 1}"
            )
        return min_p_truncate(self.p, entries)

    def show(self, a):
        parts = []
        for e in a:
            if e is INF:
                break  # entries are sorted, inf padding is implicit
            parts.append(_show_extended_rational(e))
        return "[" + ",".join(parts) + "]"

    def random_element(self, rng):
        k = rng.randint(0, self.p + 1)
        return min_p_truncate(self.p, (Fraction(rng.randint(0, 9)) for _ in range(k)))

    def weight(self, k):
        return min_p_truncate(self.p, (Fraction(k),))


class FiniteTropBagSemiring(TropBagSemiring):
    """Truncated-bag semiring over the finite entry chain 0..cap plus inf.

    Entry addition saturates at ``cap``, which keeps the carrier finite and
    closed under both operations while preserving the bag algebra.
    """

    def __init__(self, p: int, cap: int):
        super().__init__(p)
        if cap < 0:
            raise InvalidParameter("entry cap must be >= 0")
        self.cap = cap
        self.id = f"trop_p_fin:{p}:{cap}"
        self.one = min_p_truncate(p, (0,))
        self.known_stability = None  # computed exhaustively
        pool = tuple(range(cap + 1)) + (INF,)
        self._carrier = tuple(itertools.combinations_with_replacement(pool, p + 1))

    def _entry_add(self, u, v):
        if u is INF or v is INF:
            return INF
        return min(u + v, self.cap)

    def mul(self, a, b):
        _check_bag(self.p, a)
        _check_bag(self.p, b)
        return min_p_truncate(self.p, (self._entry_add(u, v) for u in a for v in b))

    def _parse_entry(self, text):
        v = _parse_extended_rational(text)
        if v is INF:
            return INF
        if v.denominator != 1 or v > self.cap:
            raise MalformedElement(
                f"entry {text!r} is outside the finite chain 0..{self.cap}"
            )
        return int(v)

    def elements(self):
        return self._carrier

    def random_element(self, rng):
        return rng.choice(self.elements())

    def weight(self, k):
        return min_p_truncate(self.p, (min(k, self.cap),))


class CappedSemiring(Semiring):
    """Integers 0..L plus O; both operations are addition capped at L.

    O is the additive identity and annihilates products; the integer 0 is the
    multiplicative identity. Because the two operations coincide, this
    structure does not satisfy distributivity (1*(0+0) = 1 but (1*0)+(1*0) = 2);
    check_axioms reports it. Iteration, power sums and the chain bound only
    need the monotone operations and stay well defined.
    """

    def __init__(self, L: int):
        if L < 1:
            raise InvalidParameter("cap L must be >= 1")
        self.L = L
        self.id = f"capped:{L}"
        self.zero = CAPPED_O
        self.one = 0

    def add(self, a, b):
        if a is CAPPED_O:
            return b
        if b is CAPPED_O:
            return a
        return min(a + b, self.L)

    def mul(self, a, b):
        if a is CAPPED_O or b is CAPPED_O:
            return CAPPED_O
        return min(a + b, self.L)

    def parse(self, text):
        t = text.strip()
        if t == "O":
            return CAPPED_O
        try:
            v = int(t)
        except ValueError:
            raise MalformedElement(f"expected O or an integer, got {text!r}") from None
        if not 0 <= v <= self.L:
            raise MalformedElement(f"{v} is outside 0..{self.L}")
        return v

    def show(self, a):
        return "O" if a is CAPPED_O else str(a)

    def elements(self):
        return (CAPPED_O,) + tuple(range(self.L + 1))

    def random_element(self, rng):
        return rng.choice(self.elements())

    def weight(self, k):
        return min(k, self.L)


class TrivialSemiring(Semiring):
    """The one-element semiring (zero equals one)."""

    id = "trivial"
    zero = 0
    one = 0

    def add(self, a, b):
        return 0

    def mul(self, a, b):
        return 0

    def parse(self, text):
        if text.strip() != "0":
            raise MalformedElement(f"the only element is 0, got {text!r}")
        return 0

    def show(self, a):
        return "0"

    def elements(self):
        return (0,)

    def random_element(self, rng):
        return 0

    def weight(self, k):
        return 0


@lru_cache(maxsize=None)
def semiring_from_id(spec: str) -> Semiring:
    """Resolve a configuration id like ``trop_p:2`` to a shared instance."""
    parts = spec.strip().split(":")
    name, args = parts[0], parts[1:]
    try:
        if name == "bool" and not args:
            return BoolSemiring()
        if name == "trop" and not args:
            return TropSemiring()
        if name == "trivial" and not args:
            return TrivialSemiring()
        if name == "trop_p" and len(args) == 1:
            return TropBagSemiring(int(args[0]))
        if name == "trop_p_fin" and len(args) == 2:
            return FiniteTropBagSemiring(int(args[0]), int(args[1]))
        if name == "capped" and len(args) == 1:
            return CappedSemiring(int(args[0]))
    except ValueError:
        raise InvalidParameter(f"bad semiring parameters in {spec!r}") from None
    raise InvalidParameter(f"unknown semiring id {spec!r}")


def builtin_semiring_ids() -> Tuple[str, ...]:
    return ("bool", "trop", "trop_p:<p>", "trop_p_fin:<p>:<c>", "capped:<L>", "trivial")


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityResult:
    """Power-sum prefix of one element and the index where it stops changing.

    ``sequence[q]`` is 1 (+) u (+) u^2 (+) ... (+) u^q. When ``index`` is q the
    sequence satisfies sequence[q] == sequence[q+1]; ``index`` is None when no
    repeat occurred within the cap.
    """

    index: Optional[int]
    sequence: Tuple[Any, ...]

    @property
    def stable(self) -> bool:
        return self.index is not None


@dataclass(frozen=True)
class SemiringStability:
    """Maximum element stability over a finite carrier, with a witness."""

    index: Optional[int]
    witness: Any


def element_stability(s: Semiring, u, cap: int = DEFAULT_STABILITY_CAP) -> StabilityResult:
    """Smallest q <= cap with equal adjacent power sums of u, else None."""
    if cap < 1:
        raise InvalidParameter("cap must be >= 1")
    seq = [s.one]
    power = s.one
    for q in range(cap + 1):
        power = s.mul(power, u)
        seq.append(s.add(seq[-1], power))
        if seq[-1] == seq[-2]:
            return StabilityResult(q, tuple(seq))
    return StabilityResult(None, tuple(seq))


def semiring_stability(s: Semiring, cap: int = DEFAULT_STABILITY_CAP) -> SemiringStability:
    """Maximum element_stability over the whole (finite) carrier."""
    carrier = s.elements()
    if carrier is None:
        raise UnsupportedOperation(f"{s.id} has no enumerable carrier")
    best, witness = 0, s.zero
    for u in carrier:
        r = element_stability(s, u, cap)
        if r.index is None:
            return SemiringStability(None, u)
        if r.index > best:
            best, witness = r.index, u
    return SemiringStability(best, witness)


@lru_cache(maxsize=None)
def ordered_chain(s: Semiring) -> Optional[int]:
    """longest_chain when the carrier is finite and naturally ordered, else None."""
    if s.elements() is None:
        return None
    try:
        return longest_chain(s)
    except NotNaturallyOrdered:
        return None


@lru_cache(maxsize=None)
def effective_stability(s: Semiring) -> Tuple[Optional[int], str]:
    """Stability index of a semiring plus its provenance.

    Finite carriers are measured exhaustively ("computed"); symbolic carriers
    fall back to the analytically known index ("analytic") or (None, "unknown").
    """
    if s.elements() is not None:
        r = semiring_stability(s, DEFAULT_STABILITY_CAP)
        return r.index, "computed"
    if s.known_stability is not None:
        return s.known_stability, "analytic"
    return None, "unknown"


def scalar_repeat(s: Semiring, u, m: int):
    """u (+) u (+) ... m times; the empty sum is zero."""
    if m < 0:
        raise InvalidParameter("repeat count must be >= 0")
    acc = s.zero
    for _ in range(m):
        acc = s.add(acc, u)
    return acc


# ---------------------------------------------------------------------------
# Natural order
# ---------------------------------------------------------------------------

def natural_order_leq(s: Semiring, x, y) -> bool:
    """x precedes y when some carrier element z satisfies x (+) z == y."""
    carrier = s.elements()
    if carrier is None:
        raise UnsupportedOperation(f"{s.id} has no enumerable carrier")
    return any(s.add(x, z) == y for z in carrier)


def longest_chain(s: Semiring) -> int:
    """Maximum number of strict steps in any chain of the natural order.

    Raises NotNaturallyOrdered when the additive preorder fails antisymmetry.
    """
    carrier = s.elements()
    if carrier is None:
        raise UnsupportedOperation(f"{s.id} has no enumerable carrier")
    elems = list(carrier)
    n = len(elems)
    leq = [[any(s.add(elems[i], z) == elems[j] for z in elems) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i][j] and leq[j][i]:
                raise NotNaturallyOrdered(
                    f"{s.show(elems[i])} and {s.show(elems[j])} precede each other"
                )
    longest = [None] * n

    def walk(i):
        if longest[i] is None:
            longest[i] = 0  # strict order is acyclic, safe placeholder
            longest[i] = max(
                (1 + walk(j) for j in range(n) if i != j and leq[i][j]),
                default=0,
            )
        return longest[i]

    return max(walk(i) for i in range(n)) if n else 0


# ---------------------------------------------------------------------------
# Axiom checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    counterexample: Optional[tuple]


@dataclass(frozen=True)
class AxiomReport:
    semiring_id: str
    exhaustive: bool
    samples: int
    checks: Tuple[AxiomCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> Tuple[AxiomCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


_LAWS: Tuple[Tuple[str, int, Callable], ...] = (
    ("add_associative", 3, lambda s, a, b, c: s.add(s.add(a, b), c) == s.add(a, s.add(b, c))),
    ("add_commutative", 2, lambda s, a, b: s.add(a, b) == s.add(b, a)),
    ("add_identity", 1, lambda s, a: s.add(a, s.zero) == a),
    ("mul_associative", 3, lambda s, a, b, c: s.mul(s.mul(a, b), c) == s.mul(a, s.mul(b, c))),
    ("mul_commutative", 2, lambda s, a, b: s.mul(a, b) == s.mul(b, a)),
    ("mul_identity", 1, lambda s, a: s.mul(a, s.one) == a),
    ("zero_annihilates", 1, lambda s, a: s.mul(a, s.zero) == s.zero and s.mul(s.zero, a) == s.zero),
    ("distributes", 3, lambda s, a, b, c: s.mul(a, s.add(b, c)) == s.add(s.mul(a, b), s.mul(a, c))),
    ("literal_roundtrip", 1, lambda s, a: s.parse(s.show(a)) == a),
)


def check_axioms(s: Semiring, sample_budget: int = DEFAULT_AXIOM_BUDGET, seed: int = 0) -> AxiomReport:
    """Check the semiring laws, exhaustively when the carrier is small enough.

    ``sample_budget`` bounds the total number of tuples drawn across all laws
    in sampling mode; exhaustive mode is used when |carrier|^3 fits the budget.
    """
    carrier = s.elements()
    exhaustive = carrier is not None and len(carrier) ** 3 <= max(sample_budget, 1)
    rng = random.Random(seed)
    per_law = -(-max(sample_budget, 1) // len(_LAWS))  # ceil division
    samples = 0
    checks = []
    for name, arity, law in _LAWS:
        if exhaustive:
            tuples = itertools.product(carrier, repeat=arity)
        else:
            tuples = (
                tuple(s.random_element(rng) for _ in range(arity))
                for _ in range(per_law)
            )
        passed, witness = True, None
        for args in tuples:
            samples += 1
            if not law(s, *args):
                passed, witness = False, args
                break
        checks.append(AxiomCheck(name, passed, witness))
    return AxiomReport(s.id, exhaustive, samples, tuple(checks))
