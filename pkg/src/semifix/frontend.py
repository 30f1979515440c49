"""Parser and grounder for the linear sum-product rule language.

Surface syntax, one statement per ``.``-terminated clause:

    % transitive closure / shortest paths, depending on the semiring
    @semiring trop
    T(X,Y) :- E(X,Y) + T(X,Z)*E(Z,Y).
    E(a,b) = 3.
    E(b,c) = 4.

``+`` is semiring addition, ``*`` is semiring multiplication, ``%`` starts a
comment. Names followed by ``(`` are predicates; capitalized arguments are
variables, lowercase identifiers and numbers are constants. A fact without
``= literal`` carries the multiplicative identity (``true`` under bool).
Variables that occur in a body but not in the head are summed over the active
domain. Facts may also come from a separate TSV file with columns
``predicate, arg1..argk, literal``.

Grounding instantiates every rule over the active domain and produces the
linear system f(x) = Ax (+) b, one coordinate per ground atom of a derived
predicate (or a monomial system when some product uses two or more derived
atoms).
"""

from __future__ import annotations

import itertools
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import GroundingError, ParseError
from .matrix import Matrix
from .semirings import Semiring

GroundAtom = Tuple[str, Tuple[str, ...]]


def format_ground_atom(atom: GroundAtom) -> str:
    pred, args = atom
    return f"{pred}({','.join(args)})" if args else pred


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ".": "DOT",
    "+": "PLUS",
    "*": "STAR",
    "=": "EQUALS",
    "[": "LBRACK",
    "]": "RBRACK",
    "/": "SLASH",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k=1):
        nonlocal i, col
        i += k
        col += k

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c in " \t\r":
            advance()
        elif c == "%":
            while i < n and text[i] != "\n":
                i += 1
        elif c == ":":
            if i + 1 < n and text[i + 1] == "-":
                tokens.append(Token("ARROW", ":-", line, col))
                advance(2)
            else:
                raise ParseError("expected :- ", line, col)
        elif c == "@":
            start_col = col
            advance()
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if not name:
                raise ParseError("expected a directive name after @", line, col)
            tokens.append(Token("DIRECTIVE", name, line, start_col))
            advance(j - i)
            while i < n and text[i] in " \t":
                advance()
            j = i
            while j < n and not text[j].isspace() and text[j] != "%":
                j += 1
            if j > i:
                tokens.append(Token("WORD", text[i:j], line, col))
                advance(j - i)
        elif c.isdigit():
            start_col = col
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token("NUMBER", text[i:j], line, start_col))
            advance(j - i)
        elif c.isalpha() or c == "_":
            start_col = col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if word[0].isupper() else "IDENT"
            tokens.append(Token(kind, word, line, start_col))
            advance(j - i)
        elif c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, line, col))
            advance()
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


Term = Union[Var, Const]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...]
    pos: Optional[Tuple[int, int]] = field(default=None, compare=False, repr=False)

    def variables(self) -> Tuple[str, ...]:
        return tuple(t.name for t in self.args if isinstance(t, Var))

    def constants(self) -> Tuple[str, ...]:
        return tuple(t.name for t in self.args if isinstance(t, Const))


@dataclass(frozen=True)
class Product:
    atoms: Tuple[Atom, ...]

    def variables(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for a in self.atoms:
            for v in a.variables():
                if v not in seen:
                    seen.append(v)
        return tuple(seen)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: Tuple[Product, ...]
    pos: Optional[Tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FactStmt:
    pred: str
    args: Tuple[str, ...]
    literal: Optional[str]  # None carries the multiplicative identity
    pos: Optional[Tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...]
    facts: Tuple[FactStmt, ...]
    semiring_id: Optional[str] = None

    def idb_predicates(self) -> Tuple[str, ...]:
        """Predicates that head at least one rule, in first-seen order."""
        seen: List[str] = []
        for r in self.rules:
            if r.head.pred not in seen:
                seen.append(r.head.pred)
        return tuple(seen)

    def rule_constants(self) -> Tuple[str, ...]:
        out: List[str] = []
        for r in self.rules:
            for atom in (r.head, *(a for p in r.body for a in p.atoms)):
                for c in atom.constants():
                    if c not in out:
                        out.append(c)
        return tuple(out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            got = t.text or "end of input"
            raise ParseError(f"expected {what}, got {got!r}", t.line, t.col)
        return self.next()

    def parse_atom(self) -> Atom:
        t = self.peek()
        if t.kind not in ("IDENT", "VAR"):
            raise ParseError(f"expected a predicate name, got {t.text!r}", t.line, t.col)
        self.next()
        self.expect("LPAREN", "'(' after predicate name")
        args: List[Term] = []
        while True:
            a = self.next()
            if a.kind == "VAR":
                args.append(Var(a.text))
            elif a.kind in ("IDENT", "NUMBER"):
                args.append(Const(a.text))
            else:
                got = a.text or "end of input"
                raise ParseError(f"expected an argument, got {got!r}", a.line, a.col)
            sep = self.next()
            if sep.kind == "RPAREN":
                break
            if sep.kind != "COMMA":
                got = sep.text or "end of input"
                raise ParseError(f"expected ',' or ')', got {got!r}", sep.line, sep.col)
        return Atom(t.text, tuple(args), (t.line, t.col))

    def parse_body(self) -> Tuple[Product, ...]:
        products: List[Product] = []
        while True:
            atoms = [self.parse_atom()]
            while self.peek().kind == "STAR":
                self.next()
                atoms.append(self.parse_atom())
            products.append(Product(tuple(atoms)))
            if self.peek().kind != "PLUS":
                break
            self.next()
        return tuple(products)

    def parse_literal_text(self) -> str:
        parts: List[str] = []
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "EOF":
                raise ParseError("unterminated fact literal", t.line, t.col)
            if t.kind == "DOT" and depth == 0:
                break
            if t.kind == "LBRACK":
                depth += 1
            elif t.kind == "RBRACK":
                depth -= 1
            parts.append(t.text)
            self.next()
        return "".join(parts)


def parse_program(text: str) -> Program:
    """Parse source text into a Program, checking rule-level well-formedness."""
    p = _Parser(tokenize(text))
    rules: List[Rule] = []
    facts: List[FactStmt] = []
    semiring_id: Optional[str] = None
    while p.peek().kind != "EOF":
        t = p.peek()
        if t.kind == "DIRECTIVE":
            p.next()
            if t.text != "semiring":
                raise ParseError(f"unknown directive @{t.text}", t.line, t.col)
            if semiring_id is not None:
                raise ParseError("duplicate @semiring directive", t.line, t.col)
            w = p.peek()
            if w.kind != "WORD":
                raise ParseError("expected a semiring id after @semiring", t.line, t.col)
            semiring_id = p.next().text
            continue
        atom = p.parse_atom()
        nxt = p.next()
        if nxt.kind == "ARROW":
            body = p.parse_body()
            p.expect("DOT", "'.' at end of rule")
            rules.append(Rule(atom, body, atom.pos))
        elif nxt.kind == "EQUALS":
            literal = p.parse_literal_text()
            p.expect("DOT", "'.' at end of fact")
            facts.append(_fact_from_atom(atom, literal))
        elif nxt.kind == "DOT":
            facts.append(_fact_from_atom(atom, None))
        else:
            got = nxt.text or "end of input"
            raise ParseError(f"expected ':-', '=' or '.', got {got!r}", nxt.line, nxt.col)
    program = Program(tuple(rules), tuple(facts), semiring_id)
    _check_program(program)
    return program


def _fact_from_atom(atom: Atom, literal: Optional[str]) -> FactStmt:
    for t in atom.args:
        if isinstance(t, Var):
            raise ParseError(f"fact argument {t.name} is a variable", *atom.pos)
    return FactStmt(atom.pred, tuple(t.name for t in atom.args), literal, atom.pos)


def _check_program(program: Program) -> None:
    arities: Dict[str, int] = {}

    def note(pred: str, arity: int, pos):
        if arities.setdefault(pred, arity) != arity:
            raise ParseError(
                f"predicate {pred} used with arity {arity} and {arities[pred]}",
                *(pos or (None, None)),
            )

    for f in program.facts:
        note(f.pred, len(f.args), f.pos)
    for r in program.rules:
        note(r.head.pred, len(r.head.args), r.pos)
        head_vars = set(r.head.variables())
        for prod in r.body:
            for a in prod.atoms:
                note(a.pred, len(a.args), a.pos)
            missing = head_vars - set(prod.variables())
            if missing:
                name = sorted(missing)[0]
                raise ParseError(
                    f"head variable {name} is unbound in a body product",
                    *(r.pos or (None, None)),
                )


def print_program(program: Program) -> str:
    """Render a Program back to source; reparsing yields an equal AST."""
    lines: List[str] = []
    if program.semiring_id:
        lines.append(f"@semiring {program.semiring_id}")

    def term(t: Term) -> str:
        return t.name

    def atom(a: Atom) -> str:
        return f"{a.pred}({','.join(term(t) for t in a.args)})"

    for r in program.rules:
        body = " + ".join("*".join(atom(a) for a in p.atoms) for p in r.body)
        lines.append(f"{atom(r.head)} :- {body}.")
    for f in program.facts:
        head = f"{f.pred}({','.join(f.args)})"
        lines.append(f"{head}." if f.literal is None else f"{head} = {f.literal}.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Linearity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearityReport:
    linear: bool
    # (rule index, product index, number of derived atoms in the product)
    product_idb_counts: Tuple[Tuple[int, int, int], ...]


def classify_linearity(program: Program) -> LinearityReport:
    """Linear when every body product holds at most one derived atom."""
    idb = set(program.idb_predicates())
    counts = []
    for ri, r in enumerate(program.rules):
        for pi, prod in enumerate(r.body):
            counts.append((ri, pi, sum(1 for a in prod.atoms if a.pred in idb)))
    return LinearityReport(all(c <= 1 for _, _, c in counts), tuple(counts))


# ---------------------------------------------------------------------------
# EDB instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EDBInstance:
    semiring: Semiring
    facts: Mapping[GroundAtom, Any]

    @property
    def active_domain(self) -> Tuple[str, ...]:
        consts = {c for (_, args) in self.facts for c in args}
        return tuple(sorted(consts))


def build_edb(
    semiring: Semiring,
    entries: Iterable[Tuple[str, Tuple[str, ...], Optional[str]]],
) -> EDBInstance:
    """Build an EDB instance; duplicate ground atoms are combined additively."""
    facts: Dict[GroundAtom, Any] = {}
    for pred, args, literal in entries:
        value = semiring.one if literal is None else semiring.parse(literal)
        key = (pred, tuple(args))
        if key in facts:
            warnings.warn(
                f"duplicate fact for {format_ground_atom(key)}; values combined additively",
                stacklevel=2,
            )
            facts[key] = semiring.add(facts[key], value)
        else:
            facts[key] = value
    return EDBInstance(semiring, facts)


def edb_from_program(semiring: Semiring, program: Program) -> EDBInstance:
    return build_edb(semiring, ((f.pred, f.args, f.literal) for f in program.facts))


def parse_facts_tsv(semiring: Semiring, text: str) -> EDBInstance:
    """Facts from TSV rows ``predicate <tab> arg1..argk <tab> literal``."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = [c.strip() for c in raw.split("\t") if c.strip()]
        if len(cols) < 3:
            raise ParseError(
                "expected tab-separated columns: predicate, args..., literal",
                lineno,
                1,
            )
        entries.append((cols[0], tuple(cols[1:-1]), cols[-1]))
    return build_edb(semiring, entries)


def active_domain(db: EDBInstance) -> Tuple[str, ...]:
    """Exactly the constants occurring in the stored facts, sorted."""
    return db.active_domain


# ---------------------------------------------------------------------------
# Grounded systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundedLinearSystem:
    """The linear form f(x) = Ax (+) b with its atom-index bijection."""

    semiring: Semiring
    atoms: Tuple[GroundAtom, ...]
    index: Mapping[GroundAtom, int]
    A: Matrix
    b: Tuple[Any, ...]
    n_raw: int
    pruned: bool

    @property
    def n(self) -> int:
        return len(self.atoms)

    def atom_labels(self) -> Tuple[str, ...]:
        return tuple(format_ground_atom(a) for a in self.atoms)


Monomial = Tuple[Any, Tuple[int, ...]]  # coefficient, sorted derived-atom indices


@dataclass(frozen=True)
class GroundedPolynomialSystem:
    """Per-atom sums of coefficient-times-variables monomials."""

    semiring: Semiring
    atoms: Tuple[GroundAtom, ...]
    index: Mapping[GroundAtom, int]
    monomials: Tuple[Tuple[Monomial, ...], ...]
    n_raw: int
    pruned: bool

    @property
    def n(self) -> int:
        return len(self.atoms)

    def atom_labels(self) -> Tuple[str, ...]:
        return tuple(format_ground_atom(a) for a in self.atoms)

    def max_degree(self) -> int:
        return max((len(v) for row in self.monomials for _, v in row), default=0)


def _empty_linear(s: Semiring) -> GroundedLinearSystem:
    return GroundedLinearSystem(s, (), {}, Matrix(s, 0), (), 0, True)


def _empty_polynomial(s: Semiring) -> GroundedPolynomialSystem:
    return GroundedPolynomialSystem(s, (), {}, (), 0, True)


def ground(
    program: Program,
    db: EDBInstance,
    *,
    prune: bool = True,
    force_polynomial: bool = False,
) -> Union[GroundedLinearSystem, GroundedPolynomialSystem]:
    """Instantiate the rules over the active domain.

    Linear programs yield a GroundedLinearSystem unless ``force_polynomial``
    asks for the monomial form. Ground atoms are enumerated over the active
    domain extended with constants named in rules, then (optionally) pruned to
    the atoms that can ever contribute a nonzero value.
    """
    s = db.semiring
    linear = classify_linearity(program).linear and not force_polynomial
    if not db.facts:
        return _empty_linear(s) if linear else _empty_polynomial(s)

    idb = set(program.idb_predicates())
    for (pred, _args) in db.facts:
        if pred in idb:
            raise GroundingError(
                f"fact given for derived predicate {pred}; its values come from iteration"
            )
    arities: Dict[str, int] = {}
    for (pred, args) in db.facts:
        if arities.setdefault(pred, len(args)) != len(args):
            raise GroundingError(f"predicate {pred} used with inconsistent arity in facts")
    body_preds = {a.pred: a for r in program.rules for p in r.body for a in p.atoms}
    for pred, atom in sorted(body_preds.items()):
        if pred not in idb and not any(k[0] == pred for k in db.facts):
            raise GroundingError(f"unknown predicate {pred} in rule body (no facts, no rules)")
        if pred in arities and arities[pred] != len(atom.args):
            raise GroundingError(f"predicate {pred} used with inconsistent arity")

    adom = db.active_domain
    gdom = tuple(sorted(set(adom) | set(program.rule_constants())))

    idb_arity: Dict[str, int] = {}
    for r in program.rules:
        idb_arity[r.head.pred] = len(r.head.args)
    universe: List[GroundAtom] = []
    for pred in sorted(idb_arity):
        for combo in itertools.product(gdom, repeat=idb_arity[pred]):
            universe.append((pred, combo))
    index = {atom: i for i, atom in enumerate(universe)}
    n_raw = len(universe)

    a_entries: Dict[Tuple[int, int], Any] = {}
    b_entries: Dict[int, Any] = {}
    mono_entries: Dict[Tuple[int, Tuple[int, ...]], Any] = {}
    zero, one = s.zero, s.one

    for rule in program.rules:
        for prod in rule.body:
            head_vars = rule.head.variables()
            var_list = list(head_vars)
            for v in prod.variables():
                if v not in var_list:
                    var_list.append(v)
            for combo in itertools.product(adom, repeat=len(var_list)):
                binding = dict(zip(var_list, combo))
                head_atom = _instantiate(rule.head, binding)
                coeff = one
                cols: List[int] = []
                dead = False
                for atom in prod.atoms:
                    g = _instantiate(atom, binding)
                    if atom.pred in idb:
                        cols.append(index[g])
                    else:
                        v = db.facts.get(g)
                        if v is None:
                            dead = True
                            break
                        coeff = s.mul(coeff, v)
                if dead or coeff == zero:
                    continue
                r_i = index[head_atom]
                if linear:
                    if not cols:
                        b_entries[r_i] = s.add(b_entries.get(r_i, zero), coeff)
                    else:
                        key = (r_i, cols[0])
                        a_entries[key] = s.add(a_entries.get(key, zero), coeff)
                else:
                    key = (r_i, tuple(sorted(cols)))
                    mono_entries[key] = s.add(mono_entries.get(key, zero), coeff)

    if linear:
        a_entries = {k: v for k, v in a_entries.items() if v != zero}
        b_entries = {k: v for k, v in b_entries.items() if v != zero}
        keep = _productive_linear(n_raw, a_entries, b_entries) if prune else list(range(n_raw))
        remap = {old: new for new, old in enumerate(keep)}
        atoms = tuple(universe[i] for i in keep)
        A = Matrix(
            s,
            len(keep),
            (
                (remap[i], remap[j], v)
                for (i, j), v in a_entries.items()
                if i in remap and j in remap
            ),
        )
        b = [zero] * len(keep)
        for i, v in b_entries.items():
            if i in remap:
                b[remap[i]] = v
        return GroundedLinearSystem(
            s, atoms, {a: i for i, a in enumerate(atoms)}, A, tuple(b), n_raw, prune
        )

    mono_entries = {k: v for k, v in mono_entries.items() if v != zero}
    keep = _productive_polynomial(n_raw, mono_entries) if prune else list(range(n_raw))
    remap = {old: new for new, old in enumerate(keep)}
    atoms = tuple(universe[i] for i in keep)
    rows: List[List[Monomial]] = [[] for _ in keep]
    for (i, cols), v in sorted(mono_entries.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if i in remap and all(c in remap for c in cols):
            rows[remap[i]].append((v, tuple(sorted(remap[c] for c in cols))))
    return GroundedPolynomialSystem(
        s,
        atoms,
        {a: i for i, a in enumerate(atoms)},
        tuple(tuple(r) for r in rows),
        n_raw,
        prune,
    )


def _instantiate(atom: Atom, binding: Mapping[str, str]) -> GroundAtom:
    return (
        atom.pred,
        tuple(binding[t.name] if isinstance(t, Var) else t.name for t in atom.args),
    )


def _productive_linear(n, a_entries, b_entries) -> List[int]:
    # an atom can reach a nonzero value when a chain of nonzero A entries
    # connects it to a nonzero b entry
    by_col = defaultdict(list)
    for (i, j) in a_entries:
        by_col[j].append(i)
    productive = set(b_entries)
    work = list(productive)
    while work:
        j = work.pop()
        for i in by_col[j]:
            if i not in productive:
                productive.add(i)
                work.append(i)
    return sorted(productive)


def _productive_polynomial(n, mono_entries) -> List[int]:
    by_atom = defaultdict(list)
    for (i, cols) in mono_entries:
        by_atom[i].append(cols)
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for i, monos in by_atom.items():
            if i in productive:
                continue
            if any(all(c in productive for c in cols) for cols in monos):
                productive.add(i)
                changed = True
    return sorted(productive)
