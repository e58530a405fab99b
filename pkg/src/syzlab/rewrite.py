"""Free algebra terms, terminating rewriting, and algebras built from rewrite rules."""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from math import comb, factorial

import numpy as np

from .linalg import Field, float_type, matmul

Word = tuple  # tuple of generator symbols; () is the identity

DEFAULT_STEP_LIMIT = 10**6
DEFAULT_LENGTH_CAP = 64


class RewriteError(Exception):
    code = "REWRITE_ERROR"


class StepLimitError(RewriteError):
    code = "STEP_LIMIT"


class DimensionMismatchError(RewriteError):
    code = "DIMENSION_MISMATCH"


class AssociativityError(RewriteError):
    code = "ASSOCIATIVITY_FAILURE"


class NCPoly:
    """Element of the free algebra: a finite map word -> nonzero scalar."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms=None):
        self.field = field
        self.terms: dict = {}
        for w, c in (terms or {}).items():
            c = field(c)
            if c != 0:
                self.terms[tuple(w)] = c

    @classmethod
    def word(cls, field: Field, w, coeff=1) -> "NCPoly":
        return cls(field, {tuple(w): coeff})

    def _combine(self, other: "NCPoly", sign: int) -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = self.field(out.get(w, 0) + sign * c)
        return NCPoly(self.field, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return NCPoly(self.field, {w: -c for w, c in self.terms.items()})

    def scale(self, s) -> "NCPoly":
        s = self.field(s)
        return NCPoly(self.field, {w: c * s for w, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        out: dict = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                out[u + v] = self.field(out.get(u + v, 0) + a * b)
        return NCPoly(self.field, out)

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, NCPoly) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self, alphabet) -> list:
        pos = {g: i for i, g in enumerate(alphabet)}
        return sorted(self.terms.items(), key=lambda wc: (len(wc[0]), [pos[g] for g in wc[0]]))

    def __repr__(self) -> str:
        if not self.terms:
            return "NCPoly(0)"
        parts = [f"{c}*{''.join(w) or '1'}" for w, c in self.terms.items()]
        return "NCPoly(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: dict  # word -> scalar


@dataclass
class RewriteSystem:
    """Ordered alphabet, rewrite rules and the word order that makes them terminate.

    Words are compared by (weighted degree, length, lexicographic position in the
    alphabet); every rule must rewrite its left word into strictly smaller words.
    """

    field: Field
    alphabet: tuple
    rules: list
    weights: dict = dc_field(default_factory=dict)
    dimension: int | None = None
    name: str = "custom"

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has repeated symbols")
        self._pos = {g: i for i, g in enumerate(self.alphabet)}
        rules = []
        for rule in self.rules:
            if not isinstance(rule, Rule):
                lhs, rhs = rule
                rule = Rule(tuple(lhs), dict(rhs))
            rhs = {tuple(w): self.field(c) for w, c in rule.rhs.items() if self.field(c) != 0}
            rules.append(Rule(tuple(rule.lhs), rhs))
        self.rules = rules
        for rule in self.rules:
            for g in rule.lhs + tuple(s for w in rule.rhs for s in w):
                if g not in self._pos:
                    raise ValueError(f"symbol {g!r} not in alphabet {self.alphabet}")
            if not rule.lhs:
                raise ValueError("a rule may not rewrite the empty word")
            for w in rule.rhs:
                if self.order_key(w) >= self.order_key(rule.lhs):
                    raise ValueError(
                        f"rule {''.join(rule.lhs)} -> ... does not decrease the word order at {''.join(w) or '1'}"
                    )
        self._cache: dict = {}
        self._by_first: dict = {}
        for rule in self.rules:
            self._by_first.setdefault(rule.lhs[0], []).append(rule)

    def weight(self, g) -> int:
        return self.weights.get(g, 1)

    def order_key(self, w: Word):
        return (sum(self.weight(g) for g in w), len(w), tuple(self._pos[g] for g in w))

    def is_irreducible(self, w: Word) -> bool:
        return not any(_occurs(rule.lhs, w) for rule in self.rules)

    # reduction

    def _times_gen(self, g, v: Word, budget: list) -> dict:
        """Normal form of ``g * v`` for irreducible ``v``."""
        key = (g, v)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        w = (g,) + v
        # v is irreducible, so any redex starts at position 0
        rule = next((r for r in self._by_first.get(g, ()) if w[: len(r.lhs)] == r.lhs), None)
        if rule is None:
            result = {w: self.field(1)}
        else:
            budget[0] -= 1
            if budget[0] < 0:
                raise StepLimitError("rewriting exceeded the step budget")
            tail = w[len(rule.lhs):]
            result = {}
            for u, c in rule.rhs.items():
                for t, d in self._word_onto(u, tail, budget).items():
                    result[t] = self.field(result.get(t, 0) + c * d)
            result = {t: c for t, c in result.items() if c != 0}
        self._cache[key] = result
        return result

    def _word_onto(self, u: Word, tail: Word, budget: list) -> dict:
        """Normal form of ``u * tail`` for irreducible ``tail``."""
        current = {tail: self.field(1)}
        for g in reversed(u):
            nxt: dict = {}
            for v, c in current.items():
                for t, d in self._times_gen(g, v, budget).items():
                    nxt[t] = self.field(nxt.get(t, 0) + c * d)
            current = {t: c for t, c in nxt.items() if c != 0}
        return current

    def normal_form(self, p: NCPoly, step_limit: int = DEFAULT_STEP_LIMIT) -> NCPoly:
        """Exhaustive rewriting to normal form.

        Words are reduced innermost-first from the right: the suffix is always
        irreducible, so the only redex is at the left end.  Raises
        :class:`StepLimitError` after ``step_limit`` fresh rewrites.
        """
        budget = [step_limit]
        out: dict = {}
        for w, c in p.terms.items():
            for t, d in self._word_onto(w, (), budget).items():
                out[t] = self.field(out.get(t, 0) + c * d)
        return NCPoly(self.field, out)

    def irreducible_words(self, length_cap: int | None = None) -> list:
        """All irreducible words, sorted by the word order."""
        if length_cap is None:
            length_cap = self.dimension if self.dimension is not None else DEFAULT_LENGTH_CAP
        found = [()]
        frontier = [()]
        for _ in range(length_cap):
            nxt = []
            for w in frontier:
                for g in self.alphabet:
                    v = w + (g,)
                    if not any(_ends_with_subword(rule.lhs, v) for rule in self.rules):
                        nxt.append(v)
            if not nxt:
                break
            found.extend(nxt)
            if self.dimension is not None and len(found) > self.dimension:
                raise DimensionMismatchError(
                    f"more than {self.dimension} irreducible words: the quotient is larger than declared"
                )
            frontier = nxt
        else:
            if frontier:
                raise DimensionMismatchError(
                    f"irreducible words of length {length_cap} exist: quotient looks infinite"
                )
        return sorted(found, key=self.order_key)


def _occurs(sub: Word, w: Word) -> bool:
    n = len(sub)
    return any(w[i:i + n] == sub for i in range(len(w) - n + 1))


def _ends_with_subword(sub: Word, w: Word) -> bool:
    n = len(sub)
    return len(w) >= n and w[len(w) - n:] == sub


def build_algebra(system: RewriteSystem, *, assoc_samples: int = 10**5, seed: int = 0):
    """Basis of irreducible words plus full multiplication table.

    Associativity is checked on every basis triple when N^3 <= 10^7, otherwise on
    ``assoc_samples`` random triples.
    """
    from .algebra import FiniteDimAlgebra

    field = system.field
    basis = system.irreducible_words()
    n = len(basis)
    if system.dimension is not None and n != system.dimension:
        raise DimensionMismatchError(f"found {n} irreducible words, expected {system.dimension}")
    index = {w: i for i, w in enumerate(basis)}

    def coeffs(d: dict) -> np.ndarray:
        v = field.zeros(n)
        for w, c in d.items():
            v[index[w]] = c
        return v

    budget = [DEFAULT_STEP_LIMIT * max(n, 1)]
    gen_ops = {}
    for g in system.alphabet:
        op = field.zeros((n, n))
        for j, w in enumerate(basis):
            op[j] = coeffs(system._times_gen(g, w, budget))
        gen_ops[g] = op

    # table[i, j] = coefficients of basis[i] * basis[j]; row block i is the
    # left multiplication by basis[i], built from its first letter
    table = field.zeros((n, n, n))
    for i, w in enumerate(basis):
        if not w:
            table[i] = field.eye(n)
        else:
            table[i] = matmul(table[index[w[1:]]], gen_ops[w[0]], field)

    alg = FiniteDimAlgebra(field, basis, table, alphabet=system.alphabet, name=system.name)
    alg.rewrite_system = system
    failures = check_associativity(alg, samples=assoc_samples, seed=seed)
    if failures:
        i, j, k = failures[0]
        raise AssociativityError(
            f"(b{i} b{j}) b{k} != b{i} (b{j} b{k}); the rule set is not confluent"
        )
    return alg


def check_associativity(alg, *, samples: int = 10**5, seed: int = 0, exhaustive_limit: int = 10**7):
    """Return failing basis triples (empty when associative)."""
    field, t, n = alg.field, alg.table, alg.dim
    flat_left = t.reshape(n, n * n)  # c -> (k, out)
    flat_right = t.reshape(n * n, n)  # (j, k) -> c
    failures = []
    if n**3 <= exhaustive_limit:
        ftype = float_type(field, n)
        if ftype is not None:
            # convert once; the per-i products then stay in BLAS
            tf, lf, rf = t.astype(ftype), flat_left.astype(ftype), flat_right.astype(ftype)

            def prod(a, b):
                return np.mod(np.dot(a, b), field.p)
        else:
            tf, lf, rf = t, flat_left, flat_right

            def prod(a, b):
                return matmul(a, b, field)
        for i in range(n):
            lhs = prod(tf[i], lf).reshape(n, n, n)  # (b_i b_j) b_k
            rhs = prod(rf, tf[i]).reshape(n, n, n)  # b_i (b_j b_k)
            bad = np.argwhere(np.any(lhs != rhs, axis=2))
            failures.extend((i, int(j), int(k)) for j, k in bad)
            if failures:
                break
        return failures
    rng = np.random.default_rng(seed)
    triples = rng.integers(0, n, size=(samples, 3))
    for i, j, k in triples:
        lhs = matmul(t[i, j], t[:, k, :], field)
        rhs = matmul(t[j, k], t[i], field)
        if np.any(lhs != rhs):
            failures.append((int(i), int(j), int(k)))
            break
    return failures


def commutation_expansion(field: Field, p: int, b: int, c: int) -> NCPoly:
    """The closed-form reordering of y^b z^c as a sum of a^r z^(c-r) y^(b-r)."""
    terms = {}
    for r in range(min(b, c) + 1):
        w = ("a",) * r + ("z",) * (c - r) + ("y",) * (b - r)
        terms[w] = factorial(r) * comb(b, r) * comb(c, r)
    return NCPoly(field, terms)


def verify_commutation_formula(alg, p: int) -> dict:
    """Compare table products y^b z^c with the closed-form expansion, 0 <= b, c < p."""
    system = alg.rewrite_system
    mismatches = []
    checked = 0
    for b in range(p):
        for c in range(p):
            lhs = alg.element_from_word(("y",) * b) * alg.element_from_word(("z",) * c)
            rhs = alg.element_from_poly(system.normal_form(commutation_expansion(alg.field, p, b, c)))
            checked += 1
            if lhs != rhs:
                mismatches.append({"b": b, "c": c, "table": str(lhs), "formula": str(rhs)})
    return {"checked": checked, "mismatches": mismatches, "passed": not mismatches}


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*)(?:\s*\^\s*(\d+))?")


def parse_word(text: str, alphabet) -> Word:
    """Parse ``"x^2 y"`` / ``"x*x*y"`` / ``"xxy"`` (single-letter alphabets) into a word."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    out: list = []
    singles = all(len(g) == 1 for g in alphabet)
    for chunk in re.split(r"[\s*]+", text):
        if not chunk or chunk == "1":
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", chunk)
        if not m:
            raise ValueError(f"cannot parse word {text!r}")
        sym, exp = m.group(1), int(m.group(2) or 1)
        if sym in alphabet:
            out.extend([sym] * exp)
        elif singles and all(ch in alphabet for ch in sym):
            out.extend(sym[:-1])
            out.extend([sym[-1]] * exp)
        else:
            raise ValueError(f"unknown generator in {chunk!r}")
    return tuple(out)


def parse_poly(text: str, field: Field, alphabet) -> NCPoly:
    """Parse a signed sum of terms such as ``"2*x^2 y - 1/3*y + 1"``."""
    text = text.replace("−", "-").strip()
    if text in ("", "0"):
        return NCPoly(field)
    result = NCPoly(field)
    for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", text):
        body = body.strip()
        m = re.fullmatch(r"(\d+(?:/\d+)?)\s*\*?\s*(.*)", body)
        if m:
            coeff, rest = m.group(1), m.group(2)
        else:
            coeff, rest = "1", body
        c = field(coeff)
        if sign == "-":
            c = field(-c)
        result = result + NCPoly.word(field, parse_word(rest, alphabet), c)
    return result


def system_from_config(field: Field, alphabet, rules, weights=None, dimension=None, name="custom"):
    """Build a rewrite system from ``[["yx", "q^-1 ..."], ...]``-style string rules."""
    parsed = []
    for lhs, rhs in rules:
        parsed.append(Rule(parse_word(lhs, alphabet), parse_poly(rhs, field, alphabet).terms))
    return RewriteSystem(field, tuple(alphabet), parsed, weights=dict(weights or {}),
                         dimension=dimension, name=name)
