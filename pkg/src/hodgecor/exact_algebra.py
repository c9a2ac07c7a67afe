"""Exact arithmetic over tensor and cyclic words.

Everything here is built on `fractions.Fraction`; no floating point enters.
Letters come from a small decoration alphabet (marked points, holomorphic /
antiholomorphic 1-form symbols, symplectic generators), words are tuples of
letters, and elements of the tensor algebra / its cyclic envelope are sparse
dicts mapping (cyclic) words to rational coefficients.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Letter", "Word", "AlgebraElement", "CyclicWord", "CyclicElement",
    "TensorSquareQ",
    "point", "hol_form", "antihol_form", "sympl_p", "sympl_q",
    "word", "concat", "cyclic_project", "shuffle_sum", "shuffles",
    "partial_derivative", "derivative_identity_check", "is_lie_element",
    "dilog_coproduct", "parse_cyclic", "parse_element", "format_cyclic",
]

_KIND_ORDER = {"s": 0, "dz": 1, "dzb": 2, "p": 3, "q": 4}


@dataclass(frozen=True, order=False)
class Letter:
    """One decoration symbol.

    kind is one of 's' (marked point), 'dz' / 'dzb' (holomorphic and
    antiholomorphic 1-form symbols), 'p' / 'q' (symplectic generators).
    Labels are strings for points, small ints for everything else.
    """

    kind: str
    label: object

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown letter kind {self.kind!r}")

    def _key(self):
        return (_KIND_ORDER[self.kind], str(self.label))

    def __lt__(self, other: "Letter"):
        return self._key() < other._key()

    def __le__(self, other: "Letter"):
        return self._key() <= other._key()

    def __str__(self):
        if self.kind == "s":
            return f"s:{self.label}"
        return f"{self.kind}{self.label}"

    __repr__ = __str__


def point(label) -> Letter:
    return Letter("s", str(label))


def hol_form(index: int = 1) -> Letter:
    return Letter("dz", int(index))


def antihol_form(index: int = 1) -> Letter:
    return Letter("dzb", int(index))


def sympl_p(index: int = 1) -> Letter:
    return Letter("p", int(index))


def sympl_q(index: int = 1) -> Letter:
    return Letter("q", int(index))


# A word is a plain tuple of letters; the empty tuple is the algebra unit.
Word = tuple

def word(*letters: Letter) -> Word:
    return tuple(letters)


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class AlgebraElement:
    """Element of the free tensor algebra with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Fraction] | None = None):
        t = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c:
                    t[tuple(w)] = t.get(tuple(w), Fraction(0)) + c
        self.terms = _clean(t)

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero() -> "AlgebraElement":
        return AlgebraElement()

    @staticmethod
    def one() -> "AlgebraElement":
        return AlgebraElement({(): Fraction(1)})

    @staticmethod
    def from_word(w: Iterable[Letter], coeff=1) -> "AlgebraElement":
        return AlgebraElement({tuple(w): Fraction(coeff)})

    @staticmethod
    def gen(letter: Letter) -> "AlgebraElement":
        return AlgebraElement({(letter,): Fraction(1)})

    # -- ring structure -----------------------------------------------
    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, Fraction(0)) + c
        return AlgebraElement(_clean(t))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement({w: -c for w, c in self.terms.items()})

    def __rmul__(self, scalar) -> "AlgebraElement":
        s = Fraction(scalar)
        return AlgebraElement({w: s * c for w, c in self.terms.items()})

    def __mul__(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return concat(self, other)
        return self.__rmul__(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), str(kv[0]))):
            ws = " ".join(map(str, w)) if w else "1"
            bits.append(f"{c}*[{ws}]")
        return " + ".join(bits)

    # -- structure maps -----------------------------------------------
    def letters(self) -> set:
        out = set()
        for w in self.terms:
            out.update(w)
        return out

    def is_homogeneous(self) -> bool:
        degs = {len(w) for w in self.terms}
        return len(degs) <= 1

    def degree(self) -> int:
        if not self.terms:
            return 0
        (d,) = {len(w) for w in self.terms}
        return d

    def truncate(self, max_degree: int) -> "AlgebraElement":
        return AlgebraElement({w: c for w, c in self.terms.items() if len(w) <= max_degree})

    def commutator(self, other: "AlgebraElement") -> "AlgebraElement":
        return concat(self, other) - concat(other, self)


def concat(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Tensor-algebra product; bilinear, associative, unit = empty word."""
    t = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            w = w1 + w2
            t[w] = t.get(w, Fraction(0)) + c1 * c2
    return AlgebraElement(_clean(t))


class CyclicWord:
    """A tensor word up to rotation, stored as its minimal rotation.

    symmetry_order is the number of rotations fixing the word; it divides the
    length and is kept as metadata (coefficients are never rescaled by it).
    """

    __slots__ = ("rep", "symmetry_order", "_hash")

    def __init__(self, letters: Iterable[Letter]):
        w = tuple(letters)
        if not w:
            raise ValueError("cyclic words have length >= 1")
        rots = [w[i:] + w[:i] for i in range(len(w))]
        rep = min(rots, key=lambda r: [x._key() for x in r])
        self.rep = rep
        self.symmetry_order = sum(1 for r in rots if r == rep)
        self._hash = hash(self.rep)

    def __len__(self):
        return len(self.rep)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.rep)

    def __eq__(self, other):
        return isinstance(other, CyclicWord) and self.rep == other.rep

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "CyclicWord"):
        return (len(self.rep), [x._key() for x in self.rep]) < (
            len(other.rep), [x._key() for x in other.rep])

    def rotations(self):
        w = self.rep
        return [w[i:] + w[:i] for i in range(len(w))]

    def __repr__(self):
        return "C(" + " ".join(map(str, self.rep)) + ")"


class CyclicElement:
    """Rational linear combination of cyclic words."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[CyclicWord, Fraction] | None = None):
        t = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c:
                    t[w] = t.get(w, Fraction(0)) + c
        self.terms = _clean(t)

    @staticmethod
    def zero() -> "CyclicElement":
        return CyclicElement()

    @staticmethod
    def from_word(letters: Iterable[Letter], coeff=1) -> "CyclicElement":
        return CyclicElement({CyclicWord(letters): Fraction(coeff)})

    def __add__(self, other: "CyclicElement") -> "CyclicElement":
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, Fraction(0)) + c
        return CyclicElement(_clean(t))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return CyclicElement({w: -c for w, c in self.terms.items()})

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return CyclicElement({w: s * c for w, c in self.terms.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        return isinstance(other, CyclicElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{w}" for w, c in sorted(self.terms.items(), key=lambda kv: kv[0]))

    def letters(self) -> set:
        out = set()
        for w in self.terms:
            out.update(w.rep)
        return out

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)


def cyclic_project(a: AlgebraElement) -> CyclicElement:
    """Projection A -> A/[A,A]; kills commutators, identifies rotations.

    The empty word (algebra unit) is dropped: the cyclic envelope is taken of
    the augmentation ideal.
    """
    t = {}
    for w, c in a.terms.items():
        if not w:
            continue
        cw = CyclicWord(w)
        t[cw] = t.get(cw, Fraction(0)) + c
    return CyclicElement(_clean(t))


def shuffles(p: int, q: int) -> Iterator[tuple]:
    """(p,q)-shuffles as position tuples: sigma with sigma^-1 increasing on blocks."""
    base = list(range(p + q))
    for positions in itertools.combinations(range(p + q), p):
        out = [None] * (p + q)
        rest = [i for i in base if i not in positions]
        for a, pos in enumerate(positions):
            out[pos] = a
        for b, pos in enumerate(rest):
            out[pos] = p + b
        yield tuple(out)


def shuffle_sum(head: Letter, block1: list, block2: list) -> CyclicElement:
    """Sum over (p,q)-shuffles of C(head x v_{sigma(1)} x ... x v_{sigma(p+q)}).

    These elements span the shuffle relations cutting the cyclic Lie coalgebra
    out of cyclic tensors.
    """
    p, q = len(block1), len(block2)
    if p < 1 or q < 1:
        raise ValueError("both shuffle blocks must be non-empty")
    merged = list(block1) + list(block2)
    acc = CyclicElement()
    for sigma in shuffles(p, q):
        lettersw = (head,) + tuple(merged[i] for i in sigma)
        acc = acc + CyclicElement.from_word(lettersw)
    return acc


def partial_derivative(F: CyclicElement, x: Letter) -> AlgebraElement:
    """Cyclic partial derivative d/dx: delete one occurrence of x and read the
    rest linearly starting after the deletion point; sum over occurrences."""
    t = {}
    for cw, c in F.terms.items():
        w = cw.rep
        for i, ell in enumerate(w):
            if ell == x:
                nw = w[i + 1:] + w[:i]
                t[nw] = t.get(nw, Fraction(0)) + c
    return AlgebraElement(_clean(t))


def derivative_identity_check(F: CyclicElement) -> AlgebraElement:
    """Sum over letters of [dF/dx, x]; identically zero for every F."""
    acc = AlgebraElement.zero()
    for x in sorted(F.letters()):
        acc = acc + partial_derivative(F, x).commutator(AlgebraElement.gen(x))
    return acc


def _unshuffle_reduced(a: AlgebraElement) -> dict:
    """Reduced coproduct making letters primitive (dual to shuffle): word ->
    sum over proper position subsets I of w|_I (x) w|_complement."""
    t = {}
    for w, c in a.terms.items():
        n = len(w)
        for mask in range(1, (1 << n) - 1):
            left = tuple(w[i] for i in range(n) if mask >> i & 1)
            right = tuple(w[i] for i in range(n) if not mask >> i & 1)
            t[(left, right)] = t.get((left, right), Fraction(0)) + c
    return _clean(t)


def is_lie_element(a: AlgebraElement) -> bool:
    """Primitivity test: a lies in the free Lie algebra iff the reduced
    unshuffle coproduct kills it. Requires homogeneous input."""
    if not a:
        return True
    if not a.is_homogeneous():
        raise ValueError("is_lie_element needs a homogeneous element")
    return not _unshuffle_reduced(a)


# ----------------------------------------------------------------------
# weight-two coproduct on Q* (x) Q*
# ----------------------------------------------------------------------

def _factor(n: int) -> dict:
    """Trial-division factorization of a positive integer, prime -> exponent."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _rational_vector(r: Fraction) -> tuple[int, dict]:
    """r = sign * prod p^e over primes; returns (sign, {p: e})."""
    if r == 0:
        raise ValueError("zero has no class in Q*")
    sign = 1 if r > 0 else -1
    num, den = abs(r.numerator), abs(r.denominator)
    v = _factor(num)
    for p, e in _factor(den).items():
        v[p] = v.get(p, 0) - e
    return sign, _clean(v)


class TensorSquareQ:
    """Element of (Q* tensor Q*) tensor Q, in the basis of prime pairs.

    Pairs involving the unit -1 are 2-torsion; they are stored under the
    symbol -1 and ignored by `mod_two_torsion`.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        self.terms = _clean({k: Fraction(v) for k, v in (terms or {}).items()})

    @staticmethod
    def pair(a: Fraction, b: Fraction, coeff=1) -> "TensorSquareQ":
        sa, va = _rational_vector(Fraction(a))
        sb, vb = _rational_vector(Fraction(b))
        t = {}
        items_a = list(va.items()) + ([(-1, 1)] if sa < 0 else [])
        items_b = list(vb.items()) + ([(-1, 1)] if sb < 0 else [])
        for (p, e), (q, f) in itertools.product(items_a, items_b):
            key = (p, q)
            t[key] = t.get(key, Fraction(0)) + Fraction(coeff) * e * f
        return TensorSquareQ(_clean(t))

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, Fraction(0)) + v
        return TensorSquareQ(_clean(t))

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, s):
        s = Fraction(s)
        return TensorSquareQ({k: s * v for k, v in self.terms.items()})

    __mul__ = __rmul__

    def mod_two_torsion(self) -> "TensorSquareQ":
        return TensorSquareQ({k: v for k, v in self.terms.items() if -1 not in k})

    def is_zero_mod_two_torsion(self) -> bool:
        return not self.mod_two_torsion().terms

    def __eq__(self, other):
        return isinstance(other, TensorSquareQ) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*({p}(x){q})" for (p, q), v in sorted(self.terms.items()))


def dilog_coproduct(args, symbols=()) -> TensorSquareQ:
    """Coproduct of sum n_i {z_i} plus symmetric symbols a_j * b_j.

    {z} contributes (1-z) (x) z (the sign convention of the worked identity
    (1-1/3)(x)(1/3) + (1+1/2)(x)(-1/2) = 3/2 (x) 3/2); a*b contributes
    a (x) b + b (x) a, and symbols may carry an explicit third coefficient
    entry.  The result lives in (Q* tensor Q*) tensor Q; compare mod
    2-torsion to drop -1 factors.
    """
    acc = TensorSquareQ()
    for z, n in args:
        z = Fraction(z)
        if z == 0 or z == 1:
            raise ValueError("dilog argument must avoid 0 and 1")
        acc = acc + TensorSquareQ.pair(1 - z, z, coeff=Fraction(n))
    for ab in symbols:
        if len(ab) == 3:
            a, b, coeff = ab
        else:
            a, b = ab
            coeff = 1
        a, b = Fraction(a), Fraction(b)
        if a == 0 or b == 0:
            raise ValueError("log symbols must be nonzero rationals")
        acc = acc + TensorSquareQ.pair(a, b, coeff) + TensorSquareQ.pair(b, a, coeff)
    return acc


# ----------------------------------------------------------------------
# text grammar:  C(s:a dz1 p2 ...)   with rational coefficients num/den
# ----------------------------------------------------------------------

_LETTER_RE = re.compile(r"s:([^\s()]+)|dzb(\d+)|dz(\d+)|p(\d+)|q(\d+)")


def _parse_letter(tok: str) -> Letter:
    m = _LETTER_RE.fullmatch(tok)
    if not m:
        raise ValueError(f"bad letter token {tok!r}")
    if m.group(1) is not None:
        return point(m.group(1))
    if m.group(2) is not None:
        return antihol_form(int(m.group(2)))
    if m.group(3) is not None:
        return hol_form(int(m.group(3)))
    if m.group(4) is not None:
        return sympl_p(int(m.group(4)))
    return sympl_q(int(m.group(5)))


def parse_cyclic(text: str) -> CyclicWord:
    """Parse `C(tok tok ...)` into a CyclicWord."""
    text = text.strip()
    if not (text.startswith("C(") and text.endswith(")")):
        raise ValueError(f"expected C(...), got {text!r}")
    toks = text[2:-1].split()
    if not toks:
        raise ValueError("empty cyclic word")
    return CyclicWord([_parse_letter(t) for t in toks])


def parse_element(text: str) -> CyclicElement:
    """Parse sums like `3/2*C(s:a s:b) - C(s:a dz1)`."""
    s = text.replace("-", "+-").replace(" ", " ")
    parts = [p.strip() for p in s.split("+") if p.strip()]
    acc = CyclicElement()
    for part in parts:
        coeff = Fraction(1)
        if part.startswith("-"):
            coeff = -coeff
            part = part[1:].strip()
        if "*" in part:
            cs, part = part.split("*", 1)
            coeff *= Fraction(cs.strip())
        acc = acc + coeff * CyclicElement({parse_cyclic(part): Fraction(1)})
    return acc


def format_cyclic(w: CyclicWord) -> str:
    return repr(w)
