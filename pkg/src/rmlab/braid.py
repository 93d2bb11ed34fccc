"""Braid group representations attached to a Yang-Baxter solution.

A solution R on C^d (x) C^d represents the braid group B_n on
(C^d)^(x) n by sending the generator b_k to R acting on slots k, k+1.
Characters are normalized traces of represented words; they are class
functions, stable under adding strands, and multiplicative over the
cycle structure of the underlying permutation for involutive
solutions (the Thoma formula).

Words are serialized as signed integer lists, e.g. [1, 2, -1] for
b_1 b_2 b_1^{-1}.  Where a single canonical witness word is needed,
words are ordered shortlex with letter order 1 < -1 < 2 < -2 < ...
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InternalConsistencyError
from .rmatrix import RMatrix, flip_conjugate, make_flip
from .tensor import (
    AlgebraElement,
    embed,
    frobenius_norm,
    identity_element,
    normalized_trace,
    shift,
)

__all__ = [
    "BraidWord",
    "CycleType",
    "CharacterComparison",
    "represent",
    "character",
    "fundamental_braid",
    "intertwiner_Y",
    "thoma_character",
    "characters_equal",
    "underlying_permutation",
]


def _free_reduce(letters):
    stack = []
    for gen, exp in letters:
        if stack and stack[-1][0] == gen and stack[-1][1] == -exp:
            stack.pop()
        else:
            stack.append((gen, exp))
    return tuple(stack)


@dataclass(frozen=True)
class BraidWord:
    """A freely reduced word in the braid group B_strands.

    ``letters`` is a tuple of (generator index, exponent) pairs with
    1 <= index <= strands - 1 and exponent in {+1, -1}.  Construction
    applies free reduction, so adjacent inverse pairs never survive.
    """

    strands: int
    letters: tuple = ()

    def __post_init__(self):
        if self.strands < 1:
            raise DomainError(f"strand count must be >= 1, got {self.strands}")
        letters = []
        for gen, exp in self.letters:
            gen, exp = int(gen), int(exp)
            if exp not in (+1, -1):
                raise DomainError(f"exponent must be +1 or -1, got {exp}")
            if not 1 <= gen <= self.strands - 1:
                raise DomainError(
                    f"generator {gen} out of range for {self.strands} strands"
                )
            letters.append((gen, exp))
        object.__setattr__(self, "letters", _free_reduce(letters))

    @classmethod
    def from_ints(cls, ints, strands: int | None = None) -> "BraidWord":
        """Build from a signed integer list like [1, 2, -1]."""
        ints = [int(v) for v in ints]
        if any(v == 0 for v in ints):
            raise DomainError("0 is not a valid letter")
        if strands is None:
            strands = max((abs(v) for v in ints), default=0) + 1
        return cls(strands, tuple((abs(v), 1 if v > 0 else -1) for v in ints))

    def to_ints(self) -> list[int]:
        return [gen * exp for gen, exp in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(
            self.strands,
            tuple((g, -e) for g, e in reversed(self.letters)),
        )

    def concat(self, other: "BraidWord") -> "BraidWord":
        n = max(self.strands, other.strands)
        return BraidWord(n, self.letters + other.letters)


def _generator(r: RMatrix, gen: int, exp: int) -> AlgebraElement:
    """b_gen^exp at its minimal level gen + 1."""
    m = r.matrix if exp > 0 else r.matrix.conj().T
    return shift(AlgebraElement(r.d, 2, m), gen - 1)


def _partial_product(r: RMatrix, letters) -> AlgebraElement:
    """Product of represented letters at the minimal running level."""
    prod = identity_element(r.d, 0)
    for gen, exp in letters:
        g = _generator(r, gen, exp)
        level = max(prod.level, g.level)
        prod = AlgebraElement(
            r.d, level, embed(prod, level).matrix @ embed(g, level).matrix
        )
    return prod


def represent(r: RMatrix, word: BraidWord) -> AlgebraElement:
    """The represented word as a level-``strands`` algebra element."""
    prod = _partial_product(r, word.letters)
    return embed(prod, word.strands)


def character(r: RMatrix, word: BraidWord) -> complex:
    """Normalized trace of the represented word.

    Stable under adding strands, so it is evaluated at the minimal
    level the word needs; the last factor is folded into the trace
    directly instead of forming one more full product.
    """
    if not word.letters:
        return 1.0 + 0.0j
    head, last = word.letters[:-1], word.letters[-1]
    prod = _partial_product(r, head)
    g = _generator(r, *last)
    level = max(prod.level, g.level)
    a = embed(prod, level).matrix
    b = embed(g, level).matrix
    # tr(AB) without the product matrix.
    return complex(np.sum(a * b.T)) / r.d ** level


def underlying_permutation(word: BraidWord) -> tuple:
    """Image of the word in the symmetric group (0-based, perm[i] = image)."""
    perm = list(range(word.strands))
    # Right-multiplying by the transposition (k-1, k) swaps positions,
    # so scanning letters left to right matches the operator product.
    for gen, _ in word.letters:
        perm[gen - 1], perm[gen] = perm[gen], perm[gen - 1]
    return tuple(perm)


def fundamental_braid(n: int) -> BraidWord:
    """The positive half twist on n strands.

    Defined recursively: trivial on one strand, and the half twist on
    m strands is b_1 ... b_{m-1} times the half twist on m - 1 strands.
    """
    if n < 1:
        raise DomainError(f"strand count must be >= 1, got {n}")
    letters: list = []
    for m in range(n, 1, -1):
        letters.extend((k, +1) for k in range(1, m))
    # Built outermost-first already: b_1..b_{n-1} then the (n-1)-twist.
    return BraidWord(n, tuple(letters))


def intertwiner_Y(r: RMatrix, n: int, tol: float = 1e-10) -> AlgebraElement:
    """Unitary intertwining the representation of R with that of FRF.

    Y_n is the flip-conjugated half twist times the plain flip half
    twist.  The intertwining property is re-checked on every generator
    and a failure raises an internal-consistency error.
    """
    frf = flip_conjugate(r)
    flip = make_flip(r.d)
    delta = fundamental_braid(n)
    y = represent(frf, delta).matrix @ represent(flip, delta).matrix
    out = AlgebraElement(r.d, n, y)
    for k in range(1, n):
        gr = embed(_generator(r, k, +1), n).matrix
        gf = embed(_generator(frf, k, +1), n).matrix
        resid = frobenius_norm(y @ gr @ y.conj().T - gf)
        if resid > tol:
            raise InternalConsistencyError(
                f"intertwiner fails on generator {k}: residual {resid:.3e}"
            )
    return out


@dataclass(frozen=True)
class CycleType:
    """Cycle multiplicities of a permutation: length -> count, lengths >= 2.

    Fixed points are omitted; they never change a character value.
    """

    cycles: tuple = ()

    def __post_init__(self):
        cleaned = []
        for length, count in self.cycles:
            length, count = int(length), int(count)
            if length < 2:
                continue
            if count < 1:
                raise DomainError(f"count must be >= 1, got {count}")
            cleaned.append((length, count))
        cleaned.sort()
        object.__setattr__(self, "cycles", tuple(cleaned))

    @classmethod
    def from_permutation(cls, perm) -> "CycleType":
        perm = list(perm)
        seen = [False] * len(perm)
        counts: dict = {}
        for start in range(len(perm)):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length >= 2:
                counts[length] = counts.get(length, 0) + 1
        return cls(tuple(sorted(counts.items())))

    def items(self):
        return self.cycles


def thoma_character(spec, cycle_type: CycleType) -> float:
    """Character value of a normal-form solution on a permutation.

    Multiplicative over cycles: a length-n cycle contributes the
    signed power sum of the block weights, with alternating sign on
    the negative blocks.
    """
    weights = spec.signed_weights()
    alphas = [w for w in weights if w > 0]
    betas = [-w for w in weights if w < 0]
    value = 1.0
    for length, count in cycle_type.items():
        term = sum(a ** length for a in alphas)
        term += (-1) ** (length + 1) * sum(b ** length for b in betas)
        value *= term ** count
    return float(value)


@dataclass(frozen=True)
class CharacterComparison:
    equal: bool
    witness: tuple | None
    deviation: float
    words_checked: int
    max_strands: int
    max_len: int
    tol: float


def characters_equal(r: RMatrix, s: RMatrix, max_strands: int = 4,
                     max_len: int = 6, tol: float = 1e-9
                     ) -> CharacterComparison:
    """Compare characters over all freely reduced words up to a budget.

    Scans every freely reduced word with generators below
    ``max_strands`` and length at most ``max_len``.  If any word's
    character values differ by more than ``tol``, the shortlex-smallest
    such word is reported as the witness (letter order
    1 < -1 < 2 < -2 < ...).  Equality is only up to this truncation.
    """
    if max_strands < 2 or max_len < 1:
        raise DomainError("need max_strands >= 2 and max_len >= 1")
    order = []
    for gen in range(1, max_strands):
        order.append((gen, +1))
        order.append((gen, -1))
    rank = {letter: i for i, letter in enumerate(order)}

    best: tuple | None = None  # (len, rank-tuple, ints, deviation)
    checked = 0

    def visit(word, depth, prod_r, prod_s):
        nonlocal best, checked
        for letter in order:
            if word and (word[-1][0], -word[-1][1]) == letter:
                continue
            gen, exp = letter
            gr = _generator(r, gen, exp)
            gs = _generator(s, gen, exp)
            lr = max(prod_r.level, gr.level)
            ls = max(prod_s.level, gs.level)
            pr = AlgebraElement(
                r.d, lr, embed(prod_r, lr).matrix @ embed(gr, lr).matrix
            )
            ps = AlgebraElement(
                s.d, ls, embed(prod_s, ls).matrix @ embed(gs, ls).matrix
            )
            checked += 1
            dev = abs(normalized_trace(pr) - normalized_trace(ps))
            if dev > tol:
                new_word = word + [letter]
                key = (len(new_word), tuple(rank[l] for l in new_word))
                if best is None or key < (best[0], best[1]):
                    best = (
                        key[0], key[1],
                        tuple(g * e for g, e in new_word), dev,
                    )
            if depth + 1 < max_len:
                word.append(letter)
                visit(word, depth + 1, pr, ps)
                word.pop()

    visit([], 0, identity_element(r.d, 0), identity_element(s.d, 0))
    if best is None:
        return CharacterComparison(True, None, 0.0, checked,
                                   max_strands, max_len, tol)
    return CharacterComparison(False, best[2], best[3], checked,
                               max_strands, max_len, tol)
