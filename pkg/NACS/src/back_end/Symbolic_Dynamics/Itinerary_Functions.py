### Standard Libraries
from dataclasses import dataclass

### External Libraries
import numpy as np

### General Modules
from NACS.src.back_end.General_Utility.Errors import WordError
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    strip_cell_grid,
)

"""
Symbols, words and transition matrices.

A word is stored as an Itinerary: the present time n, the symbols seen
before it (s_{n-k} .. s_{n-1}) and the symbols from n onwards
(s_n .. s_{n+k}). Symbols run from 1 to N. The matrix A^n has entry
(i, j) = 1 exactly when H_i^{n+1} ∩ V_j^{n+1} is non-empty, i.e. when an
orbit in V_i at time n can be in V_j at time n+1.
"""


@dataclass(frozen=True)
class Itinerary:
    base_time: int
    past: tuple = ()
    future: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base_time", int(self.base_time))
        object.__setattr__(self, "past", tuple(int(s) for s in self.past))
        object.__setattr__(self, "future", tuple(int(s) for s in self.future))
        if any(s < 1 for s in self.past + self.future):
            raise WordError("symbols start at 1")

    @property
    def word(self):
        return self.past + self.future

    @property
    def start_time(self):
        """Time index of the first symbol of the word."""
        return self.base_time - len(self.past)

    def truncate(self, past_len, future_len):
        if len(self.past) < past_len or len(self.future) < future_len:
            raise WordError(
                "itinerary %s is shorter than the requested %d.%d window"
                % (format_word(self), past_len, future_len)
            )
        past = self.past[len(self.past) - past_len:] if past_len else ()
        return Itinerary(self.base_time, past, self.future[:future_len])

    def __str__(self):
        return format_word(self)


def format_word(it):
    """'112.121': past symbols, a dot for the present, then the future."""
    if any(s > 9 for s in it.word):
        raise WordError("dotted word strings need single-digit symbols")
    return "".join(map(str, it.past)) + "." + "".join(map(str, it.future))


def parse_word(text, base_time=0):
    text = text.strip()
    if text.count(".") != 1:
        raise WordError("a word needs exactly one dot, got %r" % (text,))
    past, future = text.split(".")
    if not (past + future).isdigit() and (past + future):
        raise WordError("word %r contains non-digit symbols" % (text,))
    return Itinerary(base_time, tuple(map(int, past)), tuple(map(int, future)))


def shift_word(it):
    """The extended shift: move the present one step right, time n -> n+1."""
    if not it.future:
        raise WordError("cannot shift a word with an empty future")
    return Itinerary(it.base_time + 1, it.past + it.future[:1], it.future[1:])


def unshift_word(it):
    """Inverse of shift_word."""
    if not it.past:
        raise WordError("cannot unshift a word with an empty past")
    return Itinerary(it.base_time - 1, it.past[:-1], it.past[-1:] + it.future)


def compute_transition_matrix(geom, n, grid=5):
    """A^n from strip intersections, certified by sampled cell points.

    Parameters
    ----------
    geom: StripGeometry
        Source of H_i^{n+1} and V_j^{n+1}; a missing strip gives zeros.

    n: integer
        Time index of the matrix.

    grid: integer
        Lattice size used to look for points of each cell.


    Returns
    -------
    matrix: np.ndarray
        N x N array of 0/1 integers.
    """

    size = geom.n_symbols
    matrix = np.zeros((size, size), dtype=int)
    for i in range(1, size + 1):
        h_strip = geom.h_strip_at(n + 1, i)
        if h_strip is None:
            continue
        for j in range(1, size + 1):
            v_strip = geom.v_strip(n + 1, j)
            if v_strip is None:
                continue
            _, _, valid = strip_cell_grid(v_strip, h_strip, grid)
            matrix[i - 1, j - 1] = int(np.any(valid))
    return matrix


class TransitionMatrixSeq:
    """The sequence n -> A^n, computed on demand and memoised."""

    def __init__(self, geom, grid=5):
        self.geom = geom
        self.grid = grid
        self.n_symbols = geom.n_symbols
        self._cache = {}

    def matrix(self, n):
        n = int(n)
        if n not in self._cache:
            self._cache[n] = compute_transition_matrix(self.geom, n, self.grid)
        return self._cache[n]

    def allows(self, n, i, j):
        return bool(self.matrix(n)[i - 1, j - 1])


def is_admissible(it, transitions):
    """Every adjacent pair (s_m, s_{m+1}) satisfies A^m = 1."""
    word = it.word
    if any(s > transitions.n_symbols for s in word):
        return False
    start = it.start_time
    return all(
        transitions.allows(start + k, word[k], word[k + 1])
        for k in range(len(word) - 1)
    )


def iter_admissible_words(transitions, start_time, length):
    """Lazily yield admissible words (tuples) of the given length.

    The word's first symbol sits at start_time. Words come out in
    lexicographic order.
    """

    if length <= 0:
        yield ()
        return
    symbols = range(1, transitions.n_symbols + 1)
    stack = [(s,) for s in reversed(symbols)]
    while stack:
        word = stack.pop()
        if len(word) == length:
            yield word
            continue
        m = start_time + len(word) - 1
        for s in reversed(symbols):
            if transitions.allows(m, word[-1], s):
                stack.append(word + (s,))


def iter_itineraries(transitions, n, past_len, future_len):
    """Admissible itineraries centred at time n, lexicographic order."""
    for word in iter_admissible_words(
        transitions, n - past_len, past_len + future_len
    ):
        yield Itinerary(n, word[:past_len], word[past_len:])
