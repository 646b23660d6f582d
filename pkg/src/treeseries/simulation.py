"""Matrix simulations between descriptions.

A matrix ``M`` (m x n) is a simulation ``(v, D) -> (w, E)`` when ``vM = w``
and, for every ``i``, substituting ``x_j := Σ_l M[j][l] y_l`` into the
``i``-th right side of ``D`` gives the same normal form as
``Σ_l M[i][l] t_l`` where ``t_l`` are the right sides of ``E``. Related
descriptions have equal behaviors. Equal behaviors need not give a matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .descriptions import Description, DescriptionError, EquationSystem, is_flat
from .semiring import Semiring
from .terms import LinearForm, Var, substitute

DEFAULT_BUDGET = 2 ** 20


class SimulationError(ValueError):
    pass


class BudgetExceededError(SimulationError):
    pass


@dataclass(frozen=True)
class SimMatrix:
    """``rows[i][j]`` holds raw semiring elements."""

    semiring: Semiring
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(self.semiring.coerce(x) for x in row) for row in self.rows)
        if len({len(r) for r in rows}) > 1:
            raise SimulationError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, semiring: Semiring, n: int) -> SimMatrix:
        return cls(semiring, tuple(tuple(semiring.one if i == j else semiring.zero
                                         for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, semiring: Semiring, m: int, n: int) -> SimMatrix:
        return cls(semiring, ((semiring.zero,) * n,) * m)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def format(self) -> str:
        m, n = self.shape
        fmt = self.semiring.format
        lines = [f"{m} {n}"] + [" ".join(fmt(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, semiring: Semiring) -> SimMatrix:
        """Read ``m n`` then ``m`` rows of ``n`` literals."""
        tokens = text.split()
        if len(tokens) < 2:
            raise SimulationError("matrix file must start with 'm n'")
        try:
            m, n = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise SimulationError("matrix dimensions must be integers") from None
        body = tokens[2:]
        if m < 0 or n < 0 or len(body) != m * n:
            raise SimulationError(f"expected {m * n} entries for a {m}x{n} matrix, got {len(body)}")
        rows = tuple(tuple(semiring.parse(body[i * n + j]) for j in range(n)) for i in range(m))
        if m == 0:
            rows = ()
        return cls(semiring, rows)


def _rows_of(M: SimMatrix | Sequence[Sequence], semiring: Semiring) -> SimMatrix:
    return M if isinstance(M, SimMatrix) else SimMatrix(semiring, tuple(map(tuple, M)))


def _check_dims(M: SimMatrix, m: int, n: int):
    rows, cols = M.shape
    if rows != m or (m and cols != n):
        raise SimulationError(f"matrix is {rows}x{cols}, expected {m}x{n}")


def build_DM(D: EquationSystem, M: SimMatrix, n: int | None = None) -> tuple[LinearForm, ...]:
    """Right sides of ``D`` with ``x_i := Σ_j M[i][j] y_j``.

    The result is indexed like ``D``; its variables are the ``y_j`` (printed
    as ``x_j``, positions ``0..n-1``).
    """
    sr = D.semiring
    M = _rows_of(M, sr)
    if n is None:
        n = M.shape[1]
    _check_dims(M, len(D), n)
    rows = [LinearForm(sr, {Var(j): x for j, x in enumerate(row)}) for row in M.rows]
    return tuple(substitute(f, variables=rows) for f in D.rhs)


def build_ME(E: EquationSystem, M: SimMatrix) -> tuple[LinearForm, ...]:
    """``x_i = Σ_j M[i][j] t_j`` where ``t_j`` are the right sides of ``E``."""
    sr = E.semiring
    M = _rows_of(M, sr)
    _check_dims(M, M.shape[0], len(E))
    out = []
    for row in M.rows:
        acc = LinearForm(sr)
        for x, t in zip(row, E.rhs):
            if x != sr.zero:
                acc = acc + t.scale(x)
        out.append(acc)
    return tuple(out)


def vec_mat(v: Sequence, M: SimMatrix, semiring: Semiring) -> tuple:
    n = M.shape[1]
    return tuple(semiring.sum(semiring.mul(v[i], M.rows[i][j]) for i in range(len(v)))
                 for j in range(n))


def check_simulation(src: Description, tgt: Description,
                     M: SimMatrix | Sequence[Sequence]) -> bool:
    """Whether ``M`` is a simulation ``src -> tgt``."""
    sr = src.semiring
    if tgt.semiring != sr:
        raise SimulationError("descriptions over different semirings")
    M = _rows_of(M, sr)
    m, n = len(src), len(tgt)
    _check_dims(M, m, n)
    if m == 0:
        return tuple(tgt.final) == (sr.zero,) * n
    if vec_mat(src.final, M, sr) != tuple(tgt.final):
        return False
    return build_DM(src.system, M, n) == build_ME(tgt.system, M)


@dataclass(frozen=True)
class Link:
    """A chain step between ``chain[i]`` and ``chain[i+1]``.

    ``forward`` means ``matrix : chain[i] -> chain[i+1]``; otherwise
    ``matrix : chain[i+1] -> chain[i]``.
    """

    matrix: SimMatrix
    forward: bool = True


def check_chain(descriptions: Sequence[Description], links: Sequence[Link]) -> bool:
    """Every consecutive pair is connected by its link in the declared direction."""
    if len(links) != max(len(descriptions) - 1, 0):
        raise SimulationError(
            f"{len(descriptions)} descriptions need {max(len(descriptions) - 1, 0)} links, "
            f"got {len(links)}")
    for i, link in enumerate(links):
        a, b = descriptions[i], descriptions[i + 1]
        src, tgt = (a, b) if link.forward else (b, a)
        if not check_simulation(src, tgt, link.matrix):
            return False
    return True


def find_simulations(src: Description, tgt: Description, universe: Sequence | None = None,
                     budget: int = DEFAULT_BUDGET) -> list[SimMatrix]:
    """Every simulation ``src -> tgt`` with entries from ``universe``.

    Candidates are enumerated row-major in universe order, so the output is
    lexicographically sorted by that order.
    """
    sr = src.semiring
    if tgt.semiring != sr:
        raise SimulationError("descriptions over different semirings")
    if not (is_flat(src) and is_flat(tgt)):
        raise DescriptionError("simulation search needs flat descriptions; flatten first")
    universe = sr.default_universe() if universe is None else [sr.coerce(u) for u in universe]
    # the first occurrence wins, keeping the order stable
    universe = list(dict.fromkeys(universe))
    m, n = len(src), len(tgt)
    total = len(universe) ** (m * n)
    if total > budget:
        raise BudgetExceededError(
            f"{len(universe)}^{m * n} = {total} candidate matrices exceed the budget {budget}")
    if m == 0 or n == 0:
        M = SimMatrix(sr, tuple(() for _ in range(m)))
        return [M] if check_simulation(src, tgt, M) else []

    row_choices = list(itertools.product(universe, repeat=n))
    found = []
    for rows in itertools.product(row_choices, repeat=m):
        M = SimMatrix(sr, rows)
        if check_simulation(src, tgt, M):
            found.append(M)
    return found
