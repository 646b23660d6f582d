"""Tree series truncated by height, and the guarded-system solver.

The solver fills in coefficients one height layer at a time. Guardedness
means every variable sits under a symbol, so a coefficient at height ``k``
only reads solution coefficients at heights ``< k``; layer ``k`` is
complete before layer ``k + 1`` starts.

:func:`wta_coeff` is the ordinary bottom-up automaton run. It shares no
code with :func:`solve` and is used to cross-check it.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, NamedTuple, Sequence

from .descriptions import Description, EquationSystem, WeightedTreeAutomaton
from .semiring import Semiring, SemiringMismatchError
from .terms import App, Param, RankedAlphabet, Term, TermError, Var, height

DEFAULT_MAX_HEIGHT = 6


class SeriesError(ValueError):
    pass


def enumerate_trees(alphabet: RankedAlphabet, h: int) -> list[Term]:
    """All trees of height ``<= h``, by height, then symbol order, then children."""
    if h < 0:
        return []
    level = [Param(p) for p in alphabet.params]
    level += [App(s, ()) for s in alphabet.symbols_of_rank(0)]
    trees = list(level)
    heights = [0] * len(trees)
    for k in range(1, h + 1):
        # trees of height exactly k have some child of height k - 1
        new = []
        for s, r in alphabet.symbols.items():
            if r == 0:
                continue
            for combo in itertools.product(range(len(trees)), repeat=r):
                if max(heights[i] for i in combo) == k - 1:
                    new.append(App(s, [trees[i] for i in combo]))
        if not new:
            break
        trees.extend(new)
        heights.extend([k] * len(new))
    return trees


class TruncatedSeries:
    """Coefficients of a tree series on all trees of height ``<= bound``.

    Only nonzero coefficients are stored.
    """

    __slots__ = ("semiring", "bound", "coeffs")

    def __init__(self, semiring: Semiring, bound: int, coeffs: Mapping[Term, object] | None = None):
        self.semiring = semiring
        self.bound = bound
        zero = semiring.zero
        self.coeffs: dict[Term, object] = {}
        for t, k in (coeffs or {}).items():
            if k != zero:
                if height(t) > bound:
                    raise SeriesError(f"tree {t} exceeds height bound {bound}")
                self.coeffs[t] = k

    @classmethod
    def zero(cls, semiring: Semiring, bound: int) -> TruncatedSeries:
        return cls(semiring, bound)

    @classmethod
    def unit(cls, semiring: Semiring, tree: Term, bound: int) -> TruncatedSeries:
        """The series mapping ``tree`` to 1 and everything else to 0."""
        if height(tree) > bound:
            return cls(semiring, bound)
        return cls(semiring, bound, {tree: semiring.one})

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.semiring == other.semiring and self.bound == other.bound
                and self.coeffs == other.coeffs)

    __hash__ = None

    def __getitem__(self, tree: Term):
        return self.coeff(tree)

    def coeff(self, tree: Term):
        if height(tree) > self.bound:
            raise SeriesError(f"tree {tree} is above the truncation height {self.bound}")
        return self.coeffs.get(tree, self.semiring.zero)

    def support(self) -> set[Term]:
        return set(self.coeffs)

    def _compatible(self, other: TruncatedSeries):
        if other.semiring != self.semiring:
            raise SemiringMismatchError("series over different semirings")
        if other.bound != self.bound:
            raise SeriesError(f"height bounds differ ({self.bound} vs {other.bound})")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._compatible(other)
        sr = self.semiring
        out = dict(self.coeffs)
        for t, k in other.coeffs.items():
            out[t] = sr.add(out[t], k) if t in out else k
        return TruncatedSeries(sr, self.bound, out)

    def scale(self, k) -> TruncatedSeries:
        sr = self.semiring
        k = sr.coerce(k)
        return TruncatedSeries(sr, self.bound, {t: sr.mul(k, c) for t, c in self.coeffs.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def sorted_items(self, alphabet: RankedAlphabet):
        return sorted(self.coeffs.items(), key=lambda tc: alphabet.tree_key(tc[0]))

    def dump(self, alphabet: RankedAlphabet) -> str:
        """One ``tree<TAB>coefficient`` line per nonzero coefficient, enumeration order."""
        fmt = self.semiring.format
        return "".join(f"{t}\t{fmt(k)}\n" for t, k in self.sorted_items(alphabet))

    def __repr__(self):
        body = ", ".join(f"{t}: {self.semiring.format(k)}" for t, k in self.coeffs.items())
        return f"TruncatedSeries(h<={self.bound}; {body})"


def series_add(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    return s1 + s2


def series_scale(k, s: TruncatedSeries) -> TruncatedSeries:
    return s.scale(k)


def series_sigma(symbol: str, *ss: TruncatedSeries, alphabet: RankedAlphabet | None = None,
                 semiring: Semiring | None = None, bound: int | None = None) -> TruncatedSeries:
    """``(σ(s_1..s_n), t) = Π (s_i, t_i)`` if ``t = σ(t_1..t_n)``, else 0.

    ``semiring`` and ``bound`` are needed only for constants (no ``ss``).
    """
    if alphabet is not None and alphabet.rank(symbol) != len(ss):
        raise TermError(f"{symbol} has rank {alphabet.rank(symbol)} but got {len(ss)} series")
    if not ss:
        if semiring is None or bound is None:
            raise SeriesError("a constant symbol needs an explicit semiring and bound")
        return TruncatedSeries.unit(semiring, App(symbol, ()), bound)
    for s in ss[1:]:
        ss[0]._compatible(s)
    sr, h = ss[0].semiring, ss[0].bound
    out = {}
    for combo in itertools.product(*(s.coeffs.items() for s in ss)):
        t = App(symbol, [c[0] for c in combo])
        if height(t) <= h:
            out[t] = sr.prod(c[1] for c in combo)
    return TruncatedSeries(sr, h, out)


# -- solver ---------------------------------------------------------------

def _by_height(coeffs: Mapping[Term, object]) -> dict[int, dict]:
    layers: dict[int, dict] = {}
    for t, k in coeffs.items():
        layers.setdefault(height(t), {})[t] = k
    return layers


class _LayeredSolver:
    def __init__(self, system: EquationSystem, par: Mapping[str, TruncatedSeries] | None):
        self.sr = system.semiring
        self.system = system
        self.layers: list[list[dict]] = []   # layers[k][i]: height-k part of x_i
        self.memo: dict[tuple[Term, int], dict] = {}
        if par is None:
            self.par_layers = None
        else:
            missing = sorted(system.params() - set(par))
            if missing:
                raise SeriesError(f"no interpretation given for parameter(s) {', '.join(missing)}")
            self.par_layers = {a: _by_height(s.coeffs) for a, s in par.items()}

    def layer(self, m: Term, k: int) -> dict:
        """Height-``k`` part of the value of monomial ``m`` at the current solution."""
        if isinstance(m, Var):
            return self.layers[k][m.index]
        if isinstance(m, Param):
            if self.par_layers is None:
                return {m: self.sr.one} if k == 0 else {}
            return self.par_layers[m.name].get(k, {})
        key = (m, k)
        if key in self.memo:
            return self.memo[key]
        out = self._app_layer(m, k)
        self.memo[key] = out
        return out

    def _app_layer(self, m: App, k: int) -> dict:
        sr = self.sr
        if not m.args:
            return {m: sr.one} if k == 0 else {}
        if k == 0:
            return {}
        out: dict = {}
        zero = sr.zero
        for hs in itertools.product(range(k), repeat=len(m.args)):
            if max(hs) != k - 1:
                continue
            parts = []
            for a, ha in zip(m.args, hs):
                p = self.layer(a, ha)
                if not p:
                    break
                parts.append(p.items())
            else:
                for combo in itertools.product(*parts):
                    c = sr.prod(x[1] for x in combo)
                    if c != zero:
                        out[App(m.symbol, [x[0] for x in combo])] = c
        return out

    def run(self, h: int) -> list[dict]:
        sr = self.sr
        zero = sr.zero
        for k in range(h + 1):
            current = []
            for form in self.system.rhs:
                acc: dict = {}
                for m, c in form.items():
                    for t, x in self.layer(m, k).items():
                        v = sr.mul(c, x)
                        acc[t] = sr.add(acc[t], v) if t in acc else v
                current.append({t: v for t, v in acc.items() if v != zero})
            self.layers.append(current)
        n = len(self.system)
        return [{t: v for layer in self.layers for t, v in layer[i].items()} for i in range(n)]


def _check_height(h: int, max_height: int):
    if h < 0:
        raise SeriesError("height bound must be non-negative")
    if h > max_height:
        raise SeriesError(f"height {h} exceeds the configured maximum {max_height}")


def solve(system: EquationSystem, h: int, par: Mapping[str, TruncatedSeries] | None = None,
          max_height: int = DEFAULT_MAX_HEIGHT) -> list[TruncatedSeries]:
    """The unique solution of ``system`` truncated at height ``h``.

    ``par`` interprets parameters as series; by default each parameter ``a``
    is the unit series of the tree ``a``.
    """
    _check_height(h, max_height)
    for s in (par or {}).values():
        if s.semiring != system.semiring:
            raise SemiringMismatchError("parameter series over a different semiring")
    sols = _LayeredSolver(system, par).run(h)
    return [TruncatedSeries(system.semiring, h, s) for s in sols]


def behavior(d: Description, h: int, par: Mapping[str, TruncatedSeries] | None = None,
             max_height: int = DEFAULT_MAX_HEIGHT) -> TruncatedSeries:
    """``Σ v_i s_i`` for the solution ``s`` of ``d``'s system, truncated at ``h``."""
    sr = d.semiring
    out: dict = {}
    for v, s in zip(d.final, solve(d.system, h, par, max_height)):
        if v == sr.zero:
            continue
        for t, c in s.coeffs.items():
            x = sr.mul(v, c)
            out[t] = sr.add(out[t], x) if t in out else x
    return TruncatedSeries(sr, h, out)


class Equivalence(NamedTuple):
    equivalent: bool
    witness: Term | None = None
    left: object = None
    right: object = None

    def __bool__(self):
        return self.equivalent


def equiv_up_to(d1: Description, d2: Description, h: int,
                par: Mapping[str, TruncatedSeries] | None = None,
                max_height: int = DEFAULT_MAX_HEIGHT) -> Equivalence:
    """Compare behaviors on every tree of height ``<= h``.

    On a mismatch the witness is the first differing tree in enumeration
    order, hence one of minimal height.
    """
    if d1.semiring != d2.semiring:
        raise SemiringMismatchError("descriptions over different semirings")
    b1 = behavior(d1, h, par, max_height)
    b2 = behavior(d2, h, par, max_height)
    if b1.coeffs == b2.coeffs:
        return Equivalence(True)
    alphabet = d1.alphabet.merge(d2.alphabet)
    zero = d1.semiring.zero
    diff = [t for t in b1.support() | b2.support()
            if b1.coeffs.get(t, zero) != b2.coeffs.get(t, zero)]
    witness = min(diff, key=alphabet.tree_key)
    return Equivalence(False, witness, b1.coeff(witness), b2.coeff(witness))


# -- automaton run ----------------------------------------------------------

class WTAEvaluator:
    """Bottom-up run of a weighted tree automaton, memoized over subtrees."""

    def __init__(self, wta: WeightedTreeAutomaton):
        self.wta = wta
        self.by_symbol: dict[str, list] = {}
        for (symbol, sources, target), k in wta.transitions.items():
            self.by_symbol.setdefault(symbol, []).append((sources, target, k))
        self.by_param: dict[str, list] = {}
        for (param, q), k in wta.leaves.items():
            self.by_param.setdefault(param, []).append((q, k))
        self._memo: dict[Term, dict] = {}

    def state_weights(self, t: Term) -> dict[int, object]:
        """Map state -> total weight of runs on ``t`` ending in that state."""
        got = self._memo.get(t)
        if got is not None:
            return got
        sr = self.wta.semiring
        mu: dict[int, object] = {}
        if isinstance(t, Param):
            for q, k in self.by_param.get(t.name, ()):
                mu[q] = sr.add(mu[q], k) if q in mu else k
        elif isinstance(t, App):
            children = [self.state_weights(a) for a in t.args]
            for sources, target, k in self.by_symbol.get(t.symbol, ()):
                if len(sources) != len(children):
                    continue
                w = k
                for q, child in zip(sources, children):
                    if q not in child:
                        w = sr.zero
                        break
                    w = sr.mul(w, child[q])
                if w != sr.zero:
                    mu[target] = sr.add(mu[target], w) if target in mu else w
        else:
            raise TermError(f"not a tree: {t!r}")
        mu = {q: w for q, w in mu.items() if w != sr.zero}
        self._memo[t] = mu
        return mu

    def coeff(self, t: Term):
        sr = self.wta.semiring
        mu = self.state_weights(t)
        return sr.sum(sr.mul(self.wta.finals[q], w) for q, w in mu.items())


def wta_coeff(wta: WeightedTreeAutomaton, t: Term):
    """Weight the automaton assigns to tree ``t``."""
    return WTAEvaluator(wta).coeff(t)
