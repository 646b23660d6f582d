"""Terms over a ranked alphabet and their multilinear normal forms.

Terms follow the grammar ``t ::= x_i | a | 0 | t + t | k t | sigma(t, ..., t)``.
Every term is equal, modulo the semimodule and multilinearity laws, to a
finite sum ``k_1 m_1 + ... + k_r m_r`` of *monomials* (terms built only from
variables, parameters and symbols) with nonzero coefficients.
:class:`LinearForm` is that canonical sum, and equality of linear forms is
equality modulo the axioms.

Σ-trees are the variable-free monomials, so :class:`App` and :class:`Param`
double as the tree type used by :mod:`treeseries.series`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .semiring import Semiring


class TermError(ValueError):
    pass


class ArityError(TermError):
    pass


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
VAR_RE = re.compile(r"x([1-9][0-9]*)\Z")


# -- syntax ---------------------------------------------------------------

class Term:
    __slots__ = ()

    def __add__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return Sum(self, other)

    def __rmul__(self, k):
        return Scale(k, self)


@dataclass(frozen=True)
class Var(Term):
    """The variable ``x_{index+1}``; indices are zero-based."""

    index: int

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class Param(Term):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Zero(Term):
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"{self.left} + {self.right}"


@dataclass(frozen=True)
class Scale(Term):
    coeff: object
    term: Term

    def __str__(self):
        inner = f"({self.term})" if isinstance(self.term, Sum) else str(self.term)
        return f"{self.coeff} * {inner}"


class App(Term):
    """``symbol(args...)``. Hash is cached since trees are used as dict keys a lot."""

    __slots__ = ("symbol", "args", "_hash")

    def __init__(self, symbol: str, args: Sequence[Term] = ()):
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "_hash", hash((symbol, self.args)))

    def __setattr__(self, name, value):
        raise AttributeError("App is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App):
            return NotImplemented
        return (self._hash == other._hash and self.symbol == other.symbol
                and self.args == other.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.symbol!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(map(str, self.args))})"

    def __reduce__(self):
        return (App, (self.symbol, self.args))


def sym(symbol: str, *args: Term) -> App:
    return App(symbol, args)


ZERO = Zero()


def is_monomial(t: Term) -> bool:
    if isinstance(t, (Var, Param)):
        return True
    if isinstance(t, App):
        return all(is_monomial(a) for a in t.args)
    return False


def monomial_size(m: Term) -> int:
    if isinstance(m, App):
        return 1 + sum(monomial_size(a) for a in m.args)
    return 1


def variables_of(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    if isinstance(t, App):
        return set().union(*(variables_of(a) for a in t.args)) if t.args else set()
    if isinstance(t, Sum):
        return variables_of(t.left) | variables_of(t.right)
    if isinstance(t, Scale):
        return variables_of(t.term)
    return set()


def params_of(t: Term) -> set[str]:
    if isinstance(t, Param):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(params_of(a) for a in t.args)) if t.args else set()
    if isinstance(t, Sum):
        return params_of(t.left) | params_of(t.right)
    if isinstance(t, Scale):
        return params_of(t.term)
    return set()


def height(t: Term) -> int:
    """Height of a monomial/tree: leaves (parameters, variables, constants) are 0."""
    if isinstance(t, App) and t.args:
        return 1 + max(height(a) for a in t.args)
    return 0


# -- alphabet -------------------------------------------------------------

class RankedAlphabet:
    """Ranked symbols plus parameter names, both in declaration order.

    Declaration order fixes the canonical ordering of monomials and the
    enumeration order of trees.
    """

    def __init__(self, symbols: Mapping[str, int] | Iterable[tuple[str, int]] = (),
                 params: Iterable[str] = ()):
        items = list(symbols.items()) if isinstance(symbols, Mapping) else list(symbols)
        self.symbols: dict[str, int] = {}
        for name, rank in items:
            self._check_name(name)
            if name in self.symbols:
                raise TermError(f"duplicate symbol {name!r}")
            if not isinstance(rank, int) or rank < 0:
                raise TermError(f"bad rank {rank!r} for {name!r}")
            self.symbols[name] = rank
        self.params: tuple[str, ...] = tuple(params)
        for p in self.params:
            self._check_name(p)
            if p in self.symbols:
                raise TermError(f"{p!r} is declared both as symbol and parameter")
        if len(set(self.params)) != len(self.params):
            raise TermError("duplicate parameter")
        self._sym_index = {s: i for i, s in enumerate(self.symbols)}
        self._par_index = {p: i for i, p in enumerate(self.params)}

    @staticmethod
    def _check_name(name):
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise TermError(f"invalid name {name!r}")
        if VAR_RE.match(name):
            raise TermError(f"{name!r} is reserved for variables")

    def __eq__(self, other):
        if not isinstance(other, RankedAlphabet):
            return NotImplemented
        return self.symbols == other.symbols and self.params == other.params

    def __hash__(self):
        return hash((tuple(self.symbols.items()), self.params))

    def __repr__(self):
        syms = " ".join(f"{s}/{r}" for s, r in self.symbols.items())
        return f"RankedAlphabet({syms!r}, params={list(self.params)!r})"

    def rank(self, symbol: str) -> int:
        try:
            return self.symbols[symbol]
        except KeyError:
            raise TermError(f"unknown symbol {symbol!r}") from None

    def with_params(self, params: Iterable[str]) -> RankedAlphabet:
        return RankedAlphabet(self.symbols, params)

    def merge(self, other: RankedAlphabet) -> RankedAlphabet:
        """Union of two alphabets; shared symbols must agree on rank."""
        symbols = dict(self.symbols)
        for s, r in other.symbols.items():
            if symbols.setdefault(s, r) != r:
                raise ArityError(f"symbol {s!r} has rank {symbols[s]} and {r}")
        params = list(self.params) + [p for p in other.params if p not in self._par_index]
        return RankedAlphabet(symbols, params)

    def symbols_of_rank(self, n: int) -> list[str]:
        return [s for s, r in self.symbols.items() if r == n]

    def monomial_key(self, m: Term):
        """Degree-lexicographic key: size first, then preorder token sequence."""
        tokens: list[tuple[int, int]] = []
        self._tokens(m, tokens)
        return (len(tokens), tokens)

    def _tokens(self, m, out):
        if isinstance(m, Var):
            out.append((0, m.index))
        elif isinstance(m, Param):
            out.append((1, self._par_index.get(m.name, len(self._par_index))))
        elif isinstance(m, App):
            out.append((2, self._sym_index.get(m.symbol, len(self._sym_index))))
            for a in m.args:
                self._tokens(a, out)
        else:
            raise TermError(f"not a monomial: {m}")

    def tree_key(self, t: Term):
        """Sort key matching the order of :func:`treeseries.series.enumerate_trees`."""
        if isinstance(t, Param):
            return (0, 0, self._par_index[t.name])
        if not t.args:
            return (0, 1 + self._sym_index[t.symbol])
        keys = tuple(self.tree_key(a) for a in t.args)
        return (1 + max(k[0] for k in keys), 1 + self._sym_index[t.symbol]) + keys

    def check(self, t: Term, n_vars: int | None = None, semiring: Semiring | None = None):
        """Raise if ``t`` is not well formed over this alphabet."""
        if isinstance(t, Var):
            if t.index < 0 or (n_vars is not None and t.index >= n_vars):
                raise TermError(f"undeclared variable {t}")
        elif isinstance(t, Param):
            if t.name not in self._par_index:
                raise TermError(f"unknown parameter {t.name!r}")
        elif isinstance(t, App):
            r = self.rank(t.symbol)
            if len(t.args) != r:
                raise ArityError(f"{t.symbol} has rank {r} but got {len(t.args)} arguments in {t}")
            for a in t.args:
                self.check(a, n_vars, semiring)
        elif isinstance(t, Sum):
            self.check(t.left, n_vars, semiring)
            self.check(t.right, n_vars, semiring)
        elif isinstance(t, Scale):
            if semiring is not None:
                semiring.coerce(t.coeff)
            self.check(t.term, n_vars, semiring)
        elif not isinstance(t, Zero):
            raise TermError(f"not a term: {t!r}")


# -- linear forms ---------------------------------------------------------

class LinearForm:
    """Canonical sum ``Σ k_i m_i`` over distinct monomials with nonzero ``k_i``.

    Treat instances as immutable. Zero coefficients are dropped on
    construction, so two forms are equal exactly when their maps are.
    """

    __slots__ = ("semiring", "coeffs", "_hash")

    def __init__(self, semiring: Semiring, coeffs: Mapping[Term, object] | None = None):
        self.semiring = semiring
        zero = semiring.zero
        self.coeffs: dict[Term, object] = (
            {m: k for m, k in coeffs.items() if k != zero} if coeffs else {})
        self._hash = None

    @classmethod
    def monomial(cls, semiring: Semiring, m: Term, k=None) -> LinearForm:
        return cls(semiring, {m: semiring.one if k is None else k})

    @classmethod
    def zero(cls, semiring: Semiring) -> LinearForm:
        return cls(semiring)

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.semiring == other.semiring and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def items(self):
        return self.coeffs.items()

    def coeff(self, m: Term):
        return self.coeffs.get(m, self.semiring.zero)

    def __add__(self, other: LinearForm) -> LinearForm:
        if other.semiring != self.semiring:
            raise TermError("linear forms over different semirings")
        out = dict(self.coeffs)
        _accumulate(self.semiring, out, other.coeffs)
        return LinearForm(self.semiring, out)

    def scale(self, k) -> LinearForm:
        sr = self.semiring
        return LinearForm(sr, {m: sr.mul(k, c) for m, c in self.coeffs.items()})

    def variables(self) -> set[int]:
        return set().union(*(variables_of(m) for m in self.coeffs)) if self.coeffs else set()

    def params(self) -> set[str]:
        return set().union(*(params_of(m) for m in self.coeffs)) if self.coeffs else set()

    def bare_variables(self) -> list[Var]:
        return [m for m in self.coeffs if isinstance(m, Var)]

    def is_proper(self) -> bool:
        return not self.bare_variables()

    def sorted_items(self, alphabet: RankedAlphabet | None = None):
        if alphabet is None:
            return sorted(self.coeffs.items(), key=lambda mk: (monomial_size(mk[0]), str(mk[0])))
        return sorted(self.coeffs.items(), key=lambda mk: alphabet.monomial_key(mk[0]))

    def to_term(self, alphabet: RankedAlphabet | None = None) -> Term:
        term: Term | None = None
        for m, k in self.sorted_items(alphabet):
            piece = Scale(k, m)
            term = piece if term is None else Sum(term, piece)
        return ZERO if term is None else term

    def format(self, alphabet: RankedAlphabet | None = None) -> str:
        if not self.coeffs:
            return "0"
        sr = self.semiring
        parts = []
        for m, k in self.sorted_items(alphabet):
            parts.append(str(m) if k == sr.one else f"{sr.format(k)} * {m}")
        return " + ".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LinearForm({self.semiring.header()}: {self.format()})"


def _accumulate(sr: Semiring, out: dict, more: Mapping):
    for m, k in more.items():
        if m in out:
            out[m] = sr.add(out[m], k)
        else:
            out[m] = k


Expansion = Callable[[object], dict]


def _expand(t: Term, sr: Semiring, var_fn: Expansion | None, param_fn: Expansion | None) -> dict:
    """Multilinear expansion of ``t`` into ``{monomial: coeff}`` (zeros may remain)."""
    if isinstance(t, Var):
        return dict(var_fn(t.index)) if var_fn is not None else {t: sr.one}
    if isinstance(t, Param):
        return dict(param_fn(t.name)) if param_fn is not None else {t: sr.one}
    if isinstance(t, App):
        if not t.args:
            return {t: sr.one}
        parts = []
        for a in t.args:
            p = {m: k for m, k in _expand(a, sr, var_fn, param_fn).items() if k != sr.zero}
            if not p:
                return {}
            parts.append(list(p.items()))
        out: dict = {}
        for combo in itertools.product(*parts):
            m = App(t.symbol, [c[0] for c in combo])
            k = sr.prod(c[1] for c in combo)
            if m in out:
                out[m] = sr.add(out[m], k)
            else:
                out[m] = k
        return out
    if isinstance(t, Sum):
        out = _expand(t.left, sr, var_fn, param_fn)
        _accumulate(sr, out, _expand(t.right, sr, var_fn, param_fn))
        return out
    if isinstance(t, Scale):
        k = sr.coerce(t.coeff)
        if k == sr.zero:
            return {}
        return {m: sr.mul(k, c) for m, c in _expand(t.term, sr, var_fn, param_fn).items()}
    if isinstance(t, Zero):
        return {}
    raise TermError(f"not a term: {t!r}")


def normalize(t: Term | LinearForm, semiring: Semiring) -> LinearForm:
    """Canonical linear form of ``t`` modulo the multilinear algebra axioms."""
    if isinstance(t, LinearForm):
        t = t.to_term()
    return LinearForm(semiring, _expand(t, semiring, None, None))


def substitute(form: LinearForm | Term, semiring: Semiring | None = None, *,
               variables: Sequence[LinearForm] | Mapping[int, LinearForm] | None = None,
               params: Mapping[str, LinearForm] | None = None,
               n_vars: int | None = None) -> LinearForm:
    """Simultaneously replace variables and/or parameters by linear forms.

    ``variables`` is indexed by variable position. Parameters missing from
    ``params`` are left alone; variables missing from ``variables`` raise.
    """
    if isinstance(form, LinearForm):
        sr = form.semiring
        pieces = [(Scale(k, m) if k != sr.one else m) for m, k in form.items()]
    else:
        if semiring is None:
            raise TermError("a semiring is required to substitute into a bare term")
        sr = semiring
        pieces = [form]

    var_fn = param_fn = None
    if variables is not None:
        def var_fn(i):
            try:
                return variables[i].coeffs
            except (IndexError, KeyError):
                raise TermError(f"no substitution for undeclared variable x{i + 1}") from None
    if params is not None:
        def param_fn(name):
            row = params.get(name)
            return row.coeffs if row is not None else {Param(name): sr.one}

    out: dict = {}
    for piece in pieces:
        _accumulate(sr, out, _expand(piece, sr, var_fn, param_fn))
    return LinearForm(sr, out)


def substitute_linear(t: Term | LinearForm, rows: Sequence[LinearForm],
                      semiring: Semiring | None = None) -> LinearForm:
    """Replace each ``x_i`` by ``rows[i]`` and return the expanded normal form."""
    if semiring is None and rows:
        semiring = rows[0].semiring
    if not isinstance(t, LinearForm):
        if semiring is None:
            raise TermError("cannot infer the semiring")
        for i in variables_of(t):
            if i >= len(rows):
                raise TermError(f"no substitution for undeclared variable x{i + 1}")
    return substitute(t, semiring, variables=rows)


def is_proper(t: Term | LinearForm, semiring: Semiring | None = None) -> bool:
    """Guardedness: no summand is a bare variable.

    ``0 * t`` counts as proper whatever ``t`` is. Pass ``semiring`` when its
    zero is not the literal ``0`` (tropical).
    """
    if isinstance(t, LinearForm):
        return t.is_proper()
    if isinstance(t, (Zero, Param, App)):
        return True
    if isinstance(t, Var):
        return False
    if isinstance(t, Sum):
        return is_proper(t.left, semiring) and is_proper(t.right, semiring)
    if isinstance(t, Scale):
        if semiring is not None:
            if semiring.coerce(t.coeff) == semiring.zero:
                return True
        elif t.coeff == 0:
            return True
        return is_proper(t.term, semiring)
    raise TermError(f"not a term: {t!r}")


def eval_term(t: Term, semiring: Semiring, env: Sequence | Mapping, par: Mapping):
    """Value of ``t`` when every symbol is read as the product of its arguments.

    This interpretation is itself a multilinear algebra over a commutative
    semiring, so axiom-equivalent terms evaluate equally; used as a
    soundness oracle for :func:`normalize`.
    """
    sr = semiring
    if isinstance(t, Var):
        try:
            return env[t.index]
        except (IndexError, KeyError):
            raise TermError(f"no value for {t}") from None
    if isinstance(t, Param):
        try:
            return par[t.name]
        except KeyError:
            raise TermError(f"no value for parameter {t.name!r}") from None
    if isinstance(t, Zero):
        return sr.zero
    if isinstance(t, Sum):
        return sr.add(eval_term(t.left, sr, env, par), eval_term(t.right, sr, env, par))
    if isinstance(t, Scale):
        return sr.mul(sr.coerce(t.coeff), eval_term(t.term, sr, env, par))
    if isinstance(t, App):
        return sr.prod([eval_term(a, sr, env, par) for a in t.args])
    raise TermError(f"not a term: {t!r}")
