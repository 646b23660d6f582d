"""Descriptions: final-weight vectors paired with guarded equation systems.

A description ``(v, D)`` over variables ``x1..xn`` denotes ``Σ v_i s_i`` where
``(s_1, ..., s_n)`` is the unique solution of ``D``. Flat descriptions are
weighted tree automata; :func:`to_wta` and :func:`from_wta` convert between
the two views.

All combinators rename variables apart automatically. Variables are
positional, so renaming is an index shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .semiring import Semiring, SemiringMismatchError
from .terms import (
    App,
    LinearForm,
    Param,
    RankedAlphabet,
    Term,
    TermError,
    Var,
    normalize,
    substitute,
)


class DescriptionError(ValueError):
    pass


class ImproperSystemError(DescriptionError):
    pass


class NotFlatError(DescriptionError):
    pass


def rename_monomial(m: Term, offset: int) -> Term:
    if isinstance(m, Var):
        return Var(m.index + offset)
    if isinstance(m, App) and m.args:
        return App(m.symbol, [rename_monomial(a, offset) for a in m.args])
    return m


def shift(form: LinearForm, offset: int) -> LinearForm:
    """Rename ``x_i`` to ``x_{i+offset}`` throughout ``form``."""
    if offset == 0:
        return form
    return LinearForm(form.semiring, {rename_monomial(m, offset): k for m, k in form.items()})


class EquationSystem:
    """The guarded system ``x_i = rhs[i]``, ``i = 0..n-1``.

    Right-hand sides may be given as terms; they are normalized on
    construction and rejected if any summand is a bare variable.
    """

    __slots__ = ("semiring", "alphabet", "rhs")

    def __init__(self, semiring: Semiring, alphabet: RankedAlphabet,
                 rhs: Iterable[LinearForm | Term]):
        self.semiring = semiring
        self.alphabet = alphabet
        forms = []
        for t in rhs:
            if isinstance(t, LinearForm):
                if t.semiring != semiring:
                    raise SemiringMismatchError(
                        f"equation over {t.semiring.header()} in a {semiring.header()} system")
            else:
                alphabet.check(t, semiring=semiring)
                t = normalize(t, semiring)
            forms.append(t)
        self.rhs: tuple[LinearForm, ...] = tuple(forms)
        n = len(self.rhs)
        for i, form in enumerate(self.rhs):
            for m in form:
                if isinstance(m, Var):
                    raise ImproperSystemError(
                        f"improper system: equation x{i + 1} is not guarded, bare variable monomial "
                        f"{form.semiring.format(form.coeff(m))} * {m}")
                alphabet.check(m, n)

    def __len__(self):
        return len(self.rhs)

    @property
    def n_vars(self) -> int:
        return len(self.rhs)

    def __eq__(self, other):
        if not isinstance(other, EquationSystem):
            return NotImplemented
        return (self.semiring == other.semiring and self.alphabet == other.alphabet
                and self.rhs == other.rhs)

    def __hash__(self):
        return hash(self.rhs)

    def params(self) -> set[str]:
        return set().union(*(f.params() for f in self.rhs)) if self.rhs else set()

    def format(self) -> str:
        return "\n".join(f"x{i + 1} = {f.format(self.alphabet)}" for i, f in enumerate(self.rhs))

    def __repr__(self):
        return f"EquationSystem({self.semiring.header()}; {'; '.join(self.format().splitlines())})"


class Description:
    """A pair ``(final, system)`` with ``len(final) == len(system)``."""

    __slots__ = ("final", "system")

    def __init__(self, final: Sequence, system: EquationSystem):
        if len(final) != len(system):
            raise DescriptionError(
                f"final-weight vector has {len(final)} entries for {len(system)} variables")
        self.system = system
        self.final = tuple(system.semiring.coerce(k) for k in final)

    @classmethod
    def build(cls, semiring: Semiring, alphabet: RankedAlphabet, final: Sequence,
              rhs: Iterable[LinearForm | Term]) -> Description:
        return cls(final, EquationSystem(semiring, alphabet, rhs))

    @property
    def semiring(self) -> Semiring:
        return self.system.semiring

    @property
    def alphabet(self) -> RankedAlphabet:
        return self.system.alphabet

    @property
    def rhs(self) -> tuple[LinearForm, ...]:
        return self.system.rhs

    @property
    def n_vars(self) -> int:
        return len(self.final)

    def __len__(self):
        return len(self.final)

    def __eq__(self, other):
        if not isinstance(other, Description):
            return NotImplemented
        return self.final == other.final and self.system == other.system

    def __hash__(self):
        return hash((self.final, self.system))

    def __repr__(self):
        sr = self.semiring
        v = ", ".join(sr.format(k) for k in self.final)
        return f"Description(({v}), {{{'; '.join(self.system.format().splitlines())}}})"

    def with_alphabet(self, alphabet: RankedAlphabet) -> Description:
        return Description(self.final, EquationSystem(self.semiring, alphabet, self.rhs))


def _check_same_semiring(ds: Sequence[Description]) -> Semiring:
    sr = ds[0].semiring
    for d in ds[1:]:
        if d.semiring != sr:
            raise SemiringMismatchError(
                f"cannot combine {sr.header()} and {d.semiring.header()} descriptions")
    return sr


def _merged_alphabet(ds: Sequence[Description]) -> RankedAlphabet:
    alphabet = ds[0].alphabet
    for d in ds[1:]:
        if d.alphabet != alphabet:
            alphabet = alphabet.merge(d.alphabet)
    return alphabet


def _is_flat_monomial(m: Term) -> bool:
    if isinstance(m, Param):
        return True
    return isinstance(m, App) and all(isinstance(a, Var) for a in m.args)


def is_flat(d: Description | EquationSystem) -> bool:
    system = d.system if isinstance(d, Description) else d
    return all(_is_flat_monomial(m) for form in system.rhs for m in form)


def flatten(d: Description) -> Description:
    """Equivalent flat description.

    Each non-variable argument of a symbol is replaced by a fresh variable
    bound to it, scanning equations in order (new ones appended at the end)
    and arguments left to right. Fresh variables get final weight zero.
    Equal subterms are not shared.
    """
    sr = d.semiring
    alphabet = d.alphabet
    pending: list[list[tuple[Term, object]]] = [f.sorted_items(alphabet) for f in d.rhs]
    final = list(d.final)
    out: list[LinearForm] = []
    i = 0
    while i < len(pending):
        rhs: dict[Term, object] = {}
        for m, k in pending[i]:
            if isinstance(m, App) and not _is_flat_monomial(m):
                args = []
                for a in m.args:
                    if isinstance(a, Var):
                        args.append(a)
                    else:
                        args.append(Var(len(pending)))
                        pending.append([(a, sr.one)])
                        final.append(sr.zero)
                m = App(m.symbol, args)
            rhs[m] = sr.add(rhs[m], k) if m in rhs else k
        out.append(LinearForm(sr, rhs))
        i += 1
    return Description(final, EquationSystem(sr, alphabet, out))


def normalize_initial(d: Description) -> Description:
    """Equivalent description with final weights ``(1, 0, ..., 0)``.

    A fresh first variable ``z = Σ v_i rhs_i`` is prepended; the old
    variables move up by one. Flat inputs stay flat.
    """
    sr = d.semiring
    shifted = [shift(f, 1) for f in d.rhs]
    head = LinearForm(sr)
    for k, f in zip(d.final, shifted):
        if k != sr.zero:
            head = head + f.scale(k)
    final = [sr.one] + [sr.zero] * len(shifted)
    result = Description(final, EquationSystem(sr, d.alphabet, [head, *shifted]))
    return flatten(result) if is_flat(d) else result


def desc_sum(d1: Description, d2: Description) -> Description:
    """Disjoint union; the behavior is the sum of behaviors."""
    sr = _check_same_semiring([d1, d2])
    alphabet = _merged_alphabet([d1, d2])
    rhs = list(d1.rhs) + [shift(f, len(d1)) for f in d2.rhs]
    return Description(d1.final + d2.final, EquationSystem(sr, alphabet, rhs))


def desc_scale(k, d: Description) -> Description:
    sr = d.semiring
    k = sr.coerce(k)
    return Description([sr.mul(k, v) for v in d.final], d.system)


def desc_zero(semiring: Semiring, alphabet: RankedAlphabet) -> Description:
    """The description over no variables; its behavior is 0."""
    return Description((), EquationSystem(semiring, alphabet, ()))


def desc_param(name: str, semiring: Semiring, alphabet: RankedAlphabet) -> Description:
    """``((1), {z = a})``."""
    if name not in alphabet.params:
        raise TermError(f"unknown parameter {name!r}")
    return Description([semiring.one], EquationSystem(semiring, alphabet, [Param(name)]))


def desc_const(which: str, semiring: Semiring, alphabet: RankedAlphabet) -> Description:
    """``which`` is ``"zero"`` or a parameter name."""
    if which == "zero":
        return desc_zero(semiring, alphabet)
    return desc_param(which, semiring, alphabet)


def desc_sigma(symbol: str, *ds: Description, semiring: Semiring | None = None,
               alphabet: RankedAlphabet | None = None) -> Description:
    """Description whose behavior is ``symbol`` applied to the behaviors of ``ds``.

    ``semiring``/``alphabet`` are only needed when ``ds`` is empty.
    """
    if ds:
        semiring = _check_same_semiring(ds)
        merged = _merged_alphabet(ds)
        alphabet = merged if alphabet is None else alphabet.merge(merged)
    elif semiring is None or alphabet is None:
        raise DescriptionError("a constant symbol needs an explicit semiring and alphabet")
    rank = alphabet.rank(symbol)
    if rank != len(ds):
        raise TermError(f"{symbol} has rank {rank} but got {len(ds)} descriptions")
    parts = [normalize_initial(d) for d in ds]
    rhs: list[LinearForm] = [LinearForm(semiring)]
    heads = []
    for p in parts:
        offset = len(rhs)
        heads.append(Var(offset))
        rhs.extend([shift(f, offset) for f in p.rhs])
    rhs[0] = LinearForm.monomial(semiring, App(symbol, heads))
    final = [semiring.one] + [semiring.zero] * (len(rhs) - 1)
    return Description(final, EquationSystem(semiring, alphabet, rhs))


def desc_substitute(d: Description, bind: Mapping[str, Description]) -> Description:
    """Replace each parameter ``a`` of ``d`` by the description ``bind[a]``.

    The result is ``((v, 0, ..., 0), (D', D_a1, ..., D_ak))`` where ``D'`` is
    ``D`` with every ``a`` replaced by ``Σ_i v^a_i t^a_i``.
    """
    sr = d.semiring
    used = [p for p in d.alphabet.params if p in d.system.params()]
    missing = [p for p in used if p not in bind]
    if missing:
        raise DescriptionError(f"no binding for parameter(s) {', '.join(missing)}")
    bound = [bind[p] for p in used]
    _check_same_semiring([d, *bound])

    alphabet = RankedAlphabet(d.alphabet.symbols, ())
    for b in bound:
        alphabet = alphabet.merge(b.alphabet)

    offset = len(d)
    replacement: dict[str, LinearForm] = {}
    tail: list[LinearForm] = []
    for p, b in zip(used, bound):
        form = LinearForm(sr)
        for k, f in zip(b.final, b.rhs):
            if k != sr.zero:
                form = form + shift(f, offset).scale(k)
        replacement[p] = form
        tail.extend(shift(f, offset) for f in b.rhs)
        offset += len(b)

    head = [substitute(f, params=replacement) for f in d.rhs]
    final = list(d.final) + [sr.zero] * len(tail)
    return Description(final, EquationSystem(sr, alphabet, head + tail))


# -- weighted tree automata ----------------------------------------------

@dataclass(frozen=True)
class WeightedTreeAutomaton:
    """Bottom-up weighted tree automaton with states ``0..n_states-1``.

    ``transitions[(symbol, sources, target)]`` and ``leaves[(param, state)]``
    hold nonzero weights only.
    """

    semiring: Semiring
    alphabet: RankedAlphabet
    n_states: int
    transitions: dict = field(default_factory=dict)
    leaves: dict = field(default_factory=dict)
    finals: tuple = ()

    def __post_init__(self):
        sr = self.semiring
        if len(self.finals) != self.n_states:
            raise DescriptionError("one final weight per state is required")
        object.__setattr__(self, "transitions",
                           {key: w for key, w in self.transitions.items() if w != sr.zero})
        object.__setattr__(self, "leaves",
                           {key: w for key, w in self.leaves.items() if w != sr.zero})
        for (symbol, sources, target) in self.transitions:
            if self.alphabet.rank(symbol) != len(sources):
                raise TermError(f"transition on {symbol} has {len(sources)} sources")
            if not all(0 <= q < self.n_states for q in (*sources, target)):
                raise DescriptionError(f"transition {symbol}{sources}->{target} uses unknown state")
        for (param, q) in self.leaves:
            if param not in self.alphabet.params or not 0 <= q < self.n_states:
                raise DescriptionError(f"bad leaf entry ({param}, {q})")

    def __hash__(self):
        return hash((self.n_states, self.finals, frozenset(self.transitions.items()),
                     frozenset(self.leaves.items())))


def to_wta(d: Description) -> WeightedTreeAutomaton:
    if not is_flat(d):
        raise NotFlatError("only flat descriptions correspond to automata; flatten first")
    transitions: dict = {}
    leaves: dict = {}
    for target, form in enumerate(d.rhs):
        for m, k in form.items():
            if isinstance(m, Param):
                leaves[(m.name, target)] = k
            else:
                transitions[(m.symbol, tuple(a.index for a in m.args), target)] = k
    return WeightedTreeAutomaton(d.semiring, d.alphabet, len(d), transitions, leaves, d.final)


def from_wta(w: WeightedTreeAutomaton) -> Description:
    sr = w.semiring
    rows: list[dict] = [{} for _ in range(w.n_states)]
    for (symbol, sources, target), k in w.transitions.items():
        m = App(symbol, [Var(q) for q in sources])
        row = rows[target]
        row[m] = sr.add(row[m], k) if m in row else k
    for (param, q), k in w.leaves.items():
        m = Param(param)
        row = rows[q]
        row[m] = sr.add(row[m], k) if m in row else k
    rhs = [LinearForm(sr, row) for row in rows]
    return Description(w.finals, EquationSystem(sr, w.alphabet, rhs))
