"""Line-oriented text format for descriptions.

::

    semiring nat
    alphabet sigma/2 gamma/1
    params a b
    desc D1
      final 1 0
      x1 = 2 * sigma(x1, x2) + 3 * a
      x2 = 5 * b
    end

``#`` starts a comment. Equations must appear in variable order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .descriptions import Description, DescriptionError, EquationSystem
from .semiring import Semiring, SemiringError, parse_semiring
from .terms import (
    VAR_RE,
    App,
    Param,
    RankedAlphabet,
    Scale,
    Sum,
    Term,
    TermError,
    Var,
    ZERO,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


_TOKEN_RE = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_∞][A-Za-z0-9_']*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m.group(0).strip() == "":
            break
        if m.group(1):
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "()+*,":
                raise ParseError(f"unexpected character {ch!r}", column=m.start(3) + 1)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _TermParser:
    def __init__(self, text: str, semiring: Semiring, alphabet: RankedAlphabet):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.sr = semiring
        self.alphabet = alphabet

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, column=tok[2] + 1)

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise self.error(f"expected {kind!r} but found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Term:
        t = self.sum()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return t

    def sum(self) -> Term:
        t = self.product()
        while self.peek()[0] == "+":
            self.next()
            t = Sum(t, self.product())
        return t

    def product(self) -> Term:
        tok = self.peek()
        if tok[0] in ("num", "name") and self.peek(1)[0] == "*":
            self.next()
            self.next()
            try:
                k = self.sr.parse(tok[1])
            except SemiringError as e:
                raise self.error(str(e), tok) from None
            return Scale(k, self.product())
        return self.primary()

    def primary(self) -> Term:
        tok = self.next()
        kind, text, _ = tok
        if kind == "(":
            t = self.sum()
            self.expect(")")
            return t
        if kind == "num":
            if text == "0":
                return ZERO
            raise self.error(f"a bare coefficient {text!r} is not a term; write '{text} * t'", tok)
        if kind != "name":
            raise self.error(f"unexpected {text or 'end of input'!r}", tok)
        if VAR_RE.match(text):
            return Var(int(text[1:]) - 1)
        if self.peek()[0] == "(":
            self.next()
            args = []
            if self.peek()[0] != ")":
                args.append(self.sum())
                while self.peek()[0] == ",":
                    self.next()
                    args.append(self.sum())
            self.expect(")")
            return self._symbol(text, args, tok)
        if text in self.alphabet.params:
            return Param(text)
        if text in self.alphabet.symbols:
            return self._symbol(text, [], tok)
        raise self.error(f"unknown name {text!r}", tok)

    def _symbol(self, name, args, tok):
        if name not in self.alphabet.symbols:
            raise self.error(f"unknown symbol {name!r}", tok)
        rank = self.alphabet.symbols[name]
        if rank != len(args):
            raise self.error(f"arity error: {name} has rank {rank} but got {len(args)} arguments", tok)
        return App(name, args)


def parse_term(text: str, semiring: Semiring, alphabet: RankedAlphabet) -> Term:
    return _TermParser(text, semiring, alphabet).parse()


def parse_tree(text: str, semiring: Semiring, alphabet: RankedAlphabet) -> Term:
    t = parse_term(text, semiring, alphabet)
    if not _is_tree(t):
        raise ParseError(f"{text!r} is not a tree (no variables, sums, scalars or 0 allowed)")
    return t


def _is_tree(t: Term) -> bool:
    if isinstance(t, Param):
        return True
    return isinstance(t, App) and all(_is_tree(a) for a in t.args)


@dataclass
class Document:
    semiring: Semiring
    alphabet: RankedAlphabet
    descriptions: dict[str, Description] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Description:
        try:
            return self.descriptions[name]
        except KeyError:
            known = ", ".join(self.descriptions) or "none"
            raise DescriptionError(f"no description named {name!r} (known: {known})") from None


def format_description(name: str, d: Description) -> str:
    sr = d.semiring
    lines = [f"desc {name}", "  final" + "".join(" " + sr.format(k) for k in d.final)]
    for i, f in enumerate(d.rhs):
        lines.append(f"  x{i + 1} = {f.format(d.alphabet)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def format_document(doc: Document) -> str:
    out = [f"semiring {doc.semiring.header()}\n"]
    syms = " ".join(f"{s}/{r}" for s, r in doc.alphabet.symbols.items())
    out.append(f"alphabet {syms}".rstrip() + "\n")
    out.append(f"params {' '.join(doc.alphabet.params)}".rstrip() + "\n")
    for name, d in doc.descriptions.items():
        out.append(format_description(name, d))
    return "".join(out)


_SYMBOL_DECL = re.compile(r"([A-Za-z_][A-Za-z0-9_']*)/(\d+)\Z")
_EQ_RE = re.compile(r"\s*(x[1-9][0-9]*)\s*=(.*)\Z")


def parse_document(text: str, semiring: Semiring | None = None) -> Document:
    """Parse a document; ``semiring``, if given, must match the header."""
    header_sr: Semiring | None = None
    symbols: list[tuple[str, int]] = []
    params: list[str] = []
    alphabet: RankedAlphabet | None = None
    blocks: list[tuple[str, int, list]] = []
    current = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        words = line.split()
        head = words[0]
        if current is not None:
            if head == "end" and len(words) == 1:
                blocks.append(current)
                current = None
            else:
                current[2].append((lineno, line))
            continue
        if head == "semiring":
            if header_sr is not None:
                raise ParseError("duplicate semiring header", lineno)
            try:
                header_sr = parse_semiring(" ".join(words[1:]))
            except SemiringError as e:
                raise ParseError(str(e), lineno) from None
        elif head == "alphabet":
            for w in words[1:]:
                m = _SYMBOL_DECL.match(w)
                if not m:
                    raise ParseError(f"bad symbol declaration {w!r}; expected name/rank", lineno)
                symbols.append((m.group(1), int(m.group(2))))
        elif head == "params":
            params.extend(words[1:])
        elif head == "desc":
            if len(words) != 2:
                raise ParseError("expected 'desc <name>'", lineno)
            current = (words[1], lineno, [])
        else:
            raise ParseError(f"unexpected {head!r}", lineno)
    if current is not None:
        raise ParseError(f"description {current[0]!r} is missing 'end'", current[1])
    if header_sr is None:
        raise ParseError("missing 'semiring' header")
    if semiring is not None and semiring != header_sr:
        raise ParseError(
            f"--semiring {semiring.header()} does not match the document header {header_sr.header()}")
    try:
        alphabet = RankedAlphabet(symbols, params)
    except TermError as e:
        raise ParseError(str(e)) from None

    doc = Document(header_sr, alphabet)
    for name, lineno, body in blocks:
        if name in doc.descriptions:
            raise ParseError(f"duplicate description {name!r}", lineno)
        doc.descriptions[name] = _parse_block(body, lineno, header_sr, alphabet)
    return doc


def _parse_block(body, start_line, sr, alphabet) -> Description:
    final = None
    rhs: list[Term] = []
    for lineno, line in body:
        words = line.split()
        if words[0] == "final":
            if final is not None:
                raise ParseError("duplicate 'final' line", lineno)
            try:
                final = [sr.parse(w) for w in words[1:]]
            except SemiringError as e:
                raise ParseError(str(e), lineno) from None
            continue
        m = _EQ_RE.match(line)
        if not m:
            raise ParseError("expected 'final ...' or 'xi = term'", lineno)
        index = int(m.group(1)[1:])
        if index != len(rhs) + 1:
            raise ParseError(f"expected equation for x{len(rhs) + 1}, found {m.group(1)}", lineno)
        try:
            rhs.append(parse_term(m.group(2), sr, alphabet))
        except ParseError as e:
            col = None if e.column is None else e.column + m.start(2)
            raise ParseError(e.message, lineno, col) from None
    if final is None:
        raise ParseError("description has no 'final' line", start_line)
    if len(final) != len(rhs):
        raise ParseError(f"'final' has {len(final)} weights but there are {len(rhs)} equations",
                         start_line)
    for i, t in enumerate(rhs):
        bad = [v for v in _free_vars(t) if v.index >= len(rhs)]
        if bad:
            raise ParseError(f"equation x{i + 1} mentions undeclared variable {bad[0]}", start_line)
    try:
        return Description(final, EquationSystem(sr, alphabet, rhs))
    except (DescriptionError, TermError) as e:
        raise ParseError(str(e), start_line) from None


def _free_vars(t: Term):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from _free_vars(a)
    elif isinstance(t, Sum):
        yield from _free_vars(t.left)
        yield from _free_vars(t.right)
    elif isinstance(t, Scale):
        yield from _free_vars(t.term)
