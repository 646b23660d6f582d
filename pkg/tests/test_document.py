import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import SMALL_ALPHABETS, random_description
from treeseries.descriptions import DescriptionError
from treeseries.document import Document, ParseError, format_document, parse_document, parse_term, parse_tree
from treeseries.semiring import BOOL, NAT, TROPICAL, ZMod
from treeseries.terms import App, Param, RankedAlphabet, Scale, Sum, Var, ZERO

D1_TEXT = """\
semiring nat
alphabet sigma/2 gamma/1
params a b
desc D1
  final 1 0
  x1 = 2 * sigma(x1, x2) + 3 * a
  x2 = 5 * b
end
"""

AB = RankedAlphabet({"sigma": 2, "gamma": 1}, ["a", "b"])
a, b = Param("a"), Param("b")


def test_parse_d1():
    doc = parse_document(D1_TEXT)
    assert doc.semiring == NAT
    assert list(doc.descriptions) == ["D1"]
    d = doc["D1"]
    assert d.n_vars == 2 and d.final == (1, 0)
    assert d.rhs[1].coeffs == {b: 5}
    assert d.rhs[0].coeffs == {App("sigma", [Var(0), Var(1)]): 2, a: 3}


CANONICAL = D1_TEXT.replace("2 * sigma(x1, x2) + 3 * a", "3 * a + 2 * sigma(x1, x2)")


def test_canonical_document_roundtrip():
    assert format_document(parse_document(D1_TEXT)) == CANONICAL
    assert format_document(parse_document(CANONICAL)) == CANONICAL


def test_improper_system_names_the_monomial():
    text = D1_TEXT.replace("x2 = 5 * b", "x2 = x2")
    with pytest.raises(ParseError, match="x2"):
        parse_document(text)
    with pytest.raises(ParseError, match="improper"):
        parse_document(D1_TEXT.replace("x1 = 2 * sigma(x1, x2) + 3 * a", "x1 = x2"))


def test_arity_error_has_position():
    text = D1_TEXT.replace("3 * a", "sigma(a)")
    with pytest.raises(ParseError, match="arity") as info:
        parse_document(text)
    assert info.value.line == 6 and info.value.column is not None


@pytest.mark.parametrize("change", [
    ("final 1 0", "final 1"),
    ("x2 = 5 * b", "x3 = 5 * b"),
    ("end\n", ""),
    ("3 * a", "3 * c"),
    ("3 * a", "3 a"),
    ("3 * a", "3"),
    ("semiring nat", "semiring real"),
    ("x2 = 5 * b", "x2 = 5 * b + x7"),
])
def test_syntax_errors(change):
    with pytest.raises(ParseError):
        parse_document(D1_TEXT.replace(*change))


def test_semiring_override_must_match():
    assert parse_document(D1_TEXT, NAT).semiring == NAT
    with pytest.raises(ParseError):
        parse_document(D1_TEXT, BOOL)


def test_comments_and_blank_lines():
    text = "# leading\n\n" + D1_TEXT.replace("params a b", "params a b  # two leaves")
    assert parse_document(text)["D1"] == parse_document(D1_TEXT)["D1"]


def test_unknown_description():
    with pytest.raises(DescriptionError):
        parse_document(D1_TEXT)["nope"]


def test_parse_term_forms():
    assert parse_term("0", NAT, AB) == ZERO
    assert parse_term("2 * (a + b)", NAT, AB) == Scale(2, Sum(a, b))
    assert parse_term("gamma(x3)", NAT, AB) == App("gamma", [Var(2)])
    with pytest.raises(ParseError):
        parse_term("sigma(a, b", NAT, AB)


def test_parse_tree_rejects_variables():
    assert parse_tree("sigma(a,b)", NAT, AB) == App("sigma", [a, b])
    for bad in ["sigma(x1, a)", "a + b", "2 * a"]:
        with pytest.raises(ParseError):
            parse_tree(bad, NAT, AB)


def test_tropical_weights():
    text = CANONICAL.replace("semiring nat", "semiring tropical").replace("final 1 0", "final 0 inf")
    d = parse_document(text)["D1"]
    assert d.semiring == TROPICAL and d.final == (0, float("inf"))
    assert format_document(parse_document(text)) == text


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, sr=st.sampled_from([NAT, BOOL, ZMod(3)]))
def test_random_roundtrip(seed, sr):
    rng = random.Random(seed)
    alphabet = rng.choice(SMALL_ALPHABETS)
    doc = Document(sr, alphabet, {"A": random_description(rng, sr, alphabet),
                                  "B": random_description(rng, sr, alphabet)})
    text = format_document(doc)
    again = parse_document(text)
    assert again.descriptions == doc.descriptions
    assert format_document(again) == text
