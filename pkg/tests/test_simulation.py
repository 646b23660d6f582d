import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import BINARY, UNARY2, permutation_matrix, permute, random_flat_description
from treeseries.descriptions import Description, EquationSystem, DescriptionError, desc_sum
from treeseries.semiring import BOOL, NAT, ZMod
from treeseries.series import equiv_up_to
from treeseries.simulation import (
    BudgetExceededError,
    Link,
    SimMatrix,
    SimulationError,
    build_DM,
    build_ME,
    check_chain,
    check_simulation,
    find_simulations,
)
from treeseries.terms import App, LinearForm, Param, RankedAlphabet, Scale, Sum, Var

x1, x2 = Var(0), Var(1)
a, b = Param("a"), Param("b")
AB = RankedAlphabet({"sigma": 2}, ["a", "b"])


def sigma(*args):
    return App("sigma", args)


def nat_desc(final, *rhs, sr=NAT):
    return Description(final, EquationSystem(sr, AB, rhs))


SIX_A = nat_desc([1], Scale(6, a))
TWO_A = nat_desc([3], Scale(2, a))
D2 = nat_desc([1, 1], Sum(Scale(2, sigma(x1, x2)), a), Sum(sigma(x2, x1), Scale(3, b)))


def test_dm_identity_is_renaming():
    assert build_DM(D2.system, SimMatrix.identity(NAT, 2)) == D2.rhs


def test_dm_scaling():
    d = nat_desc([1], sigma(x1, a))
    assert build_DM(d.system, SimMatrix(NAT, ((2,),))) == (LinearForm(NAT, {sigma(x1, a): 2}),)


def test_dm_zero_matrix():
    d = nat_desc([1], Sum(sigma(x1, a), b))
    assert build_DM(d.system, SimMatrix.zeros(NAT, 1, 3)) == (LinearForm(NAT, {b: 1}),)


def test_me_identity_and_scaling():
    assert build_ME(D2.system, SimMatrix.identity(NAT, 2)) == D2.rhs
    E = nat_desc([1], Scale(2, a))
    assert build_ME(E.system, SimMatrix(NAT, ((3,),))) == (LinearForm(NAT, {a: 6}),)
    assert build_ME(E.system, SimMatrix.zeros(NAT, 2, 1)) == (LinearForm(NAT), LinearForm(NAT))


def test_dimension_mismatch():
    with pytest.raises(SimulationError):
        build_DM(D2.system, SimMatrix.identity(NAT, 3))
    with pytest.raises(SimulationError):
        check_simulation(D2, SIX_A, SimMatrix.identity(NAT, 2))


def test_check_simulation_examples():
    assert check_simulation(D2, D2, SimMatrix.identity(NAT, 2))
    assert check_simulation(SIX_A, TWO_A, [[3]])
    assert not check_simulation(SIX_A, TWO_A, [[1]])
    assert equiv_up_to(SIX_A, TWO_A, 4)


def test_check_simulation_rejects_matching_weights_with_wrong_equations():
    other = nat_desc([1], Scale(5, a))
    assert not check_simulation(SIX_A, other, [[1]])


def test_chain():
    assert check_chain([SIX_A], [])
    links = [Link(SimMatrix(NAT, ((3,),))), Link(SimMatrix.identity(NAT, 1), forward=False)]
    assert check_chain([SIX_A, TWO_A, TWO_A], links)
    bad = [Link(SimMatrix(NAT, ((3,),))), Link(SimMatrix(NAT, ((2,),)), forward=False)]
    assert not check_chain([SIX_A, TWO_A, TWO_A], bad)
    with pytest.raises(SimulationError):
        check_chain([SIX_A, TWO_A], [])


def test_find_simulations_identity_over_bool():
    d = nat_desc([1], Sum(sigma(x1, x1), a), sr=BOOL)
    found = find_simulations(d, d, [0, 1])
    assert SimMatrix(BOOL, ((1,),)) in found


def test_find_simulations_scaling_pair():
    found = find_simulations(SIX_A, TWO_A, range(5))
    assert found == [SimMatrix(NAT, ((3,),))]


def test_find_simulations_inequivalent_pair():
    assert find_simulations(SIX_A, nat_desc([1], Scale(5, a)), range(5)) == []


def test_find_simulations_is_lexicographic():
    d = nat_desc([1, 1], sigma(x1, x2), a, sr=BOOL)
    found = find_simulations(d, d)
    rows = [M.rows for M in found]
    assert rows == sorted(rows)
    assert SimMatrix.identity(BOOL, 2) in found


def test_find_simulations_budget():
    with pytest.raises(BudgetExceededError):
        find_simulations(D2, D2, range(5), budget=100)


def test_find_simulations_needs_flat():
    nested = nat_desc([1], sigma(sigma(a, a), x1))
    with pytest.raises(DescriptionError):
        find_simulations(nested, nested)


def test_matrix_file_roundtrip():
    M = SimMatrix(NAT, ((1, 2), (0, 3)))
    assert M.format() == "2 2\n1 2\n0 3\n"
    assert SimMatrix.parse(M.format(), NAT) == M
    with pytest.raises(SimulationError):
        SimMatrix.parse("2 2\n1 2\n", NAT)


def test_non_flat_descriptions_can_be_checked():
    d = nat_desc([1], Sum(sigma(sigma(a, x1), b), a))
    assert check_simulation(d, d, SimMatrix.identity(NAT, 1))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, sr=st.sampled_from([BOOL, ZMod(2), NAT]))
def test_permuted_copy_is_simulated(seed, sr):
    rng = random.Random(seed)
    d = random_flat_description(rng, sr, rng.choice([BINARY, UNARY2]))
    perm = list(range(len(d)))
    rng.shuffle(perm)
    assert check_simulation(d, permute(d, perm), permutation_matrix(perm))
    assert check_simulation(d, d, SimMatrix.identity(sr, len(d)))


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_verdict_ignores_presentation(seed):
    rng = random.Random(seed)
    d = random_flat_description(rng, BOOL, BINARY, max_states=2)
    # rebuilt from unnormalized rendered terms
    again = Description(d.final, EquationSystem(BOOL, BINARY, [f.to_term(BINARY) for f in d.rhs]))
    M = [[rng.choice([0, 1]) for _ in range(len(d))] for _ in range(len(d))]
    assert check_simulation(d, d, M) == check_simulation(again, again, M)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, sr=st.sampled_from([BOOL, ZMod(2)]))
def test_found_simulations_are_sound(seed, sr):
    rng = random.Random(seed)
    tgt = random_flat_description(rng, sr, BINARY, max_states=2)
    src = desc_sum(tgt, Description([0] * len(tgt), tgt.system))
    found = find_simulations(src, tgt)
    assert found
    for M in found:
        assert check_simulation(src, tgt, M)
    assert equiv_up_to(src, tgt, 4)
