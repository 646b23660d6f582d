"""Brute-force oracles. None of these call into the solver or the automaton run."""

import itertools

from treeseries.terms import App, Param, Var, eval_term, variables_of, params_of


def runs_weight(d, tree):
    """Sum over every labelling of ``tree``'s nodes with states of a flat description.

    A labelling's weight is the product of the equation coefficients it
    uses times the final weight at the root.
    """
    sr = d.semiring
    # nodes[i] = (tree, child positions); the same subtree object may repeat
    nodes = []

    def collect(t):
        i = len(nodes)
        nodes.append(None)
        kids = [collect(x) for x in t.args] if isinstance(t, App) else []
        nodes[i] = (t, kids)
        return i

    collect(tree)
    n = len(d.final)
    total = sr.zero
    for labels in itertools.product(range(n), repeat=len(nodes)):
        w = sr.one
        for i, (t, kids) in enumerate(nodes):
            if isinstance(t, Param):
                m = Param(t.name)
            else:
                m = App(t.symbol, [Var(labels[k]) for k in kids])
            w = sr.mul(w, d.rhs[labels[i]].coeff(m))
            if w == sr.zero:
                break
        w = sr.mul(w, d.final[labels[0]])
        total = sr.add(total, w)
    return total


def all_assignments(sr, t_list, n_vars=None):
    """Every (env, par) assignment of the finite ``sr`` to the names in ``t_list``."""
    vs = sorted(set().union(*(variables_of(t) for t in t_list)))
    ps = sorted(set().union(*(params_of(t) for t in t_list)))
    elems = sr.elements()
    for values in itertools.product(elems, repeat=len(vs) + len(ps)):
        env = dict(zip(vs, values[:len(vs)]))
        par = dict(zip(ps, values[len(vs):]))
        yield env, par


def agree_everywhere(sr, t1, t2):
    """Product-interpretation values of ``t1`` and ``t2`` agree for all assignments."""
    return all(eval_term(t1, sr, env, par) == eval_term(t2, sr, env, par)
               for env, par in all_assignments(sr, [t1, t2]))


def matmul(sr, A, B):
    return [[sr.sum(sr.mul(A[i][k], B[k][j]) for k in range(len(B)))
             for j in range(len(B[0]))] for i in range(len(A))]


def word_value(sr, initial, matrices, final, word):
    """``initial · T[w_l] ··· T[w_1] · final`` for the tree ``w_1(w_2(...w_l(a)))``."""
    row = [list(initial)]
    for letter in reversed(word):
        row = matmul(sr, row, matrices[letter])
    col = [[f] for f in final]
    return matmul(sr, row, col)[0][0]
