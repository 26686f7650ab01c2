import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from kmpmd.bench import sweep
from kmpmd.gdk import run
from kmpmd.instances import gen_adversarial_line, gen_random
from kmpmd.lp import (
    INFEASIBLE, OPTIMAL, UNBOUNDED, Constraint, LPModel, build_p_prime, dump_model, dump_solution,
    is_feasible, matching_vector, objective_value, simplex_solve, verify_duality_chain,
)
from kmpmd.metrics import GuardExceeded
from kmpmd.offline import brute_force_opt


def lp(obj, rows):
    cons = [Constraint({j: F(a) for j, a in enumerate(coeffs) if a}, F(rhs)) for coeffs, rhs in rows]
    return LPModel([f"x{i}" for i in range(len(obj))], [F(c) for c in obj], cons)


def test_trivial():
    sol = simplex_solve(lp([1], [([1], 1)]))
    assert sol.status == OPTIMAL and sol.value == 1 and sol.x == [1] and sol.phase1_value == 0


def test_textbook():
    # min 2x + 3y  s.t. x + y >= 4, x + 3y >= 6  ->  x = 3, y = 1, value 9
    sol = simplex_solve(lp([2, 3], [([1, 1], 4), ([1, 3], 6)]))
    assert sol.value == 9 and sol.x == [3, 1]


def test_negative_rhs_rows():
    # -x >= -3 is x <= 3; min -x lands on it
    sol = simplex_solve(lp([-1], [([-1], -3)]))
    assert sol.value == -3


def test_infeasible_and_unbounded():
    assert simplex_solve(lp([1], [([1], 2), ([-1], -1)])).status == INFEASIBLE
    assert simplex_solve(lp([-1], [([1], 1)])).status == UNBOUNDED


def test_degenerate_cycling_example():
    # a classic degenerate problem on which largest-coefficient pivoting cycles
    obj = [F(-3, 4), 150, F(-1, 50), 6]
    rows = [([F(-1, 4), 60, F(1, 25), -9], 0), ([F(-1, 2), 90, F(1, 50), -3], 0), ([0, 0, -1, 0], -1)]
    sol = simplex_solve(lp(obj, rows))
    assert sol.status == OPTIMAL and sol.value == F(-1, 20)


def test_build_two_point(tp):
    model = build_p_prime(tp)
    assert len(model.variables) == 1 and len(model.constraints) == 2
    assert all(c.rhs == 1 and c.coeffs == {0: 1} for c in model.constraints)
    sol = simplex_solve(model)
    assert sol.value == F(1, 2)
    chain = verify_duality_chain(tp, run(tp).dual, sol.value, brute_force_opt(tp).value)
    assert (chain.dual, chain.pprime, chain.opt) == (F(1, 2), F(1, 2), 1) and chain.holds


def test_build_m4_k2():
    model = build_p_prime(gen_random("line_uniform", 2, 4, 0))
    assert len(model.variables) == 6 and model.candidates == 14
    assert model.pruned == 6 and len(model.constraints) == 8
    assert all(len(c.label) % 2 == 1 for c in model.constraints)
    assert "pruned_rhs_zero=6" in model.log


@pytest.mark.parametrize("k, m", [(2, 6), (3, 6), (3, 9), (4, 8)])
def test_rhs_values(k, m):
    model = build_p_prime(gen_random("line_uniform", k, m, 1))
    allowed = {s * (k - s) for s in range(1, k)}
    assert {c.rhs for c in model.constraints} <= allowed
    assert model.candidates == 2 ** m - 2


def test_guard():
    with pytest.raises(GuardExceeded):
        build_p_prime(gen_random("line_uniform", 2, 14, 0))


def test_adversarial_chain():
    inst = gen_adversarial_line(2, 1, F(1, 100))
    sol = simplex_solve(build_p_prime(inst))
    assert sol.status == OPTIMAL
    assert run(inst).dual <= sol.value <= F(101, 50)


def test_dense_and_rowgen_agree():
    for inst in sweep(40, seed=21, max_m=10):
        model = build_p_prime(inst)
        a = simplex_solve(model, method="dense")
        b = simplex_solve(model, method="rowgen")
        assert a.value == b.value, inst.name
        assert is_feasible(model, a.x) and is_feasible(model, b.x)
        assert objective_value(model, a.x) == a.value


def test_constraint_order_invariance():
    inst = gen_random("explicit_random", 3, 9, 4)
    model = build_p_prime(inst)
    base = simplex_solve(model).value
    rng = random.Random(0)
    for _ in range(3):
        shuffled = model.constraints[:]
        rng.shuffle(shuffled)
        perm = LPModel(model.variables, model.objective, shuffled)
        assert simplex_solve(perm).value == base


@given(st.integers(0, 10**6), st.sampled_from([(2, 4), (2, 6), (3, 6), (4, 8)]))
@settings(max_examples=25, deadline=None)
def test_matchings_are_feasible_and_above_optimum(seed, km):
    k, m = km
    inst = gen_random("line_uniform", k, m, seed)
    model = build_p_prime(inst)
    sol = simplex_solve(model)
    assert sol.phase1_value == 0
    rng = random.Random(seed)
    ids = list(range(m))
    for _ in range(5):
        rng.shuffle(ids)
        part = [tuple(sorted(ids[i:i + k])) for i in range(0, m, k)]
        x = matching_vector(model, part)
        assert is_feasible(model, x)
        assert objective_value(model, x) >= sol.value


def test_dumps():
    inst = gen_adversarial_line(2, 1, F(1, 100))
    model = build_p_prime(inst)
    sol = simplex_solve(model)
    text = dump_model(model)
    assert text.startswith("minimize\n") and "subject to" in text and "101/400 x_0_2" in text
    assert text.count(">= 1") == 8
    out = dump_solution(model, sol)
    assert "status optimal" in out and "value 101/200" in out
