import random
from fractions import Fraction

import pytest

from semifix import (
    INF,
    Matrix,
    build_edb,
    element_stability,
    ground,
    load_system,
    matrix_power_sum,
    matrix_stability_index,
    naive_eval_general,
    naive_eval_linear,
    parse_program,
    save_system,
    semiring_from_id,
    trace_csv,
    walk_sum_upto,
)
from semifix.engine import linear_step
from semifix.frontend import GroundedLinearSystem
from semifix.generators import LINEAR_PATH_PROGRAM, gen_cycle_lowerbound, random_edge_instance


def reachability(edges, n):
    """Hop-unbounded reachability by breadth-first search."""
    adj = {u: set() for u in range(n)}
    for u, v in edges:
        adj[u].add(v)
    out = {}
    for src in range(n):
        seen = set(adj[src])
        frontier = set(adj[src])
        while frontier:
            nxt = {w for v in frontier for w in adj[v]} - seen
            seen |= nxt
            frontier = nxt
        out[src] = seen
    return out


def floyd_warshall(weights, n):
    dist = [[None] * n for _ in range(n)]
    for (u, v), w in weights.items():
        if dist[u][v] is None or w < dist[u][v]:
            dist[u][v] = w
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i][k] is not None and dist[k][j] is not None:
                    alt = dist[i][k] + dist[k][j]
                    if dist[i][j] is None or alt < dist[i][j]:
                        dist[i][j] = alt
    return dist


def path_system(sid, n, density, seed, weight_range=(1, 9)):
    s = semiring_from_id(sid)
    db = random_edge_instance(n, density, s, seed, weight_range)
    return db, ground(parse_program(LINEAR_PATH_PROGRAM), db)


# ---------------------------------------------------------------------------
# Naive evaluation
# ---------------------------------------------------------------------------

def test_boolean_tc_on_path():
    s = semiring_from_id("bool")
    db = build_edb(s, [("E", ("a", "b"), None), ("E", ("b", "c"), None)])
    sys_ = ground(parse_program(LINEAR_PATH_PROGRAM), db)
    trace = naive_eval_linear(sys_)
    assert trace.stability_index is not None and trace.stability_index <= 3
    assert all(v is True for v in trace.fixpoint)
    assert set(sys_.atoms) == {("T", ("a", "b")), ("T", ("b", "c")), ("T", ("a", "c"))}


def test_trop_apsp_matches_floyd_warshall():
    s = semiring_from_id("trop")
    rng = random.Random(42)
    n = 4
    weights = {}
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.6:
                weights[(u, v)] = rng.randint(1, 9)
    db = build_edb(
        s, [("E", (f"v{u}", f"v{v}"), str(w)) for (u, v), w in sorted(weights.items())]
    )
    sys_ = ground(parse_program(LINEAR_PATH_PROGRAM), db)
    trace = naive_eval_linear(sys_)
    expected = floyd_warshall(weights, n)
    for (pred, (a, b)), idx in sys_.index.items():
        d = expected[int(a[1:])][int(b[1:])]
        assert trace.fixpoint[idx] == (INF if d is None else Fraction(d))


def test_empty_system_trace():
    s = semiring_from_id("bool")
    sys_ = ground(parse_program(LINEAR_PATH_PROGRAM), build_edb(s, []))
    trace = naive_eval_linear(sys_)
    assert trace.stability_index == 0
    assert trace.states == ((), ())


def test_capped_run_hits_cap():
    sys_ = gen_cycle_lowerbound(3, 4)
    trace = naive_eval_linear(sys_, cap=3)
    assert trace.capped
    assert trace.stability_index is None
    assert trace.wall_steps == 3


def test_once_equal_always_equal():
    db, sys_ = path_system("trop", 4, 0.6, seed=5)
    trace = naive_eval_linear(sys_)
    x = trace.fixpoint
    for _ in range(4):
        x = linear_step(sys_, x)
        assert x == trace.fixpoint


def test_inflationary_mode_converges_to_same_fixpoint():
    db, sys_ = path_system("bool", 4, 0.5, seed=9)
    plain = naive_eval_linear(sys_)
    infl = naive_eval_linear(sys_, inflationary=True)
    assert plain.fixpoint == infl.fixpoint


def one_variable_system(s, u):
    from semifix.frontend import GroundedPolynomialSystem

    atom = ("x", ())
    return GroundedPolynomialSystem(
        s, (atom,), {atom: 0}, (((u, (0,)), (s.one, ())),), 1, False
    )


def test_one_variable_general_system_tracks_element_stability():
    # x <- u*x (+) 1 walks through the power-sum prefix of u when the algebra
    # distributes
    s = semiring_from_id("trop_p_fin:1:1")
    u = (0, 0)
    trace = naive_eval_general(one_variable_system(s, u))
    r = element_stability(s, u)
    for q in range(1, len(trace.states)):
        assert trace.states[q][0] == r.sequence[q - 1]
    assert trace.stability_index == r.index + 1


def test_one_variable_capped_iteration_is_horner_shaped():
    # without distributivity the iteration u*(previous) (+) 1 counts single
    # steps, min(q - 1, L), rather than accumulating the power-sum prefix
    s = semiring_from_id("capped:4")
    trace = naive_eval_general(one_variable_system(s, 1))
    for q in range(1, len(trace.states)):
        assert trace.states[q][0] == min(q - 1, 4)
    assert trace.stability_index == 5
    assert element_stability(s, 1).index == 3


def test_linear_and_general_traces_identical():
    for sid in ("bool", "trop", "capped:4", "trop_p_fin:1:1"):
        s = semiring_from_id(sid)
        db = random_edge_instance(4, 0.5, s, seed=13)
        program = parse_program(LINEAR_PATH_PROGRAM)
        lin = ground(program, db)
        poly = ground(program, db, force_polynomial=True)
        tl = naive_eval_linear(lin)
        tg = naive_eval_general(poly)
        assert tl.states == tg.states
        assert tl.stability_index == tg.stability_index


# ---------------------------------------------------------------------------
# Power sums and matrix stability
# ---------------------------------------------------------------------------

def test_power_sum_zero_is_identity():
    s = semiring_from_id("bool")
    A = Matrix(s, 3, [(0, 1, True)])
    assert matrix_power_sum(A, 0).value == Matrix.identity(s, 3)


def test_power_sum_recurrence():
    s = semiring_from_id("trop")
    A = Matrix(s, 3, [(0, 1, Fraction(2)), (1, 2, Fraction(1)), (2, 0, Fraction(5))])
    ident = Matrix.identity(s, 3)
    for k in range(4):
        assert matrix_power_sum(A, k + 1).value == ident.add(
            A.matmul(matrix_power_sum(A, k).value)
        )


def test_power_sum_boolean_three_path():
    s = semiring_from_id("bool")
    A = Matrix(s, 3, [(0, 1, True), (1, 2, True)])
    S2 = matrix_power_sum(A, 2).value
    assert S2.get(0, 2) is True
    assert S2.get(0, 0) is True
    assert S2.get(2, 0) is s.zero


def test_power_sum_one_by_one_matches_element_sequence():
    s = semiring_from_id("trop_p_fin:1:1")
    for u in s.elements():
        A = Matrix(s, 1, [(0, 0, u)])
        r = element_stability(s, u)
        for k in range(len(r.sequence)):
            assert matrix_power_sum(A, k).value.get(0, 0) == r.sequence[k]


def test_power_sum_capped_one_by_one_is_horner_shaped():
    # capped addition does not distribute, so the recurrence walks
    # 1 (+) u*(previous) instead of accumulating literal powers
    s = semiring_from_id("capped:4")
    A = Matrix(s, 1, [(0, 0, 1)])
    values = [matrix_power_sum(A, k).value.get(0, 0) for k in range(7)]
    assert values == [0, 1, 2, 3, 4, 4, 4]
    assert element_stability(s, 1).sequence == (0, 1, 3, 4, 4)


def test_matrix_stability_zero_matrix():
    s = semiring_from_id("bool")
    assert matrix_stability_index(Matrix(s, 3)) == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_matrix_stability_boolean_cycle(n):
    s = semiring_from_id("bool")
    A = Matrix(s, n, [(i, (i + 1) % n, True) for i in range(n)])
    assert matrix_stability_index(A) == n - 1
    # cross-check: power sums match hop-bounded reachability
    edges = [(i, (i + 1) % n) for i in range(n)]
    reach = reachability(edges, n)
    S = matrix_power_sum(A, n - 1).value
    for i in range(n):
        for j in range(n):
            assert S.get(i, j) == (i == j or j in reach[i])


def test_matrix_stability_appendix_cycle():
    sys_ = gen_cycle_lowerbound(3, 4)
    s = sys_.semiring
    k = matrix_stability_index(sys_.A)
    from semifix import longest_chain

    assert k >= 4
    assert k <= 3 * longest_chain(s)
    # power sums agree with explicit walk enumeration while every entry still
    # holds at most one walk (h <= n); beyond that capped addition compounds
    # differently under the two evaluation orders
    for h in range(4):
        S = matrix_power_sum(sys_.A, h).value
        for i in range(3):
            for j in range(3):
                assert walk_sum_upto(sys_.A, i, j, h) == S.get(i, j)


@pytest.mark.parametrize("sid", ["bool", "trivial", "trop_p_fin:1:1", "trop_p_fin:2:2"])
def test_element_stability_matches_one_by_one_matrix(sid):
    s = semiring_from_id(sid)
    rng = random.Random(17)
    carrier = list(s.elements())
    for _ in range(20):
        u = rng.choice(carrier)
        r = element_stability(s, u, cap=64)
        A = Matrix(s, 1, [(0, 0, u)])
        assert matrix_stability_index(A, cap=64) == r.index


def test_trace_states_equal_power_sums_applied_to_seed():
    for sid in ("bool", "trop", "trop_p_fin:1:1"):
        db, sys_ = path_system(sid, 4, 0.6, seed=3)
        trace = naive_eval_linear(sys_)
        for q in range(1, len(trace.states)):
            S = matrix_power_sum(sys_.A, q - 1).value
            assert trace.states[q] == tuple(
                sys_.semiring.add(a, b)
                for a, b in zip(S.matvec(sys_.b), [sys_.semiring.zero] * sys_.n)
            )


# ---------------------------------------------------------------------------
# Matrix file format and trace CSV
# ---------------------------------------------------------------------------

def test_save_load_roundtrip():
    db, sys_ = path_system("trop", 3, 0.8, seed=21)
    text = save_system(sys_)
    again = load_system(text)
    assert again.semiring is sys_.semiring
    assert again.n == sys_.n
    assert again.A == sys_.A
    assert again.b == sys_.b
    assert again.atoms == sys_.atoms
    assert save_system(again) == text


def test_load_system_minimal():
    sys_ = load_system("semiring capped:4\nn 2\nA 0 1 3\nb 0 O\nb 1 2\n")
    assert sys_.n == 2
    assert sys_.A.get(0, 1) == 3
    assert sys_.b == (sys_.semiring.zero, 2)
    assert sys_.atom_labels() == ("x0", "x1")


def test_load_system_rejects_bad_input():
    from semifix import ParseError
    from semifix.errors import InvalidParameter

    with pytest.raises(ParseError):
        load_system("n 2\nA 0 1 true\n")  # entries before the semiring header
    with pytest.raises(ParseError):
        load_system("semiring bool\nn 2\nb 5 true\n")  # index out of range
    with pytest.raises(InvalidParameter):
        load_system("semiring bool\nn 2\nA 0 7 true\n")


def test_trace_csv_shape():
    db, sys_ = path_system("bool", 3, 1.0, seed=2)
    trace = naive_eval_linear(sys_)
    csv_text = trace_csv(sys_, trace)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "step,atom,value"
    assert len(lines) == 1 + len(trace.states) * sys_.n
    assert '"T(v0,v1)"' in csv_text


def test_default_cap_terminates_capped_one_by_one():
    # single self-loop over a finite carrier must converge under default cap
    s = semiring_from_id("capped:6")
    atom = ("x", ())
    sys_ = GroundedLinearSystem(
        s, (atom,), {atom: 0}, Matrix(s, 1, [(0, 0, 1)]), (0,), 1, False
    )
    trace = naive_eval_linear(sys_)
    assert not trace.capped
    assert trace.fixpoint == (6,)
