import warnings

import pytest

from trmod.algebra import AlgebraSpec, build_algebra
from trmod.errors import BudgetExceededError, ValidationError
from trmod.filtration import (
    filtrate_ut,
    find_ut_form,
    mb_matrix,
    mb_preconditions,
    submodule_step,
)
from trmod.modmat import PresentationMatrix, coker_length, ring_matmul
from trmod.totref import check_totally_reflexive, check_ut_tr


@pytest.fixture(scope="module")
def S2():
    return build_algebra(AlgebraSpec.canonical_s(2))


@pytest.fixture(scope="module")
def S3():
    return build_algebra(AlgebraSpec.canonical_s(3))


def M(A, rows):
    return PresentationMatrix.from_exprs(A, rows)


def test_filtrate_ut_two_step(S2):
    filt = filtrate_ut(M(S2, [["x", "y"], ["0", "x + y"]]))
    assert len(filt) == 2
    assert filt.blocks[0] == M(S2, [["x"]])
    assert filt.lengths == [3, 6]
    assert [repr(q) for q in filt.quotients] == ["x", "x + y"]


def test_filtrate_ut_single(S2):
    filt = filtrate_ut(M(S2, [["x"]]))
    assert len(filt) == 1
    assert filt.lengths == [3]


def test_filtrate_ut_rejects_non_ezd_diagonal(S2):
    with pytest.raises(ValidationError, match="exact zero divisor"):
        filtrate_ut(M(S2, [["x", "y"], ["0", "y"]]))


def test_filtrate_ut_rejects_non_ut(S2):
    with pytest.raises(ValidationError):
        filtrate_ut(M(S2, [["x", "z"], ["y", "x"]]))


def test_filtrate_ut_three_step(S2):
    filt = filtrate_ut(M(S2, [["x", "y", "0"],
                              ["0", "x + y", "z"],
                              ["0", "0", "x + z"]]))
    assert filt.lengths == [3, 6, 9]
    for blk in filt.blocks:
        assert check_ut_tr(blk)[0]


def test_submodule_step(S2):
    U, t = submodule_step(M(S2, [["x", "y"], ["0", "x + y"]]))
    assert U == M(S2, [["x"]])
    assert repr(t) == "x + y"
    U2, t2 = submodule_step(M(S2, [["x + y", "z"], ["0", "x"]]))
    assert U2 == M(S2, [["x + y"]])
    assert repr(t2) == "x"


def test_submodule_step_degenerate(S2):
    U, t = submodule_step(M(S2, [["x"]]))
    assert (U.rows, U.cols) == (0, 0)
    assert repr(t) == "x"


def test_submodule_step_rejects_bad_shape(S2):
    with pytest.raises(ValidationError):
        submodule_step(M(S2, [["x", "z"], ["y", "x"]]))


def test_submodule_step_agrees_with_filtrate(S2):
    mat = M(S2, [["x", "y", "0"],
                 ["0", "x + y", "z"],
                 ["0", "0", "x + z"]])
    filt = filtrate_ut(mat)
    cur = mat
    chain = []
    while cur.rows:
        cur, t = submodule_step(cur)
        chain.append(t)
    assert [repr(t) for t in reversed(chain)] == [repr(q) for q in filt.quotients]


def test_find_ut_form_already_ut(S2):
    mat = M(S2, [["x", "y"], ["0", "x"]])
    w, ut = find_ut_form(mat)
    assert ut == mat
    assert w.verify(mat, ut)


def test_find_ut_form_row_swapped(S2):
    # a permuted UT matrix recovers a UT form via the search
    mat = M(S2, [["0", "x + y"], ["x", "y"]])
    result = find_ut_form(mat)
    assert result is not None
    w, ut = result
    assert ut.is_upper_triangular
    assert w.verify(mat, ut)
    assert filtrate_ut(ut).lengths == [3, 6]


def test_find_ut_form_none_exists(S2):
    assert find_ut_form(M(S2, [["x", "z"], ["y", "x"]])) is None


def test_find_ut_form_none_exists_f3(S3):
    assert find_ut_form(M(S3, [["x", "z"], ["y", "x"]])) is None


def test_find_ut_form_budget(S2):
    big = PresentationMatrix.zeros(S2, 4, 4)
    ent = big.entries.copy()
    for i in range(4):
        ent[i, i] = S2.from_expr("x").coeffs
    ent[1, 0] = S2.from_expr("y").coeffs
    with pytest.raises(BudgetExceededError):
        find_ut_form(PresentationMatrix(S2, ent))


def test_mb_matrix_pattern(S2):
    x, y, z = (S2.from_expr(v) for v in "xyz")
    mat = mb_matrix(4, x, x, y, z)
    assert mat == M(S2, [["x", "y", "0", "0"],
                         ["0", "x", "z", "0"],
                         ["0", "0", "x", "y"],
                         ["0", "0", "0", "x"]])
    assert mb_matrix(1, x, x, y, z) == M(S2, [["x"]])


def test_mb_preconditions(S2, S3):
    x, y, z = (S2.from_expr(v) for v in "xyz")
    pre = mb_preconditions(x, x, y, z)
    assert pre["exact_pair"] and pre["uv_zero"]
    assert pre["condition_b"] and not pre["condition_a"]
    assert pre["satisfied"]
    # condition (a): s, t, u independent mod m^2
    u3 = S3.from_expr("x + y")
    t3 = S3.from_expr("x + 2*y")
    pre3 = mb_preconditions(u3, t3, S3.from_expr("z"), S3.from_expr("y"))
    assert pre3["condition_a"]


def test_mb_matrix_warns_on_violation(S2):
    x, y, z = (S2.from_expr(v) for v in "xyz")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mb_matrix(2, y, y, x, x)  # y not an EZD, xx = 0 though
        assert any("precondition" in str(w.message) or "condition" in str(w.message)
                   for w in caught)


def test_mb_matrix_resolution_constant_betti(S2):
    x, y, z = (S2.from_expr(v) for v in "xyz")
    for b in (2, 3):
        mat = mb_matrix(b, x, x, y, z)
        cert = check_totally_reflexive(mat)
        assert cert.certified
        assert all(c == b for c in cert.betti)
        assert coker_length(mat) == b * S2.e


def test_mb_matrix_passes_ut_criterion(S2):
    x, y, z = (S2.from_expr(v) for v in "xyz")
    ok, _ = check_ut_tr(mb_matrix(3, x, x, y, z))
    assert ok
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bad_mat = mb_matrix(2, y, y, x, x)
    bad, _ = check_ut_tr(bad_mat)
    assert not bad
