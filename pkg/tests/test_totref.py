import pytest

from trmod.algebra import AlgebraSpec, build_algebra
from trmod.errors import ValidationError
from trmod.modmat import PresentationMatrix, coker_length
from trmod.totref import (
    CERTIFIED,
    REFUTED,
    check_totally_reflexive,
    check_ut_tr,
    complete_resolution,
    verify_periodic_window,
)


@pytest.fixture(scope="module")
def S2():
    return build_algebra(AlgebraSpec.canonical_s(2))


@pytest.fixture(scope="module")
def S3():
    return build_algebra(AlgebraSpec.canonical_s(3))


def M(A, rows):
    return PresentationMatrix.from_exprs(A, rows)


def test_certify_cyclic_period_one(S2):
    cert = check_totally_reflexive(M(S2, [["x"]]))
    assert cert.certified
    assert cert.preperiod == 0 and cert.period == 1
    assert cert.window[0] == M(S2, [["x"]])
    assert verify_periodic_window(cert.window)


def test_certify_two_by_two(S2):
    mat = M(S2, [["x", "z"], ["y", "x"]])
    cert = check_totally_reflexive(mat, equivalence_budget=0)
    assert cert.certified
    assert cert.period in (1, 2)
    assert verify_periodic_window(cert.window)
    assert coker_length(mat) == 6


def test_certify_two_by_two_f3(S3):
    mat = M(S3, [["x", "z"], ["y", "x"]])
    cert = check_totally_reflexive(mat, equivalence_budget=0)
    assert cert.certified
    assert verify_periodic_window(cert.window)


def test_refute_k_summand(S2):
    cert = check_totally_reflexive(M(S2, [["x*y"], ["x*z"]]))
    assert cert.verdict == REFUTED
    assert cert.witness["kind"] == "k_summand"
    assert cert.depth == 1


def test_refute_non_square(S2):
    cert = check_totally_reflexive(M(S2, [["x", "y"]]))
    assert cert.verdict == REFUTED
    assert cert.witness["kind"] == "non_square"


def test_refute_non_ezd_diagonal(S2):
    cert = check_totally_reflexive(M(S2, [["y"]]))
    assert cert.verdict == REFUTED


def test_refuted_inputs_never_certify_deeper(S2):
    for depth in (2, 8):
        cert = check_totally_reflexive(M(S2, [["x*y"], ["x*z"]]), depth=depth)
        assert cert.verdict == REFUTED


def test_free_module_trivially_certified(S2):
    cert = check_totally_reflexive(M(S2, [["0"]]))
    assert cert.certified
    assert any("free" in line for line in cert.log)


def test_pruned_presentation_certifies(S2):
    # coker [[0, x], [0, 0]] = R/(x) + R: redundant column and free row
    cert = check_totally_reflexive(M(S2, [["0", "x"], ["0", "0"]]))
    assert cert.certified
    assert any("pruned" in line for line in cert.log)


def test_depth_validation(S2):
    with pytest.raises(ValidationError):
        check_totally_reflexive(M(S2, [["x"]]), depth=0)


def test_check_ut_tr(S2):
    ok, evidence = check_ut_tr(M(S2, [["x", "y"], ["0", "x + y"]]))
    assert ok
    assert [row["exact_zero_divisor"] for row in evidence] == [True, True]
    bad, evidence = check_ut_tr(M(S2, [["y", "x"], ["0", "x"]]))
    assert not bad
    assert evidence[0]["partner"] is None
    ok1, _ = check_ut_tr(M(S2, [["x"]]))
    assert ok1


def test_check_ut_tr_rejects_non_ut(S2):
    with pytest.raises(ValidationError):
        check_ut_tr(M(S2, [["x", "0"], ["y", "x"]]))


def test_check_ut_tr_cross_validation(S2):
    ok, _ = check_ut_tr(M(S2, [["x", "z"], ["0", "x + y"]]), cross_validate=True)
    assert ok
    bad, _ = check_ut_tr(M(S2, [["y", "x"], ["0", "x"]]), cross_validate=True)
    assert not bad


def test_complete_resolution_self_paired(S2):
    res = complete_resolution(M(S2, [["x + y"]]), window=3)
    assert sorted(res) == list(range(-3, 4))
    for pos in res:
        assert res[pos] == M(S2, [["x + y"]])


def test_complete_resolution_alternating_f3(S3):
    res = complete_resolution(M(S3, [["x + y"]]), window=3)
    a, b = M(S3, [["x + y"]]), M(S3, [["x + 2*y"]])
    for pos in res:
        assert res[pos] == (a if pos % 2 == 1 else b)


def test_complete_resolution_stays_ut(S2):
    res = complete_resolution(M(S2, [["x", "y"], ["0", "x"]]), window=3)
    for pos, mat in res.items():
        assert mat.is_upper_triangular
        assert mat.is_minimal


def test_complete_resolution_requires_certificate(S2):
    with pytest.raises(ValidationError):
        complete_resolution(M(S2, [["y"]]))
