import math

import numpy as np
import pytest

from blocktrid import (
    BlockSchedule,
    GENERAL,
    InvalidScheduleError,
    adjoint,
    block_slices,
    block_tridiagonalize,
    canonical_schedule,
    check_pattern,
    decompose,
    family_staircase,
    joint_cyclic_staircase,
    krylov_hessenberg,
    max_abs,
    polar_sparsify,
    polar_sparsify_tridiagonal,
    reducing_closure,
    staircase,
    staircase_coarse,
    tri_sparsify,
    unitarity_residual,
)

S2 = math.sqrt(2.0)

T5 = np.array(
    [
        [1, 1, 1, 0, 0],
        [1, 1, 1, 1, 1],
        [0, 1, 1, 1, 1],
        [0, 1, 1, 1, 1],
        [0, 1, 1, 1, 1],
    ],
    dtype=np.complex128,
)

def _rand(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))


def _rand_unitary(rng, d):
    q, r = np.linalg.qr(_rand(rng, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_staircase_five_by_five_fixture():
    # the refined bound pushes the (3,1) entry of this band matrix to zero
    form = staircase(T5)
    assert abs(form.matrix[2, 0]) <= 1e-12
    assert form.passing
    assert form.report.pattern_violations == []
    assert form.span_bounds[0] == (1, 3)
    assert form.span_bounds[-1] == (5, 5)


def test_staircase_one_by_one():
    form = staircase(np.array([[2.0 + 1.0j]]))
    assert form.matrix[0, 0] == 2.0 + 1.0j
    assert form.passing


def test_staircase_random_suite():
    rng = np.random.default_rng(7)
    for trial in range(20):
        d = int(rng.integers(1, 31))
        form = staircase(_rand(rng, d))
        assert form.passing, form.report.to_json()
        assert form.report.pattern_violations == []
        assert form.report.unitarity_residual <= 1e-10
        assert all(r <= 1e-8 for _, _, r in form.report.span_residuals)


def test_block_tridiagonalize_default_nine():
    rng = np.random.default_rng(11)
    form = block_tridiagonalize(_rand(rng, 9))
    assert form.schedule.sizes == (1, 2, 6)
    assert block_slices(form.schedule, 9) == [(0, 1), (1, 3), (3, 9)]
    assert form.passing
    # blocks 1 and 3 are decoupled
    assert max_abs(form.matrix[3:9, 0:1]) <= 1e-12
    assert max_abs(form.matrix[0:1, 3:9]) <= 1e-12


def test_block_tridiagonalize_dim_three():
    rng = np.random.default_rng(12)
    form = block_tridiagonalize(_rand(rng, 3))
    assert form.schedule.sizes == (1, 2)
    assert form.passing


def test_block_tridiagonalize_custom_schedule():
    rng = np.random.default_rng(13)
    T = _rand(rng, 27)
    sched = BlockSchedule((1, 3, 8, 24), GENERAL)
    form = block_tridiagonalize(T, sched)
    assert [b - a for a, b in block_slices(form.schedule, 27)] == [1, 3, 8, 15]
    assert form.passing


def test_block_tridiagonalize_rejects_bad_schedules():
    rng = np.random.default_rng(14)
    T = _rand(rng, 27)
    with pytest.raises(InvalidScheduleError, match="k=2"):
        block_tridiagonalize(T, BlockSchedule((1, 2, 5), GENERAL))
    with pytest.raises(InvalidScheduleError, match="spans"):
        block_tridiagonalize(T, BlockSchedule((1, 2, 6), GENERAL))


def test_polar_first_block_three_four():
    Mb = np.zeros((3, 3), dtype=np.complex128)
    Mb[0, 1] = 3.0
    Mb[0, 2] = 4.0
    form = polar_sparsify_tridiagonal(Mb, BlockSchedule((1, 2), GENERAL))
    assert abs(form.matrix[0, 1] - 5.0) <= 1e-12
    assert abs(form.matrix[0, 2]) <= 1e-12
    assert form.passing


def test_polar_degenerate_rows():
    for row in ([1.0, 0.0], [0.0, 0.0]):
        Mb = np.zeros((3, 3), dtype=np.complex128)
        Mb[0, 1:] = row
        form = polar_sparsify_tridiagonal(Mb, BlockSchedule((1, 2), GENERAL))
        assert abs(form.matrix[0, 1] - row[0]) <= 1e-12
        assert abs(form.matrix[0, 2]) <= 1e-12
        assert form.passing


def test_polar_direct_entry_rejects_dense():
    rng = np.random.default_rng(15)
    with pytest.raises(ValueError, match="not block tridiagonal"):
        polar_sparsify_tridiagonal(_rand(rng, 9), BlockSchedule((1, 2, 6), GENERAL))


def test_polar_direct_entry_on_band_output():
    rng = np.random.default_rng(16)
    base = block_tridiagonalize(_rand(rng, 9))
    form = polar_sparsify_tridiagonal(base.matrix, base.schedule)
    assert form.passing
    # same spectrum data: traces of powers agree with the band input
    assert abs(np.trace(form.matrix) - np.trace(base.matrix)) <= 1e-10


def test_polar_random_suite():
    rng = np.random.default_rng(17)
    for trial in range(12):
        d = int(rng.integers(2, 28))
        T = _rand(rng, d)
        form = polar_sparsify(T)
        assert form.passing, form.report.to_json()
        assert all(r <= 1e-9 for _, r in form.report.hermitian_residuals)
        assert all(r <= 1e-10 for _, r in form.report.tail_residuals)
        scales = dict(form.report.block_scales)
        for k, eig in form.report.psd_min_eigs:
            assert eig >= -1e-8 * max(1.0, scales[k])


def test_polar_alt_is_mirrored():
    rng = np.random.default_rng(18)
    T = _rand(rng, 13)
    alt = polar_sparsify(T, alt=True)
    assert alt.form_kind == "polar_alt"
    assert alt.passing, alt.report.to_json()
    primary_of_adjoint = polar_sparsify(adjoint(T))
    np.testing.assert_allclose(
        alt.matrix, primary_of_adjoint.matrix.conj().T, atol=1e-12
    )
    # below-diagonal squares are PSD in the alt form
    assert all(eig >= -1e-8 for _, eig in alt.report.psd_min_eigs)


def test_polar_rejects_shrinking_blocks():
    rng = np.random.default_rng(19)
    T = _rand(rng, 10)
    with pytest.raises(InvalidScheduleError, match="non-decreasing"):
        polar_sparsify(T, canonical_schedule(4, 1, GENERAL))


def test_tri_zero_matrix():
    form = tri_sparsify(np.zeros((9, 9)))
    np.testing.assert_array_equal(form.basis_change, np.eye(9))
    assert max_abs(form.matrix) == 0.0
    assert form.passing


def test_tri_identity_matrix():
    form = tri_sparsify(np.eye(7))
    assert max_abs(form.matrix - np.eye(7)) <= 1e-12
    assert form.passing


def test_tri_random_suite():
    rng = np.random.default_rng(20)
    for trial in range(6):
        T = _rand(rng, 27)
        form = tri_sparsify(T)
        assert form.schedule.sizes == (1, 2, 6, 18)
        assert form.passing, form.report.to_json()
        assert all(r <= 1e-10 for _, _, r in form.report.triangular_residuals)
        # spot check: the 2x2 below-diagonal square of block pair (2,3)
        assert abs(form.matrix[4, 1]) <= 1e-10


def test_tri_alt_is_mirrored():
    rng = np.random.default_rng(21)
    T = _rand(rng, 27)
    alt = tri_sparsify(T, alt=True)
    assert alt.form_kind == "triangular_alt"
    assert alt.passing, alt.report.to_json()
    primary_of_adjoint = tri_sparsify(adjoint(T))
    np.testing.assert_allclose(
        alt.matrix, primary_of_adjoint.matrix.conj().T, atol=1e-12
    )


def test_tri_smaller_dims():
    rng = np.random.default_rng(22)
    for d in (1, 2, 3, 5, 9, 14):
        form = tri_sparsify(_rand(rng, d))
        assert form.passing, (d, form.report.to_json())


def test_hessenberg_shift_with_first_seed():
    d = 5
    S = np.zeros((d, d), dtype=np.complex128)
    for i in range(d - 1):
        S[i + 1, i] = 1.0
    form = krylov_hessenberg(S, np.eye(d)[:, 0])
    np.testing.assert_allclose(form.basis_change, np.eye(d), atol=1e-14)
    np.testing.assert_allclose(form.matrix, S, atol=1e-14)
    assert form.extras["closure_dim"] is None
    assert form.passing


def test_hessenberg_cyclic_vector_for_diag():
    T = np.diag([1.0, 2.0]).astype(np.complex128)
    form = krylov_hessenberg(T, np.array([1.0, 1.0]))
    assert form.extras["closure_dim"] is None
    assert form.passing


def test_hessenberg_noncyclic_padding():
    T = np.zeros((4, 4), dtype=np.complex128)
    T[2, 0] = 1.0
    T[3, 1] = 1.0
    form = krylov_hessenberg(T, np.eye(4)[:, 0])
    assert form.extras["closure_dim"] == 2
    # invariance of the Krylov block: nothing below it in its columns
    assert max_abs(form.matrix[2:, :2]) <= 1e-14
    assert form.passing


def test_hessenberg_random_suite():
    rng = np.random.default_rng(23)
    for trial in range(10):
        d = int(rng.integers(1, 21))
        T = _rand(rng, d)
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        form = krylov_hessenberg(T, v)
        assert form.passing, form.report.to_json()


def test_joint_cyclic_one_by_one():
    form = joint_cyclic_staircase(np.array([[5.0]]), np.array([1.0]))
    assert form.matrix[0, 0] == 5.0
    assert form.passing


def test_joint_cyclic_noncyclic_seed_splits():
    T = np.diag([1.0, 2.0]).astype(np.complex128)
    form = joint_cyclic_staircase(T, np.array([1.0, 0.0]))
    assert form.extras["closure_dim"] == 1
    np.testing.assert_allclose(form.matrix, T, atol=1e-14)
    assert form.passing


def test_joint_cyclic_random_suite():
    rng = np.random.default_rng(24)
    for trial in range(10):
        d = int(rng.integers(1, 21))
        T = _rand(rng, d)
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        form = joint_cyclic_staircase(T, v)
        assert form.passing, form.report.to_json()
        # column support bound: entries below row 2j vanish
        M = form.matrix
        for j in range(1, d + 1):
            for i in range(2 * j + 1, d + 1):
                assert abs(M[i - 1, j - 1]) <= 1e-10


def test_family_single_general_matches_staircase():
    rng = np.random.default_rng(25)
    T = _rand(rng, 12)
    U, forms = family_staircase([T], selfadjoint=False)
    solo = staircase(T)
    np.testing.assert_allclose(U, solo.basis_change, atol=1e-14)
    assert forms[0].pattern.kind == "family_stride_3"
    assert forms[0].passing


def test_family_selfadjoint_pair():
    rng = np.random.default_rng(26)
    A = _rand(rng, 12)
    B = _rand(rng, 12)
    ops = [A + A.conj().T, B + B.conj().T]
    U, forms = family_staircase(ops, selfadjoint=True)
    assert unitarity_residual(U) <= 1e-10
    for form, S in zip(forms, ops):
        assert form.extras["stride"] == 3
        assert form.passing, form.report.to_json()
        # conjugation keeps each operator selfadjoint
        assert max_abs(form.matrix - form.matrix.conj().T) <= 1e-12


def test_family_selfadjoint_flag_checked():
    rng = np.random.default_rng(27)
    with pytest.raises(ValueError, match="not selfadjoint"):
        family_staircase([_rand(rng, 6)], selfadjoint=True)


def test_family_general_pair():
    rng = np.random.default_rng(28)
    ops = [_rand(rng, 10), _rand(rng, 10)]
    U, forms = family_staircase(ops, selfadjoint=False)
    for form in forms:
        assert form.extras["stride"] == 5
        assert form.span_bounds[1] == (2, 6)
        assert form.passing, form.report.to_json()


def test_family_rejects_mixed_dims():
    rng = np.random.default_rng(29)
    with pytest.raises(ValueError, match="shape"):
        family_staircase([_rand(rng, 4), _rand(rng, 5)])


def test_reducing_closure_eigenvector():
    T = np.diag([1.0, 2.0, 3.0]).astype(np.complex128)
    W = reducing_closure(T, np.array([0.0, 1.0, 0.0]))
    assert W.shape == (3, 1)
    np.testing.assert_allclose(np.abs(W[:, 0]), [0.0, 1.0, 0.0], atol=1e-14)


def test_reducing_closure_rotation_block():
    T = np.zeros((3, 3), dtype=np.complex128)
    T[0, 1] = -1.0
    T[1, 0] = 1.0
    T[2, 2] = 5.0
    W = reducing_closure(T, np.array([1.0, 0.0, 0.0]))
    assert W.shape == (3, 2)
    assert max_abs(W[2, :]) <= 1e-14


def test_reducing_closure_generic_vector_fills_space():
    rng = np.random.default_rng(30)
    T = _rand(rng, 6)
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    W = reducing_closure(T, v)
    assert W.shape == (6, 6)
    assert unitarity_residual(W) <= 1e-10


def test_decompose_diagonal():
    T = np.diag([1.0, 2.0, 3.0, 4.0, 5.0]).astype(np.complex128)
    res = decompose(T)
    assert res.dims == [1, 1, 1, 1, 1]
    assert res.coupling_residual <= 1e-12
    assert res.passing
    np.testing.assert_allclose(res.matrix, T, atol=1e-12)


def test_decompose_block_preserving_conjugation():
    rng = np.random.default_rng(31)
    R1 = _rand(rng, 3)
    R2 = _rand(rng, 5)
    Q3 = _rand_unitary(rng, 3)
    Q5 = _rand_unitary(rng, 5)
    T = np.zeros((8, 8), dtype=np.complex128)
    T[:3, :3] = Q3 @ R1 @ Q3.conj().T
    T[3:, 3:] = Q5 @ R2 @ Q5.conj().T
    res = decompose(T)
    assert res.dims == [3, 5]
    assert res.coupling_residual <= 1e-9
    assert res.passing
    for summand in res.summands:
        assert summand.form_kind == "direct_summand"
        assert summand.report.pattern_violations == []


def test_decompose_dense_conjugation_sums_to_dim():
    rng = np.random.default_rng(32)
    R = np.zeros((8, 8), dtype=np.complex128)
    R[:3, :3] = _rand(rng, 3)
    R[3:, 3:] = _rand(rng, 5)
    Q = _rand_unitary(rng, 8)
    res = decompose(Q @ R @ Q.conj().T)
    assert sum(res.dims) == 8
    assert res.coupling_residual <= 1e-9
    assert res.passing
    assert unitarity_residual(res.basis_change) <= 1e-10


def test_decompose_irreducible_single_summand():
    rng = np.random.default_rng(33)
    T = _rand(rng, 6)
    res = decompose(T)
    assert res.dims == [6]
    assert res.passing


def test_decompose_preserves_similarity_data():
    rng = np.random.default_rng(34)
    T = _rand(rng, 7)
    res = decompose(T)
    U = res.basis_change
    np.testing.assert_allclose(U.conj().T @ T @ U, res.matrix, atol=1e-10)
    assert abs(np.trace(res.matrix) - np.trace(T)) <= 1e-10


def test_staircase_support_matches_coarse_claim():
    rng = np.random.default_rng(35)
    form = staircase(_rand(rng, 17))
    assert check_pattern(form.matrix, staircase_coarse(), 1e-10) == []
