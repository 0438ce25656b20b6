"""End-to-end sparsification pipelines.

Every pipeline returns a :class:`SparsifiedForm` bundling the input, the
unitary basis change, the transformed matrix, the sparsity pattern it claims,
and a verification report computed entrywise against that claim.  Patterns
are never assumed: the report re-checks them on the finished matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .basis import BuildLog, conjugate, run_program
from .kernel import (
    DEPENDENCE_TOL,
    adjoint,
    as_operator,
    max_abs,
    mgs_append,
    polar_unitary,
    unit_vector,
)
from .schedules import (
    CYCLIC,
    GENERAL,
    BlockSchedule,
    InvalidScheduleError,
    block_slices,
    canonical_covering,
    schedule_for_dim,
    validate,
)
from .verify import (
    DEFAULT_THRESHOLD,
    PatternSpec,
    VerificationReport,
    block_band,
    check_pattern,
    family_stride,
    full_report,
    hessenberg_pattern,
    joint_cyclic_pattern,
    polar_blocks,
    staircase_refined,
    tri_blocks,
)
from .words import (
    family_program,
    joint_cyclic_program,
    krylov_program,
    staircase_program,
    tri_word_program,
)


@dataclass
class SparsifiedForm:
    """One sparsified matrix with its inputs and verification report."""

    input: np.ndarray
    basis_change: np.ndarray
    matrix: np.ndarray
    form_kind: str
    pattern: PatternSpec
    schedule: Optional[BlockSchedule] = None
    span_bounds: List[Tuple[int, int]] = field(default_factory=list)
    log: Optional[BuildLog] = None
    extras: Dict = field(default_factory=dict)
    report: Optional[VerificationReport] = None

    @property
    def dim(self) -> int:
        return self.input.shape[0]

    @property
    def passing(self) -> bool:
        return self.report is not None and self.report.passing


def _finish(form: SparsifiedForm, threshold: float) -> SparsifiedForm:
    form.report = full_report(form, threshold)
    return form


def _staircase_span_bounds(d: int) -> List[Tuple[int, int]]:
    return [(n, min(3 * n, d)) for n in range(1, d + 1)]


def staircase(T, tol: float = DEPENDENCE_TOL,
              threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Staircase form: column n support ends at row 3n-1, row n at column 3n."""
    T = as_operator(T)
    d = T.shape[0]
    res = run_program([T], staircase_program(), d, tol=tol)
    M = conjugate(T, res.basis)
    form = SparsifiedForm(
        input=T,
        basis_change=res.basis,
        matrix=M,
        form_kind="staircase",
        pattern=staircase_refined(),
        span_bounds=_staircase_span_bounds(d),
        log=res.log,
    )
    return _finish(form, threshold)


def _require_general_cover(schedule: BlockSchedule, d: int) -> BlockSchedule:
    bad = validate(schedule.sizes, GENERAL)
    if bad is not None:
        raise InvalidScheduleError(
            f"block growth rule fails at k={bad}: "
            f"size {schedule.sizes[bad]} < 2*(n_1+...+n_{bad})"
        )
    if schedule.span < d:
        raise InvalidScheduleError(
            f"schedule spans {schedule.span} < matrix dimension {d}"
        )
    return BlockSchedule(schedule.sizes, GENERAL, d)


def block_tridiagonalize(T, schedule: Optional[BlockSchedule] = None,
                         tol: float = DEPENDENCE_TOL,
                         threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Staircase build re-read as a block tridiagonal matrix.

    Any schedule satisfying the doubling growth rule absorbs the staircase
    support into its band, so the same unitary works for every valid
    schedule; the pattern check is against the band of the given one.
    """
    T = as_operator(T)
    d = T.shape[0]
    if schedule is None:
        schedule = schedule_for_dim(d, GENERAL)
    schedule = _require_general_cover(schedule, d)
    res = run_program([T], staircase_program(), d, tol=tol)
    M = conjugate(T, res.basis)
    form = SparsifiedForm(
        input=T,
        basis_change=res.basis,
        matrix=M,
        form_kind="block_tridiagonal",
        pattern=block_band(schedule, d),
        schedule=schedule,
        span_bounds=_staircase_span_bounds(d),
        log=res.log,
    )
    return _finish(form, threshold)


def _require_nondecreasing(schedule: BlockSchedule, d: int) -> List[Tuple[int, int]]:
    slices = block_slices(schedule, d)
    sizes = [b - a for a, b in slices]
    for a, b in zip(sizes, sizes[1:]):
        if b < a:
            raise InvalidScheduleError(
                f"block sizes must be non-decreasing inside the matrix, "
                f"got {sizes}"
            )
    return slices


def _polar_conjugator(Mb: np.ndarray, slices: List[Tuple[int, int]]) -> np.ndarray:
    """Block diagonal unitary turning each right-of-diagonal block into (P | 0).

    Walking down the band: with U_1 = I, stack Y = U_k* A_k over zero rows to
    a square X, and take the unitary polar factor of X*; then Y U_{k+1} is
    the Hermitian square root of YY* next to a zero tail.
    """
    d = Mb.shape[0]
    V = np.zeros((d, d), dtype=np.complex128)
    r0, r1 = slices[0]
    Us = [np.eye(r1 - r0, dtype=np.complex128)]
    for k in range(len(slices) - 1):
        r0, r1 = slices[k]
        c0, c1 = slices[k + 1]
        nk, nk1 = r1 - r0, c1 - c0
        Y = Us[k].conj().T @ Mb[r0:r1, c0:c1]
        X = np.vstack([Y, np.zeros((nk1 - nk, nk1), dtype=np.complex128)])
        Uf, _ = polar_unitary(X.conj().T)
        Us.append(Uf)
    for (a, b), Uk in zip(slices, Us):
        V[a:b, a:b] = Uk
    return V


def polar_sparsify(T, schedule: Optional[BlockSchedule] = None, alt: bool = False,
                   tol: float = DEPENDENCE_TOL,
                   threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Block tridiagonal form with positive off-diagonal blocks on one side.

    The primary variant makes every block right of the diagonal (P_k | 0)
    with P_k Hermitian positive semidefinite; ``alt`` produces the mirrored
    form with stacked (P_k over 0) blocks below the diagonal, via the same
    construction on the adjoint.
    """
    T = as_operator(T)
    d = T.shape[0]
    if schedule is None:
        schedule = schedule_for_dim(d, GENERAL)
    schedule = _require_general_cover(schedule, d)
    slices = _require_nondecreasing(schedule, d)

    base = adjoint(T) if alt else T
    res = run_program([base], staircase_program(), d, tol=tol)
    Mb = conjugate(base, res.basis)
    V = _polar_conjugator(Mb, slices)
    U = res.basis @ V
    M = V.conj().T @ Mb @ V
    if alt:
        M = M.conj().T
    form = SparsifiedForm(
        input=T,
        basis_change=U,
        matrix=M,
        form_kind="polar_alt" if alt else "polar",
        pattern=polar_blocks(schedule, d, alt),
        schedule=schedule,
        log=res.log,
    )
    return _finish(form, threshold)


def polar_sparsify_tridiagonal(Mb, schedule: BlockSchedule,
                               threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Positive-block form of a matrix already in block tridiagonal shape."""
    Mb = as_operator(Mb)
    d = Mb.shape[0]
    if schedule.span < d:
        raise InvalidScheduleError(
            f"schedule spans {schedule.span} < matrix dimension {d}"
        )
    slices = _require_nondecreasing(schedule, d)
    band = check_pattern(Mb, block_band(schedule, d), threshold)
    if band:
        i, j, mag = band[0]
        raise ValueError(
            f"input is not block tridiagonal for this schedule: "
            f"|M({i},{j})| = {mag:.3e}"
        )
    V = _polar_conjugator(Mb, slices)
    form = SparsifiedForm(
        input=Mb,
        basis_change=V,
        matrix=V.conj().T @ Mb @ V,
        form_kind="polar",
        pattern=polar_blocks(schedule, d, False),
        schedule=schedule,
    )
    return _finish(form, threshold)


def _tri_span_bounds(d: int) -> List[Tuple[int, int]]:
    out = []
    n = 1
    while True:
        out.append((n, min(3 ** n, d)))
        if 3 ** n >= d or n >= d:
            break
        n += 1
    return out


def tri_sparsify(T, alt: bool = False, tol: float = DEPENDENCE_TOL,
                 threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Block tridiagonal form with triangular sub-block structure.

    Primary claims: each below-diagonal block is an upper triangular square
    stacked over zeros, and each above-diagonal block is (free | lower
    triangular | zero).  ``alt`` mirrors both.  Block sizes follow the
    doubling-by-three partition 1, 2, 6, 18, ... clipped at the dimension.
    """
    T = as_operator(T)
    d = T.shape[0]
    schedule = canonical_covering(d, GENERAL, 1)
    base = adjoint(T) if alt else T
    res = run_program([base], tri_word_program(), d, tol=tol)
    M = conjugate(base, res.basis)
    if alt:
        M = M.conj().T
    form = SparsifiedForm(
        input=T,
        basis_change=res.basis,
        matrix=M,
        form_kind="triangular_alt" if alt else "triangular",
        pattern=tri_blocks(schedule, d, alt),
        schedule=schedule,
        span_bounds=_tri_span_bounds(d),
        log=res.log,
    )
    return _finish(form, threshold)


def _coerce_seed(v, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.shape != (d,):
        raise ValueError(f"seed vector length {v.shape[0]} does not match dim {d}")
    if np.linalg.norm(v) == 0.0:
        raise ValueError("seed vector must be nonzero")
    return v


def krylov_hessenberg(T, v, tol: float = DEPENDENCE_TOL,
                      threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Upper Hessenberg form on the subspace generated by v, Tv, T^2 v, ...

    When v is not cyclic the build pads with standard basis vectors; the
    Hessenberg claim then applies to the leading block of the reported
    closure size, and the block below it vanishes by invariance.
    """
    T = as_operator(T)
    d = T.shape[0]
    v = _coerce_seed(v, d)
    res = run_program([T], krylov_program(), d, tol=tol, seed_vector=v)
    mc = res.closure_dim if res.closure_dim is not None else d
    M = conjugate(T, res.basis)
    form = SparsifiedForm(
        input=T,
        basis_change=res.basis,
        matrix=M,
        form_kind="hessenberg",
        pattern=hessenberg_pattern(mc),
        log=res.log,
        extras={"closure_dim": res.closure_dim},
    )
    return _finish(form, threshold)


def joint_cyclic_staircase(T, v, tol: float = DEPENDENCE_TOL,
                           threshold: float = DEFAULT_THRESHOLD) -> SparsifiedForm:
    """Two-sided cyclic staircase: column n support 2n, row n support 2n+1.

    The subspace generated by words in T, T* from v is reducing, so with a
    non-cyclic v the matrix splits: the pattern holds on the leading closure
    block, the coupling blocks vanish, and the complement is unconstrained.
    """
    T = as_operator(T)
    d = T.shape[0]
    v = _coerce_seed(v, d)
    res = run_program([T], joint_cyclic_program(), d, tol=tol, seed_vector=v)
    mc = res.closure_dim if res.closure_dim is not None else d
    M = conjugate(T, res.basis)
    form = SparsifiedForm(
        input=T,
        basis_change=res.basis,
        matrix=M,
        form_kind="joint_cyclic",
        pattern=joint_cyclic_pattern(mc),
        schedule=schedule_for_dim(d, CYCLIC),
        log=res.log,
        extras={"closure_dim": res.closure_dim},
    )
    return _finish(form, threshold)


def family_staircase(operators: Sequence, selfadjoint: bool = False,
                     tol: float = DEPENDENCE_TOL,
                     threshold: float = DEFAULT_THRESHOLD):
    """One unitary putting a whole family into staircase form simultaneously.

    Returns (U, forms), one form per operator, each claiming the stride-s
    staircase pattern with s = N+1 for a selfadjoint family and s = 2N+1 in
    general.  The selfadjoint flag is verified entrywise.
    """
    ops = [as_operator(S, f"operator {k + 1}") for k, S in enumerate(operators)]
    if not ops:
        raise ValueError("family must contain at least one operator")
    d = ops[0].shape[0]
    for k, S in enumerate(ops):
        if S.shape != (d, d):
            raise ValueError(f"operator {k + 1} has shape {S.shape}, expected {(d, d)}")
    if selfadjoint:
        for k, S in enumerate(ops):
            drift = max_abs(S - S.conj().T)
            if drift > 1e-8:
                raise ValueError(
                    f"operator {k + 1} is not selfadjoint (|S - S*| = {drift:.3e})"
                )
    N = len(ops)
    program = family_program(N, selfadjoint)
    stride = program.stride
    res = run_program(ops, program, d, tol=tol)
    bounds = [(n, min(1 + (n - 1) * stride, d)) for n in range(1, d + 1)]
    forms = []
    for k, S in enumerate(ops):
        form = SparsifiedForm(
            input=S,
            basis_change=res.basis,
            matrix=conjugate(S, res.basis),
            form_kind="family",
            pattern=family_stride(stride),
            span_bounds=bounds,
            log=res.log,
            extras={"family_index": k + 1, "family_size": N, "stride": stride},
        )
        forms.append(_finish(form, threshold))
    return res.basis, forms


def reducing_closure(T, v, tol: float = DEPENDENCE_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the smallest reducing subspace
    containing v; v is a joint cyclic vector for the restriction."""
    T = as_operator(T)
    d = T.shape[0]
    v = _coerce_seed(v, d)
    res = run_program([T], joint_cyclic_program(), d, tol=tol, seed_vector=v,
                      pad_with_seeds=False)
    return res.basis


@dataclass
class DecompositionResult:
    """Direct-sum split into jointly-cyclic summands."""

    input: np.ndarray
    basis_change: np.ndarray
    matrix: np.ndarray
    summands: List[SparsifiedForm]
    dims: List[int]
    coupling_residual: float

    @property
    def passing(self) -> bool:
        return self.coupling_residual <= 1e-9 and all(s.passing for s in self.summands)


def decompose(T, tol: float = DEPENDENCE_TOL,
              threshold: float = DEFAULT_THRESHOLD) -> DecompositionResult:
    """Split the space into reducing subspaces with joint cyclic vectors.

    Repeatedly take the lowest-index standard basis vector not captured yet,
    close it under T and T*, and continue on the orthogonal complement.  The
    global basis change block-diagonalizes T with every diagonal block in
    the two-sided cyclic staircase form.
    """
    T = as_operator(T)
    d = T.shape[0]
    Ts = T.conj().T.copy()
    columns: List[np.ndarray] = []
    ranges: List[Tuple[int, int]] = []
    for k in range(d):
        if len(columns) == d:
            break
        out = mgs_append(columns, unit_vector(d, k), tol)
        if not out.accepted:
            continue
        start = len(columns)
        local = [out.vector]
        columns.append(out.vector)
        m = 0
        while m < len(local):
            m += 1
            fm = local[m - 1]
            for mat in (T, Ts):
                res = mgs_append(columns, mat @ fm, tol)
                if res.accepted:
                    local.append(res.vector)
                    columns.append(res.vector)
        ranges.append((start, len(columns)))
    U = np.column_stack(columns)
    M = conjugate(T, U)

    summands = []
    for start, stop in ranges:
        R = M[start:stop, start:stop].copy()
        size = stop - start
        form = SparsifiedForm(
            input=R,
            basis_change=np.eye(size, dtype=np.complex128),
            matrix=R,
            form_kind="direct_summand",
            pattern=joint_cyclic_pattern(size),
            schedule=schedule_for_dim(size, CYCLIC),
            extras={"offset": start, "closure_dim": size},
        )
        summands.append(_finish(form, threshold))

    coupling = 0.0
    for a, (s0, s1) in enumerate(ranges):
        for b, (t0, t1) in enumerate(ranges):
            if a != b:
                coupling = max(coupling, max_abs(M[s0:s1, t0:t1]))
    return DecompositionResult(
        input=T,
        basis_change=U,
        matrix=M,
        summands=summands,
        dims=[s1 - s0 for s0, s1 in ranges],
        coupling_residual=coupling,
    )
