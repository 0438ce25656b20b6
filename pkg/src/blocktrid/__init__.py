"""Universal sparse forms of complex square matrices under unitary similarity.

The package builds orthonormal bases from word programs in a matrix and its
adjoint, producing staircase, block tridiagonal, positive-block, triangular,
Hessenberg and reducing direct-sum forms, each verified entry by entry
against its claimed sparsity pattern.
"""

from .kernel import (
    DEPENDENCE_TOL,
    GsOutcome,
    adjoint,
    as_operator,
    hermitian_eigvals,
    max_abs,
    mgs_append,
    polar_unitary,
    svd,
    unit_vector,
    unitarity_residual,
)
from .schedules import (
    CYCLIC,
    GENERAL,
    BlockSchedule,
    InvalidScheduleError,
    block_of,
    block_slices,
    canonical_covering,
    canonical_schedule,
    covers,
    parse_spec,
    schedule_for_dim,
    staircase_coverage_check,
    validate,
)
from .words import (
    SurvivorMap,
    WordInstruction,
    WordProgram,
    family_program,
    joint_cyclic_program,
    krylov_program,
    parse_trace,
    renumber_after_deletion,
    staircase_program,
    tri_word_program,
    tri_word_raw,
    tri_word_sequence,
)
from .basis import (
    BuildLog,
    BuildResult,
    InstructionCapError,
    LogEntry,
    conjugate,
    default_instruction_cap,
    run_program,
    span_residual,
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
    pattern_text,
    polar_blocks,
    staircase_coarse,
    staircase_refined,
    tri_blocks,
)
from .transforms import (
    DecompositionResult,
    SparsifiedForm,
    block_tridiagonalize,
    decompose,
    family_staircase,
    joint_cyclic_staircase,
    krylov_hessenberg,
    polar_sparsify,
    polar_sparsify_tridiagonal,
    reducing_closure,
    staircase,
    tri_sparsify,
)
from .matio import (
    MatrixParseError,
    emit_form,
    emit_matrix,
    emit_matrix_text,
    parse_matrix,
)
from .render import render_svg

__version__ = "0.1.0"

__all__ = [
    "DEPENDENCE_TOL",
    "GsOutcome",
    "adjoint",
    "as_operator",
    "hermitian_eigvals",
    "max_abs",
    "mgs_append",
    "polar_unitary",
    "svd",
    "unit_vector",
    "unitarity_residual",
    "CYCLIC",
    "GENERAL",
    "BlockSchedule",
    "InvalidScheduleError",
    "block_of",
    "block_slices",
    "canonical_covering",
    "canonical_schedule",
    "covers",
    "parse_spec",
    "schedule_for_dim",
    "staircase_coverage_check",
    "validate",
    "SurvivorMap",
    "WordInstruction",
    "WordProgram",
    "family_program",
    "joint_cyclic_program",
    "krylov_program",
    "parse_trace",
    "renumber_after_deletion",
    "staircase_program",
    "tri_word_program",
    "tri_word_raw",
    "tri_word_sequence",
    "BuildLog",
    "BuildResult",
    "InstructionCapError",
    "LogEntry",
    "conjugate",
    "default_instruction_cap",
    "run_program",
    "span_residual",
    "DEFAULT_THRESHOLD",
    "PatternSpec",
    "VerificationReport",
    "block_band",
    "check_pattern",
    "family_stride",
    "full_report",
    "hessenberg_pattern",
    "joint_cyclic_pattern",
    "pattern_text",
    "polar_blocks",
    "staircase_coarse",
    "staircase_refined",
    "tri_blocks",
    "DecompositionResult",
    "SparsifiedForm",
    "block_tridiagonalize",
    "decompose",
    "family_staircase",
    "joint_cyclic_staircase",
    "krylov_hessenberg",
    "polar_sparsify",
    "polar_sparsify_tridiagonal",
    "reducing_closure",
    "staircase",
    "tri_sparsify",
    "MatrixParseError",
    "emit_form",
    "emit_matrix",
    "emit_matrix_text",
    "parse_matrix",
    "render_svg",
    "__version__",
]
