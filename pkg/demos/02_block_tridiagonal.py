"""
Block tridiagonal forms and block schedules
===========================================

The staircase support folds into a block tridiagonal band whenever the
diagonal block sizes grow fast enough: each block must be at least twice
the sum of all blocks before it.  The canonical run is 1, 2, 6, 18, 54, ...
and one unitary works for every valid schedule simultaneously.
"""

import numpy as np

from blocktrid import (
    BlockSchedule,
    GENERAL,
    block_slices,
    block_tridiagonalize,
    covers,
    pattern_text,
    schedule_for_dim,
    validate,
)

# schedule arithmetic first: the growth rule and what it buys
good = BlockSchedule((1, 2, 6, 18), GENERAL)
bad = BlockSchedule((1, 2, 5), GENERAL)
print(f"[1,2,6,18] valid: {validate(good.sizes, GENERAL) is None}")
print(f"[1,2,5]    first violation at k={validate(bad.sizes, GENERAL)}")
print()

# the staircase entry (4,27) sits inside the band for the canonical run
# but escapes schedules that start too large or grow too slowly
for sizes in ((1, 2, 6, 18), (4, 8, 24, 72), (1, 3, 8, 24)):
    sched = BlockSchedule(sizes, GENERAL)
    print(f"covers(4,27) under {sizes}: {covers(4, 27, sched)}")
print()

# fitting a schedule to a matrix dimension merges the tail blocks
for d in (3, 9, 10, 27):
    print(f"dim {d}: schedule {schedule_for_dim(d, GENERAL).describe()}")
print()

rng = np.random.default_rng(1)
T = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
form = block_tridiagonalize(T)
print(f"9x9 random, schedule {form.schedule.describe()}, "
      f"blocks at {block_slices(form.schedule, 9)}")
print(pattern_text(form.matrix, form.pattern))
print(f"passing: {form.passing}")
print()

# any valid custom schedule works with the same construction
custom = block_tridiagonalize(T, BlockSchedule((2, 4, 12), GENERAL))
print(f"custom schedule {custom.schedule.describe()}:")
print(pattern_text(custom.matrix, custom.pattern))
