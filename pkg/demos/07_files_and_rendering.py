"""
File formats, the command line, and pictures
============================================

Matrices travel as Matrix Market files, CSV with complex tokens, or JSON;
every writer emits 17 significant digits so a round trip is bit exact.
The same operations are scriptable through the blocktrid command, and any
form can be rendered to a standalone SVG sparsity plot.
"""

import io
import tempfile
from pathlib import Path

import numpy as np

from blocktrid import (
    cli,
    emit_matrix_text,
    parse_matrix,
    render_svg,
    staircase,
)

rng = np.random.default_rng(7)
T = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))

# every format reproduces the exact doubles
for fmt in ("mm", "csv", "json"):
    text = emit_matrix_text(T, fmt)
    back = parse_matrix(io.StringIO(text), fmt)
    print(f"{fmt:4s} round trip exact: {np.array_equal(T, back)}")
print()

print("CSV uses one token per entry:")
print(emit_matrix_text(np.array([[1.5, -2j], [1 + 1j, 0]]), "csv"))

# the command line wraps the library; drive it in-process here
work = Path(tempfile.mkdtemp())
src = work / "T.csv"
src.write_text(emit_matrix_text(T, "csv"))
code = cli.main([
    "staircase", "--input", str(src), "--output", str(work), "--svg",
])
print(f"blocktrid staircase exited {code}; wrote "
      f"{sorted(p.name for p in work.iterdir() if p.name != 'T.csv')}")
print()

# the SVG renderer needs nothing but the matrix
form = staircase(T)
svg = render_svg(form.matrix, schedule=form.schedule)
print(f"inline SVG: {len(svg)} bytes, "
      f"{svg.count('fill-opacity')} occupied cells")
