"""Regenerate the vendored Joe-Kuo direction-number table.

scipy ships the new-joe-kuo-6.21201 table in a packed form (primitive
polynomial with leading/trailing bits, plus initial m values). This writes
the first 40 dimensions back out in the published text layout.

    python scripts/extract_direction_numbers.py [max_dim]
"""
import os
import sys

import numpy as np
import scipy

out = os.path.join(os.path.dirname(__file__), "..", "src", "elaselect", "data", "new-joe-kuo-6.40")
max_dim = int(sys.argv[1]) if len(sys.argv) > 1 else 40

packed = np.load(os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz"))
lines = ["d       s       a       m_i"]
for dim in range(2, max_dim + 1):
    poly = int(packed["poly"][dim - 1])
    s = poly.bit_length() - 1
    a = (poly - (1 << s) - 1) // 2
    m = [int(v) for v in packed["vinit"][dim - 1, :s]]
    lines.append(" ".join(str(t) for t in [dim, s, a] + m))

with open(out, "w") as fh:
    fh.write("\n".join(lines) + "\n")
print(f"wrote {max_dim - 1} rows to {os.path.normpath(out)}")
