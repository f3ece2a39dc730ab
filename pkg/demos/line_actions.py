"""Two actions of F_n on lines, given by integer rows phi_1, phi_2.

Proportional rows give an empty core.  Otherwise the core is the whole plane
and its covolume is the index of the image lattice, here compared with a
direct count of lattice points in a fundamental parallelogram.
"""
from treecore import lineactions as LA
from treecore.oracle import parallelogram_count

for m in ([[1, 0], [0, 1]], [[2, 1], [1, 3]], [[1, 0], [-2, 0]], [[1, 0, 2], [0, 1, 1]]):
    res = LA.abelian_core_covolume(m)
    line = f"{m}: {res}"
    if len(m[0]) == 2 and res != LA.EMPTY:
        line += f" (parallelogram count {parallelogram_count(m)})"
    print(line)
