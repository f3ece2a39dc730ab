"""The free product <a>*<b> against itself.

The core of T x T is the diagonal {(v, v)}: two vertex orbits, no squares,
and the core is disconnected.  Each edge gives a twice-light rectangle whose
diagonal reconnects it.
"""
import pathlib

from treecore import corecomplex as CC
from treecore.cli import load_session

session = load_session(str(pathlib.Path(__file__).parent.parent / "sessions" / "f2_free_product.json"))
F = session.splittings["F"]
core = CC.compute_core(F, F)

print("status:", core.status)
print("cells (vertices, edges, squares):", core.lower.counts())
print("vertex orbits:", [CC.key_str(k) for k in core.lower.of_dim(0)])
print("connected:", core.connected)
for r in core.twice_light:
    (x1, x2), (y1, y2) = r.diagonal
    print(f"twice-light rectangle over {r.e1} x {r.e2}: diagonal ({x1},{x2}) -- ({y1},{y2})")
print("compatible:", CC.is_compatible(core))
