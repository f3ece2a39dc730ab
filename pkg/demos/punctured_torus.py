"""Two HNN splittings of F2 = <a, b>, one over <a> and one over <b>.

These are the splittings dual to two curves on a punctured torus meeting
once.  The core has one square orbit, both strong intersection numbers are
1, and the brute-force oracle agrees at radius 8.
"""
import pathlib
import time

from treecore import corecomplex as CC
from treecore import oracle
from treecore import word as W
from treecore.cli import load_session

session = load_session(str(pathlib.Path(__file__).parent.parent / "sessions" / "punctured_torus.json"))
Ta, Tb = session.splittings["Ta"], session.splittings["Tb"]

t = time.perf_counter()
core = CC.compute_core(Ta, Tb)
print(f"computed in {time.perf_counter() - t:.2f}s")
print("status:", core.status)
print("i =", CC.intersection_number(core), " si1 =", core.si1, " si2 =", core.si2)
for k, hs in core.square_certificates.items():
    print("square", CC.key_str(k), "made heavy by", [W.format_word(h) for h in hs])

report = oracle.crosscheck(core, Ta, Tb, 8)
for c in report.checks:
    print(("ok  " if c.ok else "FAIL"), c.name, c.detail)
