"""Optional heavy checks: b_4 at rank 4 (out), z(theta) is not a boundary,
and the stabilized theta cycle has a boundary witness at rank 5 (aut)."""
import time

from ghl.complex import boundary
from ghl.homology import betti, enumerate_cells, is_boundary
from ghl.morita import theta_gamma, z
from ghl.stab import stabilize

t = time.perf_counter()
print("b_4(rank 4, out) =", betti(4, "out", [4])[0])
print("z(theta) is a boundary:", is_boundary(z(theta_gamma())) is not None)
Zp = stabilize(z(theta_gamma(), basepointed=True))
for k in (4, 5):
    print(f"rank 5 aut cells in dimension {k}:", len(enumerate_cells(5, k, "aut")),
          f"({time.perf_counter() - t:.0f}s)")
w = is_boundary(Zp)
print("Z+ boundary witness found:", w is not None and boundary(w) == Zp,
      f"({time.perf_counter() - t:.0f}s)")
