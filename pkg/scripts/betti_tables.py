"""Print Betti tables for the small-rank quotients (rank 4 takes about a minute)."""
import sys
import time

from ghl.homology import betti_table, format_betti_table

ranks = [int(x) for x in sys.argv[1:]] or [2, 3, 4]
for n in ranks:
    for variant in ("out", "aut"):
        t = time.perf_counter()
        rows = betti_table(n, variant)
        print(format_betti_table(n, variant, rows), end="")
        print(f"({time.perf_counter() - t:.1f}s)\n")
