"""
Can every square be split into face and degeneracy squares?
===========================================================

Searches all small squares into length-one targets.  Only the canonical
generator word of the base map is tried first, then every shortest word.
"""

import sys
import time

from effkan import awfs

max_ambient = int(sys.argv[1]) if len(sys.argv) > 1 else 2

for words in ("canonical", "minimal"):
    t = time.perf_counter()
    found, missing = awfs.probe_decompositions(max_ambient, words=words)
    print(f"{words:9s} words: {len(found)} split, {len(missing)} not found ({time.perf_counter() - t:.1f}s)")
    for sq in missing[:3]:
        print("   ", sq.f.values, sq.target)
