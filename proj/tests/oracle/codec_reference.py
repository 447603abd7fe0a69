#!/usr/bin/env python3
"""Exact-arithmetic bins for the float codec tests.

For each vector, |v|max is the largest magnitude and the bin is the largest
k in [0, B-1] with (2k/B - 1)|v|max <= v, evaluated in rationals.

    python3 tests/oracle/codec_reference.py tests/data/codec_reference.json
"""
import json
import random
import sys
from fractions import Fraction


def bins_for(values, B):
    m = max(abs(Fraction(v)) for v in values)
    out = []
    for v in values:
        if m == 0:
            out.append(B // 2)
            continue
        k = ((Fraction(v) / m + 1) * B / 2).__floor__()
        out.append(max(0, min(B - 1, k)))
    return out


def main(path):
    rng = random.Random(20240611)
    cases = [{"B": 1024, "values": [1.04, 2.08, -2.08, 0.0]}]
    for B in (2, 16, 256, 1024, 4096):
        for _ in range(20):
            n = rng.randint(1, 40)
            scale = 10 ** rng.uniform(-6, 6)
            cases.append({"B": B, "values": [rng.uniform(-scale, scale) for _ in range(n)]})
    for c in cases:
        c["bins"] = bins_for(c["values"], c["B"])
    with open(path, "w") as f:
        json.dump(cases, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
