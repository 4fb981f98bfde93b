#!/usr/bin/env python3
"""Sort-based nearest-rank percentiles for the stored replicate vectors.

Explicit sort + ceil(p/100 * N) indexing; frozen into
fixtures/oracle/percentiles_oracle.json.
"""

import json
import math

from _oracle_common import fixture_dir, write_oracle

PERCENTILES = [1.0, 2.5, 25.0, 50.0, 75.0, 97.5, 99.0, 100.0]


def main():
    with open(fixture_dir() / "oracle" / "replicates_1000.json", encoding="utf-8") as fh:
        vectors = json.load(fh)
    out = {}
    for name, values in vectors.items():
        ordered = sorted(values)
        out[name] = {
            str(p): ordered[math.ceil(p / 100.0 * len(ordered)) - 1] for p in PERCENTILES
        }
    write_oracle("percentiles_oracle.json", out)


if __name__ == "__main__":
    main()
