"""Validate sweep outputs: JSON against the schema, CSV through the csv module."""
import csv
import json
import math
import sys

import jsonschema


def main(schema_path, base):
    with open(schema_path) as f:
        schema = json.load(f)
    with open(base + ".json") as f:
        doc = json.load(f)
    jsonschema.validate(doc, schema)

    with open(base + ".csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == len(doc["rows"]), "CSV and JSON row counts differ"
    numeric = ["h0", "r_a", "eta1", "p_e", "q", "t_avg", "c_mismatch", "k1", "k"]
    for row, ref in zip(rows, doc["rows"]):
        for key in numeric:
            text = row[key]
            if ref[key] is None:
                assert text == "", (key, text)
                continue
            value = float(text)
            # 17 significant digits must reproduce the double exactly.
            assert float("%.17g" % value) == value
            assert value == ref[key] or (math.isnan(value) and math.isnan(ref[key])), (key, text, ref[key])
        assert row["status"] == ref["status"]

    with open(base + ".plot.csv", newline="") as f:
        plot = list(csv.DictReader(f))
    assert plot, "plot-data is empty"
    figures = {(p["figure"], p["panel_h0"], p["panel_r_a"]) for p in plot}
    assert {f for f, _, _ in figures} <= {"error-probability", "key-rate"}
    print("checked %d rows, %d plot points" % (len(rows), len(plot)))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
