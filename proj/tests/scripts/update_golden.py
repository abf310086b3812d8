"""Refreshes tests/golden/demo_card.json from a freshly generated demo card.

Usage: update_golden.py <card.json> <golden.json>
The environment stamp (compiler and library versions) is blanked so the
snapshot does not depend on the build machine.
"""
import json
import sys

with open(sys.argv[1]) as f:
    card = json.load(f)
card["general_information"]["run_stamp"]["environment"] = {}
with open(sys.argv[2], "w") as f:
    json.dump(card, f, indent=1, sort_keys=True, ensure_ascii=False)
    f.write("\n")
