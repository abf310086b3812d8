"""Cross-checks a card against the shipped JSON-Schema with the jsonschema package."""
import json
import sys

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)

schema_path, card_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
with open(card_path) as f:
    card = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(card), key=lambda e: list(e.path))
for e in errors:
    print("/" + "/".join(str(p) for p in e.path), e.message)
sys.exit(1 if errors else 0)
