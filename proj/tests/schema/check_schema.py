"""Bundled specs validate against the shipped schema; a stray field does not."""
import json
import pathlib
import sys

import jsonschema

data = pathlib.Path(sys.argv[1])
schema = json.loads((data / "machine_spec.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(schema)

for name in ("leonardo.json", "toy.json"):
    jsonschema.validate(json.loads((data / name).read_text()), schema)
    print(f"ok {name}")

doc = json.loads((data / "toy.json").read_text())
doc["cells"][0]["colour"] = "blue"
try:
    jsonschema.validate(doc, schema)
except jsonschema.ValidationError:
    print("ok unknown field rejected")
else:
    sys.exit("unknown field accepted")

doc = json.loads((data / "toy.json").read_text())
doc["cells"] = []
try:
    jsonschema.validate(doc, schema)
except jsonschema.ValidationError:
    print("ok empty cells rejected")
else:
    sys.exit("empty cell list accepted")
