"""Validate a bundle's manifest.json and graph.json against the shipped schemas.

usage: validate_bundle_json.py DOCS_DIR BUNDLE_DIR
"""

import json
import pathlib
import sys

import jsonschema


def main() -> int:
    docs, bundle = map(pathlib.Path, sys.argv[1:3])
    failed = False
    for schema_name, doc_name in (("manifest.schema.json", "manifest.json"), ("graph.schema.json", "graph.json")):
        schema = json.loads((docs / schema_name).read_text())
        doc = json.loads((bundle / doc_name).read_text())
        errors = list(jsonschema.Draft202012Validator(schema).iter_errors(doc))
        for e in errors:
            print(f"{doc_name}: {e.json_path}: {e.message}")
        failed = failed or bool(errors)
        if not errors:
            print(f"{doc_name}: ok")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
