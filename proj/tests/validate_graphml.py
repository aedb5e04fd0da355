"""Validate GraphML files against the bundled structural schema.

usage: validate_graphml.py SCHEMA FILE...
"""
import sys

import xmlschema


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    schema = xmlschema.XMLSchema(argv[1])
    failed = 0
    for path in argv[2:]:
        errors = list(schema.iter_errors(path))
        if errors:
            failed += 1
            print(f"FAIL {path}: {errors[0].reason}")
        else:
            print(f"ok   {path}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
