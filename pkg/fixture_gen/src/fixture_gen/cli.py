"""fixture-gen command line: read a recipe, emit fixture JSON, optionally
ask the engine CLI to validate the result."""
from __future__ import annotations

import argparse
import json
import subprocess
import sys
import tempfile

from .generate import CASError, RecipeError, generate, load_recipe


def main(argv=None):
    parser = argparse.ArgumentParser(prog="fixture-gen")
    parser.add_argument("recipe", help="path to a recipe JSON file")
    parser.add_argument("-o", "--output", default=None,
                        help="output path (default: stdout)")
    parser.add_argument("--check", action="store_true",
                        help="run `linv validate` on the generated fixture")
    args = parser.parse_args(argv)

    try:
        fixture = generate(load_recipe(args.recipe))
    except (RecipeError, CASError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    text = json.dumps(fixture, indent=1)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)

    if args.check:
        path = args.output
        if path is None:
            tmp = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
            tmp.write(text)
            tmp.close()
            path = tmp.name
        proc = subprocess.run(["linv", "validate", path], capture_output=True,
                              text=True)
        sys.stdout.write(proc.stdout)
        if proc.returncode != 0:
            print("generated fixture failed engine validation", file=sys.stderr)
            return proc.returncode
    return 0


if __name__ == "__main__":
    sys.exit(main())
