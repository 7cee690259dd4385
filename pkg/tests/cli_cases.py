"""CLI invocations shared by the CLI tests and the determinism check; run from the samples directory."""

import os

SAMPLES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "samples")

CASES = [
    ["validate", "example.json"],
    ["validate", "s3.json", "--json"],
    ["sylow-count", "example.json", "--prime", "2"],
    ["sylow", "example.json", "--prime", "2", "--json"],
    ["normality", "example.json", "--prime", "2"],
    ["normality", "example.json", "--prime", "2", "--json"],
    ["nilpotent-check", "example.json"],
    ["decompose", "bz6.json"],
    ["decompose", "bz6.json", "--json"],
    ["p-complete", "bz6.json", "--prime", "3"],
    ["sylow", "s3.json", "--prime", "2", "--tower", "T"],
    ["conjugate", "s3.json", "--prime", "2", "--tower", "T", "--json"],
    ["factor", "s3.json", "--map", "f", "--prime", "2"],
    ["normality", "s3.json", "--prime", "3", "--tower", "K"],
    ["burnside", "fibration.json", "--prime", "2"],
    ["burnside", "fibration.json", "--prime", "2", "--json"],
    ["cohomology", "--group", "trivial", "--module", "trivial:5", "--degree", "2"],
    ["cohomology", "--group", "sym:3", "--module", "trivial:2", "--degree", "3", "--json"],
    ["cohomology", "s3.json", "--group", "S3", "--module", "sign3", "--degree", "2"],
    ["run", "s3.json"],
    ["run", "s3.json", "--threads", "3", "--json"],
    ["selftest", "--json"],
    ["sylow-count", "example.json", "--prime", "4"],
    ["decompose", "example.json", "--json"],
    ["sylow-count", "missing.json", "--prime", "2"],
    ["decompose", "example.json"],
    ["cohomology", "--group", "trivial", "--module", "trivial:7", "--degree", "2"],
    ["cohomology", "--group", "cyclic:2", "--module", "trivial:2", "--degree", "3"],
    ["cohomology", "--group", "bogus:3", "--module", "trivial:2", "--degree", "1"],
    ["run", "s3.json", "--json"],
    ["selftest"],
    ["factor", "s3.json", "--map", "nope", "--prime", "2"],
    ["sylow", "s3.json", "--prime", "2", "--tower", "Z"],
    ["frobnicate"],
]

# invocations that also need environment settings
ENV_CASES = [
    (["cohomology", "--group", "sym:3", "--module", "trivial:2", "--degree", "3"], {"SYLOWTOWER_MAX_DEGREE": "2"}),
    (["cohomology", "--group", "sym:3", "--module", "trivial:2", "--degree", "1"], {"SYLOWTOWER_MAX_CELLS": "lots"}),
]
