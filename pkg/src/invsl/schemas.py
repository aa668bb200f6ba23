"""Versioned JSON schemas for the file formats the CLI reads.

Snapshots of these schemas are kept under docs/schema/; a test pins the two
copies together.  Complex numbers are [re, im] pairs; bare reals are accepted
for polynomial coefficients.
"""

COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

NUMBER_OR_COMPLEX = {"oneOf": [{"type": "number"}, COMPLEX]}

COEFF_LIST = {"type": "array", "items": NUMBER_OR_COMPLEX, "minItems": 1}

SIGMA = {
    "type": "object",
    "required": ["interval", "samples"],
    "properties": {
        "interval": {"type": "number", "exclusiveMinimum": 0},
        "samples": {"type": "array", "items": NUMBER_OR_COMPLEX, "minItems": 17},
    },
    "additionalProperties": False,
}

ENTIRE_PAIR = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {
            "enum": ["dirichlet_right", "neumann_right",
                     "closed_form_dirichlet_right", "closed_form_neumann_right",
                     "constant", "hl_right_half"]
        },
        "f1": NUMBER_OR_COMPLEX,
        "f2": NUMBER_OR_COMPLEX,
        "sigma": SIGMA,
        "r1": COEFF_LIST,
        "r2": COEFF_LIST,
    },
}

PROBLEM_V1 = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "invsl/problem-v1",
    "type": "object",
    "required": ["schema", "sigma", "p1", "p2", "f"],
    "properties": {
        "schema": {"const": "invsl/problem-v1"},
        "sigma": SIGMA,
        "p1": COEFF_LIST,
        "p2": COEFF_LIST,
        "f": ENTIRE_PAIR,
        "subspectrum": {"type": "array", "items": NUMBER_OR_COMPLEX},
    },
    "additionalProperties": False,
}

TWO_SIDED_V1 = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "invsl/two_sided-v1",
    "type": "object",
    "required": ["schema", "sigma", "p1", "p2", "r1", "r2"],
    "properties": {
        "schema": {"const": "invsl/two_sided-v1"},
        "sigma": SIGMA,
        "p1": COEFF_LIST,
        "p2": COEFF_LIST,
        "r1": COEFF_LIST,
        "r2": COEFF_LIST,
    },
    "additionalProperties": False,
}

SUBSPECTRUM_V1 = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "invsl/subspectrum-v1",
    "type": "object",
    "required": ["schema", "lambdas"],
    "properties": {
        "schema": {"const": "invsl/subspectrum-v1"},
        "lambdas": {"type": "array", "items": NUMBER_OR_COMPLEX, "minItems": 1},
    },
    "additionalProperties": False,
}

ALL = {
    "problem-v1": PROBLEM_V1,
    "two_sided-v1": TWO_SIDED_V1,
    "subspectrum-v1": SUBSPECTRUM_V1,
}
