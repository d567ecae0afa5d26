use serde_json::{json, Value};

pub const SCHEMA_NAMES: &[&str] = &[
    "fan",
    "onepar",
    "weighted-flag",
    "klyachko",
    "plmap",
    "piecewise",
    "psi",
    "candidate",
    "verdict",
    "census",
];

fn defs() -> Value {
    json!({
        "int": {
            "description": "integer; a decimal string when outside the 64-bit range",
            "oneOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+$"}]
        },
        "rational": {
            "description": "integer or \"p/q\" string",
            "oneOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"}]
        },
        "vector": {"type": "array", "items": {"$ref": "#/$defs/rational"}},
        "matrix": {
            "description": "list of rows",
            "type": "array",
            "items": {"$ref": "#/$defs/vector"}
        },
        "subspace": {
            "description": "spanning row vectors",
            "type": "array",
            "items": {"$ref": "#/$defs/vector"}
        },
        "flag": {
            "description": "increasing steps; a final step equal to the whole space may be omitted",
            "type": "array",
            "items": {"$ref": "#/$defs/subspace"}
        },
        "cone": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "piece": {
            "type": "object",
            "required": ["cone", "poly"],
            "additionalProperties": false,
            "properties": {
                "cone": {"$ref": "#/$defs/cone"},
                "poly": {
                    "description": "[coefficient, exponents] terms",
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [
                            {"$ref": "#/$defs/rational"},
                            {"type": "array", "items": {"type": "integer", "minimum": 0}}
                        ],
                        "minItems": 2,
                        "maxItems": 2
                    }
                }
            }
        },
        "candidate": {
            "type": "object",
            "required": ["rank", "flags"],
            "additionalProperties": false,
            "properties": {
                "rank": {"type": "integer", "minimum": 1},
                "flags": {"description": "one flag per ray", "type": "array", "items": {"$ref": "#/$defs/flag"}}
            }
        },
        "status": {"enum": ["ACCEPTED", "REJECTED", "INDETERMINATE"]},
        "conditions": {"enum": ["full", "ray-values-only"]}
    })
}

fn object(title: &str, required: &[&str], properties: Value) -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": title,
        "type": "object",
        "required": required,
        "additionalProperties": false,
        "properties": properties,
        "$defs": defs()
    })
}

/// JSON schema of a file format by name.
pub fn schema(name: &str) -> Option<Value> {
    Some(match name {
        "fan" => object(
            "fan",
            &["lattice_rank", "rays", "maximal_cones"],
            json!({
                "lattice_rank": {"type": "integer", "minimum": 1},
                "rays": {
                    "description": "primitive integer generators",
                    "type": "array",
                    "items": {"type": "array", "items": {"$ref": "#/$defs/int"}}
                },
                "maximal_cones": {"type": "array", "items": {"$ref": "#/$defs/cone"}}
            }),
        ),
        "onepar" => object(
            "one-parameter subgroup",
            &["frame", "weights"],
            json!({
                "frame": {"description": "invertible matrix whose columns carry the weights", "$ref": "#/$defs/matrix"},
                "weights": {"type": "array", "items": {"type": "integer"}}
            }),
        ),
        "weighted-flag" => object(
            "weighted flag",
            &["rank", "steps", "weights"],
            json!({
                "rank": {"type": "integer", "minimum": 1},
                "steps": {"$ref": "#/$defs/flag"},
                "weights": {"description": "strictly decreasing", "type": "array", "items": {"$ref": "#/$defs/rational"}}
            }),
        ),
        "klyachko" => object(
            "decreasing filtration E(start) ⊇ E(start+1) ⊇ ..., whole space before start, zero after the last level",
            &["rank", "start", "levels"],
            json!({
                "rank": {"type": "integer", "minimum": 1},
                "start": {"type": "integer"},
                "levels": {"type": "array", "items": {"$ref": "#/$defs/subspace"}}
            }),
        ),
        "plmap" => object(
            "piecewise linear map, one chart per maximal cone",
            &["rank", "charts"],
            json!({
                "rank": {"type": "integer", "minimum": 1},
                "charts": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["cone", "frame", "weights_matrix"],
                        "additionalProperties": false,
                        "properties": {
                            "cone": {"$ref": "#/$defs/cone"},
                            "frame": {"$ref": "#/$defs/matrix"},
                            "weights_matrix": {
                                "description": "rank rows; columns are images of the saturated lattice basis, or of the rays with coords = rays",
                                "$ref": "#/$defs/matrix"
                            },
                            "coords": {"enum": ["lattice", "rays"]}
                        }
                    }
                }
            }),
        ),
        "piecewise" => object(
            "piecewise polynomial",
            &["pieces"],
            json!({"pieces": {"type": "array", "items": {"$ref": "#/$defs/piece"}}}),
        ),
        "psi" => object(
            "images of the elementary symmetric polynomials",
            &["rank", "classes"],
            json!({
                "rank": {"type": "integer", "minimum": 1},
                "classes": {
                    "type": "array",
                    "items": {"type": "array", "items": {"$ref": "#/$defs/piece"}}
                }
            }),
        ),
        "candidate" => {
            let mut s = object("candidate", &[], json!({}));
            let c = defs()["candidate"].clone();
            for key in ["required", "properties"] {
                s[key] = c[key].clone();
            }
            s
        }
        "verdict" => object(
            "membership verdict",
            &["status", "conditions", "cones"],
            json!({
                "status": {"$ref": "#/$defs/status"},
                "conditions": {"$ref": "#/$defs/conditions"},
                "cones": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["cone", "status", "checks"],
                        "additionalProperties": false,
                        "properties": {
                            "cone": {"$ref": "#/$defs/cone"},
                            "status": {"$ref": "#/$defs/status"},
                            "basis": {"description": "splitting basis vectors", "$ref": "#/$defs/matrix"},
                            "gammas": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["ray", "gamma"],
                                    "additionalProperties": false,
                                    "properties": {
                                        "ray": {"type": "integer", "minimum": 0},
                                        "gamma": {"type": "array", "items": {"$ref": "#/$defs/int"}}
                                    }
                                }
                            },
                            "checks": {
                                "type": "object",
                                "required": ["common_splitting"],
                                "additionalProperties": false,
                                "properties": {
                                    "common_splitting": {"type": "boolean"},
                                    "linear_relations": {"type": "boolean"},
                                    "integral": {"type": "boolean"},
                                    "class_identity": {"type": "boolean"}
                                }
                            },
                            "reason": {"type": "string"}
                        }
                    }
                }
            }),
        ),
        "census" => object(
            "torus-fixed points",
            &["rank", "count", "conditions", "candidates"],
            json!({
                "rank": {"type": "integer", "minimum": 1},
                "count": {"type": "integer", "minimum": 0},
                "conditions": {"$ref": "#/$defs/conditions"},
                "candidates": {"type": "array", "items": {"$ref": "#/$defs/candidate"}}
            }),
        ),
        _ => return None,
    })
}
