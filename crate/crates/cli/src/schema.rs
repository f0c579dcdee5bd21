//! Text printed by `--print-schema`.

pub const SCHEMA: &str = r##"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "qdd experiment config",
  "type": "object",
  "additionalProperties": false,
  "required": ["kind"],
  "properties": {
    "kind": {
      "enum": ["generator", "evolve", "dd-average", "collision-study", "pocket", "kernels", "contrast"],
      "description": "generator: model, scheme. evolve: model, rho, times, optional scheme. dd-average: model, scheme. collision-study: model, scheme, taus (>= 2, descending), optional seeds, T, kick_every. pocket: spectral_model, scheme, times, optional steps. kernels: spectral_model, Y, X, times. contrast: taus, optional gamma, T."
    },
    "model": {
      "description": "Lindblad model inline, or a path to a JSON file relative to the config file",
      "oneOf": [{"type": "string"}, {"$ref": "#/$defs/model"}]
    },
    "spectral_model": {
      "oneOf": [{"type": "string"}, {"$ref": "#/$defs/spectral_model"}]
    },
    "scheme": {
      "oneOf": [{"type": "string"}, {"$ref": "#/$defs/scheme"}]
    },
    "rho": {"$ref": "#/$defs/matrix"},
    "Y": {"$ref": "#/$defs/matrix"},
    "X": {"$ref": "#/$defs/matrix"},
    "times": {"type": "array", "items": {"type": "number", "minimum": 0}},
    "taus": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
    "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "T": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "steps": {"type": "integer", "minimum": 1},
    "kick_every": {"type": "integer", "minimum": 1, "default": 1},
    "gamma": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "output": {
      "type": "object",
      "additionalProperties": false,
      "required": ["path"],
      "properties": {
        "path": {"type": "string", "description": "with --out DIR only the file name is used, placed in DIR"},
        "format": {"enum": ["csv", "json"], "default": "csv"}
      }
    }
  },
  "$defs": {
    "matrix": {
      "description": "square complex matrix as rows of [re, im] pairs",
      "type": "array",
      "items": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}
    },
    "model": {
      "type": "object",
      "additionalProperties": false,
      "required": ["H"],
      "properties": {
        "H": {"$ref": "#/$defs/matrix"},
        "Ls": {"type": "array", "items": {"$ref": "#/$defs/matrix"}, "default": []}
      }
    },
    "scheme": {
      "type": "object",
      "additionalProperties": false,
      "required": ["V", "order", "tau"],
      "properties": {
        "V": {"type": "array", "items": {"$ref": "#/$defs/matrix"}, "minItems": 1},
        "order": {"oneOf": [{"const": "cyclic"}, {"type": "object", "additionalProperties": false, "required": ["random"], "properties": {"random": {"type": "integer", "minimum": 0}}}]},
        "tau": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "spectral_model": {
      "type": "object",
      "additionalProperties": false,
      "required": ["levels", "rho"],
      "properties": {
        "levels": {"type": "array", "minItems": 1, "items": {"type": "object", "additionalProperties": false, "required": ["E", "P"], "properties": {"E": {"type": "number"}, "P": {"$ref": "#/$defs/matrix"}}}},
        "rho": {"$ref": "#/$defs/matrix"}
      }
    }
  }
}
"##;
