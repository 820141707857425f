use serde_json::{json, Value};

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/config.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn accepted_configs_validate() {
    let v = validator();
    for doc in [
        json!({"interval": [0, 1], "p": "1", "q": "0", "rho": "1", "bc_a": [0, 1], "bc_b": [0, 1]}),
        json!({"interval": [0, 2.5], "p": "1+z^2", "q": "cos(z)", "rho": "exp(-z)", "bc_a": [1, -0.5], "bc_b": [1, 0.5]}),
        json!({"preset": "dirichlet"}),
        json!({"preset": "neumann"}),
        json!({"preset": "dcr", "D": 1.0, "k0": 0.75}),
    ] {
        assert!(v.is_valid(&doc), "{doc}");
    }
}

#[test]
fn rejected_configs_fail() {
    let v = validator();
    for doc in [
        json!({"interval": [0, 1], "p": "1", "q": "0", "rho": "1", "bc_a": [0, 1]}),
        json!({"interval": [0, 1], "p": "1", "q": "0", "rho": "1", "bc_a": [0, 0], "bc_b": [0, 1]}),
        json!({"interval": [0, 1], "p": "", "q": "0", "rho": "1", "bc_a": [0, 1], "bc_b": [0, 1]}),
        json!({"interval": [0, 1], "p": "1", "q": "0", "rho": "1", "bc_a": [0, 1], "bc_b": [0, 1], "extra": 1}),
        json!({"preset": "dcr", "D": 1.0}),
        json!({"preset": "dcr", "D": 0.0, "k0": 1.0}),
        json!({"preset": "dirichlet", "k0": 1.0}),
        json!({"preset": "robin"}),
    ] {
        assert!(!v.is_valid(&doc), "{doc}");
    }
}
