use serde::Serialize;
use serde_json::Value;

use crate::fieldalg::Q;

/// Pretty JSON with a trailing newline. Key order is the field order of the
/// serialized types, so output is byte-stable for identical inputs.
pub fn emit_report<T: Serialize>(r: &T) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report types serialize infallibly");
    s.push('\n');
    s
}

/// Rationals are emitted as strings (`"-3/2"`) to stay exact.
pub fn q_to_json(v: &Q) -> Value {
    Value::String(v.to_string())
}

pub fn qvec_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::q;

    #[derive(Serialize)]
    struct R {
        b: u32,
        a: Vec<u32>,
    }

    #[test]
    fn key_order_follows_declaration() {
        let s = emit_report(&R { b: 1, a: vec![2, 3] });
        assert!(s.find("\"b\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn rationals_are_strings() {
        assert_eq!(q_to_json(&q(-3, 2)), Value::String("-3/2".into()));
    }
}
