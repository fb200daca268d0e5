//! Versioned JSON documents wrapping a linear or affine action.

use serde::Serialize;
use serde_json::Value;

use torlib::{AffineZpAction, ZpAction};

use crate::CliError;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug)]
pub enum Loaded {
    Linear(ZpAction),
    Affine(AffineZpAction),
}

impl Loaded {
    pub fn linear(&self) -> &ZpAction {
        match self {
            Loaded::Linear(a) => a,
            Loaded::Affine(a) => a.linear(),
        }
    }
}

/// `{"version": 1, "action": {...}}`. The action is affine when it carries
/// `translations`.
pub fn parse(text: &str) -> Result<Loaded, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Input("document must be a JSON object".into()))?;
    match obj.get("version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(CliError::Input(format!("unsupported format version {v}"))),
        None => return Err(CliError::Input("missing numeric \"version\" field".into())),
    }
    let action = obj
        .get("action")
        .ok_or_else(|| CliError::Input("missing \"action\" field".into()))?;
    let invalid = |e: serde_json::Error| CliError::Input(e.to_string());
    if action.get("translations").is_some() {
        Ok(Loaded::Affine(serde_json::from_value(action.clone()).map_err(invalid)?))
    } else {
        Ok(Loaded::Linear(serde_json::from_value(action.clone()).map_err(invalid)?))
    }
}

pub fn load(path: &std::path::Path) -> Result<Loaded, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// Wraps a report so that every output carries the format version.
pub fn versioned(command: &str, body: impl Serialize) -> Value {
    let mut out = serde_json::json!({ "version": FORMAT_VERSION, "command": command });
    if let (Value::Object(map), Value::Object(extra)) = (&mut out, serde_json::to_value(body).expect("serializable")) {
        map.extend(extra);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let lin = r#"{"version":1,"action":{"p":1,"q":2,"generators":[[[1,0],[1,1]]]}}"#;
        assert!(matches!(parse(lin).unwrap(), Loaded::Linear(_)));
        let aff = r#"{"version":1,"action":{"p":1,"q":1,"generators":[[[1]]],"symbols":["xi1"],"translations":[[{"rat":"0","sym":{"xi1":"1"}}]]}}"#;
        assert!(matches!(parse(aff).unwrap(), Loaded::Affine(_)));
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            "{",
            r#"{"action":{"p":1,"q":1,"generators":[[[1]]]}}"#,
            r#"{"version":2,"action":{"p":1,"q":1,"generators":[[[1]]]}}"#,
            r#"{"version":1,"action":{"p":1,"q":1,"generators":[[[2]]]}}"#,
            r#"{"version":1,"action":{"p":2,"q":2,"generators":[[[1,1],[0,1]],[[1,0],[1,1]]]}}"#,
        ] {
            assert!(matches!(parse(bad), Err(CliError::Input(_))), "{bad}");
        }
    }
}
