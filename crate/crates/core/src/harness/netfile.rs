//! Network description files.
//!
//! ```json
//! {
//!   "nodes": ["s", "r", "d"],
//!   "source": "s",
//!   "destination": "d",
//!   "edges": [{"from": "s", "to": "r", "gain": 1.0},
//!             {"from": "r", "to": "d", "gain": 1.0}],
//!   "powers": {"s": 10.0, "r": 10.0}
//! }
//! ```
//!
//! Syntax errors carry the line and column reported by the JSON parser.
//! Validation errors name the offending field and, when it can be found in
//! the text, its line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{NetworkDescription, RelayNetwork};

/// Reads and validates a network file.
pub fn parse_network(path: impl AsRef<Path>) -> Result<RelayNetwork> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_network_str(&text, &path.display().to_string())
}

/// Parses network JSON; `origin` names the source in error messages.
pub fn parse_network_str(text: &str, origin: &str) -> Result<RelayNetwork> {
    let desc: NetworkDescription = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    RelayNetwork::new(desc).map_err(|e| match e {
        Error::Network { field, message, .. } => Error::Network {
            line: locate(text, &field),
            field,
            message,
        },
        other => other,
    })
}

/// Line (1-based) of the JSON entry behind a validation field path such as
/// `edges[3].gain` or `powers.r1`.
fn locate(text: &str, field: &str) -> Option<usize> {
    let line_of = |offset: usize| text[..offset].matches('\n').count() + 1;
    if let Some(rest) = field.strip_prefix("edges[") {
        let k: usize = rest.split(']').next()?.parse().ok()?;
        let edges = text.find("\"edges\"")?;
        let mut pos = edges;
        for _ in 0..=k {
            pos += text[pos..].find('{')? + 1;
        }
        let key = rest.split('.').nth(1);
        return Some(
            match key.and_then(|key| text[pos..].find(&format!("\"{key}\""))) {
                Some(off) => line_of(pos + off),
                None => line_of(pos),
            },
        );
    }
    if let Some(id) = field.strip_prefix("powers.") {
        let powers = text.find("\"powers\"")?;
        let off = text[powers..].find(&format!("\"{id}\""))?;
        return Some(line_of(powers + off));
    }
    let off = text.find(&format!("\"{field}\""))?;
    Some(line_of(off))
}
