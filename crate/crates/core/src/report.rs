//! Canonical JSON: keys sorted, rationals as `"p/q"`, floats in shortest
//! round-trip form. Equal values give byte-identical text.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    // serde_json's map is a BTreeMap, so going through Value sorts every object
    serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()))
}

pub fn canonical_json<T: Serialize>(x: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_value(x)?).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_are_sorted() {
        let m: HashMap<&str, i32> = [("b", 1), ("a", 2), ("c", 3)].into_iter().collect();
        assert_eq!(canonical_json(&m).unwrap(), "{\n  \"a\": 2,\n  \"b\": 1,\n  \"c\": 3\n}\n");
    }
}
