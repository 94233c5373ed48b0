//! Mechanism spec mini-grammar and the rebate table file format.
//!
//! ```text
//! vcg | linear:a0,a1,... | oel:k=K | bcgc:<spec> | table:@path.json
//! ```
//! A table file is a JSON object from `"v1,v2,..."` (descending) to `"p/q"`.

use std::collections::BTreeMap;
use std::path::Path;

use groves_core::rational::{parse_rational_list, to_exact_string};
use groves_core::{parse_rational, Mechanism, OelIndex, RebateCoefficients, RebateTable, Setting};

use crate::error::{CliError, CliResult};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_mechanism(text: &str, setting: &Setting) -> CliResult<Mechanism> {
    let text = text.trim();
    if text == "vcg" {
        return Ok(Mechanism::Vcg);
    }
    if let Some(inner) = text.strip_prefix("bcgc:") {
        return Ok(Mechanism::bcgc(parse_mechanism(inner, setting)?));
    }
    if let Some(list) = text.strip_prefix("linear:") {
        let values = parse_rational_list(list)
            .map_err(|e| usage(format!("bad linear spec '{text}': {e}")))?;
        let coeffs = RebateCoefficients::from_vec(values)
            .map_err(|e| usage(format!("bad linear spec '{text}': {e}")))?;
        return Ok(Mechanism::Linear(coeffs));
    }
    if let Some(rest) = text.strip_prefix("oel:") {
        let k = rest
            .strip_prefix("k=")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| usage(format!("bad oel spec '{text}', expected oel:k=K")))?;
        let auction = setting
            .as_auction()
            .map_err(|_| usage("oel mechanisms need --domain auction"))?;
        return Ok(Mechanism::Oel(
            OelIndex::new(auction, k).map_err(|e| usage(e.to_string()))?,
        ));
    }
    if let Some(path) = text.strip_prefix("table:@") {
        return Ok(Mechanism::Tabular(read_table(Path::new(path))?));
    }
    Err(usage(format!(
        "unknown mechanism spec '{text}' (expected vcg, linear:a0,..., oel:k=K, bcgc:<spec> or table:@file.json)"
    )))
}

pub fn read_table(path: &Path) -> CliResult<RebateTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_table(&text).map_err(|e| match e {
        CliError::Usage(msg) => usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_table(text: &str) -> CliResult<RebateTable> {
    let raw: BTreeMap<String, String> = serde_json::from_str(text)
        .map_err(|e| usage(format!("table must map \"v1,v2,...\" to \"p/q\": {e}")))?;
    let mut table = RebateTable::new();
    for (key, value) in raw {
        let others = parse_rational_list(&key).map_err(|e| usage(format!("key '{key}': {e}")))?;
        let v = parse_rational(&value).map_err(|e| usage(format!("value for '{key}': {e}")))?;
        if table
            .insert(others, v)
            .map_err(|e| usage(e.to_string()))?
            .is_some()
        {
            return Err(usage(format!("key '{key}' repeats a multiset")));
        }
    }
    if table.is_empty() {
        return Err(usage("table is empty"));
    }
    Ok(table)
}

pub fn table_to_json(table: &RebateTable) -> BTreeMap<String, String> {
    table
        .iter()
        .map(|(k, v)| (k.to_string(), to_exact_string(v)))
        .collect()
}
