//! Readout JSON: `{"n":2,"classes":{"1":[[1,0],[0,1]],"2":[[1,1]]}}`.
//!
//! Each class lists its entries as `[zeros, ones]` pairs, one per copy.
//! Emitted text is canonical: classes by ascending length, entries by
//! ascending weight, no whitespace. Size anomalies are data, not errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use comprecon::{Composition, LengthClass, Readout};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReadout {
    n: usize,
    classes: BTreeMap<String, Vec<[u32; 2]>>,
}

pub fn parse_readout(text: &str) -> Result<Readout, CliError> {
    let raw: RawReadout = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("readout JSON: {e}")))?;
    if raw.n == 0 || raw.n > 128 {
        return Err(CliError::Parse(format!("n = {} outside 1..=128", raw.n)));
    }
    let mut r = Readout::new(raw.n);
    for (key, entries) in raw.classes {
        let k: usize = key.parse().map_err(|_| CliError::Parse(format!("class key `{key}` is not a length")))?;
        if k == 0 || k > raw.n {
            return Err(CliError::Parse(format!("class {k} outside 1..={}", raw.n)));
        }
        let mut class = LengthClass::new(k);
        for [zeros, ones] in entries {
            if (zeros + ones) as usize != k {
                return Err(CliError::Parse(format!("entry [{zeros},{ones}] in class {k} has length {}", zeros + ones)));
            }
            let c = Composition::new(zeros, ones).map_err(|e| CliError::Parse(e.to_string()))?;
            class.insert(c).map_err(|e| CliError::Parse(e.to_string()))?;
        }
        r.set_class(class).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    Ok(r)
}

pub fn emit_readout(r: &Readout) -> String {
    let mut out = format!("{{\"n\":{},\"classes\":{{", r.n());
    for (i, class) in r.classes().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "\"{}\":[", class.k()).expect("writing to a String");
        for (j, c) in class.entries().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "[{},{}]", c.zeros, c.ones).expect("writing to a String");
        }
        out.push(']');
    }
    out.push_str("}}");
    out
}
