//! Knot table files: one `name<TAB>gauss_code[<TAB>json]` entry per line.
//! Blank lines and lines starting with `#` are skipped.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::path::Path;

use bqpolyak::arrow::AlgebraElement;
use bqpolyak::enhance::{enhancement, EnhancementValue};
use serde_json::json;

use crate::{load_biquandle, parse_code, print_json, read, select_element, CliError, ElementArgs, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnotTableEntry {
    pub name: String,
    pub gauss_code: String,
    pub expected: Option<serde_json::Value>,
    pub line: usize,
}

pub fn parse_table(text: &str) -> std::result::Result<Vec<KnotTableEntry>, String> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or("").trim().to_string();
        let code = fields.next().map(str::trim).filter(|c| !c.is_empty());
        let Some(code) = code else {
            return Err(format!("line {}: expected name<TAB>gauss_code", i + 1));
        };
        let expected = match fields.next().map(str::trim).filter(|s| !s.is_empty()) {
            Some(s) => Some(serde_json::from_str(s).map_err(|e| format!("line {}: {e}", i + 1))?),
            None => None,
        };
        if !names.insert(name.clone()) {
            return Err(format!("line {}: duplicate name {name:?}", i + 1));
        }
        out.push(KnotTableEntry { name, gauss_code: code.to_string(), expected, line: i + 1 });
    }
    Ok(out)
}

/// Differences between a computed value and the expectations of an entry.
fn mismatches(v: &EnhancementValue, expected: &serde_json::Value) -> Vec<String> {
    let got = v.to_json_value();
    ["counting", "multiset", "polynomial"]
        .into_iter()
        .filter_map(|k| {
            let want = expected.get(k)?;
            (want != &got[k]).then(|| format!("{k}: expected {want}, got {}", got[k]))
        })
        .collect()
}

pub fn run_table(path: &Path, e: &ElementArgs, json_out: bool) -> Result<()> {
    let entries = parse_table(&read(path)?).map_err(|m| CliError::Domain(format!("{}: {m}", path.display())))?;
    let bq = e.biquandle.as_ref().ok_or_else(|| CliError::Domain("--biquandle is required".into()))?;
    let b = load_biquandle(bq)?;
    let mut elements: HashMap<usize, AlgebraElement> = HashMap::new();
    let mut rows = Vec::new();
    let mut failed = 0;
    for entry in &entries {
        let at = |err: CliError| CliError::Domain(format!("{}:{}: {err}", path.display(), entry.line));
        let d = parse_code(&entry.gauss_code).map_err(at)?;
        let c = d.num_components();
        if let Entry::Vacant(slot) = elements.entry(c) {
            slot.insert(select_element(e, &b, c).map_err(at)?);
        }
        let v = enhancement(&d, &b, &elements[&c], e.degree).map_err(|err| at(CliError::Domain(err.to_string())))?;
        let bad = entry.expected.as_ref().map(|x| mismatches(&v, x)).unwrap_or_default();
        if !bad.is_empty() {
            failed += 1;
        }
        if json_out {
            let mut r = v.to_json_value();
            r["name"] = json!(entry.name);
            r["gauss"] = json!(entry.gauss_code);
            r["ok"] = json!(bad.is_empty());
            rows.push(r);
        } else if bad.is_empty() {
            println!("{}\t{v}", entry.name);
        } else {
            println!("{}\t{v}\tMISMATCH {}", entry.name, bad.join("; "));
        }
    }
    if json_out {
        print_json(&json!(rows));
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} entr{} disagree with expectations", if failed == 1 { "y" } else { "ies" })));
    }
    Ok(())
}

/// A Cayley table with 1-based entries, one row per line.
pub fn parse_cayley(text: &str) -> std::result::Result<Vec<Vec<usize>>, String> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(format!("line {}: bad entry {t:?}", i + 1)),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_format() {
        let t = "# comment\nvt\tO1+U2+U1+O2+\t{\"polynomial\": \"2u^2\"}\n\nunknot\t\t\n";
        assert!(parse_table(t).is_err());
        let t = "vt\tO1+U2+U1+O2+\t{\"polynomial\": \"2u^2\"}\nhopf\tO1+U2+;U1+O2+\n";
        let e = parse_table(t).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].expected, Some(json!({"polynomial": "2u^2"})));
        assert_eq!(e[1].line, 2);
        assert!(parse_table("a\tO1+U1+\na\tO1-U1-\n").unwrap_err().contains("duplicate"));
    }

    #[test]
    fn cayley() {
        assert_eq!(parse_cayley("1 2\n2 1\n").unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert!(parse_cayley("0 1\n").is_err());
    }

    #[test]
    fn expectation_diff() {
        let v = EnhancementValue::from_exponents(vec![2, 2]);
        assert!(mismatches(&v, &json!({"polynomial": "2u^2", "counting": 2})).is_empty());
        assert_eq!(mismatches(&v, &json!({"counting": 3})).len(), 1);
    }
}
