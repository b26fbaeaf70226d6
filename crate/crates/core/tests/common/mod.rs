//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use khref::diagram::{parse_pd, PlanarDiagram};

pub struct CorpusKnot {
    pub name: String,
    pub pd: String,
    pub rasmussen: i32,
    pub signature: i32,
    /// `(i, j) -> (free rank, number of Z/2 summands)`.
    pub khovanov: BTreeMap<(i32, i32), (usize, usize)>,
}

impl CorpusKnot {
    pub fn diagram(&self) -> PlanarDiagram {
        parse_pd(&self.pd).unwrap()
    }
}

pub fn data_path(file: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(file)
}

pub fn corpus() -> Vec<CorpusKnot> {
    let text = std::fs::read_to_string(data_path("knots.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            CorpusKnot {
                name: f[0].to_string(),
                pd: f[1].to_string(),
                rasmussen: f[2].parse().unwrap(),
                signature: f[3].parse().unwrap(),
                khovanov: parse_khovanov_polynomial(f[4]),
            }
        })
        .collect()
}

pub fn corpus_knot(name: &str) -> CorpusKnot {
    corpus().into_iter().find(|k| k.name == name).unwrap_or_else(|| panic!("{name} not in corpus"))
}

fn exponent(term: &str, var: char) -> i32 {
    for factor in term.split('*') {
        if let Some(rest) = factor.strip_prefix(var) {
            return match rest.strip_prefix('^') {
                Some(e) => e.trim_matches(|c| c == '(' || c == ')').parse().unwrap(),
                None => 1,
            };
        }
    }
    0
}

/// Parses a polynomial in `t`, `q` and `T` where `T^2` marks a Z/2 summand.
pub fn parse_khovanov_polynomial(text: &str) -> BTreeMap<(i32, i32), (usize, usize)> {
    let mut out: BTreeMap<(i32, i32), (usize, usize)> = BTreeMap::new();
    for term in text.split('+').filter(|t| !t.is_empty()) {
        let coeff = term
            .split('*')
            .next()
            .and_then(|c| c.parse::<usize>().ok())
            .unwrap_or(1);
        let key = (exponent(term, 't'), exponent(term, 'q'));
        let e = out.entry(key).or_default();
        if exponent(term, 'T') == 2 {
            e.1 += coeff;
        } else {
            e.0 += coeff;
        }
    }
    out
}
