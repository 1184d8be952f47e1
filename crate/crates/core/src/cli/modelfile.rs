//! Model files: one statement per line.
//!
//! ```text
//! # comment
//! generator x2 2
//! generator y5 5
//! d y5 = x2^3
//! ```
//!
//! All `generator` lines come before the `d` lines; a generator without a
//! `d` line is a cocycle.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::algebra::{Algebra, Element};
use crate::differential::{Differential, SullivanModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub path: Option<PathBuf>,
    pub model: SullivanModel,
    pub source: String,
}

pub fn parse_model_file(path: &Path) -> Result<ModelFile> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let model = parse_model_text(&source, &path.display().to_string())?;
    Ok(ModelFile { path: Some(path.to_path_buf()), model, source })
}

/// Parses model text; `origin` names the source in error messages.
pub fn parse_model_text(source: &str, origin: &str) -> Result<SullivanModel> {
    let err =
        |line: usize, column: usize, msg: String| Error::ModelFile { path: origin.to_string(), line, column, msg };

    let mut generators: Vec<(String, u32)> = Vec::new();
    let mut generator_lines: HashMap<String, usize> = HashMap::new();
    // (name, name line, text, column where the polynomial starts)
    let mut images: Vec<(String, usize, String, usize)> = Vec::new();

    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_col = indent + keyword.len() + 2;
        match keyword {
            "generator" => {
                if !images.is_empty() {
                    return Err(err(line_no, indent + 1, "generator declared after a `d` line".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [name, degree] = fields[..] else {
                    return Err(err(line_no, rest_col, "expected `generator <name> <degree>`".into()));
                };
                let degree_col = column_of(raw, degree, rest_col - 1);
                let degree: u32 =
                    degree.parse().map_err(|_| err(line_no, degree_col, format!("invalid degree `{degree}`")))?;
                if generator_lines.insert(name.to_string(), line_no).is_some() {
                    return Err(err(
                        line_no,
                        column_of(raw, name, rest_col - 1),
                        format!("duplicate generator `{name}`"),
                    ));
                }
                generators.push((name.to_string(), degree));
            }
            "d" => {
                let Some((name, poly)) = rest.split_once('=') else {
                    return Err(err(line_no, rest_col, "expected `d <name> = <polynomial>`".into()));
                };
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(line_no, rest_col, "expected `d <name> = <polynomial>`".into()));
                }
                let name_col = column_of(raw, name, rest_col - 1);
                if !generator_lines.contains_key(name) {
                    return Err(err(line_no, name_col, format!("unknown generator `{name}`")));
                }
                if images.iter().any(|(n, ..)| n == name) {
                    return Err(err(line_no, name_col, format!("second `d` line for `{name}`")));
                }
                let poly_col = indent + keyword.len() + 1 + rest.find('=').unwrap() + 2;
                images.push((name.to_string(), line_no, poly.to_string(), poly_col));
            }
            other => {
                return Err(err(line_no, indent + 1, format!("unknown statement `{other}`")));
            }
        }
    }

    let alg = Algebra::new(&generators).map_err(|e| {
        let line = match &e {
            Error::DuplicateGenerator(n) | Error::InvalidName(n) => generator_lines.get(n).copied(),
            Error::NotSimplyConnected { name, .. } => generator_lines.get(name).copied(),
            _ => None,
        };
        err(line.unwrap_or(1), 1, e.to_string())
    })?;

    let mut values = vec![Element::zero(); alg.len()];
    for (name, line, text, col) in &images {
        let e = alg.parse(text).map_err(|e| {
            let pos = match &e {
                Error::Syntax { pos, .. } | Error::UnknownGenerator { pos, .. } | Error::OddPower { pos, .. } => *pos,
                _ => 0,
            };
            err(*line, col + pos, e.to_string())
        })?;
        values[alg.index_of(name).expect("checked above")] = e;
    }
    let d = Differential::new(&alg, values).map_err(|e| {
        let line = match &e {
            Error::DegreeMismatch { generator, .. }
            | Error::NotMinimal { generator, .. }
            | Error::DSquareNonzero { generator, .. } => {
                images.iter().find(|(n, ..)| n == generator).map(|(_, l, ..)| *l)
            }
            _ => None,
        };
        err(line.unwrap_or(1), 1, e.to_string())
    })?;
    Ok(SullivanModel::new(alg, d))
}

fn column_of(raw: &str, token: &str, from: usize) -> usize {
    raw.get(from..).and_then(|s| s.find(token)).map_or(from + 1, |i| from + i + 1)
}

/// Renders a model in the file grammar.
pub fn format_model(model: &SullivanModel) -> String {
    let alg = model.algebra();
    let mut out = String::new();
    for g in alg.generators() {
        out.push_str(&format!("generator {} {}\n", g.name, g.degree));
    }
    for g in alg.generators() {
        let image = model.differential().image(g.index);
        if !image.is_zero() {
            out.push_str(&format!("d {} = {}\n", g.name, alg.format(image)));
        }
    }
    out
}
