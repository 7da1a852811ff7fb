//! Text format: `P <face-count> [rectified]`, then one `N a b c d` line per
//! face with its Minkowski normal, then the skeleton in the graph format.

use super::Polyhedron;
use crate::error::{Error, Result};
use crate::graphs::text_lines;
use crate::mink::{OrientedPlane, Vec4};

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse { line, detail: detail.into() }
}

pub fn parse_polyhedron(text: &str) -> Result<Polyhedron> {
    let lines: Vec<&str> = text.lines().collect();
    let mut k = 0;
    let content = |raw: &str| raw.split('#').next().unwrap().trim().to_string();
    while k < lines.len() && content(lines[k]).is_empty() {
        k += 1;
    }
    if k == lines.len() {
        return Err(parse_err(k.max(1), "missing P line"));
    }
    let header = content(lines[k]);
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("P") {
        return Err(parse_err(k + 1, "expected P line"));
    }
    let count = tokens
        .next()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| parse_err(k + 1, "expected face count"))?;
    let rectified = match tokens.next() {
        None => false,
        Some("rectified") => true,
        Some(other) => return Err(parse_err(k + 1, format!("unexpected token {other:?}"))),
    };
    k += 1;
    let mut planes = Vec::with_capacity(count);
    while planes.len() < count {
        if k == lines.len() {
            return Err(parse_err(k, format!("expected {count} N lines, found {}", planes.len())));
        }
        let line = content(lines[k]);
        k += 1;
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("N") {
            return Err(parse_err(k, "expected N line"));
        }
        let vals = tokens
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(k, format!("bad number {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 4 || vals.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(k, "N line needs four finite numbers"));
        }
        planes.push(OrientedPlane::from_normal(Vec4::new(vals[0], vals[1], vals[2], vals[3])));
    }
    let skeleton = text_lines(lines[k..].iter().copied(), k + 1)?;
    if rectified {
        Polyhedron::build_rectified(planes, skeleton)
    } else {
        Polyhedron::build(planes, skeleton)
    }
}

impl Polyhedron {
    /// Serializes with round-trip exact numbers.
    pub fn to_text(&self) -> String {
        self.to_text_with(|x| format!("{x}"))
    }

    /// Serializes with a caller-supplied number format.
    pub fn to_text_with(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = format!("P {}{}\n", self.planes.len(), if self.rectified { " rectified" } else { "" });
        for p in &self.planes {
            let n = p.normal();
            out.push_str(&format!("N {} {} {} {}\n", fmt(n[0]), fmt(n[1]), fmt(n[2]), fmt(n[3])));
        }
        out.push_str(&self.skeleton.to_text());
        out
    }
}
