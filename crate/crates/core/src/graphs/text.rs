//! Line-oriented text format: one `V <count>` line, then one `F v0 v1 ...`
//! line per face; `#` starts a comment.

use super::PlanarGraph;
use crate::error::{Error, Result};

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse { line, detail: detail.into() }
}

/// Parses a graph from lines; `first_line` is the 1-based number of the first
/// line, used in error messages.
pub(crate) fn parse_graph_lines<'a>(
    lines: impl Iterator<Item = &'a str>,
    first_line: usize,
) -> Result<PlanarGraph> {
    let mut count: Option<usize> = None;
    let mut faces = Vec::new();
    let mut last = first_line;
    for (k, raw) in lines.enumerate() {
        let line_no = first_line + k;
        last = line_no;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("V") => {
                if count.is_some() {
                    return Err(parse_err(line_no, "duplicate V line"));
                }
                let n = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(line_no, "expected vertex count"))?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens after vertex count"));
                }
                count = Some(n);
            }
            Some("F") => {
                if count.is_none() {
                    return Err(parse_err(line_no, "F line before V line"));
                }
                let face = tokens
                    .map(|t| t.parse::<usize>().map_err(|_| parse_err(line_no, format!("bad vertex index {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                faces.push(face);
            }
            Some(other) => return Err(parse_err(line_no, format!("unknown record {other:?}"))),
            None => unreachable!(),
        }
    }
    let n = count.ok_or_else(|| parse_err(last, "missing V line"))?;
    PlanarGraph::new(n, faces)
}

/// Parses the graph text format.
pub fn parse_graph(text: &str) -> Result<PlanarGraph> {
    parse_graph_lines(text.lines(), 1)
}

impl PlanarGraph {
    pub fn to_text(&self) -> String {
        let mut out = format!("V {}\n", self.vertex_count());
        for f in self.faces() {
            out.push('F');
            for v in f {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus::*;
    use super::*;

    #[test]
    fn round_trip() {
        for g in corpus_graphs() {
            assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
        }
    }

    #[test]
    fn comments_and_errors() {
        let g = parse_graph("# K4\nV 4\nF 0 1 2 # first\nF 0 3 1\n\nF 0 2 3\nF 1 3 2\n").unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(matches!(parse_graph("F 0 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("V 4\nF 0 x 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("V 4\nE 0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("V 4\nF 0 1 2\n"), Err(Error::NotPolyhedral(_))));
    }
}
