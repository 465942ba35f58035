//! Text format for graphs with semi-edges (`.sgf`).
//!
//! Line-oriented; `#` starts a comment that runs to the end of the line.
//! Directives, one per line, whitespace-separated:
//!
//! ```text
//! v NAME          # declare a vertex
//! e U V [LABEL]   # edge between previously declared vertices U and V
//! l V [LABEL]     # loop at V
//! s V [LABEL]     # semi-edge at V
//! ```
//!
//! Vertices must be declared before any link uses them.  Labels, when
//! present, must be unique.  Serialization writes vertices in id order and
//! links in id order, so `parse(serialize(g))` reproduces `g` exactly.

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, GraphError, LinkKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct SgfError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, SgfError> {
    Err(SgfError {
        line,
        msg: msg.into(),
    })
}

fn graph_err(line: usize, e: GraphError) -> SgfError {
    SgfError {
        line,
        msg: e.to_string(),
    }
}

/// Parse `.sgf` text into a graph.
pub fn parse(text: &str) -> Result<Graph, SgfError> {
    let mut g = Graph::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(directive) = tokens.next() else {
            continue;
        };
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "v" => match rest.as_slice() {
                [name] => {
                    g.add_vertex(name).map_err(|e| graph_err(line_no, e))?;
                }
                _ => return err(line_no, "expected: v NAME"),
            },
            "e" => match rest.as_slice() {
                [u, v] | [u, v, _] => {
                    let label = rest.get(2).copied();
                    let ui = g.require_vertex(u).map_err(|e| graph_err(line_no, e))?;
                    let vi = g.require_vertex(v).map_err(|e| graph_err(line_no, e))?;
                    g.add_edge(ui, vi, label).map_err(|e| graph_err(line_no, e))?;
                }
                _ => return err(line_no, "expected: e U V [LABEL]"),
            },
            "l" => match rest.as_slice() {
                [v] | [v, _] => {
                    let label = rest.get(1).copied();
                    let vi = g.require_vertex(v).map_err(|e| graph_err(line_no, e))?;
                    g.add_loop(vi, label).map_err(|e| graph_err(line_no, e))?;
                }
                _ => return err(line_no, "expected: l V [LABEL]"),
            },
            "s" => match rest.as_slice() {
                [v] | [v, _] => {
                    let label = rest.get(1).copied();
                    let vi = g.require_vertex(v).map_err(|e| graph_err(line_no, e))?;
                    g.add_semi_edge(vi, label)
                        .map_err(|e| graph_err(line_no, e))?;
                }
                _ => return err(line_no, "expected: s V [LABEL]"),
            },
            other => return err(line_no, format!("unknown directive {other:?}")),
        }
    }
    Ok(g)
}

/// Serialize a graph to `.sgf` text (deterministic: vertices then links, each
/// in id order).
pub fn serialize(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str("v ");
        out.push_str(g.vertex_name(v));
        out.push('\n');
    }
    for l in g.links() {
        match l.kind {
            LinkKind::Edge => {
                out.push_str("e ");
                out.push_str(g.vertex_name(l.ends[0]));
                out.push(' ');
                out.push_str(g.vertex_name(l.ends[1]));
            }
            LinkKind::Loop => {
                out.push_str("l ");
                out.push_str(g.vertex_name(l.ends[0]));
            }
            LinkKind::SemiEdge => {
                out.push_str("s ");
                out.push_str(g.vertex_name(l.ends[0]));
            }
        }
        if let Some(label) = &l.label {
            out.push(' ');
            out.push_str(label);
        }
        out.push('\n');
    }
    out
}

/// Wrapper struct for pretty-printing a graph as `.sgf` with `Display`.
pub struct Sgf<'a>(pub &'a Graph);

impl fmt::Display for Sgf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "\
# a small test graph
v a
v b
v c
e a b ab
e b c
l c spin
s a
s a second
";
        let g = parse(text).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.link_count(), 5);
        assert_eq!(g.link_by_label("ab"), Some(crate::graph::LinkId(0)));
        let again = parse(&serialize(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn inline_comments_and_blank_lines() {
        let g = parse("v a # the only vertex\n\n  \ns a tail # dangling\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.link_count(), 1);
        assert_eq!(g.link_by_label("tail"), Some(crate::graph::LinkId(0)));
    }

    #[test]
    fn undeclared_vertex_reports_line() {
        let e = parse("v a\ne a b\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("b"));
    }

    #[test]
    fn unknown_directive_reports_line() {
        let e = parse("v a\nx a\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn self_edge_rejected_with_hint() {
        let e = parse("v a\ne a a\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("loop"));
    }

    #[test]
    fn arity_errors() {
        assert!(parse("v\n").is_err());
        assert!(parse("v a b\n").is_err());
        assert!(parse("v a\ne a\n").is_err());
        assert!(parse("v a\nl a x y\n").is_err());
    }
}
