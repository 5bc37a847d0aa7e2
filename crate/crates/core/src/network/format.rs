use std::fmt::Write as _;

use super::{Edge, NetworkInstance, SourceNode};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational};
use num_traits::{Signed, Zero};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (pos, ch) in content
        .char_indices()
        .chain(std::iter::once((content.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &content[s..pos],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    tokens
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn expect_len(&self, len: usize, usage: &str) -> Result<()> {
        if self.tokens.len() == len {
            return Ok(());
        }
        let column = self.tokens.get(len).map_or(self.end_column, |t| t.column);
        Err(self.error(column, format!("expected `{usage}`")))
    }

    fn keyword(&self, k: usize, word: &str, usage: &str) -> Result<()> {
        if self.tokens[k].text == word {
            Ok(())
        } else {
            Err(self.error(
                self.tokens[k].column,
                format!("expected `{word}` in `{usage}`"),
            ))
        }
    }

    fn number(&self, k: usize, what: &str) -> Result<Rational> {
        let t = &self.tokens[k];
        let value = parse_rational(t.text)
            .ok_or_else(|| self.error(t.column, format!("{what} `{}` is not a number", t.text)))?;
        if value.is_negative() {
            return Err(self.error(t.column, format!("{what} must be nonnegative")));
        }
        Ok(value)
    }

    fn node(&self, k: usize, nodes: Option<usize>) -> Result<usize> {
        let t = &self.tokens[k];
        let nodes =
            nodes.ok_or_else(|| self.error(t.column, "node referenced before the `nodes` line"))?;
        let id: usize = t.text.parse().map_err(|_| {
            self.error(
                t.column,
                format!("node id `{}` is not a positive integer", t.text),
            )
        })?;
        if id == 0 || id > nodes {
            return Err(self.error(
                t.column,
                format!("undeclared node {id} (nodes are 1..={nodes})"),
            ));
        }
        Ok(id)
    }
}

/// Parses the line-based instance format.
///
/// ```text
/// nodes 4
/// source 1 cost 2
/// terminal 4
/// edge 1 4 cap 1 cost 1/2
/// entropy 1
/// ```
pub fn parse_network(text: &str) -> Result<NetworkInstance> {
    let mut nodes: Option<usize> = None;
    let mut sources: Vec<SourceNode> = Vec::new();
    let mut terminals: Vec<usize> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut entropy: Option<Rational> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        last_line = idx + 1;
        let p = LineParser {
            line: idx + 1,
            tokens: tokenize(raw),
            end_column: raw.chars().count() + 1,
        };
        let Some(head) = p.tokens.first() else {
            continue;
        };
        match head.text {
            "nodes" => {
                p.expect_len(2, "nodes N")?;
                if nodes.is_some() {
                    return Err(p.error(head.column, "duplicate `nodes` line"));
                }
                let t = &p.tokens[1];
                let count: usize =
                    t.text.parse().ok().filter(|&c| c > 0).ok_or_else(|| {
                        p.error(t.column, "node count must be a positive integer")
                    })?;
                nodes = Some(count);
            }
            "source" => {
                p.expect_len(4, "source ID cost D")?;
                p.keyword(2, "cost", "source ID cost D")?;
                let node = p.node(1, nodes)?;
                if sources.iter().any(|s| s.node == node) {
                    return Err(p.error(
                        p.tokens[1].column,
                        format!("node {node} is already a source"),
                    ));
                }
                sources.push(SourceNode {
                    node,
                    storage_cost: p.number(3, "storage cost")?,
                });
            }
            "terminal" => {
                p.expect_len(2, "terminal ID")?;
                let node = p.node(1, nodes)?;
                if terminals.contains(&node) {
                    return Err(p.error(
                        p.tokens[1].column,
                        format!("node {node} is already a terminal"),
                    ));
                }
                terminals.push(node);
            }
            "edge" => {
                let usage = "edge U V cap C cost F";
                p.expect_len(7, usage)?;
                p.keyword(3, "cap", usage)?;
                p.keyword(5, "cost", usage)?;
                let tail = p.node(1, nodes)?;
                let head_id = p.node(2, nodes)?;
                if tail == head_id {
                    return Err(p.error(p.tokens[2].column, "self-loops are not allowed"));
                }
                edges.push(Edge {
                    tail,
                    head: head_id,
                    capacity: p.number(4, "capacity")?,
                    cost: p.number(6, "edge cost")?,
                });
            }
            "entropy" => {
                p.expect_len(2, "entropy H")?;
                if entropy.is_some() {
                    return Err(p.error(head.column, "duplicate `entropy` line"));
                }
                let h = p.number(1, "entropy")?;
                if h.is_zero() {
                    return Err(p.error(p.tokens[1].column, "entropy must be positive"));
                }
                entropy = Some(h);
            }
            other => return Err(p.error(head.column, format!("unknown directive `{other}`"))),
        }
    }
    let eof = |message: &str| Error::Parse {
        line: last_line + 1,
        column: 1,
        message: message.into(),
    };
    let nodes = nodes.ok_or_else(|| eof("missing `nodes` line"))?;
    let entropy = entropy.ok_or_else(|| eof("missing `entropy` line"))?;
    if sources.is_empty() {
        return Err(eof("no `source` lines"));
    }
    if terminals.is_empty() {
        return Err(eof("no `terminal` lines"));
    }
    NetworkInstance::new(nodes, edges, sources, terminals, entropy).map_err(|e| match e {
        Error::InvalidArgument(message) => eof(&message),
        other => other,
    })
}

/// Canonical text form: `nodes`, sources, terminals, edges, `entropy`.
pub fn serialize_network(net: &NetworkInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", net.node_count());
    for s in net.sources() {
        let _ = writeln!(
            out,
            "source {} cost {}",
            s.node,
            format_rational(&s.storage_cost)
        );
    }
    for t in net.terminals() {
        let _ = writeln!(out, "terminal {t}");
    }
    for e in net.edges() {
        let _ = writeln!(
            out,
            "edge {} {} cap {} cost {}",
            e.tail,
            e.head,
            format_rational(&e.capacity),
            format_rational(&e.cost)
        );
    }
    let _ = writeln!(out, "entropy {}", format_rational(net.entropy()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    const SMALL: &str = "# two sources\nnodes 3\nsource 1 cost 1\nsource 2 cost 1/3\nterminal 3\nedge 1 3 cap 2 cost 0.5   # direct\nedge 2 3 cap 2 cost 1\nentropy 2\n";

    #[test]
    fn parses_and_round_trips() {
        let net = parse_network(SMALL).unwrap();
        assert_eq!(net.source_count(), 2);
        assert_eq!(net.sources()[1].storage_cost, rational(1, 3));
        assert_eq!(net.edges()[0].cost, rational(1, 2));
        let text = serialize_network(&net);
        assert_eq!(parse_network(&text).unwrap(), net);
        assert_eq!(serialize_network(&parse_network(&text).unwrap()), text);
    }

    fn parse_error(text: &str) -> (usize, usize, String) {
        match parse_network(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_node_names_the_line() {
        let text = SMALL.replace("edge 2 3", "edge 2 7");
        let (line, column, message) = parse_error(&text);
        assert_eq!((line, column), (7, 8));
        assert!(message.contains("undeclared node 7"));
    }

    #[test]
    fn rejects_bad_numbers_and_missing_lines() {
        let (line, _, msg) = parse_error(&SMALL.replace("cap 2 cost 1\n", "cap -1 cost 1\n"));
        assert_eq!(line, 7);
        assert!(msg.contains("nonnegative"));
        let (line, _, msg) = parse_error(&SMALL.replace("entropy 2\n", ""));
        assert_eq!(line, 8);
        assert!(msg.contains("entropy"));
        let (_, _, msg) = parse_error(&SMALL.replace("edge 1 3", "edge 1 1"));
        assert!(msg.contains("self-loop"));
        let (line, column, _) = parse_error("nodes 2\nfrobnicate 1\n");
        assert_eq!((line, column), (2, 1));
        let (_, _, msg) = parse_error("source 1 cost 1\n");
        assert!(msg.contains("before"));
    }
}
