//! Line-oriented text format for graphs and half-edge mappings.
//!
//! Half-edges are numbered from 1 in creation order: `e` and `a` lines create
//! the half-edge at the first endpoint and then the one at the second, `p`
//! lines create the attached half-edge and then the free one, `h` lines
//! create one half-edge.

use super::{EdgeType, Multigraph, Shape};
use std::collections::HashMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown vertex id `{id}`")]
    Dangling { line: usize, id: String },
    #[error("line {line}: duplicate vertex id `{id}`")]
    Duplicate { line: usize, id: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

struct Attrs {
    color: u32,
    etype: Option<EdgeType>,
}

fn parse_attrs(line: usize, toks: &[&str], allow_type: bool) -> Result<Attrs, ParseError> {
    let mut attrs = Attrs {
        color: 0,
        etype: None,
    };
    for tok in toks {
        if let Some(rest) = tok.strip_prefix('c') {
            attrs.color = rest
                .parse()
                .map_err(|_| syntax(line, format!("bad color `{tok}`")))?;
        } else if let (true, Some(rest)) = (allow_type, tok.strip_prefix('t')) {
            attrs.etype = Some(match rest {
                "halvable" => EdgeType::Halvable,
                "undirected" => EdgeType::Undirected,
                _ => return Err(syntax(line, format!("bad edge type `{tok}`"))),
            });
        } else {
            return Err(syntax(line, format!("unexpected token `{tok}`")));
        }
    }
    Ok(attrs)
}

/// Parses a graph document. Edges declared with `e` are halvable unless they
/// carry `tundirected`.
pub fn parse_graph(text: &str) -> Result<Multigraph, ParseError> {
    let mut g = Multigraph::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let vertex = |k: usize, ids: &HashMap<String, usize>| -> Result<usize, ParseError> {
            let id = toks
                .get(k)
                .ok_or_else(|| syntax(line, format!("`{}` needs more arguments", toks[0])))?;
            ids.get(*id).copied().ok_or_else(|| ParseError::Dangling {
                line,
                id: id.to_string(),
            })
        };
        match toks[0] {
            "v" => {
                let id = toks
                    .get(1)
                    .ok_or_else(|| syntax(line, "`v` needs an id"))?
                    .to_string();
                let attrs = parse_attrs(line, &toks[2..], false)?;
                if ids.contains_key(&id) {
                    return Err(ParseError::Duplicate { line, id });
                }
                let v = g.add_vertex(attrs.color);
                ids.insert(id, v);
            }
            "e" => {
                let u = vertex(1, &ids)?;
                let v = vertex(2, &ids)?;
                let attrs = parse_attrs(line, &toks[3..], true)?;
                g.add_edge(u, v, attrs.color, attrs.etype.unwrap_or(EdgeType::Halvable));
            }
            "a" => {
                let u = vertex(1, &ids)?;
                let v = vertex(2, &ids)?;
                let attrs = parse_attrs(line, &toks[3..], false)?;
                g.add_arc(u, v, attrs.color);
            }
            "h" => {
                let u = vertex(1, &ids)?;
                let attrs = parse_attrs(line, &toks[2..], false)?;
                g.add_half_edge(u, attrs.color, EdgeType::Halvable);
            }
            "p" => {
                let u = vertex(1, &ids)?;
                let attrs = parse_attrs(line, &toks[2..], true)?;
                g.add_pendant(u, attrs.color, attrs.etype.unwrap_or(EdgeType::Halvable));
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    debug_assert!(g.validate().is_ok());
    Ok(g)
}

fn push_attrs(out: &mut String, color: u32, etype: EdgeType) {
    if color != 0 {
        let _ = write!(out, " c{color}");
    }
    if etype == EdgeType::Undirected {
        out.push_str(" tundirected");
    }
}

/// Serializes a graph. Vertices are written as `1..=n`. Edges appear in the
/// order of their smaller half-edge index, oriented so that reparsing yields
/// the same half-edge numbering whenever the graph was built edge by edge.
pub fn serialize_graph(g: &Multigraph) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        let _ = write!(out, "v {}", v + 1);
        if g.vertex_color(v) != 0 {
            let _ = write!(out, " c{}", g.vertex_color(v));
        }
        out.push('\n');
    }
    for h in g.edge_reps() {
        let he = g.half_edge(h);
        match g.shape(h) {
            Shape::Normal | Shape::Loop => {
                let u = he.vertex.unwrap() + 1;
                let w = g.opposite_vertex(h).unwrap() + 1;
                match he.etype {
                    EdgeType::Tail => {
                        let _ = write!(out, "a {u} {w}");
                        push_attrs(&mut out, he.color, EdgeType::Halvable);
                    }
                    EdgeType::Head => {
                        let _ = write!(out, "a {w} {u}");
                        push_attrs(&mut out, he.color, EdgeType::Halvable);
                    }
                    t => {
                        let _ = write!(out, "e {u} {w}");
                        push_attrs(&mut out, he.color, t);
                    }
                }
            }
            Shape::Pendant | Shape::Free => {
                let p = g.partner(h).unwrap();
                let at = if g.shape(h) == Shape::Pendant { h } else { p };
                let _ = write!(out, "p {}", g.vertex_of(at).unwrap() + 1);
                push_attrs(&mut out, he.color, g.half_edge(at).etype);
            }
            Shape::Standalone => {
                let _ = write!(out, "h {}", he.vertex.unwrap() + 1);
                push_attrs(&mut out, he.color, EdgeType::Halvable);
            }
        }
        out.push('\n');
    }
    if out.ends_with('\n') {
        out.pop();
    }
    out
}

/// Parses `m <g-half> <h-half>` lines (1-based) into a 0-based list of pairs.
pub fn parse_mapping(text: &str) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks[0] != "m" || toks.len() != 3 {
            return Err(syntax(line, "expected `m <g-half> <h-half>`"));
        }
        let a: usize = toks[1].parse().map_err(|_| syntax(line, "bad half-edge id"))?;
        let b: usize = toks[2].parse().map_err(|_| syntax(line, "bad half-edge id"))?;
        if a == 0 || b == 0 {
            return Err(syntax(line, "half-edge ids start at 1"));
        }
        out.push((a - 1, b - 1));
    }
    Ok(out)
}

/// Writes a half-edge map as `m` lines (1-based).
pub fn serialize_mapping(map: &[usize]) -> String {
    let mut out = String::new();
    for (a, b) in map.iter().enumerate() {
        let _ = writeln!(out, "m {} {}", a + 1, b + 1);
    }
    out
}

/// A certificate as read from text: group elements as half-edge
/// permutations and the projection as `m` pairs, all 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateText {
    pub elements: Vec<Vec<usize>>,
    pub projection: Vec<(usize, usize)>,
}

/// Writes group elements as `g <id>: <images>` lines followed by the
/// projection as `m` lines. Ids and half-edges are 1-based.
pub fn serialize_certificate(elements: &[Vec<usize>], projection: &[usize]) -> String {
    let mut out = String::new();
    for (i, perm) in elements.iter().enumerate() {
        let _ = write!(out, "g {}:", i + 1);
        for &y in perm {
            let _ = write!(out, " {}", y + 1);
        }
        out.push('\n');
    }
    out.push_str(&serialize_mapping(projection));
    out
}

/// Parses the output of [`serialize_certificate`].
pub fn parse_certificate(text: &str) -> Result<CertificateText, ParseError> {
    let mut cert = CertificateText {
        elements: Vec::new(),
        projection: Vec::new(),
    };
    let mut maps = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            maps.push('\n');
            continue;
        }
        if let Some(rest) = content.strip_prefix("g ") {
            let (id, perm) = rest
                .split_once(':')
                .ok_or_else(|| syntax(line, "expected `g <id>: <images>`"))?;
            let id: usize = id.trim().parse().map_err(|_| syntax(line, "bad element id"))?;
            if id != cert.elements.len() + 1 {
                return Err(syntax(line, "element ids must run 1, 2, ..."));
            }
            let images = perm
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(y) if y > 0 => Ok(y - 1),
                    _ => Err(syntax(line, format!("bad half-edge id `{t}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            cert.elements.push(images);
            maps.push('\n');
        } else {
            maps.push_str(raw);
            maps.push('\n');
        }
    }
    cert.projection = parse_mapping(&maps)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_examples() {
        let k2 = parse_graph("v 1\nv 2\ne 1 2").unwrap();
        assert_eq!(k2.vertex_count(), 2);
        assert_eq!(k2.edge_count(), 1);
        assert_eq!(k2.half_edge(0).etype, EdgeType::Halvable);

        let lp = parse_graph("v 1\ne 1 1").unwrap();
        assert_eq!(lp.degree(0), 2);
        assert_eq!(lp.shape(0), Shape::Loop);

        let half = parse_graph("v 1\nh 1 c3").unwrap();
        assert_eq!(half.standalone_count(), 1);
        assert_eq!(half.half_edge(0).color, 3);
    }

    #[test]
    fn serializes_small_examples() {
        let k2 = parse_graph("v 1\nv 2\ne 1 2").unwrap();
        assert_eq!(serialize_graph(&k2), "v 1\nv 2\ne 1 2");
        let lp = parse_graph("v 1\ne 1 1").unwrap();
        assert_eq!(serialize_graph(&lp), "v 1\ne 1 1");
        let arc = parse_graph("v 1\nv 2\na 1 2 c5").unwrap();
        assert!(serialize_graph(&arc).contains("a 1 2 c5"));
        let mixed = "v 1 c2\nv 2\ne 1 2 tundirected\np 2 c1\nh 1 c3\na 2 1";
        let g = parse_graph(mixed).unwrap();
        assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn reports_errors_with_lines() {
        assert_eq!(
            parse_graph("v 1\ne 1 2"),
            Err(ParseError::Dangling {
                line: 2,
                id: "2".into()
            })
        );
        assert!(matches!(
            parse_graph("v 1\nv 1"),
            Err(ParseError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("# c\nq 1"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("v 1\ne 1 1 tweird"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn certificate_lines() {
        let text = serialize_certificate(&[vec![0, 1], vec![1, 0]], &[0, 0]);
        assert_eq!(text, "g 1: 1 2\ng 2: 2 1\nm 1 1\nm 2 1\n");
        let cert = parse_certificate(&text).unwrap();
        assert_eq!(cert.elements, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(cert.projection, vec![(0, 0), (1, 0)]);
        assert!(parse_certificate("g 2: 1\n").is_err());
        assert!(parse_certificate("g 1: 0\n").is_err());
    }

    #[test]
    fn mapping_lines() {
        let m = parse_mapping("m 1 2\n# x\nm 2 1\n").unwrap();
        assert_eq!(m, vec![(0, 1), (1, 0)]);
        assert_eq!(serialize_mapping(&[1, 0]), "m 1 2\nm 2 1\n");
        assert!(parse_mapping("m 0 1").is_err());
    }
}
