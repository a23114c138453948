//! The graph description language and graph file I/O.
//!
//! Grammar: `path(n) | star(k) | cycle(n) | complete(n) | theta(k,l) |
//! prod(spec, spec, ...) | file:PATH`. Graphs built from specs retain their
//! construction metadata; the certifier's product detection reads only that
//! metadata, never raw edge lists.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Graph, VertexLabel};

/// A family descriptor. `Prod` holds the flattened factor list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GraphSpec {
    Path(u32),
    Star(u32),
    Cycle(u32),
    Complete(u32),
    Theta(u32, u32),
    Prod(Vec<GraphSpec>),
    File(String),
}

impl GraphSpec {
    /// Flattens into a factor list; a non-product spec is its own single
    /// factor.
    pub fn factor_list(&self) -> Vec<GraphSpec> {
        match self {
            GraphSpec::Prod(fs) => fs.iter().flat_map(|f| f.factor_list()).collect(),
            other => vec![other.clone()],
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Path(n) => write!(f, "path({n})"),
            GraphSpec::Star(k) => write!(f, "star({k})"),
            GraphSpec::Cycle(n) => write!(f, "cycle({n})"),
            GraphSpec::Complete(n) => write!(f, "complete({n})"),
            GraphSpec::Theta(k, l) => write!(f, "theta({k},{l})"),
            GraphSpec::Prod(fs) => {
                write!(f, "prod(")?;
                for (i, s) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")")
            }
            GraphSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, ch: char) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{ch}`")))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len()
            && self.text[self.pos..]
                .starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            self.pos += 1;
        }
        self.text[start..self.pos].to_string()
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn spec(&mut self) -> Result<GraphSpec> {
        self.skip_ws();
        if self.text[self.pos..].starts_with("file:") {
            self.pos += 5;
            let rest = &self.text[self.pos..];
            // The path runs to the next comma or closing paren at this level.
            let end = rest
                .find(|c| c == ',' || c == ')')
                .unwrap_or(rest.len());
            let path = rest[..end].trim().to_string();
            if path.is_empty() {
                return Err(self.err("empty file path"));
            }
            self.pos += end;
            return Ok(GraphSpec::File(path));
        }
        let name = self.ident();
        if name.is_empty() {
            return Err(self.err("expected a family name"));
        }
        self.eat('(')?;
        let spec = match name.as_str() {
            "path" => GraphSpec::Path(self.number()?),
            "star" => GraphSpec::Star(self.number()?),
            "cycle" => GraphSpec::Cycle(self.number()?),
            "complete" => GraphSpec::Complete(self.number()?),
            "theta" => {
                let k = self.number()?;
                self.eat(',')?;
                let l = self.number()?;
                GraphSpec::Theta(k, l)
            }
            "prod" => {
                let mut factors = vec![self.spec()?];
                loop {
                    self.skip_ws();
                    if self.text[self.pos..].starts_with(',') {
                        self.pos += 1;
                        factors.push(self.spec()?);
                    } else {
                        break;
                    }
                }
                GraphSpec::Prod(factors)
            }
            other => return Err(self.err(format!("unknown family `{other}`"))),
        };
        self.eat(')')?;
        Ok(spec)
    }
}

/// Parses a spec string. Errors carry the byte position of the failure.
pub fn parse_spec(text: &str) -> Result<GraphSpec> {
    let mut p = Parser { text, pos: 0 };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(spec)
}

/// Materializes a spec into a graph. Product specs fold factors onto the
/// unit graph so that a p-factor product gets flat p-tuple labels.
pub fn build(spec: &GraphSpec) -> Result<Graph> {
    match spec {
        GraphSpec::Path(n) => graph::path(*n),
        GraphSpec::Star(k) => graph::star(*k),
        GraphSpec::Cycle(n) => graph::cycle(*n),
        GraphSpec::Complete(n) => graph::complete(*n),
        GraphSpec::Theta(k, l) => graph::theta(*k, *l),
        GraphSpec::Prod(factors) => {
            let mut g = Graph::unit();
            for f in factors {
                let h = build(f)?;
                g = graph::cartesian_product(&g, &h)?;
            }
            Ok(g)
        }
        GraphSpec::File(path) => read_graph_json(Path::new(path)),
    }
}

/// Convenience: parse then build.
pub fn build_str(text: &str) -> Result<Graph> {
    build(&parse_spec(text)?)
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

fn label_from_str(s: &str) -> VertexLabel {
    match s.parse::<u64>() {
        Ok(i) => VertexLabel::int(i),
        Err(_) => VertexLabel::name(s),
    }
}

/// Reads `{"vertices": ["a", ...], "edges": [["a","b"], ...]}`.
pub fn read_graph_json(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let labels: Vec<VertexLabel> = file.vertices.iter().map(|s| label_from_str(s)).collect();
    let pairs: Vec<(VertexLabel, VertexLabel)> = file
        .edges
        .iter()
        .map(|(a, b)| (label_from_str(a), label_from_str(b)))
        .collect();
    Graph::from_labelled_edges(labels, &pairs)
        .map(|g| g.with_spec(GraphSpec::File(path.display().to_string())))
}

pub fn write_graph_json(g: &Graph, path: &Path) -> Result<()> {
    let file = GraphFile {
        vertices: g.labels().iter().map(|l| l.to_string()).collect(),
        edges: g
            .edges()
            .iter()
            .map(|&(a, b)| (g.label(a).to_string(), g.label(b).to_string()))
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_theta() {
        let g = build_str("theta(5,4)").unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 8);
    }

    #[test]
    fn parses_product_of_stars() {
        let g = build_str("prod(star(2),star(2))").unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(
            g.spec().unwrap().factor_list(),
            vec![GraphSpec::Star(2), GraphSpec::Star(2)]
        );
    }

    #[test]
    fn rejects_theta_with_k_below_l() {
        let err = build_str("theta(3,4)").unwrap_err();
        assert!(err.to_string().contains("k >= l"), "{err}");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_spec("path(x)") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_spec("path(3) junk").is_err());
        assert!(parse_spec("blob(3)").is_err());
    }

    #[test]
    fn nested_products_flatten() {
        let s = parse_spec("prod(prod(path(2),path(3)),star(2))").unwrap();
        assert_eq!(
            s.factor_list(),
            vec![GraphSpec::Path(2), GraphSpec::Path(3), GraphSpec::Star(2)]
        );
        let g = build(&s).unwrap();
        assert_eq!(g.vertex_count(), 2 * 3 * 3);
    }

    #[test]
    fn graph_json_round_trip() {
        let dir = std::env::temp_dir().join("percert-dsl-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c5.json");
        let g = graph::cycle(5).unwrap();
        write_graph_json(&g, &path).unwrap();
        let h = read_graph_json(&path).unwrap();
        assert_eq!(g.vertex_count(), h.vertex_count());
        assert_eq!(g.edges(), h.edges());
    }
}
