//! Labeled undirected graphs, the JSON Lines collection format, and seeded
//! random generation.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// An undirected edge between two node indices. Stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: String,
}

impl Edge {
    pub fn new(u: usize, v: usize, label: impl Into<String>) -> Self {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        Edge { u, v, label: label.into() }
    }
}

/// An undirected graph with one string label per node and per edge.
///
/// Fields are public so that malformed graphs can be represented and
/// reported by [`LabeledGraph::validate`]; [`LabeledGraph::new`] is the
/// checked constructor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    pub id: String,
    pub node_labels: Vec<String>,
    pub edges: Vec<Edge>,
}

impl LabeledGraph {
    /// Builds a graph, canonicalizing every edge to `u < v`, and rejects it
    /// if any invariant is broken.
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        node_labels: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let g = LabeledGraph {
            id: id.into(),
            node_labels: node_labels.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(|e| Edge::new(e.u, e.v, e.label)).collect(),
        };
        g.validate().map_err(|violations| Error::InvalidGraph {
            id: g.id.clone(),
            violations,
        })?;
        Ok(g)
    }

    pub fn empty(id: impl Into<String>) -> Self {
        LabeledGraph { id: id.into(), node_labels: Vec::new(), edges: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for e in &self.edges {
            if e.u < deg.len() {
                deg[e.u] += 1;
            }
            if e.v < deg.len() {
                deg[e.v] += 1;
            }
        }
        deg
    }

    /// Checks every structural invariant and lists all violations found.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let n = self.node_count();
        let mut seen = HashSet::new();
        let mut violations = Vec::new();
        for e in &self.edges {
            if e.u >= n || e.v >= n {
                violations.push(Violation::EndpointOutOfRange { u: e.u, v: e.v, nodes: n });
            }
            if e.u == e.v {
                violations.push(Violation::SelfLoop { node: e.u });
            } else if e.u > e.v {
                violations.push(Violation::NotCanonical { u: e.u, v: e.v });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                violations.push(Violation::DuplicateEdge { u: key.0, v: key.1 });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Same node labels and edge set, ignoring the id and edge order.
    pub fn same_structure(&self, other: &LabeledGraph) -> bool {
        if self.node_labels != other.node_labels || self.edges.len() != other.edges.len() {
            return false;
        }
        let a: BTreeSet<_> = self.edges.iter().collect();
        let b: BTreeSet<_> = other.edges.iter().collect();
        a == b
    }

    /// One JSON object on a single line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        let wire = WireGraph {
            id: self.id.clone(),
            nodes: self.node_labels.clone(),
            edges: self.edges.iter().map(|e| (e.u, e.v, e.label.clone())).collect(),
        };
        serde_json::to_string(&wire).expect("graph serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGraph {
    id: String,
    nodes: Vec<String>,
    edges: Vec<(usize, usize, String)>,
}

/// The searchable database: an ordered list of graphs with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCollection {
    pub graphs: Vec<LabeledGraph>,
    pub source: String,
}

impl GraphCollection {
    pub fn new(graphs: Vec<LabeledGraph>, source: impl Into<String>) -> Result<Self> {
        let mut ids = HashSet::new();
        for g in &graphs {
            if !ids.insert(g.id.as_str()) {
                return Err(Error::DuplicateId(g.id.clone()));
            }
        }
        Ok(GraphCollection { graphs, source: source.into() })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.graphs.iter().position(|g| g.id == id)
    }

    pub fn get(&self, id: &str) -> Option<&LabeledGraph> {
        self.graphs.iter().find(|g| g.id == id)
    }

    /// Parses a JSON Lines document. Blank lines are rejected.
    pub fn parse(text: &str, source: impl Into<String>) -> Result<Self> {
        let mut graphs = Vec::new();
        let mut ids = HashSet::new();
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return GraphCollection::new(graphs, source);
        }
        for (idx, raw) in body.split('\n').enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() {
                return Err(Error::Parse { line, message: "blank line".into() });
            }
            let wire: WireGraph = serde_json::from_str(raw)
                .map_err(|e| Error::Parse { line, message: e.to_string() })?;
            let g = LabeledGraph {
                id: wire.id,
                node_labels: wire.nodes,
                edges: wire.edges.into_iter().map(|(u, v, l)| Edge::new(u, v, l)).collect(),
            };
            if let Err(violations) = g.validate() {
                let message = violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(Error::Parse { line, message });
            }
            if !ids.insert(g.id.clone()) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate graph id `{}`", g.id),
                });
            }
            graphs.push(g);
        }
        Ok(GraphCollection { graphs, source: source.into() })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.display().to_string())
    }

    /// Serializes to JSON Lines, one graph per newline-terminated line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for g in &self.graphs {
            writeln!(out, "{}", g.to_json_line()).unwrap();
        }
        out
    }
}

/// Parameters for seeded random graph generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphGenerator {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub node_alphabet: Vec<String>,
    pub edge_alphabet: Vec<String>,
    pub edge_density: f64,
}

impl Default for GraphGenerator {
    fn default() -> Self {
        GraphGenerator {
            min_nodes: 4,
            max_nodes: 10,
            node_alphabet: vec!["C".into(), "N".into(), "O".into()],
            edge_alphabet: vec!["1".into(), "2".into()],
            edge_density: 0.3,
        }
    }
}

impl GraphGenerator {
    pub fn with_nodes(mut self, min: usize, max: usize) -> Self {
        self.min_nodes = min;
        self.max_nodes = max;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.node_alphabet.is_empty() || self.edge_alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if self.max_nodes < self.min_nodes {
            return Err(Error::InvalidArgument(format!(
                "node range {}..{} is empty",
                self.min_nodes, self.max_nodes
            )));
        }
        if self.max_nodes > u32::MAX as usize - 1 {
            return Err(Error::InvalidArgument("node range too large".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return Err(Error::InvalidArgument(format!(
                "edge density {} outside [0, 1]",
                self.edge_density
            )));
        }
        Ok(())
    }

    /// Generates one graph with the given id from `seed`.
    pub fn generate(&self, id: impl Into<String>, seed: u64) -> Result<LabeledGraph> {
        self.check()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(self.min_nodes as u32..=self.max_nodes as u32) as usize;
        let node_labels = (0..n).map(|_| pick(&mut rng, &self.node_alphabet)).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(self.edge_density) {
                    edges.push(Edge { u, v, label: pick(&mut rng, &self.edge_alphabet) });
                }
            }
        }
        Ok(LabeledGraph { id: id.into(), node_labels, edges })
    }

    /// Generates `count` graphs with ids `g0..g{count-1}`.
    pub fn collection(&self, seed: u64, count: usize) -> Result<GraphCollection> {
        let graphs = (0..count)
            .map(|i| self.generate(format!("g{i}"), mix_seed(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphCollection { graphs, source: "generated".into() })
    }

    /// Applies `edits` random relabelings or edge toggles to a copy of `g`.
    pub fn perturb(&self, g: &LabeledGraph, id: impl Into<String>, seed: u64, edits: usize) -> Result<LabeledGraph> {
        self.check()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = g.clone();
        out.id = id.into();
        let n = out.node_count();
        for _ in 0..edits {
            if n == 0 {
                break;
            }
            if n < 2 || rng.gen_bool(0.5) {
                let i = rng.gen_range(0..n as u32) as usize;
                out.node_labels[i] = pick(&mut rng, &self.node_alphabet);
            } else {
                let u = rng.gen_range(0..n as u32) as usize;
                let mut v = rng.gen_range(0..(n - 1) as u32) as usize;
                if v >= u {
                    v += 1;
                }
                let (u, v) = (u.min(v), u.max(v));
                match out.edges.iter().position(|e| e.u == u && e.v == v) {
                    Some(pos) => {
                        out.edges.remove(pos);
                    }
                    None => out.edges.push(Edge { u, v, label: pick(&mut rng, &self.edge_alphabet) }),
                }
            }
        }
        Ok(out)
    }
}

/// Generates a single graph; the id is `r{seed}`.
pub fn random_graph(
    seed: u64,
    node_count_range: (usize, usize),
    node_alphabet: &[&str],
    edge_alphabet: &[&str],
    edge_density: f64,
) -> Result<LabeledGraph> {
    let generator = GraphGenerator {
        min_nodes: node_count_range.0,
        max_nodes: node_count_range.1,
        node_alphabet: node_alphabet.iter().map(|s| s.to_string()).collect(),
        edge_alphabet: edge_alphabet.iter().map(|s| s.to_string()).collect(),
        edge_density,
    };
    generator.generate(format!("r{seed}"), seed)
}

fn pick(rng: &mut ChaCha8Rng, alphabet: &[String]) -> String {
    alphabet[rng.gen_range(0..alphabet.len() as u32) as usize].clone()
}

/// SplitMix64 finalizer over `seed ^ stream`, for deriving independent
/// per-item seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_line() {
        let c = GraphCollection::parse(r#"{"id":"g1","nodes":["C"],"edges":[]}"#, "t").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.graphs[0].node_count(), 1);
        assert_eq!(c.graphs[0].edge_count(), 0);
    }

    #[test]
    fn parses_labeled_edge() {
        let c = GraphCollection::parse(r#"{"id":"g2","nodes":["C","O"],"edges":[[0,1,"1"]]}"#, "t").unwrap();
        let g = &c.graphs[0];
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges, vec![Edge::new(0, 1, "1")]);
    }

    #[test]
    fn self_loop_reports_line() {
        let err = GraphCollection::parse(r#"{"id":"g3","nodes":["C"],"edges":[[0,0,"1"]]}"#, "t").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("self-loop"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\"id\":\"a\",\"nodes\":[],\"edges\":[]}\n{\"id\":\"a\",\"nodes\":[],\"edges\":[]}\n";
        assert!(matches!(GraphCollection::parse(text, "t"), Err(Error::Parse { line: 2, .. })));

        let text = "{\"id\":\"a\",\"nodes\":[],\"edges\":[]}\n\n{\"id\":\"b\",\"nodes\":[],\"edges\":[]}\n";
        assert!(matches!(GraphCollection::parse(text, "t"), Err(Error::Parse { line: 2, .. })));

        let text = "{\"id\":\"a\",\"nodes\":[\"C\"],\"edges\":[[0,3,\"1\"]]}";
        assert!(matches!(GraphCollection::parse(text, "t"), Err(Error::Parse { line: 1, .. })));

        let text = "{\"id\":\"a\",\"nodes\":[\"C\",\"C\"],\"edges\":[[0,1,\"1\"],[1,0,\"2\"]]}";
        let err = GraphCollection::parse(text, "t").unwrap_err();
        assert!(err.to_string().contains("duplicate edge"), "{err}");

        assert!(matches!(GraphCollection::parse("not json", "t"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validate_lists_violations() {
        assert!(LabeledGraph::empty("e").validate().is_ok());

        let g = LabeledGraph {
            id: "x".into(),
            node_labels: vec!["C".into(), "C".into()],
            edges: vec![Edge { u: 1, v: 3, label: "1".into() }],
        };
        let v = g.validate().unwrap_err();
        assert!(v.iter().any(|v| v.to_string().starts_with("endpoint out of range")));

        let g = LabeledGraph {
            id: "x".into(),
            node_labels: vec!["C".into(), "C".into()],
            edges: vec![Edge::new(0, 1, "1"), Edge::new(0, 1, "1")],
        };
        assert_eq!(g.validate().unwrap_err(), vec![Violation::DuplicateEdge { u: 0, v: 1 }]);
    }

    #[test]
    fn generator_edge_cases() {
        let g = random_graph(1, (0, 0), &["C"], &["1"], 0.5).unwrap();
        assert_eq!(g.node_count(), 0);

        let g = random_graph(7, (5, 5), &["C"], &["1"], 1.0).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 10);

        let a = random_graph(42, (3, 9), &["C", "N"], &["1", "2"], 0.4).unwrap();
        let b = random_graph(42, (3, 9), &["C", "N"], &["1", "2"], 0.4).unwrap();
        assert_eq!(a, b);

        assert!(matches!(random_graph(1, (1, 2), &[], &["1"], 0.5), Err(Error::EmptyAlphabet)));
        assert!(random_graph(1, (3, 2), &["C"], &["1"], 0.5).is_err());
    }

    #[test]
    fn generated_collection_round_trips() {
        let c = GraphGenerator::default().collection(3, 25).unwrap();
        let text = c.to_jsonl();
        let back = GraphCollection::parse(&text, "generated").unwrap();
        assert_eq!(c, back);
        assert_eq!(back.to_jsonl(), text);
    }
}
