//! Labelled simple graphs, the standard families, Cartesian products, and
//! degree statistics. Every other module consumes these types.
//!
//! Vertex labels are tuples of atoms; a k-fold product vertex carries a flat
//! k-tuple. The vertex order and the edge order of a graph are fixed at
//! construction and every downstream structure (edge sets, colourings,
//! coefficient layouts) is keyed to them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::dsl::GraphSpec;
use crate::error::{Error, Result};

/// One component of a vertex label: an integer index or a symbolic name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Int(u64),
    Name(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(i) => write!(f, "{i}"),
            Atom::Name(s) => write!(f, "{s}"),
        }
    }
}

/// A vertex label: a path of atoms. Product vertices concatenate the factor
/// paths, so a k-fold product vertex has a k-component path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexLabel(pub Vec<Atom>);

impl VertexLabel {
    pub fn int(i: u64) -> Self {
        VertexLabel(vec![Atom::Int(i)])
    }

    pub fn name(s: impl Into<String>) -> Self {
        VertexLabel(vec![Atom::Name(s.into())])
    }

    pub fn concat(&self, other: &VertexLabel) -> VertexLabel {
        let mut path = self.0.clone();
        path.extend(other.0.iter().cloned());
        VertexLabel(path)
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.len() {
            1 => write!(f, "{}", self.0[0]),
            _ => {
                write!(f, "(")?;
                for (i, a) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite labelled simple graph with a fixed vertex order and a fixed,
/// sorted edge order.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<VertexLabel>,
    index: HashMap<VertexLabel, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    spec: Option<GraphSpec>,
    theta: Option<ThetaSpec>,
}

impl Graph {
    fn assemble(labels: Vec<VertexLabel>, raw_edges: Vec<(usize, usize)>) -> Result<Graph> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (a, b) in raw_edges {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "loop at vertex {}",
                    labels[a]
                )));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("multi-edge".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push(b);
            adj[b].push(a);
            edge_index.insert((a, b), i);
        }
        for neighbours in &mut adj {
            neighbours.sort_unstable();
        }
        Ok(Graph {
            labels,
            index,
            adj,
            edges,
            edge_index,
            spec: None,
            theta: None,
        })
    }

    /// Builds a graph from explicit labels and label pairs.
    pub fn from_labelled_edges(
        labels: Vec<VertexLabel>,
        pairs: &[(VertexLabel, VertexLabel)],
    ) -> Result<Graph> {
        let g = Graph::assemble(labels, Vec::new())?;
        let mut edges = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let ia = g
                .index_of(a)
                .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
            let ib = g
                .index_of(b)
                .ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
            edges.push((ia, ib));
        }
        Graph::assemble(g.labels, edges)
    }

    /// The one-vertex graph whose label path is empty: the identity for
    /// `cartesian_product` under label concatenation.
    pub fn unit() -> Graph {
        let mut g = Graph::assemble(vec![VertexLabel(Vec::new())], Vec::new()).unwrap();
        g.spec = Some(GraphSpec::Prod(Vec::new()));
        g
    }

    pub fn with_spec(mut self, spec: GraphSpec) -> Graph {
        self.spec = Some(spec);
        self
    }

    pub fn spec(&self) -> Option<&GraphSpec> {
        self.spec.as_ref()
    }

    pub fn theta_spec(&self) -> Option<&ThetaSpec> {
        self.theta.as_ref()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &VertexLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .min()
            .unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        for v in 0..self.vertex_count() {
            *counts.entry(self.degree(v)).or_insert(0u64) += 1;
        }
        DegreeHistogram { counts }
    }

    fn component_ids(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = next;
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbours(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        let comp = self.component_ids();
        comp.iter().all(|&c| c == 0)
    }

    /// Number of connected components that contain at least one edge. This is
    /// exactly the minimum 1-percolating set size.
    pub fn edge_component_count(&self) -> u64 {
        let comp = self.component_ids();
        let mut with_edge = std::collections::BTreeSet::new();
        for &(a, _) in &self.edges {
            with_edge.insert(comp[a]);
        }
        with_edge.len() as u64
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1
            && self.edge_count() == self.vertex_count() - 1
            && self.is_connected()
    }
}

// ---------------------------------------------------------------------------
// Standard families
// ---------------------------------------------------------------------------

/// Path on `n >= 1` vertices labelled 0..n-1 in order.
pub fn path(n: u32) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("path requires n >= 1".into()));
    }
    let labels = (0..n as u64).map(VertexLabel::int).collect();
    let edges = (0..n as usize - 1).map(|i| (i, i + 1)).collect();
    Ok(Graph::assemble(labels, edges)?.with_spec(GraphSpec::Path(n)))
}

/// Star with `k >= 1` leaves; the centre is labelled 0, the leaves 1..k.
pub fn star(k: u32) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameter("star requires k >= 1".into()));
    }
    let labels = (0..=k as u64).map(VertexLabel::int).collect();
    let edges = (1..=k as usize).map(|i| (0, i)).collect();
    Ok(Graph::assemble(labels, edges)?.with_spec(GraphSpec::Star(k)))
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: u32) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycle requires n >= 3".into()));
    }
    let labels = (0..n as u64).map(VertexLabel::int).collect();
    let mut edges: Vec<(usize, usize)> = (0..n as usize - 1).map(|i| (i, i + 1)).collect();
    edges.push((n as usize - 1, 0));
    Ok(Graph::assemble(labels, edges)?.with_spec(GraphSpec::Cycle(n)))
}

/// Complete graph on `n >= 1` vertices.
pub fn complete(n: u32) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("complete requires n >= 1".into()));
    }
    let labels = (0..n as u64).map(VertexLabel::int).collect();
    let mut edges = Vec::new();
    for a in 0..n as usize {
        for b in a + 1..n as usize {
            edges.push((a, b));
        }
    }
    Ok(Graph::assemble(labels, edges)?.with_spec(GraphSpec::Complete(n)))
}

/// Theta graph: two vertices joined by three internally disjoint paths of
/// lengths 1, l-1 and k-1. Requires `k >= l >= 3`. The graph carries its
/// canonical index labelling.
pub fn theta(k: u32, l: u32) -> Result<Graph> {
    let spec = ThetaSpec::new(k, l)?;
    let labels: Vec<VertexLabel> = spec.vertices().iter().map(|i| spec.vertex_label(*i)).collect();
    let mut g = Graph::assemble(labels, Vec::new())?;
    let mut edges = Vec::new();
    for (a, b, _) in spec.edges_with_alpha() {
        let ia = g.index_of(&spec.vertex_label(a)).unwrap();
        let ib = g.index_of(&spec.vertex_label(b)).unwrap();
        edges.push((ia, ib));
    }
    g = Graph::assemble(g.labels, edges)?;
    g.spec = Some(GraphSpec::Theta(k, l));
    g.theta = Some(spec);
    Ok(g)
}

/// Cartesian product: vertex set V(F) x V(H) with moves in exactly one
/// coordinate along an edge of that factor. Labels are flattened tuples, so
/// iterated products stay flat.
pub fn cartesian_product(f: &Graph, h: &Graph) -> Result<Graph> {
    if f.vertex_count() == 0 || h.vertex_count() == 0 {
        return Err(Error::InvalidParameter(
            "cartesian product of an empty graph".into(),
        ));
    }
    let hn = h.vertex_count();
    let mut labels = Vec::with_capacity(f.vertex_count() * hn);
    for fl in f.labels() {
        for hl in h.labels() {
            labels.push(fl.concat(hl));
        }
    }
    let mut edges = Vec::new();
    for j in 0..hn {
        for &(a, b) in f.edges() {
            edges.push((a * hn + j, b * hn + j));
        }
    }
    for i in 0..f.vertex_count() {
        for &(x, y) in h.edges() {
            edges.push((i * hn + x, i * hn + y));
        }
    }
    let mut g = Graph::assemble(labels, edges)?;
    g.spec = match (f.spec(), h.spec()) {
        (Some(a), Some(b)) => {
            let mut factors = a.factor_list();
            factors.extend(b.factor_list());
            Some(GraphSpec::Prod(factors))
        }
        _ => None,
    };
    Ok(g)
}

/// Index layout of a product built by [`cartesian_product`]: vertex `(i, j)`
/// of F x H sits at `i * h_order + j`.
#[derive(Debug, Clone, Copy)]
pub struct ProductLayout {
    pub g_order: usize,
    pub h_order: usize,
}

impl ProductLayout {
    pub fn new(g: &Graph, h: &Graph) -> Self {
        ProductLayout {
            g_order: g.vertex_count(),
            h_order: h.vertex_count(),
        }
    }

    pub fn vertex(&self, gi: usize, hj: usize) -> usize {
        gi * self.h_order + hj
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.h_order, idx % self.h_order)
    }
}

// ---------------------------------------------------------------------------
// Degree histograms
// ---------------------------------------------------------------------------

/// Counts of vertices per degree; absent degrees report 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, u64>,
}

impl DegreeHistogram {
    pub fn from_counts(counts: BTreeMap<usize, u64>) -> Self {
        DegreeHistogram { counts }
    }

    pub fn d(&self, t: i64) -> u64 {
        if t < 0 {
            return 0;
        }
        self.counts.get(&(t as usize)).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn vertex_count(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.counts.iter().find(|(_, &c)| c > 0).map(|(&d, _)| d)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts
            .iter()
            .rev()
            .find(|(_, &c)| c > 0)
            .map(|(&d, _)| d)
    }

    /// Degrees add across Cartesian factors, so the product histogram is the
    /// convolution of the factor histograms.
    pub fn convolve(&self, other: &DegreeHistogram) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        for (&a, &ca) in &self.counts {
            for (&b, &cb) in &other.counts {
                *counts.entry(a + b).or_insert(0) += ca * cb;
            }
        }
        DegreeHistogram { counts }
    }

    pub fn of_unit() -> Self {
        DegreeHistogram::from_counts(BTreeMap::from([(0, 1)]))
    }

    pub fn of_path(n: u32) -> Self {
        let mut counts = BTreeMap::new();
        match n {
            1 => {
                counts.insert(0, 1);
            }
            _ => {
                counts.insert(1, 2);
                if n > 2 {
                    counts.insert(2, n as u64 - 2);
                }
            }
        }
        DegreeHistogram { counts }
    }

    pub fn of_star(k: u32) -> Self {
        let mut counts = BTreeMap::new();
        *counts.entry(k as usize).or_insert(0) += 1;
        *counts.entry(1).or_insert(0) += k as u64;
        DegreeHistogram { counts }
    }

    pub fn of_theta(k: u32, l: u32) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(3, 2);
        if k + l > 4 {
            counts.insert(2, (k + l) as u64 - 4);
        }
        DegreeHistogram { counts }
    }
}

// ---------------------------------------------------------------------------
// Theta index structure
// ---------------------------------------------------------------------------

/// Index into a theta graph: the plain indices 1..=l run around the short
/// cycle, the primed indices around the long one. `Primed(1)` and `Primed(2)`
/// are identified with `Plain(1)` and `Plain(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThIdx {
    Plain(u32),
    Primed(u32),
}

impl ThIdx {
    /// Sort key for the ordering in which `i < i' < i+1`.
    fn phi_key(self) -> (u32, u8) {
        match self {
            ThIdx::Plain(i) => (i, 0),
            ThIdx::Primed(i) => (i, 1),
        }
    }
}

impl Ord for ThIdx {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.phi_key().cmp(&other.phi_key())
    }
}

impl PartialOrd for ThIdx {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ThIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThIdx::Plain(i) => write!(f, "{i}"),
            ThIdx::Primed(i) => write!(f, "{i}'"),
        }
    }
}

/// The canonical index structure of a theta graph H_{k,l}: which vertices
/// exist, how both cycles wind through them, and which fresh-colour slot each
/// edge owns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaSpec {
    k: u32,
    l: u32,
}

impl ThetaSpec {
    pub fn new(k: u32, l: u32) -> Result<ThetaSpec> {
        if l < 3 {
            return Err(Error::InvalidParameter(format!(
                "theta requires l >= 3, got l = {l}"
            )));
        }
        if k < l {
            return Err(Error::InvalidParameter(format!(
                "theta requires k >= l, got k = {k}, l = {l}"
            )));
        }
        Ok(ThetaSpec { k, l })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn vertex_count(&self) -> usize {
        (self.k + self.l) as usize - 2
    }

    pub fn edge_count(&self) -> usize {
        (self.k + self.l) as usize - 1
    }

    fn normalize(idx: ThIdx) -> ThIdx {
        match idx {
            ThIdx::Primed(i) if i <= 2 => ThIdx::Plain(i),
            other => other,
        }
    }

    /// All vertices, sorted so that `i < i' < i+1`.
    pub fn vertices(&self) -> Vec<ThIdx> {
        let mut v: Vec<ThIdx> = (1..=self.l).map(ThIdx::Plain).collect();
        v.extend((3..=self.k).map(ThIdx::Primed));
        v.sort();
        v
    }

    /// Vertices of degree 2 that are not adjacent to both sides of the short
    /// edge: everything except 1, 2, l and k'.
    pub fn middle_vertices(&self) -> Vec<ThIdx> {
        let mut v: Vec<ThIdx> = (3..self.l).map(ThIdx::Plain).collect();
        v.extend((3..self.k).map(ThIdx::Primed));
        v.sort();
        v
    }

    pub fn vertex_label(&self, idx: ThIdx) -> VertexLabel {
        match Self::normalize(idx) {
            ThIdx::Plain(i) => VertexLabel::int(i as u64),
            ThIdx::Primed(i) => VertexLabel::name(format!("{i}'")),
        }
    }

    /// Fresh-colour slots, sorted: plain 1..=l plus primed 2..=k. The slot
    /// `Primed(1)` aliases `Plain(1)` and is never stored.
    pub fn alpha_indices(&self) -> Vec<ThIdx> {
        let mut v: Vec<ThIdx> = (1..=self.l).map(ThIdx::Plain).collect();
        v.extend((2..=self.k).map(ThIdx::Primed));
        v.sort();
        v
    }

    /// Every edge as `(endpoint, cyclic successor, fresh-colour slot)`: the
    /// short cycle contributes the slots `Plain(i)` for i in 1..=l and the
    /// long cycle `Primed(i)` for i in 2..=k. The shared edge 1-2 appears
    /// once, on the short cycle.
    pub fn edges_with_alpha(&self) -> Vec<(ThIdx, ThIdx, ThIdx)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for i in 1..=self.l {
            let a = ThIdx::Plain(i);
            let b = ThIdx::Plain(if i == self.l { 1 } else { i + 1 });
            edges.push((a, b, ThIdx::Plain(i)));
        }
        for i in 2..=self.k {
            let a = Self::normalize(ThIdx::Primed(i));
            let b = if i == self.k {
                ThIdx::Plain(1)
            } else {
                ThIdx::Primed(i + 1)
            };
            edges.push((a, b, ThIdx::Primed(i)));
        }
        edges
    }

    /// Successor of a middle vertex along its own cycle.
    pub fn successor(&self, idx: ThIdx) -> ThIdx {
        match Self::normalize(idx) {
            ThIdx::Plain(i) => ThIdx::Plain(if i == self.l { 1 } else { i + 1 }),
            ThIdx::Primed(i) => {
                if i == self.k {
                    ThIdx::Plain(1)
                } else {
                    ThIdx::Primed(i + 1)
                }
            }
        }
    }

    /// Predecessor along the same cycle; for `Primed(3)` this is the vertex 2.
    pub fn predecessor(&self, idx: ThIdx) -> ThIdx {
        match Self::normalize(idx) {
            ThIdx::Plain(i) => ThIdx::Plain(if i == 1 { self.l } else { i - 1 }),
            ThIdx::Primed(i) => Self::normalize(ThIdx::Primed(i - 1)),
        }
    }

    /// The fresh-colour slot of the edge leaving `idx` toward its successor
    /// on the given cycle side.
    pub fn alpha_of_edge_from(&self, idx: ThIdx) -> ThIdx {
        match idx {
            ThIdx::Plain(i) => ThIdx::Plain(i),
            ThIdx::Primed(i) => ThIdx::Primed(i),
        }
    }
}

// ---------------------------------------------------------------------------
// Rooted trees
// ---------------------------------------------------------------------------

/// A tree rooted at a leaf, relabelled 0..n-1 so that labels never decrease
/// with level; the root is 0 and each non-root vertex has one parent on the
/// previous level.
#[derive(Debug, Clone)]
pub struct RootedTree {
    graph: Graph,
    levels: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn level(&self, v: usize) -> usize {
        self.levels[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertices of the subtree hanging at `v` (including `v`), ascending.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in self.children(u) {
                out.push(c);
                stack.push(c);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Roots `t` at the given leaf, producing BFS levels and the canonical
/// 0..n-1 relabelling (by level, ties broken by original label).
pub fn root_tree_at_leaf(t: &Graph, leaf: &VertexLabel) -> Result<RootedTree> {
    if !t.is_tree() {
        return Err(Error::NotATree(format!(
            "{} vertices, {} edges, connected: {}",
            t.vertex_count(),
            t.edge_count(),
            t.is_connected()
        )));
    }
    let root = t
        .index_of(leaf)
        .ok_or_else(|| Error::UnknownVertex(leaf.to_string()))?;
    if t.vertex_count() > 1 && t.degree(root) != 1 {
        return Err(Error::NotALeaf(leaf.to_string()));
    }
    let n = t.vertex_count();
    let mut level = vec![usize::MAX; n];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in t.neighbours(v) {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| (level[a], t.label(a)).cmp(&(level[b], t.label(b))));
    let mut new_of_old = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        new_of_old[old] = new;
    }
    let labels: Vec<VertexLabel> = (0..n as u64).map(VertexLabel::int).collect();
    let edges: Vec<(usize, usize)> = t
        .edges()
        .iter()
        .map(|&(a, b)| (new_of_old[a], new_of_old[b]))
        .collect();
    let graph = Graph::assemble(labels, edges)?;
    let levels: Vec<usize> = order.iter().map(|&old| level[old]).collect();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for v in 0..n {
        for &w in graph.neighbours(v) {
            if levels[w] + 1 == levels[v] {
                parent[v] = Some(w);
            }
        }
        if v != 0 && parent[v].is_none() {
            return Err(Error::NotATree("level structure broke".into()));
        }
    }
    for v in 0..n {
        if let Some(p) = parent[v] {
            children[p].push(v);
        }
    }
    for c in &mut children {
        c.sort_unstable();
    }
    Ok(RootedTree {
        graph,
        levels,
        parent,
        children,
    })
}

/// Roots at the lexicographically smallest leaf.
pub fn root_tree(t: &Graph) -> Result<RootedTree> {
    if !t.is_tree() {
        return Err(Error::NotATree("not acyclic connected".into()));
    }
    if t.vertex_count() == 1 {
        return root_tree_at_leaf(t, t.label(0));
    }
    let leaf = (0..t.vertex_count())
        .filter(|&v| t.degree(v) == 1)
        .map(|v| t.label(v))
        .min()
        .expect("a tree on >= 2 vertices has a leaf");
    root_tree_at_leaf(t, &leaf.clone())
}
