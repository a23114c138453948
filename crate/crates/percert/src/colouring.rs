//! Proper edge colourings with distinct exact rational colours, and the
//! specific product colourings used by the lower-bound machinery.
//!
//! Colours are integers embedded in rationals, assigned in edge-iteration
//! order; fresh colours for the cross edges of a product always sit strictly
//! above the base palette.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    cartesian_product, star, theta, Graph, ProductLayout, RootedTree, ThIdx, ThetaSpec,
    VertexLabel,
};
use crate::poly::{rational_from_str, rational_to_string, Rational};

/// An edge colouring aligned with the host graph's edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColouring {
    colours: Vec<Rational>,
}

impl EdgeColouring {
    pub fn from_values(colours: Vec<Rational>) -> Self {
        EdgeColouring { colours }
    }

    pub fn empty() -> Self {
        EdgeColouring {
            colours: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colour(&self, e: usize) -> &Rational {
        &self.colours[e]
    }

    /// Colour of the edge `ab`; errors when `ab` is not an edge.
    pub fn colour_of(&self, g: &Graph, a: usize, b: usize) -> Result<&Rational> {
        let e = g
            .edge_index(a, b)
            .ok_or_else(|| Error::NotAnEdge(format!("{}-{}", g.label(a), g.label(b))))?;
        Ok(&self.colours[e])
    }

    pub fn palette(&self) -> BTreeSet<Rational> {
        self.colours.iter().cloned().collect()
    }

    /// Largest used colour, or 0 for the empty colouring; fresh colours are
    /// allocated above this.
    pub fn max_palette(&self) -> Rational {
        self.colours
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.check_proper(g).is_ok()
    }

    /// Scans every vertex for incident colour collisions and checks the
    /// colouring covers exactly the host's edges.
    pub fn check_proper(&self, g: &Graph) -> Result<()> {
        if self.colours.len() != g.edge_count() {
            return Err(Error::ColouringMismatch(format!(
                "{} colours for {} edges",
                self.colours.len(),
                g.edge_count()
            )));
        }
        for v in 0..g.vertex_count() {
            let mut seen = BTreeSet::new();
            for &w in g.neighbours(v) {
                let c = self.colour_of(g, v, w)?;
                if !seen.insert(c.clone()) {
                    return Err(Error::ImproperColouring(format!(
                        "colour {} repeats at vertex {}",
                        rational_to_string(c),
                        g.label(v)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Greedy proper colouring: edges in host order, each taking the smallest
/// nonnegative integer missing from both endpoints. Uses at most 2*maxdeg - 1
/// colours.
pub fn greedy_proper_colouring(g: &Graph) -> EdgeColouring {
    let order: Vec<usize> = (0..g.edge_count()).collect();
    greedy_proper_colouring_with_order(g, &order).expect("identity order is valid")
}

/// Greedy colouring with a caller-chosen edge order; the result is keyed to
/// the host order regardless.
pub fn greedy_proper_colouring_with_order(g: &Graph, order: &[usize]) -> Result<EdgeColouring> {
    if order.len() != g.edge_count() {
        return Err(Error::InvalidParameter(
            "edge order must be a permutation of the edge list".into(),
        ));
    }
    let mut assigned: Vec<Option<u64>> = vec![None; g.edge_count()];
    for &e in order {
        let (a, b) = g.edge_endpoints(e);
        let mut used = BTreeSet::new();
        for &v in &[a, b] {
            for &w in g.neighbours(v) {
                if let Some(i) = g.edge_index(v, w) {
                    if let Some(c) = assigned[i] {
                        used.insert(c);
                    }
                }
            }
        }
        let mut c = 0u64;
        while used.contains(&c) {
            c += 1;
        }
        if assigned[e].is_some() {
            return Err(Error::InvalidParameter("duplicate edge in order".into()));
        }
        assigned[e] = Some(c);
    }
    Ok(EdgeColouring::from_values(
        assigned
            .into_iter()
            .map(|c| Rational::from_integer(c.expect("all edges coloured").into()))
            .collect(),
    ))
}

fn fresh(base: &Rational, i: u64) -> Rational {
    base + Rational::from_integer(i.into())
}

/// Colouring of G x T: each copy of G keeps `c`, and the cross edge from a
/// copy to its parent copy is coloured by a fresh value owned by the child
/// copy, shared across all of G.
pub fn product_colouring_tree(g: &Graph, c: &EdgeColouring, t: &RootedTree) -> Result<EdgeColouring> {
    let product = cartesian_product(g, t.graph())?;
    tree_colouring(g, c, t, &product).map(|(col, _)| col)
}

pub(crate) fn tree_colouring(
    g: &Graph,
    c: &EdgeColouring,
    t: &RootedTree,
    product: &Graph,
) -> Result<(EdgeColouring, Vec<Rational>)> {
    c.check_proper(g)?;
    let base = c.max_palette();
    let alphas: Vec<Rational> = (0..t.order() as u64).map(|i| fresh(&base, i)).collect();
    let layout = ProductLayout::new(g, t.graph());
    let mut colours = Vec::with_capacity(product.edge_count());
    for &(x, y) in product.edges() {
        let (gi, hi) = layout.split(x);
        let (gj, hj) = layout.split(y);
        if hi == hj {
            colours.push(c.colour_of(g, gi, gj)?.clone());
        } else {
            debug_assert_eq!(gi, gj);
            let child = if t.level(hi) > t.level(hj) { hi } else { hj };
            colours.push(alphas[child].clone());
        }
    }
    let colouring = EdgeColouring::from_values(colours);
    colouring.check_proper(product)?;
    Ok((colouring, alphas))
}

/// Colouring of G x S_k: copies keep `c`; the k spokes at each vertex take k
/// fresh values, one per leaf.
pub fn product_colouring_star(g: &Graph, c: &EdgeColouring, k: u32) -> Result<EdgeColouring> {
    let h = star(k)?;
    let product = cartesian_product(g, &h)?;
    star_colouring(g, c, k, &product).map(|(col, _)| col)
}

pub(crate) fn star_colouring(
    g: &Graph,
    c: &EdgeColouring,
    k: u32,
    product: &Graph,
) -> Result<(EdgeColouring, Vec<Rational>)> {
    c.check_proper(g)?;
    let base = c.max_palette();
    let alphas: Vec<Rational> = (0..=k as u64).map(|i| fresh(&base, i)).collect();
    let layout = ProductLayout {
        g_order: g.vertex_count(),
        h_order: k as usize + 1,
    };
    let mut colours = Vec::with_capacity(product.edge_count());
    for &(x, y) in product.edges() {
        let (gi, hi) = layout.split(x);
        let (gj, hj) = layout.split(y);
        if hi == hj {
            colours.push(c.colour_of(g, gi, gj)?.clone());
        } else {
            debug_assert_eq!(gi, gj);
            colours.push(alphas[hi.max(hj)].clone());
        }
    }
    let colouring = EdgeColouring::from_values(colours);
    colouring.check_proper(product)?;
    Ok((colouring, alphas))
}

/// Colouring of G x H_{k,l}: copies keep `c`; every theta edge owns one fresh
/// value, with the shared 1-2 edge owning the slot that both cycles alias.
pub fn product_colouring_theta(
    g: &Graph,
    c: &EdgeColouring,
    spec: &ThetaSpec,
) -> Result<EdgeColouring> {
    if spec.l() < 4 {
        return Err(Error::InvalidParameter(
            "product colouring requires a theta with l >= 4".into(),
        ));
    }
    let h = theta(spec.k(), spec.l())?;
    let product = cartesian_product(g, &h)?;
    theta_colouring(g, c, spec, &product).map(|(col, _)| col)
}

pub(crate) fn theta_colouring(
    g: &Graph,
    c: &EdgeColouring,
    spec: &ThetaSpec,
    product: &Graph,
) -> Result<(EdgeColouring, BTreeMap<ThIdx, Rational>)> {
    c.check_proper(g)?;
    let base = c.max_palette();
    let mut alphas = BTreeMap::new();
    for (i, idx) in spec.alpha_indices().into_iter().enumerate() {
        alphas.insert(idx, fresh(&base, i as u64 + 1));
    }
    // Positions of theta vertices inside the theta graph's vertex order.
    let position: BTreeMap<ThIdx, usize> = spec
        .vertices()
        .into_iter()
        .enumerate()
        .map(|(p, v)| (v, p))
        .collect();
    let mut cross: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (a, b, alpha) in spec.edges_with_alpha() {
        let (pa, pb) = (position[&a], position[&b]);
        cross.insert((pa.min(pb), pa.max(pb)), alphas[&alpha].clone());
    }
    let layout = ProductLayout {
        g_order: g.vertex_count(),
        h_order: spec.vertex_count(),
    };
    let mut colours = Vec::with_capacity(product.edge_count());
    for &(x, y) in product.edges() {
        let (gi, hi) = layout.split(x);
        let (gj, hj) = layout.split(y);
        if hi == hj {
            colours.push(c.colour_of(g, gi, gj)?.clone());
        } else {
            debug_assert_eq!(gi, gj);
            colours.push(cross[&(hi.min(hj), hi.max(hj))].clone());
        }
    }
    let colouring = EdgeColouring::from_values(colours);
    colouring.check_proper(product)?;
    Ok((colouring, alphas))
}

#[derive(Serialize, Deserialize)]
struct ColourEntry {
    edge: (String, String),
    colour: String,
}

/// Reads a colouring export and validates coverage and properness.
pub fn colouring_from_json(g: &Graph, path: &Path) -> Result<EdgeColouring> {
    let text = std::fs::read_to_string(path)?;
    let entries: Vec<ColourEntry> = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mut colours: Vec<Option<Rational>> = vec![None; g.edge_count()];
    let find = |s: &str| -> Result<usize> {
        g.labels()
            .iter()
            .position(|l| l.to_string() == s)
            .ok_or_else(|| Error::UnknownVertex(s.to_string()))
    };
    for entry in &entries {
        let a = find(&entry.edge.0)?;
        let b = find(&entry.edge.1)?;
        let e = g
            .edge_index(a, b)
            .ok_or_else(|| Error::NotAnEdge(format!("{}-{}", entry.edge.0, entry.edge.1)))?;
        if colours[e].is_some() {
            return Err(Error::Format(format!(
                "edge {}-{} coloured twice",
                entry.edge.0, entry.edge.1
            )));
        }
        colours[e] = Some(rational_from_str(&entry.colour)?);
    }
    let missing: Vec<String> = colours
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_none())
        .map(|(e, _)| {
            let (a, b) = g.edge_endpoints(e);
            format!("{}-{}", g.label(a), g.label(b))
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::Format(format!("uncoloured edges: {}", missing.join(", "))));
    }
    let colouring = EdgeColouring::from_values(colours.into_iter().flatten().collect());
    colouring.check_proper(g)?;
    Ok(colouring)
}

pub fn colouring_to_json(g: &Graph, c: &EdgeColouring) -> serde_json::Value {
    let entries: Vec<ColourEntry> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| ColourEntry {
            edge: (g.label(a).to_string(), g.label(b).to_string()),
            colour: rational_to_string(c.colour(e)),
        })
        .collect();
    serde_json::to_value(entries).expect("serializable")
}

/// Label-based lookup used by tests and the CLI.
pub fn colour_by_labels<'a>(
    g: &Graph,
    c: &'a EdgeColouring,
    a: &VertexLabel,
    b: &VertexLabel,
) -> Option<&'a Rational> {
    let (ia, ib) = (g.index_of(a)?, g.index_of(b)?);
    g.edge_index(ia, ib).map(|e| c.colour(e))
}
