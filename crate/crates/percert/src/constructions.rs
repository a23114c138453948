//! Explicit percolating sets for products with trees, stars, and theta
//! graphs: optimal sets placed per copy plus the repair edges demanded by
//! low-degree vertices of the base. Every plan is closure-verified and its
//! size is checked against the matching bound formula, integer-exact.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formulas::{self, Hypothesis};
use crate::graph::{cartesian_product, star, theta, Graph, ProductLayout, RootedTree, ThIdx, ThetaSpec};
use crate::percolation::{percolates, EdgeSet};

/// Supplies optimal percolating sets for base graphs at given thresholds.
/// The certifier implements this; tests may implement it with a brute-force
/// search to keep the two routes independent.
pub trait OptimalSetSupplier {
    fn optimal_set(&self, g: &Graph, r: u32) -> Result<EdgeSet>;
}

/// A percolating set on a product, split into per-copy pieces and the
/// between-copy repair edges.
#[derive(Debug, Clone)]
pub struct ConstructionPlan {
    pub product: Graph,
    /// Copy index (a vertex of the second factor) to the piece placed there,
    /// keyed to the base graph's edge order.
    pub base_sets: BTreeMap<usize, EdgeSet>,
    /// Between-copy edges, keyed to the product's edge order.
    pub cross_edges: EdgeSet,
    /// The full plan on the product.
    pub total: EdgeSet,
}

impl ConstructionPlan {
    pub fn size(&self) -> usize {
        self.total.len()
    }
}

/// Fetches an optimal set at threshold `rho`, treating every threshold <= 0
/// as trivially satisfied by the empty set, and rejects sets that fail to
/// percolate the base.
fn supplied_set(
    opt: &dyn OptimalSetSupplier,
    g: &Graph,
    rho: i64,
) -> Result<EdgeSet> {
    if rho <= 0 {
        return Ok(EdgeSet::empty(g.edge_count()));
    }
    let set = opt.optimal_set(g, rho as u32)?;
    if set.host_size() != g.edge_count() {
        return Err(Error::Construction(
            "supplied set is keyed to the wrong host".into(),
        ));
    }
    if !percolates(g, &set, rho as u32)? {
        return Err(Error::Construction(format!(
            "supplied base set does not percolate at threshold {rho}"
        )));
    }
    Ok(set)
}

fn lift_into_copy(
    product: &Graph,
    layout: &ProductLayout,
    g: &Graph,
    set: &EdgeSet,
    copy: usize,
    total: &mut EdgeSet,
) -> Result<()> {
    for e in set.indices() {
        let (u, v) = g.edge_endpoints(e);
        let pe = product
            .edge_index(layout.vertex(u, copy), layout.vertex(v, copy))
            .ok_or_else(|| Error::Construction("copy edge missing in product".into()))?;
        total.insert(pe);
    }
    Ok(())
}

fn cross_edge(
    product: &Graph,
    layout: &ProductLayout,
    v: usize,
    copy_a: usize,
    copy_b: usize,
) -> Result<usize> {
    product
        .edge_index(layout.vertex(v, copy_a), layout.vertex(v, copy_b))
        .ok_or_else(|| Error::Construction("cross edge missing in product".into()))
}

fn finish_plan(
    product: Graph,
    base_sets: BTreeMap<usize, EdgeSet>,
    cross_edges: EdgeSet,
    total: EdgeSet,
    r: u32,
    expected_size: u64,
) -> Result<ConstructionPlan> {
    if total.len() as u64 != expected_size {
        return Err(Error::Construction(format!(
            "plan has {} edges, formula gives {expected_size}",
            total.len()
        )));
    }
    if !percolates(&product, &total, r)? {
        return Err(Error::Construction(
            "plan does not percolate the product".into(),
        ));
    }
    Ok(ConstructionPlan {
        product,
        base_sets,
        cross_edges,
        total,
    })
}

/// Percolating set for G x T: an optimal r-set on the root copy, optimal
/// (r-1)-sets on every other copy, and repair edges toward low-degree
/// vertices of G.
pub fn construct_tree_product(
    g: &Graph,
    t: &RootedTree,
    r: u32,
    opt: &dyn OptimalSetSupplier,
) -> Result<ConstructionPlan> {
    if t.order() < 2 {
        return Err(Error::InvalidParameter(
            "tree construction requires order >= 2".into(),
        ));
    }
    if r < 1 {
        return Err(Error::InvalidParameter("tree construction requires r >= 1".into()));
    }
    let product = cartesian_product(g, t.graph())?;
    let layout = ProductLayout::new(g, t.graph());
    let n = t.order();

    let root_set = supplied_set(opt, g, r as i64)?;
    let inner_set = supplied_set(opt, g, r as i64 - 1)?;
    let mut base_sets = BTreeMap::new();
    let mut total = EdgeSet::empty(product.edge_count());
    lift_into_copy(&product, &layout, g, &root_set, 0, &mut total)?;
    base_sets.insert(0, root_set.clone());
    for i in 1..n {
        lift_into_copy(&product, &layout, g, &inner_set, i, &mut total)?;
        base_sets.insert(i, inner_set.clone());
    }

    let mut cross = EdgeSet::empty(product.edge_count());
    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg >= r as i64 {
            continue;
        }
        // Both repair shapes start with the root-to-first-copy edge.
        cross.insert(cross_edge(&product, &layout, v, 0, 1)?);
        let t_class = r as i64 - 1 - deg;
        if t_class < 1 {
            continue;
        }
        for a in 0..n {
            let deg_t = t.graph().degree(a) as i64;
            if deg_t > t_class {
                for &child in t.children(a).iter().take(t_class as usize) {
                    cross.insert(cross_edge(&product, &layout, v, a, child)?);
                }
            } else if deg_t >= 2 {
                for &child in t.children(a) {
                    cross.insert(cross_edge(&product, &layout, v, a, child)?);
                }
            }
        }
    }
    let total = total.union(&cross);

    let expected = formulas::formula_tree_upper(
        base_sets[&0].len() as u64,
        inner_set.len() as u64,
        &g.degree_histogram(),
        &t.graph().degree_histogram(),
        n as u32,
        r,
    )?
    .value;
    finish_plan(product, base_sets, cross, total, r, expected)
}

/// Percolating set for G x S_k: an optimal r-set on the centre copy, optimal
/// (r-1)-sets on the leaf copies, and spoke repairs for low-degree vertices.
pub fn construct_star_product(
    g: &Graph,
    k: u32,
    r: u32,
    opt: &dyn OptimalSetSupplier,
) -> Result<ConstructionPlan> {
    if k < 1 || r < 1 {
        return Err(Error::InvalidParameter(
            "star construction requires k >= 1 and r >= 1".into(),
        ));
    }
    let h = star(k)?;
    let product = cartesian_product(g, &h)?;
    let layout = ProductLayout::new(g, &h);
    let copies = k as usize + 1;

    let centre_set = supplied_set(opt, g, r as i64)?;
    let leaf_set = supplied_set(opt, g, r as i64 - 1)?;
    let mut base_sets = BTreeMap::new();
    let mut total = EdgeSet::empty(product.edge_count());
    lift_into_copy(&product, &layout, g, &centre_set, 0, &mut total)?;
    base_sets.insert(0, centre_set.clone());
    for i in 1..copies {
        lift_into_copy(&product, &layout, g, &leaf_set, i, &mut total)?;
        base_sets.insert(i, leaf_set.clone());
    }

    let mut cross = EdgeSet::empty(product.edge_count());
    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg >= r as i64 {
            continue;
        }
        let t_class = r as i64 - deg;
        let spokes = if t_class <= k as i64 - 1 {
            t_class as usize
        } else {
            k as usize
        };
        for i in 1..=spokes {
            cross.insert(cross_edge(&product, &layout, v, 0, i)?);
        }
    }
    let total = total.union(&cross);

    let expected = formulas::formula_star_general(
        centre_set.len() as u64,
        leaf_set.len() as u64,
        &g.degree_histogram(),
        k,
        r,
        &Hypothesis::Unverified,
    )?
    .value;
    finish_plan(product, base_sets, cross, total, r, expected)
}

/// Percolating set for G x H_{k,l}: an optimal r-set on copy 1, optimal
/// (r-1)-sets on the near copies, optimal (r-2)-sets on the two far copies l
/// and k', plus per-vertex repairs.
pub fn construct_theta_product(
    g: &Graph,
    spec: &ThetaSpec,
    r: u32,
    opt: &dyn OptimalSetSupplier,
) -> Result<ConstructionPlan> {
    if spec.l() < 4 {
        return Err(Error::InvalidParameter(
            "theta construction requires l >= 4".into(),
        ));
    }
    if r < 2 {
        return Err(Error::InvalidParameter(
            "theta construction requires r >= 2".into(),
        ));
    }
    let h = theta(spec.k(), spec.l())?;
    let product = cartesian_product(g, &h)?;
    let layout = ProductLayout::new(g, &h);
    let position: BTreeMap<ThIdx, usize> = spec
        .vertices()
        .into_iter()
        .enumerate()
        .map(|(p, v)| (v, p))
        .collect();
    let far = [ThIdx::Plain(spec.l()), ThIdx::Primed(spec.k())];

    let first_set = supplied_set(opt, g, r as i64)?;
    let near_set = supplied_set(opt, g, r as i64 - 1)?;
    let far_set = supplied_set(opt, g, r as i64 - 2)?;
    let mut base_sets = BTreeMap::new();
    let mut total = EdgeSet::empty(product.edge_count());
    for (&idx, &p) in &position {
        let set = if idx == ThIdx::Plain(1) {
            &first_set
        } else if far.contains(&idx) {
            &far_set
        } else {
            &near_set
        };
        lift_into_copy(&product, &layout, g, set, p, &mut total)?;
        base_sets.insert(p, set.clone());
    }

    // The two theta edges left out of the degree r-2 repair shape.
    let omitted = [
        (position[&ThIdx::Plain(1)], position[&ThIdx::Primed(spec.k())]),
        (position[&ThIdx::Plain(2)], position[&ThIdx::Plain(3)]),
    ];
    let theta_edges: Vec<(usize, usize)> = spec
        .edges_with_alpha()
        .into_iter()
        .map(|(a, b, _)| (position[&a], position[&b]))
        .collect();

    let mut cross = EdgeSet::empty(product.edge_count());
    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg >= r as i64 {
            continue;
        }
        if deg == r as i64 - 1 {
            cross.insert(cross_edge(
                &product,
                &layout,
                v,
                position[&ThIdx::Plain(1)],
                position[&ThIdx::Plain(2)],
            )?);
        } else if deg == r as i64 - 2 {
            for &(a, b) in &theta_edges {
                let skip = omitted
                    .iter()
                    .any(|&(x, y)| (a, b) == (x, y) || (a, b) == (y, x));
                if !skip {
                    cross.insert(cross_edge(&product, &layout, v, a, b)?);
                }
            }
        } else {
            for &(a, b) in &theta_edges {
                cross.insert(cross_edge(&product, &layout, v, a, b)?);
            }
        }
    }
    let total = total.union(&cross);

    let expected = formulas::formula_theta_general(
        first_set.len() as u64,
        near_set.len() as u64,
        far_set.len() as u64,
        &g.degree_histogram(),
        spec.k(),
        spec.l(),
        r,
        &Hypothesis::Unverified,
    )?
    .value;
    finish_plan(product, base_sets, cross, total, r, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, path, root_tree};
    use crate::percolation::closure;

    /// Test-only supplier backed by exhaustive search, so these checks stay
    /// independent of the certifier.
    struct BruteSupplier;

    impl OptimalSetSupplier for BruteSupplier {
        fn optimal_set(&self, g: &Graph, r: u32) -> Result<EdgeSet> {
            use itertools::Itertools;
            let m = g.edge_count();
            for s in 0..=m {
                for combo in (0..m).combinations(s) {
                    let set = EdgeSet::from_indices(m, &combo)?;
                    if percolates(g, &set, r)? {
                        return Ok(set);
                    }
                }
            }
            unreachable!("the full edge set percolates");
        }
    }

    #[test]
    fn tree_plan_on_k2_times_p2_fills_c4() {
        let g = path(2).unwrap();
        let t = root_tree(&path(2).unwrap()).unwrap();
        let plan = construct_tree_product(&g, &t, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 4);
        assert_eq!(plan.cross_edges.len(), 2);
    }

    #[test]
    fn tree_plan_with_high_min_degree_needs_no_repairs() {
        let g = cycle(4).unwrap();
        let t = root_tree(&path(2).unwrap()).unwrap();
        let plan = construct_tree_product(&g, &t, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 5); // 4 + 1
        assert!(plan.cross_edges.is_empty());
    }

    #[test]
    fn tree_plan_on_k1_times_s3_at_r1_is_one_edge() {
        let g = path(1).unwrap();
        let t = root_tree(&crate::graph::star(3).unwrap()).unwrap();
        let plan = construct_tree_product(&g, &t, 1, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 1);
    }

    #[test]
    fn star_plan_on_k1_times_s3_at_r2() {
        let g = path(1).unwrap();
        let plan = construct_star_product(&g, 3, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 2);
        // Both plan edges sit at the centre copy.
        let trace = closure(&plan.product, &plan.total, 2).unwrap();
        assert_eq!(trace.final_set.len(), plan.product.edge_count());
    }

    #[test]
    fn star_plan_on_s2_times_s2_has_six_edges() {
        let g = crate::graph::star(2).unwrap();
        let plan = construct_star_product(&g, 2, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 6);
        assert_eq!(plan.cross_edges.len(), 2);
    }

    #[test]
    fn star_plan_with_high_min_degree() {
        let g = cycle(4).unwrap();
        let plan = construct_star_product(&g, 1, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 5);
        assert!(plan.cross_edges.is_empty());
    }

    #[test]
    fn theta_plan_on_k1_at_r2_leaves_two_edges_out() {
        let g = path(1).unwrap();
        let spec = ThetaSpec::new(4, 4).unwrap();
        let plan = construct_theta_product(&g, &spec, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 5);
        assert!(crate::percolation::is_minimal_percolating(&plan.product, &plan.total, 2).unwrap());
    }

    #[test]
    fn theta_plan_on_k1_at_r3_is_everything() {
        let g = path(1).unwrap();
        let spec = ThetaSpec::new(4, 4).unwrap();
        let plan = construct_theta_product(&g, &spec, 3, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 7);
    }

    #[test]
    fn theta_plan_on_h65() {
        let g = path(1).unwrap();
        let spec = ThetaSpec::new(6, 5).unwrap();
        let plan = construct_theta_product(&g, &spec, 2, &BruteSupplier).unwrap();
        assert_eq!(plan.size(), 8); // k + l - 3
    }

    #[test]
    fn constructions_reject_bad_parameters() {
        let g = path(2).unwrap();
        let spec = ThetaSpec::new(4, 3).unwrap();
        assert!(construct_theta_product(&g, &spec, 2, &BruteSupplier).is_err());
        let spec44 = ThetaSpec::new(4, 4).unwrap();
        assert!(construct_theta_product(&g, &spec44, 1, &BruteSupplier).is_err());
        assert!(construct_star_product(&g, 0, 2, &BruteSupplier).is_err());
    }

    #[test]
    fn failing_supplier_is_rejected_up_front() {
        struct BadSupplier;
        impl OptimalSetSupplier for BadSupplier {
            fn optimal_set(&self, g: &Graph, _r: u32) -> Result<EdgeSet> {
                Ok(EdgeSet::empty(g.edge_count()))
            }
        }
        let g = path(3).unwrap();
        let t = root_tree(&path(2).unwrap()).unwrap();
        let err = construct_tree_product(&g, &t, 2, &BadSupplier).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));
    }
}
