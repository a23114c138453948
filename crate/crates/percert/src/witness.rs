//! The algebraic core: membership and dimension of the witness space tied to
//! a proper edge colouring, the colour-selection evaluation machinery, and
//! the constructive witness families on tree, star and theta products.
//!
//! The witness space at threshold r collects one polynomial per vertex,
//! degree-capped at min(r, deg(v)) - 1, agreeing across every edge at the
//! edge's colour. Its dimension is a lower bound on the minimum percolating
//! set size, which is what makes these families certificates.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::colouring::{self, EdgeColouring};
use crate::error::{Error, Result};
use crate::formulas::{self, Hypothesis};
use crate::graph::{
    cartesian_product, star, theta, Graph, ProductLayout, RootedTree, ThIdx, ThetaSpec,
};
use crate::matrix::RationalMatrix;
use crate::poly::{Polynomial, Rational};

/// One polynomial per vertex of a host graph, aligned with its vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVector {
    entries: Vec<Polynomial>,
}

impl PolyVector {
    pub fn zero(vertices: usize) -> Self {
        PolyVector {
            entries: vec![Polynomial::zero(); vertices],
        }
    }

    pub fn from_entries(entries: Vec<Polynomial>) -> Self {
        PolyVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, v: usize) -> &Polynomial {
        &self.entries[v]
    }

    pub fn set(&mut self, v: usize, p: Polynomial) {
        self.entries[v] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero_vector(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }
}

/// One colour per vertex of the base graph, each chosen among the colours
/// incident to that vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector {
    pub entries: Vec<Rational>,
}

/// A list of vectors claimed to be independent members of the witness space,
/// with the construction step that produced each one.
#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub members: Vec<PolyVector>,
    pub provenance: Vec<String>,
    pub claimed_dimension: usize,
}

/// A witness family together with the product graph and colouring it lives on.
#[derive(Debug, Clone)]
pub struct ProductWitness {
    pub product: Graph,
    pub colouring: EdgeColouring,
    pub family: WitnessFamily,
}

// ---------------------------------------------------------------------------
// Coefficient layout and the membership system
// ---------------------------------------------------------------------------

/// Per-vertex coefficient slots: vertex v owns min(r, deg(v)) unknowns, in
/// graph order, low degree first.
struct CoeffLayout {
    offsets: Vec<usize>,
    caps: Vec<usize>,
    total: usize,
}

fn coeff_layout(g: &Graph, r: u32) -> CoeffLayout {
    let mut offsets = Vec::with_capacity(g.vertex_count());
    let mut caps = Vec::with_capacity(g.vertex_count());
    let mut total = 0;
    for v in 0..g.vertex_count() {
        offsets.push(total);
        let cap = (r as usize).min(g.degree(v));
        caps.push(cap);
        total += cap;
    }
    CoeffLayout {
        offsets,
        caps,
        total,
    }
}

fn check_vector_host(g: &Graph, p: &PolyVector) -> Result<()> {
    if p.len() != g.vertex_count() {
        return Err(Error::UnknownVertex(format!(
            "vector has {} entries, host has {} vertices",
            p.len(),
            g.vertex_count()
        )));
    }
    Ok(())
}

/// Membership test: degree caps at every vertex, agreement at every edge's
/// colour. Exact rational evaluation throughout.
pub fn w_membership(g: &Graph, c: &EdgeColouring, r: u32, p: &PolyVector) -> Result<bool> {
    c.check_proper(g)?;
    check_vector_host(g, p)?;
    for v in 0..g.vertex_count() {
        let cap = (r as i64).min(g.degree(v) as i64) - 1;
        if p.entry(v).degree() > cap {
            return Ok(false);
        }
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let gamma = c.colour(e);
        if p.entry(u).eval(gamma) != p.entry(v).eval(gamma) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn membership_matrix(g: &Graph, c: &EdgeColouring, r: u32) -> (RationalMatrix, CoeffLayout) {
    let layout = coeff_layout(g, r);
    let mut m = RationalMatrix::zeros(g.edge_count(), layout.total);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let gamma = c.colour(e);
        let mut power = Rational::one();
        for j in 0..layout.caps[u] {
            m.set(e, layout.offsets[u] + j, power.clone());
            power *= gamma;
        }
        let mut power = Rational::one();
        for j in 0..layout.caps[v] {
            let cur = m.at(e, layout.offsets[v] + j) - &power;
            m.set(e, layout.offsets[v] + j, cur);
            power *= gamma;
        }
    }
    (m, layout)
}

/// Dimension of the witness space: unknown count minus the exact rank of the
/// edge-agreement system.
pub fn dim_w(g: &Graph, c: &EdgeColouring, r: u32) -> Result<usize> {
    c.check_proper(g)?;
    let (m, layout) = membership_matrix(g, c, r);
    Ok(layout.total - m.rank())
}

/// Canonical basis from the reduced row echelon form of the membership
/// system; deterministic for a fixed graph order.
pub fn basis_of_w(g: &Graph, c: &EdgeColouring, r: u32) -> Result<WitnessFamily> {
    c.check_proper(g)?;
    let (m, layout) = membership_matrix(g, c, r);
    let mut members = Vec::new();
    let mut provenance = Vec::new();
    for (j, coeffs) in m.nullspace_basis().into_iter().enumerate() {
        let mut vec = PolyVector::zero(g.vertex_count());
        for v in 0..g.vertex_count() {
            let lo = layout.offsets[v];
            let slice = coeffs[lo..lo + layout.caps[v]].to_vec();
            vec.set(v, Polynomial::from_coeffs(slice));
        }
        members.push(vec);
        provenance.push(format!("B{r}[{j}]"));
    }
    let claimed_dimension = members.len();
    Ok(WitnessFamily {
        members,
        provenance,
        claimed_dimension,
    })
}

// ---------------------------------------------------------------------------
// Colour selections
// ---------------------------------------------------------------------------

fn check_z(g: &Graph, c: &EdgeColouring, z: &ZVector) -> Result<()> {
    if z.entries.len() != g.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "selection has {} entries, base graph has {} vertices",
            z.entries.len(),
            g.vertex_count()
        )));
    }
    for v in 0..g.vertex_count() {
        let ok = g
            .neighbours(v)
            .iter()
            .any(|&u| c.colour_of(g, v, u).map(|col| col == &z.entries[v]).unwrap_or(false));
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "selection entry at {} is not an incident colour",
                g.label(v)
            )));
        }
    }
    Ok(())
}

/// Evaluates a vector over G x H at a colour selection of G: the entry at
/// (u, v) becomes the value of its polynomial at the colour selected for u.
pub fn z_evaluate(
    g: &Graph,
    c: &EdgeColouring,
    product: &Graph,
    p: &PolyVector,
    z: &ZVector,
) -> Result<Vec<Rational>> {
    c.check_proper(g)?;
    check_z(g, c, z)?;
    check_vector_host(product, p)?;
    if g.vertex_count() == 0 || product.vertex_count() % g.vertex_count() != 0 {
        return Err(Error::InvalidParameter(
            "product vertex count is not a multiple of the base".into(),
        ));
    }
    let h_order = product.vertex_count() / g.vertex_count();
    Ok((0..product.vertex_count())
        .map(|idx| p.entry(idx).eval(&z.entries[idx / h_order]))
        .collect())
}

/// Finds a colour selection on which the vector is nonzero by scanning the
/// colours incident to the base coordinate of `base`; errors when every
/// incident colour is a root there.
pub fn zeros_lemma_witness(
    g: &Graph,
    c: &EdgeColouring,
    product: &Graph,
    p: &PolyVector,
    base: usize,
) -> Result<ZVector> {
    c.check_proper(g)?;
    check_vector_host(product, p)?;
    if g.vertex_count() == 0 || product.vertex_count() % g.vertex_count() != 0 {
        return Err(Error::InvalidParameter(
            "product vertex count is not a multiple of the base".into(),
        ));
    }
    let h_order = product.vertex_count() / g.vertex_count();
    let u = base / h_order;
    let default_for = |v: usize| -> Result<Rational> {
        g.neighbours(v)
            .iter()
            .map(|&w| c.colour_of(g, v, w).cloned())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "vertex {} has no incident colour to select",
                    g.label(v)
                ))
            })
    };
    for &w in g.neighbours(u) {
        let gamma = c.colour_of(g, u, w)?.clone();
        if !p.entry(base).eval(&gamma).is_zero() {
            let mut entries = Vec::with_capacity(g.vertex_count());
            for v in 0..g.vertex_count() {
                entries.push(if v == u { gamma.clone() } else { default_for(v)? });
            }
            return Ok(ZVector { entries });
        }
    }
    Err(Error::NoNonzeroEvaluation)
}

// ---------------------------------------------------------------------------
// Family verification
// ---------------------------------------------------------------------------

fn stacked_coefficient_matrix(product: &Graph, r: u32, family: &WitnessFamily) -> RationalMatrix {
    let layout = coeff_layout(product, r);
    let mut m = RationalMatrix::zeros(family.members.len(), layout.total);
    for (row, member) in family.members.iter().enumerate() {
        for v in 0..product.vertex_count() {
            for (j, coeff) in member.entry(v).coeffs().iter().enumerate() {
                m.set(row, layout.offsets[v] + j, coeff.clone());
            }
        }
    }
    m
}

/// Rank of the members' stacked coefficient rows.
pub fn stacked_rank(product: &Graph, r: u32, family: &WitnessFamily) -> usize {
    stacked_coefficient_matrix(product, r, family).rank()
}

/// Checks the family invariants: member count equals the claim, every member
/// passes membership, and the stacked coefficients have full rank.
pub fn verify_family(
    product: &Graph,
    c: &EdgeColouring,
    r: u32,
    family: &WitnessFamily,
) -> Result<()> {
    if family.members.len() != family.claimed_dimension {
        return Err(Error::FamilyDefect {
            provenance: "count".into(),
            msg: format!(
                "{} members built, {} claimed",
                family.members.len(),
                family.claimed_dimension
            ),
        });
    }
    for (member, prov) in family.members.iter().zip(&family.provenance) {
        if !w_membership(product, c, r, member)? {
            return Err(Error::FamilyDefect {
                provenance: prov.clone(),
                msg: "membership failed".into(),
            });
        }
    }
    let rank = stacked_rank(product, r, family);
    if rank != family.claimed_dimension {
        return Err(Error::FamilyDefect {
            provenance: "rank".into(),
            msg: format!("stacked rank {rank}, claimed {}", family.claimed_dimension),
        });
    }
    Ok(())
}

/// Every entry of an X-style member at a copy of its base vertex must vanish
/// on all of that vertex's base-graph colours.
fn check_x_vanishing(
    g: &Graph,
    c: &EdgeColouring,
    layout: &ProductLayout,
    v: usize,
    member: &PolyVector,
    prov: &str,
) -> Result<()> {
    for &u in g.neighbours(v) {
        let gamma = c.colour_of(g, v, u)?;
        for h in 0..layout.h_order {
            let entry = member.entry(layout.vertex(v, h));
            if !entry.eval(gamma).is_zero() {
                return Err(Error::FamilyDefect {
                    provenance: prov.to_string(),
                    msg: "entry does not vanish at a base colour of its vertex".into(),
                });
            }
        }
    }
    Ok(())
}

fn guarded_ratio(num: Rational, den: Rational, prov: &str) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::FamilyDefect {
            provenance: prov.to_string(),
            msg: "zero denominator; colour freshness violated".into(),
        });
    }
    Ok(num / den)
}

/// The monic polynomial vanishing on all base-graph colours at `v`.
fn base_root_poly(g: &Graph, c: &EdgeColouring, v: usize) -> Result<Polynomial> {
    let roots: Vec<Rational> = g
        .neighbours(v)
        .iter()
        .map(|&u| c.colour_of(g, v, u).cloned())
        .collect::<Result<_>>()?;
    Ok(Polynomial::from_roots(roots.iter()))
}

/// The unique polynomial of degree deg(vertex) - 1 that is 1 at `target` and
/// 0 at the colours of all incident edges except the one toward `excluded`.
fn interpolation_at(
    product: &Graph,
    c: &EdgeColouring,
    vertex: usize,
    excluded: usize,
    target: &Rational,
    prov: &str,
) -> Result<Polynomial> {
    let roots: Vec<Rational> = product
        .neighbours(vertex)
        .iter()
        .filter(|&&w| w != excluded)
        .map(|&w| c.colour_of(product, vertex, w).cloned())
        .collect::<Result<_>>()?;
    let base = Polynomial::from_roots(roots.iter());
    let denom = base.eval(target);
    let scale = guarded_ratio(Rational::one(), denom, prov)?;
    Ok(base.scale(&scale))
}

// ---------------------------------------------------------------------------
// Tree products
// ---------------------------------------------------------------------------

/// Builds and verifies the independent family on G x T witnessing the tree
/// lower bound: copied bases at r, subtree-supported bases at r-1, and
/// per-vertex root-product vectors for the low-degree vertices of G.
pub fn tree_witness_family(
    g: &Graph,
    c: &EdgeColouring,
    t: &RootedTree,
    r: u32,
) -> Result<ProductWitness> {
    if r < 1 {
        return Err(Error::InvalidParameter("tree family requires r >= 1".into()));
    }
    if t.order() < 2 {
        return Err(Error::InvalidParameter("tree family requires order >= 2".into()));
    }
    c.check_proper(g)?;
    let product = cartesian_product(g, t.graph())?;
    let (colouring, alphas) = colouring::tree_colouring(g, c, t, &product)?;
    let layout = ProductLayout::new(g, t.graph());
    let n = t.order();

    let basis_r = basis_of_w(g, c, r)?;
    let basis_rm1 = basis_of_w(g, c, r - 1)?;

    let mut members = Vec::new();
    let mut provenance = Vec::new();

    for (j, q) in basis_r.members.iter().enumerate() {
        let mut vec = PolyVector::zero(product.vertex_count());
        for v in 0..g.vertex_count() {
            for i in 0..n {
                vec.set(layout.vertex(v, i), q.entry(v).clone());
            }
        }
        members.push(vec);
        provenance.push(format!("A0[{j}]"));
    }

    for ell in 1..n {
        let support = t.subtree(ell);
        for (j, q) in basis_rm1.members.iter().enumerate() {
            let mut vec = PolyVector::zero(product.vertex_count());
            for v in 0..g.vertex_count() {
                let shifted = q.entry(v).mul_root(&alphas[ell]);
                for &i in &support {
                    vec.set(layout.vertex(v, i), shifted.clone());
                }
            }
            members.push(vec);
            provenance.push(format!("A{ell}[{j}]"));
        }
    }

    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg > r as i64 - 1 {
            continue;
        }
        let base = base_root_poly(g, c, v)?;
        let prov = format!("X({})", g.label(v));
        let mut vec = PolyVector::zero(product.vertex_count());
        for i in 0..n {
            vec.set(layout.vertex(v, i), base.clone());
        }
        check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
        members.push(vec);
        provenance.push(prov);

        if deg > r as i64 - 2 {
            continue;
        }
        for i in 1..n {
            if t.graph().degree(i) < 2 {
                continue;
            }
            let prov = format!("X({})^{i}", g.label(v));
            let mut vec = PolyVector::zero(product.vertex_count());
            vec.set(layout.vertex(v, i), base.mul_root(&alphas[i]));
            for &j in t.children(i) {
                let factor = &alphas[j] - &alphas[i];
                let shifted = base.scale(&factor);
                for ell in t.subtree(j) {
                    vec.set(layout.vertex(v, ell), shifted.clone());
                }
            }
            check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
            members.push(vec);
            provenance.push(prov);
        }
    }

    let expected = formulas::formula_tree_lower(
        basis_r.claimed_dimension as u64,
        basis_rm1.claimed_dimension as u64,
        &g.degree_histogram(),
        &t.graph().degree_histogram(),
        n as u32,
        r,
    )?
    .value as usize;
    let family = WitnessFamily {
        members,
        provenance,
        claimed_dimension: expected,
    };
    verify_family(&product, &colouring, r, &family)?;
    Ok(ProductWitness {
        product,
        colouring,
        family,
    })
}

// ---------------------------------------------------------------------------
// Star products
// ---------------------------------------------------------------------------

/// Builds and verifies the independent family on G x S_k witnessing the star
/// lower bound.
pub fn star_witness_family(
    g: &Graph,
    c: &EdgeColouring,
    k: u32,
    r: u32,
) -> Result<ProductWitness> {
    if k < 1 || r < 1 {
        return Err(Error::InvalidParameter(
            "star family requires k >= 1 and r >= 1".into(),
        ));
    }
    c.check_proper(g)?;
    let h = star(k)?;
    let product = cartesian_product(g, &h)?;
    let (colouring, alphas) = colouring::star_colouring(g, c, k, &product)?;
    let layout = ProductLayout::new(g, &h);
    let copies = k as usize + 1;

    let basis_r = basis_of_w(g, c, r)?;
    let basis_rm1 = basis_of_w(g, c, r - 1)?;

    let mut members = Vec::new();
    let mut provenance = Vec::new();

    for (j, q) in basis_r.members.iter().enumerate() {
        let mut vec = PolyVector::zero(product.vertex_count());
        for v in 0..g.vertex_count() {
            for i in 0..copies {
                vec.set(layout.vertex(v, i), q.entry(v).clone());
            }
        }
        members.push(vec);
        provenance.push(format!("A0[{j}]"));
    }

    for ell in 1..copies {
        for (j, q) in basis_rm1.members.iter().enumerate() {
            let mut vec = PolyVector::zero(product.vertex_count());
            for v in 0..g.vertex_count() {
                vec.set(layout.vertex(v, ell), q.entry(v).mul_root(&alphas[ell]));
            }
            members.push(vec);
            provenance.push(format!("A{ell}[{j}]"));
        }
    }

    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg >= r as i64 {
            continue;
        }
        let t_class = r as i64 - deg;
        let base = base_root_poly(g, c, v)?;
        if t_class <= k as i64 - 1 {
            // Vertex class with deg = r - t for t in [k-1]: t spokes are
            // pre-infected, the rest agree through scaled copies.
            let t_class = t_class as usize;
            for ell in 1..=t_class {
                let prov = format!("X{t_class}({},l={ell})", g.label(v));
                let spoke_roots: Vec<Rational> = (1..=t_class)
                    .filter(|&i| i != ell)
                    .map(|i| alphas[i].clone())
                    .collect();
                let centre = Polynomial::from_roots(spoke_roots.iter()).mul(&base);
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(layout.vertex(v, 0), centre.clone());
                for j in std::iter::once(ell).chain(t_class + 1..copies) {
                    let gamma = guarded_ratio(
                        centre.eval(&alphas[j]),
                        base.eval(&alphas[j]),
                        &prov,
                    )?;
                    if gamma.is_zero() {
                        return Err(Error::FamilyDefect {
                            provenance: prov.clone(),
                            msg: "vanishing leaf constant".into(),
                        });
                    }
                    vec.set(layout.vertex(v, j), base.scale(&gamma));
                }
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
        } else {
            // Vertex class with deg <= r - k: interpolation pairs on every
            // spoke.
            for ell in 1..copies {
                let prov = format!("X0({},l={ell})", g.label(v));
                let centre = layout.vertex(v, 0);
                let leaf = layout.vertex(v, ell);
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(
                    centre,
                    interpolation_at(&product, &colouring, centre, leaf, &alphas[ell], &prov)?,
                );
                vec.set(
                    leaf,
                    interpolation_at(&product, &colouring, leaf, centre, &alphas[ell], &prov)?,
                );
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
        }
    }

    let expected = formulas::formula_star_general(
        basis_r.claimed_dimension as u64,
        basis_rm1.claimed_dimension as u64,
        &g.degree_histogram(),
        k,
        r,
        &Hypothesis::Unverified,
    )?
    .value as usize;
    let family = WitnessFamily {
        members,
        provenance,
        claimed_dimension: expected,
    };
    verify_family(&product, &colouring, r, &family)?;
    Ok(ProductWitness {
        product,
        colouring,
        family,
    })
}

// ---------------------------------------------------------------------------
// Theta products
// ---------------------------------------------------------------------------

/// Builds and verifies the independent family on G x H_{k,l} witnessing the
/// theta lower bound. Requires k >= l >= 4 and r >= 2.
pub fn theta_witness_family(
    g: &Graph,
    c: &EdgeColouring,
    spec: &ThetaSpec,
    r: u32,
) -> Result<ProductWitness> {
    if spec.l() < 4 {
        return Err(Error::InvalidParameter("theta family requires l >= 4".into()));
    }
    if r < 2 {
        return Err(Error::InvalidParameter("theta family requires r >= 2".into()));
    }
    c.check_proper(g)?;
    let h = theta(spec.k(), spec.l())?;
    let product = cartesian_product(g, &h)?;
    let (colouring, alphas) = colouring::theta_colouring(g, c, spec, &product)?;
    let layout = ProductLayout::new(g, &h);

    let position: BTreeMap<ThIdx, usize> = spec
        .vertices()
        .into_iter()
        .enumerate()
        .map(|(p, v)| (v, p))
        .collect();
    let pos = |i: ThIdx| position[&i];
    let alpha = |i: ThIdx| alphas[&i].clone();

    let basis_r = basis_of_w(g, c, r)?;
    let basis_rm1 = basis_of_w(g, c, r - 1)?;
    let basis_rm2 = basis_of_w(g, c, r - 2)?;

    let mut members = Vec::new();
    let mut provenance = Vec::new();

    for (j, q) in basis_r.members.iter().enumerate() {
        let mut vec = PolyVector::zero(product.vertex_count());
        for v in 0..g.vertex_count() {
            for hp in 0..spec.vertex_count() {
                vec.set(layout.vertex(v, hp), q.entry(v).clone());
            }
        }
        members.push(vec);
        provenance.push(format!("A1[{j}]"));
    }

    // Middle copies carry scaled bases at r-1, supported on two consecutive
    // copies of the cycle through them.
    for i in spec.middle_vertices() {
        let succ = spec.successor(i);
        let a_prev = alpha(alpha_before(spec, i));
        let a_here = alpha(alpha_of(i));
        let a_next = alpha(alpha_of(succ));
        for (j, q) in basis_rm1.members.iter().enumerate() {
            let prov = format!("A{i}[{j}]");
            let scale_i = guarded_ratio(Rational::one(), &a_here - &a_prev, &prov)?;
            let scale_s = guarded_ratio(Rational::one(), &a_here - &a_next, &prov)?;
            let mut vec = PolyVector::zero(product.vertex_count());
            for v in 0..g.vertex_count() {
                vec.set(
                    layout.vertex(v, pos(i)),
                    q.entry(v).mul_root(&a_prev).scale(&scale_i),
                );
                vec.set(
                    layout.vertex(v, pos(succ)),
                    q.entry(v).mul_root(&a_next).scale(&scale_s),
                );
            }
            members.push(vec);
            provenance.push(prov);
        }
    }

    // The copy at vertex 2 spreads over three neighbours.
    {
        let a1 = alpha(ThIdx::Plain(1));
        let a2 = alpha(ThIdx::Plain(2));
        let a2p = alpha(ThIdx::Primed(2));
        let a3 = alpha(ThIdx::Plain(3));
        let a3p = alpha(ThIdx::Primed(3));
        for (j, q) in basis_rm1.members.iter().enumerate() {
            let prov = format!("A2[{j}]");
            let s2 = guarded_ratio(
                Rational::one(),
                (&a2 - &a1) * (&a2p - &a1),
                &prov,
            )?;
            let s3 = guarded_ratio(
                Rational::one(),
                (&a2 - &a3) * (&a2p - &a1),
                &prov,
            )?;
            let s3p = guarded_ratio(
                Rational::one(),
                (&a2 - &a1) * (&a2p - &a3p),
                &prov,
            )?;
            let mut vec = PolyVector::zero(product.vertex_count());
            for v in 0..g.vertex_count() {
                vec.set(
                    layout.vertex(v, pos(ThIdx::Plain(2))),
                    q.entry(v).mul_root(&a1).scale(&s2),
                );
                vec.set(
                    layout.vertex(v, pos(ThIdx::Plain(3))),
                    q.entry(v).mul_root(&a3).scale(&s3),
                );
                vec.set(
                    layout.vertex(v, pos(ThIdx::Primed(3))),
                    q.entry(v).mul_root(&a3p).scale(&s3p),
                );
            }
            members.push(vec);
            provenance.push(prov);
        }
    }

    // The far copies l and k' carry doubly-shifted bases at r-2.
    for i in [ThIdx::Plain(spec.l()), ThIdx::Primed(spec.k())] {
        let a_prev = alpha(alpha_before(spec, i));
        let a_here = alpha(alpha_of(i));
        for (j, q) in basis_rm2.members.iter().enumerate() {
            let mut vec = PolyVector::zero(product.vertex_count());
            for v in 0..g.vertex_count() {
                vec.set(
                    layout.vertex(v, pos(i)),
                    q.entry(v).mul_root(&a_prev).mul_root(&a_here),
                );
            }
            members.push(vec);
            provenance.push(format!("A{i}[{j}]"));
        }
    }

    // X families by degree class of the base vertex.
    for v in 0..g.vertex_count() {
        let deg = g.degree(v) as i64;
        if deg == r as i64 - 1 {
            let base = base_root_poly(g, c, v)?;
            let prov = format!("X1({})", g.label(v));
            let mut vec = PolyVector::zero(product.vertex_count());
            for hp in 0..spec.vertex_count() {
                vec.set(layout.vertex(v, hp), base.clone());
            }
            check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
            members.push(vec);
            provenance.push(prov);
        } else if deg == r as i64 - 2 {
            let base = base_root_poly(g, c, v)?;
            for i in spec.middle_vertices() {
                let succ = spec.successor(i);
                let target = alpha(alpha_of(i));
                let prov = format!("X2({})^{i}", g.label(v));
                let vi = layout.vertex(v, pos(i));
                let vs = layout.vertex(v, pos(succ));
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(vi, interpolation_at(&product, &colouring, vi, vs, &target, &prov)?);
                vec.set(vs, interpolation_at(&product, &colouring, vs, vi, &target, &prov)?);
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
            {
                // Around vertex 2: support on copies 2, 3 and 3'.
                let prov = format!("X2({})^2", g.label(v));
                let a1 = alpha(ThIdx::Plain(1));
                let a2 = alpha(ThIdx::Plain(2));
                let a2p = alpha(ThIdx::Primed(2));
                let a3 = alpha(ThIdx::Plain(3));
                let a3p = alpha(ThIdx::Primed(3));
                let p2 = base.mul_root(&a1);
                let beta = guarded_ratio(
                    p2.eval(&a2),
                    (&a2 - &a3) * base.eval(&a2),
                    &prov,
                )?;
                let beta_p = guarded_ratio(
                    p2.eval(&a2p),
                    (&a2p - &a3p) * base.eval(&a2p),
                    &prov,
                )?;
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(layout.vertex(v, pos(ThIdx::Plain(2))), p2);
                vec.set(
                    layout.vertex(v, pos(ThIdx::Plain(3))),
                    base.mul_root(&a3).scale(&beta),
                );
                vec.set(
                    layout.vertex(v, pos(ThIdx::Primed(3))),
                    base.mul_root(&a3p).scale(&beta_p),
                );
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
            {
                // Around vertex 1: support on copies 1, l and k'.
                let prov = format!("X2({})^1", g.label(v));
                let a1 = alpha(ThIdx::Plain(1));
                let al = alpha(ThIdx::Plain(spec.l()));
                let alm1 = alpha(ThIdx::Plain(spec.l() - 1));
                let akp = alpha(ThIdx::Primed(spec.k()));
                let akm1 = alpha(ThIdx::Primed(spec.k() - 1));
                let p1 = base.mul_root(&a1);
                let beta = guarded_ratio(p1.eval(&al), (&al - &alm1) * base.eval(&al), &prov)?;
                let beta_p =
                    guarded_ratio(p1.eval(&akp), (&akp - &akm1) * base.eval(&akp), &prov)?;
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(layout.vertex(v, pos(ThIdx::Plain(1))), p1);
                vec.set(
                    layout.vertex(v, pos(ThIdx::Plain(spec.l()))),
                    base.mul_root(&alm1).scale(&beta),
                );
                vec.set(
                    layout.vertex(v, pos(ThIdx::Primed(spec.k()))),
                    base.mul_root(&akm1).scale(&beta_p),
                );
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
            {
                // The bridging vector supported on copies 1, 2, 3' and k'.
                let prov = format!("X2({})^0", g.label(v));
                let a1 = alpha(ThIdx::Plain(1));
                let a2 = alpha(ThIdx::Plain(2));
                let a2p = alpha(ThIdx::Primed(2));
                let a3p = alpha(ThIdx::Primed(3));
                let al = alpha(ThIdx::Plain(spec.l()));
                let akp = alpha(ThIdx::Primed(spec.k()));
                let akm1 = alpha(ThIdx::Primed(spec.k() - 1));
                let s1 = guarded_ratio(Rational::one(), &a1 - &al, &prov)?;
                let s2 = guarded_ratio(Rational::one(), &a1 - &a2, &prov)?;
                let p1 = base.mul_root(&al).scale(&s1);
                let p2 = base.mul_root(&a2).scale(&s2);
                let beta = guarded_ratio(
                    p2.eval(&a2p),
                    (&a2p - &a3p) * base.eval(&a2p),
                    &prov,
                )?;
                let beta_p = guarded_ratio(
                    p1.eval(&akp),
                    (&akp - &akm1) * base.eval(&akp),
                    &prov,
                )?;
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(layout.vertex(v, pos(ThIdx::Plain(1))), p1);
                vec.set(layout.vertex(v, pos(ThIdx::Plain(2))), p2);
                vec.set(
                    layout.vertex(v, pos(ThIdx::Primed(3))),
                    base.mul_root(&a3p).scale(&beta),
                );
                vec.set(
                    layout.vertex(v, pos(ThIdx::Primed(spec.k()))),
                    base.mul_root(&akm1).scale(&beta_p),
                );
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
        } else if deg <= r as i64 - 3 {
            // One interpolation pair per theta edge.
            for (a, b, alpha_idx) in spec.edges_with_alpha() {
                let target = alphas[&alpha_idx].clone();
                let prov = format!("X3({})^{alpha_idx}", g.label(v));
                let va = layout.vertex(v, pos(a));
                let vb = layout.vertex(v, pos(b));
                let mut vec = PolyVector::zero(product.vertex_count());
                vec.set(va, interpolation_at(&product, &colouring, va, vb, &target, &prov)?);
                vec.set(vb, interpolation_at(&product, &colouring, vb, va, &target, &prov)?);
                check_x_vanishing(g, c, &layout, v, &vec, &prov)?;
                members.push(vec);
                provenance.push(prov);
            }
        }
    }

    let expected = formulas::formula_theta_general(
        basis_r.claimed_dimension as u64,
        basis_rm1.claimed_dimension as u64,
        basis_rm2.claimed_dimension as u64,
        &g.degree_histogram(),
        spec.k(),
        spec.l(),
        r,
        &Hypothesis::Unverified,
    )?
    .value as usize;
    let family = WitnessFamily {
        members,
        provenance,
        claimed_dimension: expected,
    };
    verify_family(&product, &colouring, r, &family)?;
    Ok(ProductWitness {
        product,
        colouring,
        family,
    })
}

/// Fresh-colour slot of the edge entering `idx` from its cycle predecessor.
fn alpha_before(spec: &ThetaSpec, idx: ThIdx) -> ThIdx {
    match idx {
        ThIdx::Plain(1) => ThIdx::Plain(spec.l()),
        ThIdx::Plain(i) => ThIdx::Plain(i - 1),
        ThIdx::Primed(2) => ThIdx::Plain(1),
        ThIdx::Primed(i) => ThIdx::Primed(i - 1),
    }
}

/// Fresh-colour slot of the edge leaving `idx` toward its cycle successor.
fn alpha_of(idx: ThIdx) -> ThIdx {
    match idx {
        ThIdx::Plain(i) => ThIdx::Plain(i),
        ThIdx::Primed(i) => ThIdx::Primed(i),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{greedy_proper_colouring, EdgeColouring};
    use crate::graph::{self, path, root_tree};
    use crate::poly::rat_int;

    fn greedy(g: &Graph) -> EdgeColouring {
        greedy_proper_colouring(g)
    }

    #[test]
    fn zero_vector_is_always_a_member() {
        for g in [path(4).unwrap(), graph::theta(4, 4).unwrap()] {
            let c = greedy(&g);
            for r in 0..=3 {
                let p = PolyVector::zero(g.vertex_count());
                assert!(w_membership(&g, &c, r, &p).unwrap());
            }
        }
    }

    #[test]
    fn constant_agreement_on_k2() {
        let g = path(2).unwrap();
        let c = greedy(&g);
        let ones = PolyVector::from_entries(vec![Polynomial::one(), Polynomial::one()]);
        assert!(w_membership(&g, &c, 1, &ones).unwrap());
        let mixed = PolyVector::from_entries(vec![
            Polynomial::one(),
            Polynomial::constant(rat_int(2)),
        ]);
        assert!(!w_membership(&g, &c, 1, &mixed).unwrap());
    }

    #[test]
    fn degree_cap_minus_one_admits_only_zero() {
        // An isolated vertex has cap -1; any nonzero constant fails.
        let g = Graph::from_labelled_edges(
            vec![
                crate::graph::VertexLabel::int(0),
                crate::graph::VertexLabel::int(1),
                crate::graph::VertexLabel::int(2),
            ],
            &[(
                crate::graph::VertexLabel::int(0),
                crate::graph::VertexLabel::int(1),
            )],
        )
        .unwrap();
        let c = greedy(&g);
        let mut p = PolyVector::zero(3);
        p.set(2, Polynomial::one());
        assert!(!w_membership(&g, &c, 3, &p).unwrap());
    }

    #[test]
    fn dim_at_r0_is_zero_everywhere() {
        for g in [path(1).unwrap(), path(5).unwrap(), graph::theta(5, 4).unwrap()] {
            let c = greedy(&g);
            assert_eq!(dim_w(&g, &c, 0).unwrap(), 0);
        }
    }

    #[test]
    fn dim_small_cases() {
        let k2 = path(2).unwrap();
        assert_eq!(dim_w(&k2, &greedy(&k2), 1).unwrap(), 1);
        let p3 = path(3).unwrap();
        assert_eq!(dim_w(&p3, &greedy(&p3), 2).unwrap(), 2);
        let k1 = path(1).unwrap();
        for r in 0..4 {
            assert_eq!(dim_w(&k1, &EdgeColouring::empty(), r).unwrap(), 0);
        }
    }

    #[test]
    fn basis_members_are_members_and_full_rank() {
        for (g, r) in [
            (path(2).unwrap(), 1),
            (path(4).unwrap(), 2),
            (graph::star(3).unwrap(), 2),
            (graph::theta(4, 4).unwrap(), 2),
        ] {
            let c = greedy(&g);
            let basis = basis_of_w(&g, &c, r).unwrap();
            assert_eq!(basis.members.len(), dim_w(&g, &c, r).unwrap());
            verify_family(&g, &c, r, &basis).unwrap();
        }
    }

    #[test]
    fn basis_of_k2_at_r1_is_matching_constants() {
        let g = path(2).unwrap();
        let c = greedy(&g);
        let basis = basis_of_w(&g, &c, 1).unwrap();
        assert_eq!(basis.members.len(), 1);
        let m = &basis.members[0];
        assert_eq!(m.entry(0), m.entry(1));
        assert_eq!(m.entry(0).degree(), 0);
    }

    #[test]
    fn z_evaluate_basic_shapes() {
        let g = path(2).unwrap();
        let c = greedy(&g);
        // Product with the unit: the product is K_2 itself.
        let product = g.clone();
        let z = ZVector {
            entries: vec![rat_int(0), rat_int(0)],
        };
        let zero = PolyVector::zero(2);
        assert!(z_evaluate(&g, &c, &product, &zero, &z)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
        let ones = PolyVector::from_entries(vec![Polynomial::one(), Polynomial::one()]);
        assert!(z_evaluate(&g, &c, &product, &ones, &z)
            .unwrap()
            .iter()
            .all(|x| x == &rat_int(1)));
        // A vector of root products vanishes on every selection.
        let roots = PolyVector::from_entries(vec![
            base_root_poly(&g, &c, 0).unwrap(),
            base_root_poly(&g, &c, 1).unwrap(),
        ]);
        assert!(z_evaluate(&g, &c, &product, &roots, &z)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
        // Non-incident colour is rejected.
        let bad = ZVector {
            entries: vec![rat_int(7), rat_int(0)],
        };
        assert!(z_evaluate(&g, &c, &product, &ones, &bad).is_err());
    }

    #[test]
    fn zeros_lemma_finds_a_selection() {
        let g = path(2).unwrap();
        let c = greedy(&g);
        let ones = PolyVector::from_entries(vec![Polynomial::one(), Polynomial::one()]);
        let z = zeros_lemma_witness(&g, &c, &g, &ones, 0).unwrap();
        let values = z_evaluate(&g, &c, &g, &ones, &z).unwrap();
        assert!(values.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn zeros_lemma_rejects_vectors_vanishing_everywhere() {
        let g = path(3).unwrap();
        let c = greedy(&g);
        let roots = PolyVector::from_entries(vec![
            base_root_poly(&g, &c, 0).unwrap(),
            base_root_poly(&g, &c, 1).unwrap(),
            base_root_poly(&g, &c, 2).unwrap(),
        ]);
        assert!(matches!(
            zeros_lemma_witness(&g, &c, &g, &roots, 1),
            Err(Error::NoNonzeroEvaluation)
        ));
    }

    #[test]
    fn zeros_lemma_on_a_fresh_shifted_entry() {
        // Centre entry (x - alpha) with alpha outside the palette: some
        // incident colour is not a root, and the returned selection hits it.
        let g = path(3).unwrap();
        let c = greedy(&g);
        let alpha = rat_int(99);
        let mut p = PolyVector::zero(3);
        p.set(1, Polynomial::linear_from_root(&alpha));
        let z = zeros_lemma_witness(&g, &c, &g, &p, 1).unwrap();
        assert_ne!(z.entries[1], alpha);
        assert!(!p.entry(1).eval(&z.entries[1]).is_zero());
    }

    #[test]
    fn tree_family_sizes_match_hand_counts() {
        let k1 = path(1).unwrap();
        let t = root_tree(&path(2).unwrap()).unwrap();
        let w = tree_witness_family(&k1, &EdgeColouring::empty(), &t, 1).unwrap();
        assert_eq!(w.family.claimed_dimension, 1);
        // The product is K_2; its witness dimension at r = 1 is also 1.
        assert_eq!(dim_w(&w.product, &w.colouring, 1).unwrap(), 1);

        let k2 = path(2).unwrap();
        let w = tree_witness_family(&k2, &greedy(&k2), &t, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 4);

        let t_s2 = root_tree(&graph::star(2).unwrap()).unwrap();
        let w = tree_witness_family(&k1, &EdgeColouring::empty(), &t_s2, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 2);
    }

    #[test]
    fn star_family_sizes_match_hand_counts() {
        let k1 = path(1).unwrap();
        let w = star_witness_family(&k1, &EdgeColouring::empty(), 3, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 2);
        let w = star_witness_family(&k1, &EdgeColouring::empty(), 2, 3).unwrap();
        assert_eq!(w.family.claimed_dimension, 2);
        let p3 = path(3).unwrap();
        let w = star_witness_family(&p3, &greedy(&p3), 1, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 5);
    }

    #[test]
    fn theta_family_sizes_match_hand_counts() {
        let k1 = path(1).unwrap();
        let spec44 = ThetaSpec::new(4, 4).unwrap();
        let w = theta_witness_family(&k1, &EdgeColouring::empty(), &spec44, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 5);
        let w = theta_witness_family(&k1, &EdgeColouring::empty(), &spec44, 3).unwrap();
        assert_eq!(w.family.claimed_dimension, 7);
        let spec54 = ThetaSpec::new(5, 4).unwrap();
        let w = theta_witness_family(&k1, &EdgeColouring::empty(), &spec54, 2).unwrap();
        assert_eq!(w.family.claimed_dimension, 6);
    }

    #[test]
    fn family_members_respect_degree_caps() {
        let g = path(3).unwrap();
        let t = root_tree(&graph::star(2).unwrap()).unwrap();
        let w = tree_witness_family(&g, &greedy(&g), &t, 2).unwrap();
        for member in &w.family.members {
            for v in 0..w.product.vertex_count() {
                let cap = 2i64.min(w.product.degree(v) as i64) - 1;
                assert!(member.entry(v).degree() <= cap);
            }
        }
    }

    #[test]
    fn theta_family_requires_valid_parameters() {
        let k1 = path(1).unwrap();
        let spec43 = ThetaSpec::new(4, 3).unwrap();
        assert!(theta_witness_family(&k1, &EdgeColouring::empty(), &spec43, 2).is_err());
        let spec44 = ThetaSpec::new(4, 4).unwrap();
        assert!(theta_witness_family(&k1, &EdgeColouring::empty(), &spec44, 1).is_err());
    }
}
