//! Design, reserve and configuration hypergraphs, treasuries built from them,
//! common projections and the regularity audit.
//!
//! Cliques are identified by the colex rank of their vertex set. The cogirth
//! configuration hypergraph lives on two tagged copies, `rank * 2 + side`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configurations::span_of;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{binom, for_each_combination, Clique, Edge, Hypergraph, VertexSet};
use crate::search::{span_states, Rule, Universe};

pub type CliqueId = u64;

pub fn clique_id(c: &Clique) -> CliqueId {
    c.colex_rank()
}

pub fn clique_from_id(id: CliqueId, q: usize) -> Clique {
    VertexSet::from_colex_rank(id, q)
}

/// Tagged id of a clique in copy `side` (0 or 1) of a doubled design.
pub fn tag(id: CliqueId, side: u8) -> CliqueId {
    id * 2 + side as u64
}

pub fn untag(tagged: CliqueId) -> (CliqueId, u8) {
    (tagged / 2, (tagged % 2) as u8)
}

fn check_qr(q: usize, r: usize) -> Result<()> {
    if r == 0 || q <= r {
        return invalid(format!("need q > r >= 1, got q={q}, r={r}"));
    }
    Ok(())
}

fn degrees_of(
    vertices: &BTreeSet<Edge>,
    edges: &BTreeSet<CliqueId>,
    q: usize,
    r: usize,
) -> BTreeMap<Edge, usize> {
    let mut deg: BTreeMap<Edge, usize> = vertices.iter().map(|v| (v.clone(), 0)).collect();
    for &id in edges {
        for e in clique_from_id(id, q).subsets(r) {
            if let Some(d) = deg.get_mut(&e) {
                *d += 1;
            }
        }
    }
    deg
}

/// Hypergraph whose vertices are host edges and whose edges are q-cliques.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignHypergraph {
    q: usize,
    r: usize,
    vertices: BTreeSet<Edge>,
    edges: BTreeSet<CliqueId>,
}

impl DesignHypergraph {
    pub fn new(
        q: usize,
        r: usize,
        vertices: BTreeSet<Edge>,
        edges: BTreeSet<CliqueId>,
    ) -> Result<Self> {
        check_qr(q, r)?;
        for &id in &edges {
            for e in clique_from_id(id, q).subsets(r) {
                if !vertices.contains(&e) {
                    return invalid(format!(
                        "clique {id} uses {:?}, which is not a vertex",
                        e.as_slice()
                    ));
                }
            }
        }
        Ok(DesignHypergraph {
            q,
            r,
            vertices,
            edges,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertices(&self) -> &BTreeSet<Edge> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<CliqueId> {
        &self.edges
    }

    pub fn cliques(&self) -> Vec<Clique> {
        self.edges
            .iter()
            .map(|&id| clique_from_id(id, self.q))
            .collect()
    }

    /// Degree of every vertex, isolated vertices included.
    pub fn degrees(&self) -> BTreeMap<Edge, usize> {
        degrees_of(&self.vertices, &self.edges, self.q, self.r)
    }

    /// The same hypergraph with vertices relabelled by their position in `vertices()`;
    /// edges have C(q, r) vertices.
    pub fn as_hypergraph(&self) -> Hypergraph {
        let index: HashMap<&Edge, u32> = self.vertices.iter().zip(0u32..).collect();
        let edges = self
            .cliques()
            .iter()
            .map(|c| {
                let mut ids: Vec<u32> = c.subsets(self.r).iter().map(|e| index[e]).collect();
                ids.sort_unstable();
                VertexSet::from_sorted(ids)
            })
            .collect();
        Hypergraph::new(self.vertices.len(), binom(self.q, self.r) as usize, edges)
            .expect("indices are in range")
    }

    fn restrict(&self, keep: &BTreeSet<CliqueId>) -> Self {
        DesignHypergraph {
            edges: self.edges.intersection(keep).copied().collect(),
            ..self.clone()
        }
    }
}

/// Bipartite hypergraph with parts A and B; every edge is a clique with exactly one edge in A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReserveHypergraph {
    q: usize,
    r: usize,
    a: BTreeSet<Edge>,
    b: BTreeSet<Edge>,
    edges: BTreeSet<CliqueId>,
}

impl ReserveHypergraph {
    pub fn new(
        q: usize,
        r: usize,
        a: BTreeSet<Edge>,
        b: BTreeSet<Edge>,
        edges: BTreeSet<CliqueId>,
    ) -> Result<Self> {
        check_qr(q, r)?;
        if let Some(e) = a.intersection(&b).next() {
            return invalid(format!("{:?} lies in both parts", e.as_slice()));
        }
        for &id in &edges {
            let mut in_a = 0;
            for e in clique_from_id(id, q).subsets(r) {
                if a.contains(&e) {
                    in_a += 1;
                } else if !b.contains(&e) {
                    return invalid(format!(
                        "clique {id} uses {:?}, outside both parts",
                        e.as_slice()
                    ));
                }
            }
            if in_a != 1 {
                return invalid(format!("clique {id} has {in_a} edges in A"));
            }
        }
        Ok(ReserveHypergraph { q, r, a, b, edges })
    }

    pub fn a(&self) -> &BTreeSet<Edge> {
        &self.a
    }

    pub fn b(&self) -> &BTreeSet<Edge> {
        &self.b
    }

    pub fn edges(&self) -> &BTreeSet<CliqueId> {
        &self.edges
    }

    pub fn cliques(&self) -> Vec<Clique> {
        self.edges
            .iter()
            .map(|&id| clique_from_id(id, self.q))
            .collect()
    }

    pub fn degrees(&self) -> BTreeMap<Edge, usize> {
        let all: BTreeSet<Edge> = self.a.union(&self.b).cloned().collect();
        degrees_of(&all, &self.edges, self.q, self.r)
    }

    fn restrict(&self, keep: &BTreeSet<CliqueId>) -> Self {
        ReserveHypergraph {
            edges: self.edges.intersection(keep).copied().collect(),
            ..self.clone()
        }
    }
}

pub fn design_hypergraph(g: &Hypergraph, q: usize) -> Result<DesignHypergraph> {
    check_qr(q, g.r())?;
    Ok(DesignHypergraph {
        q,
        r: g.r(),
        vertices: g.edge_set(),
        edges: g.all_cliques(q).iter().map(clique_id).collect(),
    })
}

pub fn reserve_hypergraph(
    g: &Hypergraph,
    a: &BTreeSet<Edge>,
    b: &BTreeSet<Edge>,
    q: usize,
) -> Result<ReserveHypergraph> {
    check_qr(q, g.r())?;
    if let Some(e) = a.intersection(b).next() {
        return invalid(format!("parts overlap at {:?}", e.as_slice()));
    }
    if let Some(e) = a.iter().chain(b).find(|e| !g.contains_edge(e)) {
        return invalid(format!("{:?} is not a host edge", e.as_slice()));
    }
    let mut edges = BTreeSet::new();
    for e in a {
        for c in g.cliques_containing(e, q)? {
            if c.subsets(g.r()).iter().all(|f| f == e || b.contains(f)) {
                edges.insert(clique_id(&c));
            }
        }
    }
    Ok(ReserveHypergraph {
        q,
        r: g.r(),
        a: a.clone(),
        b: b.clone(),
        edges,
    })
}

#[derive(Clone, Debug)]
enum Source {
    Girth(Hypergraph),
    Cogirth(Hypergraph),
    Explicit,
}

/// Configuration hypergraph with edges of sizes 2..=g, materialised per size class on demand.
#[derive(Clone, Debug)]
pub struct ConfigHypergraph {
    q: usize,
    r: usize,
    g: usize,
    tagged: bool,
    vertices: BTreeSet<CliqueId>,
    source: Source,
    classes: Vec<OnceLock<Vec<Vec<CliqueId>>>>,
}

impl ConfigHypergraph {
    /// Edges given outright. Each must have size in 2..=g, lie in `vertices` and be a matching.
    pub fn from_edges(
        q: usize,
        r: usize,
        g: usize,
        tagged: bool,
        vertices: BTreeSet<CliqueId>,
        edges: impl IntoIterator<Item = Vec<CliqueId>>,
    ) -> Result<Self> {
        check_qr(q, r)?;
        if g < 2 {
            return invalid("configuration hypergraphs need g >= 2");
        }
        let mut by_size: Vec<BTreeSet<Vec<CliqueId>>> = vec![BTreeSet::new(); g - 1];
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 || e.len() > g {
                return invalid(format!("edge of size {} outside [2, {g}]", e.len()));
            }
            if let Some(v) = e.iter().find(|v| !vertices.contains(v)) {
                return invalid(format!("edge uses {v}, which is not a vertex"));
            }
            if !is_matching_ids(&e, q, r, tagged) {
                return Err(Error::NotAMatching(format!("edge {e:?}")));
            }
            by_size[e.len() - 2].insert(e);
        }
        Ok(ConfigHypergraph {
            q,
            r,
            g,
            tagged,
            vertices,
            source: Source::Explicit,
            classes: by_size
                .into_iter()
                .map(|s| OnceLock::from(s.into_iter().collect::<Vec<_>>()))
                .collect(),
        })
    }

    fn lazy(
        q: usize,
        r: usize,
        g: usize,
        tagged: bool,
        vertices: BTreeSet<CliqueId>,
        source: Source,
    ) -> Self {
        ConfigHypergraph {
            q,
            r,
            g,
            tagged,
            vertices,
            source,
            classes: (2..=g).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn is_tagged(&self) -> bool {
        self.tagged
    }

    pub fn vertices(&self) -> &BTreeSet<CliqueId> {
        &self.vertices
    }

    /// Sorted edges of size `s`; empty outside 2..=g.
    pub fn class(&self, s: usize) -> &[Vec<CliqueId>] {
        if s < 2 || s > self.g {
            return &[];
        }
        self.classes[s - 2].get_or_init(|| match &self.source {
            Source::Girth(host) => girth_class(host, self.q, s),
            Source::Cogirth(host) => cogirth_class(host, self.q, s),
            Source::Explicit => Vec::new(),
        })
    }

    /// Materialises every size class, in parallel.
    pub fn materialize(&self) {
        (2..=self.g).into_par_iter().for_each(|s| {
            self.class(s);
        });
    }

    pub fn edges(&self) -> impl Iterator<Item = &Vec<CliqueId>> {
        (2..=self.g).flat_map(move |s| self.class(s).iter())
    }

    pub fn edge_count(&self) -> usize {
        (2..=self.g).map(|s| self.class(s).len()).sum()
    }

    pub fn contains_edge(&self, e: &[CliqueId]) -> bool {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.class(e.len()).binary_search(&e).is_ok()
    }

    /// Decoded clique of a vertex; tagged ids drop the side.
    pub fn clique(&self, v: CliqueId) -> Clique {
        clique_from_id(if self.tagged { untag(v).0 } else { v }, self.q)
    }
}

fn is_matching_ids(ids: &[CliqueId], q: usize, r: usize, tagged: bool) -> bool {
    let mut seen: HashSet<(u8, Edge)> = HashSet::new();
    for &v in ids {
        let (id, side) = if tagged { untag(v) } else { (v, 0) };
        for e in clique_from_id(id, q).subsets(r) {
            if !seen.insert((side, e)) {
                return false;
            }
        }
    }
    true
}

fn girth_class(host: &Hypergraph, q: usize, s: usize) -> Vec<Vec<CliqueId>> {
    if s < 3 {
        return Vec::new();
    }
    let cliques = host.all_cliques(q);
    let found = crate::configurations::erdos_configs_through(&cliques, &[], s, q, host.r())
        .expect("host cliques are well formed");
    let mut out: Vec<Vec<CliqueId>> = found
        .into_iter()
        .map(|c| {
            let mut ids: Vec<CliqueId> = c.cliques.iter().map(clique_id).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    out.sort();
    out
}

/// No sub-collection of size >= 2 spans at most k(q-r)+r vertices, and no two members share an r-set.
fn high_girth_side(side: &[Clique], q: usize, r: usize) -> bool {
    let s = side.len();
    for mask in 1u64..(1u64 << s) {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let sub: Vec<Clique> = (0..s)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| side[i].clone())
            .collect();
        if span_of(&sub) <= k * (q - r) + r {
            return false;
        }
    }
    true
}

/// Whether a two-sided collection is a minimal cogirth configuration. Entries are (side, clique).
pub(crate) fn is_cogirth_edge(members: &[(u8, Clique)], q: usize, r: usize, g: usize) -> bool {
    let s = members.len();
    if s < 2 || s > g {
        return false;
    }
    let bound = |k: usize| k * (q - r) + r - 1;
    let all: Vec<Clique> = members.iter().map(|m| m.1.clone()).collect();
    if span_of(&all) > bound(s) {
        return false;
    }
    for side in 0..2u8 {
        let part: Vec<Clique> = members
            .iter()
            .filter(|m| m.0 == side)
            .map(|m| m.1.clone())
            .collect();
        if part.is_empty() || !high_girth_side(&part, q, r) {
            return false;
        }
    }
    for mask in 1u64..(1u64 << s) - 1 {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let sub: Vec<&(u8, Clique)> = (0..s)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &members[i])
            .collect();
        if !(sub.iter().any(|m| m.0 == 0) && sub.iter().any(|m| m.0 == 1)) {
            continue;
        }
        let cl: Vec<Clique> = sub.iter().map(|m| m.1.clone()).collect();
        if span_of(&cl) <= bound(k) {
            return false;
        }
    }
    true
}

fn cogirth_class(host: &Hypergraph, q: usize, s: usize) -> Vec<Vec<CliqueId>> {
    let r = host.r();
    let cliques = host.all_cliques(q);
    let mut doubled = Vec::with_capacity(cliques.len() * 2);
    for c in &cliques {
        doubled.push(c.clone());
        doubled.push(c.clone());
    }
    let ranks: Vec<CliqueId> = cliques.iter().map(clique_id).collect();
    let u = Universe::from_cliques(host.n(), q, r, &doubled);
    let mut found: BTreeSet<Vec<CliqueId>> = BTreeSet::new();
    for state in span_states(&u, Rule::cogirth(q, r), &[], s) {
        if state.span.len() > s * (q - r) + r - 1 {
            continue;
        }
        let closure = &state.closure;
        for_each_combination(closure.len(), s, |idx| {
            let ids: Vec<u32> = idx.iter().map(|&i| closure[i]).collect();
            let covered: BTreeSet<u32> = ids.iter().flat_map(|&i| u.clique(i).to_vec()).collect();
            if covered.len() != state.span.len() {
                return;
            }
            let members: Vec<(u8, Clique)> = ids
                .iter()
                .map(|&i| ((i % 2) as u8, cliques[i as usize / 2].clone()))
                .collect();
            if is_cogirth_edge(&members, q, r, s) {
                let mut e: Vec<CliqueId> = ids
                    .iter()
                    .map(|&i| tag(ranks[i as usize / 2], (i % 2) as u8))
                    .collect();
                e.sort_unstable();
                found.insert(e);
            }
        });
    }
    found.into_iter().collect()
}

/// Erdős configurations of sizes 3..=g over the q-cliques of `host`.
pub fn girth_config_hypergraph(host: &Hypergraph, q: usize, g: usize) -> Result<ConfigHypergraph> {
    check_qr(q, host.r())?;
    if g < 3 {
        return invalid("girth configuration hypergraphs need g >= 3");
    }
    let vertices = host.all_cliques(q).iter().map(clique_id).collect();
    Ok(ConfigHypergraph::lazy(
        q,
        host.r(),
        g,
        false,
        vertices,
        Source::Girth(host.clone()),
    ))
}

/// Minimal two-sided cogirth configurations of sizes 2..=g over two tagged copies of the q-cliques.
pub fn cogirth_config_hypergraph(
    host: &Hypergraph,
    q: usize,
    g: usize,
) -> Result<ConfigHypergraph> {
    check_qr(q, host.r())?;
    if g < 3 {
        return invalid("cogirth configuration hypergraphs need g >= 3");
    }
    let vertices = host
        .all_cliques(q)
        .iter()
        .flat_map(|c| {
            let id = clique_id(c);
            [tag(id, 0), tag(id, 1)]
        })
        .collect();
    Ok(ConfigHypergraph::lazy(
        q,
        host.r(),
        g,
        true,
        vertices,
        Source::Cogirth(host.clone()),
    ))
}

/// A design hypergraph, a reserve hypergraph sharing its vertex set with part A, and a
/// configuration hypergraph over their cliques.
#[derive(Clone, Debug)]
pub struct Treasury {
    g1: DesignHypergraph,
    g2: ReserveHypergraph,
    h: ConfigHypergraph,
}

impl Treasury {
    pub fn new(g1: DesignHypergraph, g2: ReserveHypergraph, h: ConfigHypergraph) -> Result<Self> {
        if g1.q != g2.q || g1.r != g2.r || g1.q != h.q || g1.r != h.r {
            return invalid("treasury parts disagree on (q, r)");
        }
        if g1.vertices != g2.a {
            return invalid("design vertices must equal reserve part A");
        }
        if h.tagged {
            return invalid("treasury configuration hypergraph must use untagged clique ids");
        }
        if let Some(id) = g1
            .edges
            .iter()
            .chain(&g2.edges)
            .find(|id| !h.vertices.contains(id))
        {
            return invalid(format!("clique {id} is not a configuration vertex"));
        }
        Ok(Treasury { g1, g2, h })
    }

    pub fn g1(&self) -> &DesignHypergraph {
        &self.g1
    }

    pub fn g2(&self) -> &ReserveHypergraph {
        &self.g2
    }

    pub fn h(&self) -> &ConfigHypergraph {
        &self.h
    }

    pub fn q(&self) -> usize {
        self.g1.q
    }

    pub fn r(&self) -> usize {
        self.g1.r
    }

    pub fn g(&self) -> usize {
        self.h.g
    }

    /// Edges of G1 ∪ G2.
    pub fn all_edges(&self) -> BTreeSet<CliqueId> {
        self.g1.edges.union(&self.g2.edges).copied().collect()
    }

    /// Checks that `m` is an H-avoiding matching of G1 ∪ G2 covering every vertex of A.
    pub fn check_perfect_matching(&self, m: &[CliqueId]) -> Result<()> {
        let mut ids = m.to_vec();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotAMatching("repeated clique".into()));
        }
        if let Some(id) = ids
            .iter()
            .find(|id| !self.g1.edges.contains(id) && !self.g2.edges.contains(id))
        {
            return invalid(format!("clique {id} is not an edge of G1 ∪ G2"));
        }
        let mut used: HashSet<Edge> = HashSet::new();
        for &id in &ids {
            for e in clique_from_id(id, self.q()).subsets(self.r()) {
                if !used.insert(e.clone()) {
                    return Err(Error::NotAMatching(format!(
                        "{:?} is covered twice",
                        e.as_slice()
                    )));
                }
            }
        }
        if let Some(e) = self.g2.a.iter().find(|e| !used.contains(e)) {
            return Err(Error::Verification(format!(
                "{:?} in A is uncovered",
                e.as_slice()
            )));
        }
        let set: HashSet<CliqueId> = ids.iter().copied().collect();
        if let Some(e) = self.h.edges().find(|e| e.iter().all(|v| set.contains(v))) {
            return Err(Error::Verification(format!("spans configuration {e:?}")));
        }
        Ok(())
    }

    pub fn is_perfect_matching(&self, m: &[CliqueId]) -> bool {
        self.check_perfect_matching(m).is_ok()
    }
}

/// Treasury with design part on G′ \ X, reserve part from G′ \ X to X, and the girth
/// configuration hypergraph of the whole host.
pub fn build_treasury(
    host: &Hypergraph,
    g_prime: &BTreeSet<Edge>,
    x: &BTreeSet<Edge>,
    q: usize,
    g: usize,
) -> Result<Treasury> {
    if let Some(e) = g_prime.iter().find(|e| !host.contains_edge(e)) {
        return invalid(format!("{:?} is in G′ but not in the host", e.as_slice()));
    }
    if let Some(e) = x.iter().find(|e| !g_prime.contains(e)) {
        return invalid(format!("{:?} is in X but not in G′", e.as_slice()));
    }
    let a: BTreeSet<Edge> = g_prime.difference(x).cloned().collect();
    let g1 = design_hypergraph(&Hypergraph::from_edge_set(host.n(), host.r(), &a)?, q)?;
    let g2 = reserve_hypergraph(host, &a, x, q)?;
    let h = girth_config_hypergraph(host, q, g)?;
    Treasury::new(g1, g2, h)
}

/// T ⊥ 𝓜: deletes configuration vertices completing an edge with some member,
/// and replaces each edge S by its residues S \ Mᵢ that survive. Empty residues are dropped.
pub fn common_projection(t: &Treasury, ms: &[BTreeSet<CliqueId>]) -> Result<Treasury> {
    let design = t.all_edges();
    for (i, m) in ms.iter().enumerate() {
        let inside: Vec<CliqueId> = m.iter().copied().filter(|id| design.contains(id)).collect();
        if !is_matching_ids(&inside, t.q(), t.r(), false) {
            return Err(Error::NotAMatching(format!(
                "member {i} is not a matching of G1 ∪ G2"
            )));
        }
    }
    t.h.materialize();
    let mut deleted: BTreeSet<CliqueId> = BTreeSet::new();
    for s in t.h.edges() {
        for m in ms {
            let mut outside = s.iter().filter(|v| !m.contains(v));
            if let (Some(&v), None) = (outside.next(), outside.next()) {
                deleted.insert(v);
            }
        }
    }
    let vertices: BTreeSet<CliqueId> = t.h.vertices.difference(&deleted).copied().collect();
    let mut edges: BTreeSet<Vec<CliqueId>> = BTreeSet::new();
    for s in t.h.edges() {
        for m in ms {
            let rest: Vec<CliqueId> = s.iter().copied().filter(|v| !m.contains(v)).collect();
            if !rest.is_empty() && rest.iter().all(|v| vertices.contains(v)) {
                edges.insert(rest);
            }
        }
    }
    let h = ConfigHypergraph::from_edges(t.q(), t.r(), t.g(), false, vertices.clone(), edges)?;
    Ok(Treasury {
        g1: t.g1.restrict(&vertices),
        g2: t.g2.restrict(&vertices),
        h,
    })
}

/// Whether `sub` is a subtreasury of `t`: spanning subgraphs of G1 and G2, and every
/// H-edge inside E(G1′) ∪ E(G2′) is an H′-edge.
pub fn is_subtreasury(sub: &Treasury, t: &Treasury) -> bool {
    if sub.g1.vertices != t.g1.vertices || sub.g2.a != t.g2.a || sub.g2.b != t.g2.b {
        return false;
    }
    if !sub.g1.edges.is_subset(&t.g1.edges) || !sub.g2.edges.is_subset(&t.g2.edges) {
        return false;
    }
    let inner = sub.all_edges();
    t.h.edges()
        .filter(|e| e.iter().all(|v| inner.contains(v)))
        .all(|e| sub.h.contains_edge(e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// `None` when the clause quantifies over an empty vertex set.
    pub observed: Option<f64>,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    #[serde(rename = "D")]
    pub d: f64,
    pub sigma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub log: String,
    pub checks: BTreeMap<String, Check>,
}

impl RegularityReport {
    pub fn passes(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

fn upper(observed: Option<usize>, bound: f64) -> Check {
    let obs = observed.unwrap_or(0) as f64;
    Check {
        observed: Some(obs),
        bound,
        pass: obs <= bound,
    }
}

fn lower(observed: Option<usize>, bound: f64) -> Check {
    match observed {
        Some(v) => Check {
            observed: Some(v as f64),
            bound,
            pass: v as f64 >= bound,
        },
        None => Check {
            observed: None,
            bound,
            pass: false,
        },
    }
}

/// Max over t-subsets of V(H) of the number of size-s edges containing it.
pub fn max_codegree(h: &ConfigHypergraph, s: usize, t: usize) -> usize {
    let mut counts: HashMap<Vec<CliqueId>, usize> = HashMap::new();
    for e in h.class(s) {
        for_each_combination(e.len(), t, |idx| {
            *counts
                .entry(idx.iter().map(|&i| e[i]).collect())
                .or_default() += 1;
        });
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Max over host edges v and cliques e ∌ v of the number of size-2 H-edges {e, f} with v ∈ f ∈ E(G).
fn max_two_codegree(t: &Treasury) -> usize {
    let design = t.all_edges();
    let mut counts: HashMap<(CliqueId, Edge), usize> = HashMap::new();
    for e in t.h.class(2) {
        for (x, y) in [(e[0], e[1]), (e[1], e[0])] {
            if !design.contains(&x) || !design.contains(&y) {
                continue;
            }
            let xc = clique_from_id(x, t.q()).subsets(t.r());
            for v in clique_from_id(y, t.q()).subsets(t.r()) {
                if !xc.contains(&v) {
                    *counts.entry((x, v)).or_default() += 1;
                }
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Max common 2-degree over pairs of design cliques sharing no host edge.
fn max_common_two_degree(t: &Treasury) -> usize {
    let design = t.all_edges();
    let mut nbrs: HashMap<CliqueId, Vec<CliqueId>> = HashMap::new();
    for e in t.h.class(2) {
        nbrs.entry(e[0]).or_default().push(e[1]);
        nbrs.entry(e[1]).or_default().push(e[0]);
    }
    let mut counts: HashMap<(CliqueId, CliqueId), usize> = HashMap::new();
    for list in nbrs.values() {
        let mut list: Vec<CliqueId> = list
            .iter()
            .copied()
            .filter(|v| design.contains(v))
            .collect();
        list.sort_unstable();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (u, v) = (list[i], list[j]);
                if is_matching_ids(&[u, v], t.q(), t.r(), false) {
                    *counts.entry((u, v)).or_default() += 1;
                }
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Evaluates every clause of (D, σ, β, α)-regularity. Logarithms are natural.
pub fn regularity_audit(
    t: &Treasury,
    d: f64,
    sigma: f64,
    beta: f64,
    alpha: f64,
) -> Result<RegularityReport> {
    let in_unit = |v: f64| v > 0.0 && v < 1.0;
    if d.is_nan() || d < 1.0 || !in_unit(beta) || !in_unit(alpha) || sigma.is_nan() || sigma < 0.0 {
        return Err(Error::Precondition(format!(
            "need D >= 1, sigma >= 0 and beta, alpha in (0, 1); got D={d}, sigma={sigma}, beta={beta}, alpha={alpha}"
        )));
    }
    t.h.materialize();
    let g = t.g();
    let mut checks = BTreeMap::new();
    let d1 = t.g1.degrees();
    let d2 = t.g2.degrees();
    let a_in_g1 = t.g2.a.iter().filter_map(|e| d1.get(e).copied()).min();
    checks.insert(
        "quasi_regular_upper".into(),
        upper(d1.values().copied().max(), d),
    );
    checks.insert("quasi_regular_lower".into(), lower(a_in_g1, d - sigma));
    checks.insert(
        "reserve_upper".into(),
        upper(t.g2.b.iter().filter_map(|e| d2.get(e).copied()).max(), d),
    );
    checks.insert(
        "reserve_lower".into(),
        lower(
            t.g2.a.iter().filter_map(|e| d2.get(e).copied()).min(),
            d.powf(1.0 - alpha),
        ),
    );

    // (size, max degree, max codegree per t)
    type SizeStats = (usize, usize, Vec<(usize, usize)>);
    let per_size: Vec<SizeStats> = (2..=g)
        .into_par_iter()
        .map(|s| {
            let deg = max_codegree(&t.h, s, 1);
            let co = (2..s).map(|tt| (tt, max_codegree(&t.h, s, tt))).collect();
            (s, deg, co)
        })
        .collect();
    for (s, deg, co) in per_size {
        let bound = alpha * d.powi(s as i32 - 1) * d.ln();
        checks.insert(format!("config_degree_{s}"), upper(Some(deg), bound));
        for (tt, c) in co {
            checks.insert(
                format!("config_codegree_{s}_{tt}"),
                upper(Some(c), d.powf(s as f64 - tt as f64 - beta)),
            );
        }
    }

    let co_bound = d.powf(1.0 - beta);
    let mut pair_counts: HashMap<(Edge, Edge), usize> = HashMap::new();
    for id in t.all_edges() {
        let edges = clique_from_id(id, t.q()).subsets(t.r());
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                *pair_counts
                    .entry((edges[i].clone(), edges[j].clone()))
                    .or_default() += 1;
            }
        }
    }
    checks.insert(
        "codegree".into(),
        upper(pair_counts.values().copied().max(), co_bound),
    );
    checks.insert(
        "two_codegree".into(),
        upper(Some(max_two_codegree(t)), co_bound),
    );
    checks.insert(
        "common_two_degree".into(),
        upper(Some(max_common_two_degree(t)), co_bound),
    );

    Ok(RegularityReport {
        d,
        sigma,
        beta,
        alpha,
        log: "natural".into(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete_host;

    fn e(v: &[u32]) -> Edge {
        VertexSet::from_slice(v).unwrap()
    }

    #[test]
    fn design_examples() {
        let k5 = complete_host(5, 2).unwrap();
        let d = design_hypergraph(&k5, 3).unwrap();
        assert_eq!((d.vertices().len(), d.edges().len()), (10, 10));
        let tri = Hypergraph::new(3, 2, vec![e(&[0, 1]), e(&[0, 2]), e(&[1, 2])]).unwrap();
        assert_eq!(design_hypergraph(&tri, 3).unwrap().edges().len(), 1);
        let k4 = complete_host(4, 2).unwrap();
        let minus = k4.without(&[e(&[0, 1])].into_iter().collect());
        assert!(design_hypergraph(&minus, 4).unwrap().edges().is_empty());
    }

    #[test]
    fn reserve_examples() {
        let k5 = complete_host(5, 2).unwrap();
        let a: BTreeSet<Edge> = [e(&[0, 1])].into_iter().collect();
        let b: BTreeSet<Edge> = k5.edge_set().difference(&a).cloned().collect();
        assert_eq!(reserve_hypergraph(&k5, &a, &b, 3).unwrap().edges().len(), 3);
        assert!(reserve_hypergraph(&k5, &BTreeSet::new(), &b, 3)
            .unwrap()
            .edges()
            .is_empty());
        assert!(reserve_hypergraph(&k5, &a, &BTreeSet::new(), 3)
            .unwrap()
            .edges()
            .is_empty());
        assert!(reserve_hypergraph(&k5, &a, &a, 3).is_err());
    }

    #[test]
    fn girth_hypergraph_on_k6_is_pasch_only() {
        let h = girth_config_hypergraph(&complete_host(6, 2).unwrap(), 3, 4).unwrap();
        assert!(h.class(2).is_empty());
        assert!(h.class(3).is_empty());
        assert_eq!(h.class(4).len(), 30);
        for s in h.class(4) {
            let cl: Vec<Clique> = s.iter().map(|&v| h.clique(v)).collect();
            assert_eq!(span_of(&cl), 6);
        }
        let small = girth_config_hypergraph(&complete_host(4, 2).unwrap(), 3, 3).unwrap();
        assert_eq!(small.edge_count(), 0);
    }

    #[test]
    fn cogirth_pairs_of_one_clique() {
        let k5 = complete_host(5, 2).unwrap();
        let h = cogirth_config_hypergraph(&k5, 3, 3).unwrap();
        let pairs = h.class(2);
        for c in k5.all_cliques(3) {
            let id = clique_id(&c);
            assert!(pairs.contains(&vec![tag(id, 0), tag(id, 1)]));
        }
        let a = clique_id(&e(&[0, 1, 2]));
        let b = clique_id(&e(&[2, 3, 4]));
        assert!(!h.contains_edge(&[tag(a, 0), tag(b, 1)]));
    }

    #[test]
    fn treasury_examples() {
        let k7 = complete_host(7, 2).unwrap();
        let all = k7.edge_set();
        let t = build_treasury(&k7, &all, &BTreeSet::new(), 3, 4).unwrap();
        assert!(t.g2().edges().is_empty());
        assert_eq!(t.g1().edges().len(), 35);

        let star: BTreeSet<Edge> = (1..7).map(|v| e(&[0, v])).collect();
        let t = build_treasury(&k7, &all, &star, 3, 4).unwrap();
        assert_eq!((t.g2().a().len(), t.g2().b().len()), (15, 6));
        assert_eq!(t.g2().edges().len(), 15);

        let t = build_treasury(&k7, &star, &star, 3, 4).unwrap();
        assert!(t.g1().vertices().is_empty());
        assert!(build_treasury(&k7, &star, &all, 3, 4).is_err());
    }

    #[test]
    fn projection_examples() {
        let k6 = complete_host(6, 2).unwrap();
        let t = build_treasury(&k6, &k6.edge_set(), &BTreeSet::new(), 3, 4).unwrap();
        let same = common_projection(&t, &[BTreeSet::new()]).unwrap();
        assert_eq!(same.h().edge_count(), t.h().edge_count());
        assert_eq!(same.h().vertices(), t.h().vertices());
        let none = common_projection(&t, &[]).unwrap();
        assert_eq!(none.h().edge_count(), 0);

        let pasch = t.h().class(4)[0].clone();
        let m: BTreeSet<CliqueId> = pasch[..3].iter().copied().collect();
        let p = common_projection(&t, std::slice::from_ref(&m)).unwrap();
        assert!(!p.h().vertices().contains(&pasch[3]));
        assert!(!p.g1().edges().contains(&pasch[3]));
        let wider = common_projection(&t, &[BTreeSet::new(), m]).unwrap();
        assert!(is_subtreasury(&wider, &same));
        assert!(is_subtreasury(&same, &t));

        let clash: BTreeSet<CliqueId> =
            [clique_id(&e(&[0, 1, 2])), clique_id(&e(&[0, 1, 3]))].into();
        assert!(matches!(
            common_projection(&t, &[clash]),
            Err(Error::NotAMatching(_))
        ));
    }

    #[test]
    fn audit_quasi_regular_on_k7() {
        let k7 = complete_host(7, 2).unwrap();
        let t = build_treasury(&k7, &k7.edge_set(), &BTreeSet::new(), 3, 4).unwrap();
        let rep = regularity_audit(&t, 5.0, 0.0, 0.1, 0.5).unwrap();
        let up = &rep.checks["quasi_regular_upper"];
        assert_eq!(up.observed, Some(5.0));
        assert!(up.pass);
        assert!(rep.checks["quasi_regular_lower"].pass);
        assert!(!rep.checks["reserve_lower"].pass);
    }

    #[test]
    fn audit_on_empty_treasury() {
        let k4 = complete_host(4, 2).unwrap();
        let t = build_treasury(&k4, &BTreeSet::new(), &BTreeSet::new(), 3, 3).unwrap();
        let rep = regularity_audit(&t, 3.0, 0.0, 0.5, 0.5).unwrap();
        for k in ["quasi_regular_upper", "reserve_upper", "codegree"] {
            assert!(rep.checks[k].pass, "{k}");
        }
        assert!(!rep.checks["quasi_regular_lower"].pass);
        assert!(!rep.checks["reserve_lower"].pass);
        assert!(regularity_audit(&t, 0.5, 0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn perfect_matching_of_fano_treasury() {
        let k7 = complete_host(7, 2).unwrap();
        let t = build_treasury(&k7, &k7.edge_set(), &BTreeSet::new(), 3, 3).unwrap();
        let fano = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        let ids: Vec<CliqueId> = fano.iter().map(|c| clique_id(&e(c))).collect();
        assert!(t.is_perfect_matching(&ids));
        let t4 = build_treasury(&k7, &k7.edge_set(), &BTreeSet::new(), 3, 4).unwrap();
        assert!(matches!(
            t4.check_perfect_matching(&ids),
            Err(Error::Verification(_))
        ));
        assert!(!t.is_perfect_matching(&ids[..6]));
    }
}
