//! Boosters (one hypergraph, two disjoint clique decompositions) and rooted boosters.
//!
//! The r = 1 base case comes from regular bipartite graphs of large girth. Higher
//! uniformity is reached by coning a base booster over two apex vertices, then
//! repeatedly gluing fresh cone gadgets until the two distinguished cliques share no
//! vertex, at which point the rooted booster is read off.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::configurations::{
    cogirth_of, erdos_configs_through, girth_of, rooted_booster_girth, rooted_girth_of,
};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Clique, Edge, Hypergraph, VertexSet};

pub const DEFAULT_ATTEMPTS: usize = 64;

fn sorted_edges_of(cliques: &[Clique], r: usize) -> Vec<Edge> {
    let mut out: Vec<Edge> = cliques.iter().flat_map(|c| c.subsets(r)).collect();
    out.sort();
    out
}

/// Whether the r-sets of `cliques` are exactly `target` (sorted, duplicate free), each once.
fn decomposes(cliques: &[Clique], target: &[Edge], r: usize) -> bool {
    sorted_edges_of(cliques, r) == target
}

fn vertices_of<'a>(sets: impl IntoIterator<Item = &'a VertexSet>) -> BTreeSet<u32> {
    sets.into_iter()
        .flat_map(|s| s.as_slice().iter().copied())
        .collect()
}

fn check_sizes(sets: &[VertexSet], k: usize, what: &str) -> Result<()> {
    match sets.iter().find(|s| s.len() != k) {
        Some(s) => invalid(format!(
            "{what} {:?} does not have {k} vertices",
            s.as_slice()
        )),
        None => Ok(()),
    }
}

fn sorted_unique(mut v: Vec<VertexSet>, what: &str) -> Result<Vec<VertexSet>> {
    v.sort();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return invalid(format!("{what} {:?} listed twice", w[0].as_slice()));
    }
    Ok(v)
}

fn disjoint_sorted(a: &[Clique], b: &[Clique]) -> bool {
    a.iter().all(|c| b.binary_search(c).is_err())
}

/// A hypergraph with two clique decompositions that share no clique.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BoosterRepr", into = "BoosterRepr")]
pub struct Booster {
    q: usize,
    r: usize,
    edges: Vec<Edge>,
    b1: Vec<Clique>,
    b2: Vec<Clique>,
}

#[derive(Clone, Serialize, Deserialize)]
struct BoosterRepr {
    q: usize,
    r: usize,
    edges: Vec<Edge>,
    b1: Vec<Clique>,
    b2: Vec<Clique>,
}

impl TryFrom<BoosterRepr> for Booster {
    type Error = Error;

    fn try_from(b: BoosterRepr) -> Result<Self> {
        Booster::new(b.q, b.r, b.edges, b.b1, b.b2)
    }
}

impl From<Booster> for BoosterRepr {
    fn from(b: Booster) -> Self {
        BoosterRepr {
            q: b.q,
            r: b.r,
            edges: b.edges,
            b1: b.b1,
            b2: b.b2,
        }
    }
}

impl Booster {
    pub fn new(
        q: usize,
        r: usize,
        edges: Vec<Edge>,
        b1: Vec<Clique>,
        b2: Vec<Clique>,
    ) -> Result<Self> {
        if r == 0 || q <= r {
            return invalid(format!("need q > r >= 1, got q = {q}, r = {r}"));
        }
        check_sizes(&edges, r, "edge")?;
        check_sizes(&b1, q, "clique")?;
        check_sizes(&b2, q, "clique")?;
        let edges = sorted_unique(edges, "edge")?;
        let b1 = sorted_unique(b1, "clique")?;
        let b2 = sorted_unique(b2, "clique")?;
        if !decomposes(&b1, &edges, r) {
            return Err(Error::Verification(
                "first packing does not decompose the booster".into(),
            ));
        }
        if !decomposes(&b2, &edges, r) {
            return Err(Error::Verification(
                "second packing does not decompose the booster".into(),
            ));
        }
        if !disjoint_sorted(&b1, &b2) {
            return invalid("the two decompositions share a clique");
        }
        Ok(Booster {
            q,
            r,
            edges,
            b1,
            b2,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn b1(&self) -> &[Clique] {
        &self.b1
    }

    pub fn b2(&self) -> &[Clique] {
        &self.b2
    }

    pub fn vertices(&self) -> BTreeSet<u32> {
        vertices_of(&self.edges)
    }

    /// One past the largest vertex id.
    pub fn vertex_bound(&self) -> u32 {
        self.edges
            .iter()
            .filter_map(|e| e.max_vertex())
            .max()
            .map_or(0, |m| m + 1)
    }
}

/// A booster toggling a root clique S: `off` decomposes B, `on` decomposes B ∪ S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RootedRepr", into = "RootedRepr")]
pub struct RootedBooster {
    q: usize,
    r: usize,
    root: Clique,
    edges: Vec<Edge>,
    on: Vec<Clique>,
    off: Vec<Clique>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RootedRepr {
    q: usize,
    r: usize,
    root: Clique,
    edges: Vec<Edge>,
    on: Vec<Clique>,
    off: Vec<Clique>,
}

impl TryFrom<RootedRepr> for RootedBooster {
    type Error = Error;

    fn try_from(b: RootedRepr) -> Result<Self> {
        RootedBooster::new(b.q, b.r, b.root, b.edges, b.on, b.off)
    }
}

impl From<RootedBooster> for RootedRepr {
    fn from(b: RootedBooster) -> Self {
        RootedRepr {
            q: b.q,
            r: b.r,
            root: b.root,
            edges: b.edges,
            on: b.on,
            off: b.off,
        }
    }
}

impl RootedBooster {
    pub fn new(
        q: usize,
        r: usize,
        root: Clique,
        edges: Vec<Edge>,
        on: Vec<Clique>,
        off: Vec<Clique>,
    ) -> Result<Self> {
        let edges = sorted_unique(edges, "edge")?;
        let on = sorted_unique(on, "clique")?;
        let off = sorted_unique(off, "clique")?;
        let rb = RootedBooster {
            q,
            r,
            root,
            edges,
            on,
            off,
        };
        rb.validate()?;
        Ok(rb)
    }

    /// Structural check of the rooted-booster axioms.
    pub fn validate(&self) -> Result<()> {
        let (q, r) = (self.q, self.r);
        if r == 0 || q <= r {
            return invalid(format!("need q > r >= 1, got q = {q}, r = {r}"));
        }
        if self.root.len() != q {
            return invalid(format!(
                "root {:?} does not have {q} vertices",
                self.root.as_slice()
            ));
        }
        check_sizes(&self.edges, r, "edge")?;
        check_sizes(&self.on, q, "clique")?;
        check_sizes(&self.off, q, "clique")?;
        if self.edges.iter().any(|e| e.is_subset_of(&self.root)) {
            return invalid("booster edges must avoid the root clique");
        }
        if !decomposes(&self.off, &self.edges, r) {
            return Err(Error::Verification(
                "off packing does not decompose B".into(),
            ));
        }
        let mut with_root = self.edges.clone();
        with_root.extend(self.root.subsets(r));
        with_root.sort();
        if !decomposes(&self.on, &with_root, r) {
            return Err(Error::Verification(
                "on packing does not decompose B plus the root".into(),
            ));
        }
        if self.on.binary_search(&self.root).is_ok() {
            return invalid("the root may not be an on clique");
        }
        if !disjoint_sorted(&self.on, &self.off) {
            return invalid("on and off packings share a clique");
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn root(&self) -> &Clique {
        &self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn on(&self) -> &[Clique] {
        &self.on
    }

    pub fn off(&self) -> &[Clique] {
        &self.off
    }

    /// Vertices of B ∪ S.
    pub fn vertices(&self) -> BTreeSet<u32> {
        let mut v = vertices_of(&self.edges);
        v.extend(self.root.as_slice());
        v
    }

    /// Number of vertices outside the root.
    pub fn b(&self) -> usize {
        self.vertices().len() - self.q
    }

    /// Every clique of either packing.
    pub fn cliques(&self) -> impl Iterator<Item = &Clique> {
        self.on.iter().chain(self.off.iter())
    }

    fn relabel(&self, f: impl Fn(u32) -> u32) -> RootedBooster {
        let map = |v: &[VertexSet]| -> Vec<VertexSet> {
            let mut out: Vec<VertexSet> = v.iter().map(|s| s.map(&f)).collect();
            out.sort();
            out
        };
        RootedBooster {
            q: self.q,
            r: self.r,
            root: self.root.map(&f),
            edges: map(&self.edges),
            on: map(&self.on),
            off: map(&self.off),
        }
    }
}

/// A simple bipartite graph with parts `0..left` and `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.left + self.right];
        for &(a, b) in &self.edges {
            let b = b + self.left as u32;
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }

    /// Common degree when the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let adj = self.adjacency();
        let d = adj.first()?.len();
        adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Length of a shortest cycle; `None` for forests. Parallel edges count as 2-cycles.
    pub fn girth(&self) -> Option<usize> {
        let mut seen = HashSet::new();
        if self.edges.iter().any(|e| !seen.insert(*e)) {
            return Some(2);
        }
        let adj = self.adjacency();
        let n = adj.len();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![u32::MAX; n];
        for s in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            let mut queue = VecDeque::from([s as u32]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                if best.is_some_and(|b| 2 * du + 1 >= b) {
                    break;
                }
                for &w in &adj[u as usize] {
                    if dist[w as usize] == usize::MAX {
                        dist[w as usize] = du + 1;
                        parent[w as usize] = u;
                        queue.push_back(w);
                    } else if parent[u as usize] != w {
                        let len = du + dist[w as usize] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Points are graph edges; each vertex contributes the clique of its incident edges.
    pub fn to_booster(&self) -> Result<Booster> {
        let q = match self.regular_degree() {
            Some(d) if d >= 2 => d,
            _ => return invalid("base graphs must be regular of degree at least 2"),
        };
        let mut left = vec![Vec::new(); self.left];
        let mut right = vec![Vec::new(); self.right];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            left[a as usize].push(i as u32);
            right[b as usize].push(i as u32);
        }
        let edges = (0..self.edges.len() as u32)
            .map(|i| VertexSet::from_sorted(vec![i]))
            .collect();
        let b1 = left.into_iter().map(VertexSet::from_sorted).collect();
        let b2 = right.into_iter().map(VertexSet::from_sorted).collect();
        Booster::new(q, 1, edges, b1, b2)
    }

    /// Inverse correspondence: first-packing cliques on the left, second on the right.
    pub fn from_booster(b: &Booster) -> Result<Self> {
        if b.r() != 1 {
            return invalid("only uniformity-1 boosters correspond to bipartite graphs");
        }
        let points = b.vertex_bound() as usize;
        let mut side = vec![[u32::MAX; 2]; points];
        for (k, packing) in [b.b1(), b.b2()].into_iter().enumerate() {
            for (i, c) in packing.iter().enumerate() {
                for &p in c.as_slice() {
                    side[p as usize][k] = i as u32;
                }
            }
        }
        let edges = b
            .vertices()
            .iter()
            .map(|&p| (side[p as usize][0], side[p as usize][1]))
            .collect();
        Ok(BipartiteGraph {
            left: b.b1().len(),
            right: b.b2().len(),
            edges,
        })
    }
}

/// The 2m-cycle; left vertex i meets points 2i and 2i+1.
fn even_cycle(m: usize) -> BipartiteGraph {
    let m32 = m as u32;
    let edges = (0..m32)
        .flat_map(|i| [(i, i), (i, (i + 1) % m32)])
        .collect();
    BipartiteGraph {
        left: m,
        right: m,
        edges,
    }
}

fn complete_bipartite(q: usize) -> BipartiteGraph {
    let q32 = q as u32;
    BipartiteGraph {
        left: q,
        right: q,
        edges: (0..q32)
            .flat_map(|a| (0..q32).map(move |b| (a, b)))
            .collect(),
    }
}

/// Incidence graph of the Fano plane: 3-regular, girth 6, 14 vertices.
fn heawood() -> BipartiteGraph {
    let edges = (0..7u32)
        .flat_map(|line| [line, (line + 1) % 7, (line + 3) % 7].map(|p| (p, line)))
        .collect();
    BipartiteGraph {
        left: 7,
        right: 7,
        edges,
    }
}

/// Union of q perfect matchings between two m-sets, each edge kept only if it closes
/// no cycle shorter than `girth`.
fn random_regular_bipartite<R: Rng>(
    q: usize,
    m: usize,
    girth: usize,
    rng: &mut R,
) -> Option<BipartiteGraph> {
    let n = 2 * m;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;
    let mut queue = VecDeque::new();
    let mut edges = Vec::with_capacity(q * m);
    let mut order: Vec<u32> = (0..m as u32).collect();
    for _ in 0..q {
        let mut free: Vec<u32> = (0..m as u32).collect();
        order.shuffle(rng);
        for &u in &order {
            // Mark every vertex within distance girth - 2 of u.
            epoch += 1;
            stamp[u as usize] = epoch;
            queue.clear();
            queue.push_back((u, 0usize));
            while let Some((x, d)) = queue.pop_front() {
                if d + 1 > girth.saturating_sub(2) {
                    continue;
                }
                for &y in &adj[x as usize] {
                    if stamp[y as usize] != epoch {
                        stamp[y as usize] = epoch;
                        queue.push_back((y, d + 1));
                    }
                }
            }
            let ok: Vec<usize> = (0..free.len())
                .filter(|&i| stamp[m + free[i] as usize] != epoch)
                .collect();
            let &pick = ok.choose(rng)?;
            let v = free.swap_remove(pick);
            adj[u as usize].push(m as u32 + v);
            adj[m + v as usize].push(u);
            edges.push((u, v));
        }
    }
    edges.sort_unstable();
    Some(BipartiteGraph {
        left: m,
        right: m,
        edges,
    })
}

/// Vertices per side of the smallest conceivable q-regular bipartite graph of girth `g`.
fn moore_side(q: usize, g: usize) -> usize {
    let d = g.div_ceil(2);
    let mut total = 0usize;
    let mut layer = 1usize;
    for _ in 0..d / 2 {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(q - 1).saturating_mul(q - 1);
    }
    if d % 2 == 1 {
        total = total.saturating_add(layer);
    }
    total.max(q)
}

/// A q-regular bipartite graph of girth at least `g`.
pub fn regular_bipartite<R: Rng>(
    q: usize,
    g: usize,
    attempts: usize,
    rng: &mut R,
) -> Result<BipartiteGraph> {
    if q < 2 {
        return invalid("degree must be at least 2");
    }
    if q == 2 {
        return Ok(even_cycle(g.div_ceil(2).max(2)));
    }
    if g <= 4 {
        return Ok(complete_bipartite(q));
    }
    if q == 3 && g <= 6 {
        return Ok(heawood());
    }
    let target = g + g % 2;
    let mut m = moore_side(q, target);
    for attempt in 0..attempts {
        if let Some(graph) = random_regular_bipartite(q, m, target, rng) {
            if graph.girth().is_none_or(|x| x >= target) {
                return Ok(graph);
            }
        }
        if attempt % 4 == 3 {
            m += m.div_ceil(4);
        }
    }
    Err(Error::RetryExhausted(format!(
        "no {q}-regular bipartite graph of girth {g} found in {attempts} attempts"
    )))
}

/// A uniformity-1 booster of cogirth at least `g`.
pub fn base_booster<R: Rng>(q: usize, g: usize, attempts: usize, rng: &mut R) -> Result<Booster> {
    if g < 2 {
        return invalid("girth target must be at least 2");
    }
    let graph = regular_bipartite(q, g, attempts, rng)?;
    let booster = graph.to_booster()?;
    let back = BipartiteGraph::from_booster(&booster)?;
    if back.regular_degree() != Some(q) || back.girth().is_some_and(|x| x < g) {
        return Err(Error::Verification(
            "base booster does not map back to a girth-g regular graph".into(),
        ));
    }
    if g >= 3
        && !cogirth_of(booster.b1(), booster.b2(), q, 1, g - 1)?
            .value
            .is_sentinel()
    {
        return Err(Error::Verification(format!(
            "base booster has cogirth below {g}"
        )));
    }
    Ok(booster)
}

/// A booster with two distinguished cliques, `s` in the first packing and
/// `s_prime` in the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapBooster {
    pub booster: Booster,
    pub s: Clique,
    pub s_prime: Clique,
}

impl OverlapBooster {
    pub fn overlap(&self) -> usize {
        self.s.shared(&self.s_prime)
    }
}

fn ensure_sentinel(report: crate::configurations::GirthReport, what: &str) -> Result<()> {
    if report.value.is_sentinel() {
        Ok(())
    } else {
        Err(Error::Verification(format!(
            "{what}: found {:?}",
            report.value
        )))
    }
}

/// Both packings have girth above `g_max` and the second packing minus `s_prime`
/// has rooted girth above `rooted_max` at V(s) ∪ V(s_prime).
fn check_overlap_conditions(ob: &OverlapBooster, g_max: usize, rooted_max: usize) -> Result<()> {
    let b = &ob.booster;
    let (q, r) = (b.q(), b.r());
    if g_max >= 2 {
        ensure_sentinel(girth_of(b.b1(), q, r, g_max)?, "first packing girth")?;
        ensure_sentinel(girth_of(b.b2(), q, r, g_max)?, "second packing girth")?;
    }
    if rooted_max >= 1 {
        let rest: Vec<Clique> = b
            .b2()
            .iter()
            .filter(|c| **c != ob.s_prime)
            .cloned()
            .collect();
        let root = ob.s.union(&ob.s_prime);
        ensure_sentinel(
            rooted_girth_of(&rest, q, r, &root, rooted_max)?,
            "rooted girth at both cliques",
        )?;
    }
    Ok(())
}

/// Two-apex cone over a base booster of uniformity r−1 and clique size q−1.
///
/// The base must have girth and cogirth at least g+1; the output has both packings of
/// girth at least g+1 and the overlap condition at rooted girth g, all re-verified.
pub fn cone_construction(base: &Booster, g: usize) -> Result<OverlapBooster> {
    let (qb, rb) = (base.q(), base.r());
    let (q, r) = (qb + 1, rb + 1);
    if g < 2 {
        return invalid("cone construction needs g >= 2");
    }
    ensure_sentinel(girth_of(base.b1(), qb, rb, g)?, "base first packing girth")
        .and(ensure_sentinel(
            girth_of(base.b2(), qb, rb, g)?,
            "base second packing girth",
        ))
        .map_err(|e| Error::Precondition(e.to_string()))?;
    ensure_sentinel(cogirth_of(base.b1(), base.b2(), qb, rb, g)?, "base cogirth")
        .map_err(|e| Error::Precondition(e.to_string()))?;

    let bound = base.vertex_bound();
    let (v1, v2) = (bound, bound + 1);
    let mut edges: Vec<Edge> = Vec::new();
    for e in base.edges() {
        edges.push(e.with(v1));
        edges.push(e.with(v2));
    }
    for c in base.b1().iter().chain(base.b2()) {
        edges.extend(c.subsets(r));
    }
    let phi = |c: &Clique, v: u32| c.with(v);
    let b1: Vec<Clique> = base
        .b1()
        .iter()
        .map(|c| phi(c, v1))
        .chain(base.b2().iter().map(|c| phi(c, v2)))
        .collect();
    let b2: Vec<Clique> = base
        .b2()
        .iter()
        .map(|c| phi(c, v1))
        .chain(base.b1().iter().map(|c| phi(c, v2)))
        .collect();
    let booster = Booster::new(q, r, edges, b1, b2)
        .map_err(|e| Error::Verification(format!("cone output is not a booster: {e}")))?;
    let first = base
        .b1()
        .first()
        .ok_or_else(|| Error::InvalidInput("base booster has no cliques".into()))?;
    let out = OverlapBooster {
        booster,
        s: phi(first, v1),
        s_prime: phi(first, v2),
    };
    check_overlap_conditions(&out, g, g - 1)?;
    Ok(out)
}

fn shared_vertices(a: &Clique, b: &Clique) -> Vec<u32> {
    a.as_slice()
        .iter()
        .copied()
        .filter(|&v| b.contains(v))
        .collect()
}

/// Default gluing of a gadget onto `current`: the gadget's first clique lands on
/// `current.s_prime` with its apex on a vertex shared by `s` and `s_prime`; every
/// other gadget vertex is fresh.
fn default_gluing(current: &OverlapBooster, gadget: &OverlapBooster) -> Result<Vec<u32>> {
    let shared = shared_vertices(&current.s, &current.s_prime);
    let apex: Vec<u32> = gadget.s.minus(&gadget.s_prime).as_slice().to_vec();
    if apex.len() > shared.len() {
        return Err(Error::Precondition(
            "gadget needs more shared root vertices than are available".into(),
        ));
    }
    let gb = gadget
        .booster
        .vertex_bound()
        .max(gadget.s.max_vertex().map_or(0, |m| m + 1));
    let mut map = vec![u32::MAX; gb as usize];
    for (&a, &w) in apex.iter().zip(&shared) {
        map[a as usize] = w;
    }
    let rest_src: Vec<u32> = gadget
        .s
        .as_slice()
        .iter()
        .copied()
        .filter(|v| !apex.contains(v))
        .collect();
    let rest_dst: Vec<u32> = current
        .s_prime
        .as_slice()
        .iter()
        .copied()
        .filter(|v| !shared[..apex.len()].contains(v))
        .collect();
    for (&a, &b) in rest_src.iter().zip(&rest_dst) {
        map[a as usize] = b;
    }
    let fresh = current.booster.vertex_bound();
    for (slot, v) in map.iter_mut().filter(|m| **m == u32::MAX).zip(fresh..) {
        *slot = v;
    }
    Ok(map)
}

/// One step of the overlap-reduction iteration. `gluing` maps gadget vertex ids to ids
/// in the merged booster; `None` picks the canonical gluing.
pub fn reduce_root_overlap(
    current: &OverlapBooster,
    gadget: &OverlapBooster,
    g: usize,
    gluing: Option<&[u32]>,
) -> Result<OverlapBooster> {
    let b = &current.booster;
    let (q, r) = (b.q(), b.r());
    if gadget.booster.q() != q || gadget.booster.r() != r {
        return invalid("gadget has different clique size or uniformity");
    }
    let i = current.overlap();
    if i == 0 {
        return Err(Error::Precondition("roots already share no vertex".into()));
    }
    let map = match gluing {
        Some(m) => m.to_vec(),
        None => default_gluing(current, gadget)?,
    };
    let gadget_vertices = gadget.booster.vertices();
    if map.len() < gadget.booster.vertex_bound() as usize {
        return invalid("gluing does not cover every gadget vertex");
    }
    let images: HashSet<u32> = gadget_vertices.iter().map(|&v| map[v as usize]).collect();
    if images.len() != gadget_vertices.len() {
        return invalid("gluing is not injective");
    }
    let f = |v: u32| map[v as usize];
    if gadget.s.map(f) != current.s_prime {
        return invalid("gluing must send the gadget's first clique onto s_prime");
    }
    let core = current.s.union(&current.s_prime);
    let shared: Vec<u32> = shared_vertices(&current.s, &current.s_prime);
    let dropped = current.s_prime.minus(&gadget.s_prime.map(f));
    if !dropped.as_slice().iter().all(|v| shared.contains(v)) {
        return invalid("vertices leaving s_prime must lie in both roots");
    }
    let host_vertices = b.vertices();
    for &v in &gadget_vertices {
        if !gadget.s.contains(v) && host_vertices.contains(&f(v)) {
            return invalid(format!(
                "gadget vertex {v} lands on existing vertex {}; glued copies may only meet in s_prime",
                f(v)
            ));
        }
    }
    debug_assert!(core.len() >= q);

    let map_all = |v: &[VertexSet]| -> Vec<VertexSet> { v.iter().map(|s| s.map(f)).collect() };
    let g_edges = map_all(gadget.booster.edges());
    let g_b1 = map_all(gadget.booster.b1());
    let g_b2 = map_all(gadget.booster.b2());
    let s_prime_edges: HashSet<Edge> = current.s_prime.subsets(r).into_iter().collect();
    let mut edges: Vec<Edge> = b.edges().to_vec();
    edges.extend(g_edges.into_iter().filter(|e| !s_prime_edges.contains(e)));
    let mut b1: Vec<Clique> = b.b1().to_vec();
    b1.extend(g_b1.into_iter().filter(|c| *c != current.s_prime));
    let mut b2: Vec<Clique> = b
        .b2()
        .iter()
        .filter(|c| **c != current.s_prime)
        .cloned()
        .collect();
    b2.extend(g_b2);
    let booster = Booster::new(q, r, edges, b1, b2)
        .map_err(|e| Error::Verification(format!("merged object is not a booster: {e}")))?;
    let out = OverlapBooster {
        booster,
        s: current.s.clone(),
        s_prime: gadget.s_prime.map(f),
    };
    if out.overlap() >= i {
        return Err(Error::Verification("overlap did not decrease".into()));
    }
    check_overlap_conditions(&out, g.saturating_sub(1), g.saturating_sub(1))?;
    Ok(out)
}

/// Reads the rooted booster off a zero-overlap booster: root `s`, `off` the rest of
/// the first packing, `on` the whole second packing.
pub fn extract_rooted(ob: &OverlapBooster) -> Result<RootedBooster> {
    if ob.overlap() != 0 {
        return Err(Error::Precondition("roots still share vertices".into()));
    }
    let b = &ob.booster;
    let root_edges: HashSet<Edge> = ob.s.subsets(b.r()).into_iter().collect();
    let edges = b
        .edges()
        .iter()
        .filter(|e| !root_edges.contains(e))
        .cloned()
        .collect();
    let off = b.b1().iter().filter(|c| **c != ob.s).cloned().collect();
    RootedBooster::new(b.q(), b.r(), ob.s.clone(), edges, b.b2().to_vec(), off)
}

/// Relabels so the root is `0..q` and the other vertices follow in increasing order.
fn normalize(rb: &RootedBooster) -> RootedBooster {
    let mut order: Vec<u32> = rb.root.as_slice().to_vec();
    order.extend(rb.vertices().into_iter().filter(|v| !rb.root.contains(*v)));
    let pos: HashMap<u32, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    rb.relabel(|v| pos[&v])
}

/// A rooted booster whose rooted girth exceeds `g`, re-verified before returning.
///
/// Uniformity 1 and 2 are built from scratch; higher uniformity needs `base`, a booster
/// of uniformity r−1 and clique size q−1 with girth and cogirth at least g+2.
pub fn build_rooted_booster<R: Rng>(
    q: usize,
    r: usize,
    g: usize,
    base: Option<&Booster>,
    attempts: usize,
    rng: &mut R,
) -> Result<RootedBooster> {
    if r == 0 || q <= r {
        return invalid(format!("need q > r >= 1, got q = {q}, r = {r}"));
    }
    if g < 1 {
        return invalid("g must be at least 1");
    }
    let target = g + 1;
    let rooted = if r == 1 {
        let b = base_booster(q, target.max(2), attempts, rng)?;
        let s = b.b1()[0].clone();
        let off = b.b1()[1..].to_vec();
        let root_edges: HashSet<Edge> = s.subsets(1).into_iter().collect();
        let edges = b
            .edges()
            .iter()
            .filter(|e| !root_edges.contains(e))
            .cloned()
            .collect();
        RootedBooster::new(q, 1, s, edges, b.b2().to_vec(), off)?
    } else {
        let owned;
        let base = match (r, base) {
            (_, Some(b)) => {
                if b.q() != q - 1 || b.r() != r - 1 {
                    return invalid(format!(
                        "supplied base has (q, r) = ({}, {}); expected ({}, {})",
                        b.q(),
                        b.r(),
                        q - 1,
                        r - 1
                    ));
                }
                b
            }
            (2, None) => {
                owned = base_booster(q - 1, target + 1, attempts, rng)?;
                &owned
            }
            (_, None) => {
                return Err(Error::MissingBaseData(format!(
                    "rooted boosters for r >= 3 need a supplied base booster (uniformity {}, clique size {}) with girth and cogirth at least {}",
                    r - 1,
                    q - 1,
                    g + 2
                )))
            }
        };
        let gadget = cone_construction(base, target)?;
        let mut current = gadget.clone();
        while current.overlap() > 0 {
            current = reduce_root_overlap(&current, &gadget, target, None)?;
        }
        extract_rooted(&current)?
    };
    let rooted = normalize(&rooted);
    let report = rooted_booster_girth(&rooted, g)?;
    if !report.value.is_sentinel() {
        return Err(Error::Verification(format!(
            "constructed booster has rooted girth {:?}, not above {g}",
            report.value
        )));
    }
    Ok(rooted)
}

/// Copies `template` into `host` with its root on `root`, fresh vertices elsewhere,
/// and every edge outside `forbidden`.
pub fn embed_rooted_booster<R: Rng>(
    template: &RootedBooster,
    root: &Clique,
    host: &Hypergraph,
    forbidden: &HashSet<Edge>,
    attempts: usize,
    rng: &mut R,
) -> Result<RootedBooster> {
    template.validate()?;
    let (q, r) = (template.q(), template.r());
    if root.len() != q || host.r() != r {
        return invalid("root size or host uniformity does not match the template");
    }
    if root.subsets(r).iter().any(|e| !host.contains_edge(e)) {
        return invalid("root is not a clique of the host");
    }
    let free_template: Vec<u32> = template
        .vertices()
        .into_iter()
        .filter(|v| !template.root.contains(*v))
        .collect();
    let pool: Vec<u32> = (0..host.n() as u32)
        .filter(|v| !root.contains(*v))
        .collect();
    if free_template.len() > pool.len() {
        return Err(Error::BudgetExhausted(
            "host has too few vertices for the template".into(),
        ));
    }
    let bound = template.vertices().last().map_or(0, |v| v + 1) as usize;
    for _ in 0..attempts {
        let mut map = vec![u32::MAX; bound];
        for (&t, &h) in template.root.as_slice().iter().zip(root.as_slice()) {
            map[t as usize] = h;
        }
        for (k, i) in index::sample(rng, pool.len(), free_template.len())
            .into_iter()
            .enumerate()
        {
            map[free_template[k] as usize] = pool[i];
        }
        let f = |v: u32| map[v as usize];
        let fits = template.edges.iter().all(|e| {
            let m = e.map(f);
            host.contains_edge(&m) && !forbidden.contains(&m)
        });
        if fits {
            return Ok(template.relabel(f));
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no embedding found in {attempts} attempts"
    )))
}

/// Exact incidence and configuration statistics of a booster family sharing one host.
#[derive(Clone, Debug)]
pub struct FamilyStats {
    edge_counts: BTreeMap<Edge, usize>,
    girth_edges: Vec<Vec<usize>>,
    extend_edges: Vec<(Vec<Clique>, Vec<usize>)>,
}

/// One way of realising a configuration: clique index -> (member, uses on side), or
/// `None` for a clique taken from the host design.
type Assignment = Vec<Option<(usize, bool)>>;

fn for_each_assignment(
    options: &[Vec<Option<(usize, bool)>>],
    current: &mut Assignment,
    f: &mut impl FnMut(&Assignment),
) {
    let k = current.len();
    if k == options.len() {
        f(current);
        return;
    }
    for &opt in &options[k] {
        if let Some((member, side)) = opt {
            if current
                .iter()
                .flatten()
                .any(|&(m, s)| m == member && s != side)
            {
                continue;
            }
        }
        current.push(opt);
        for_each_assignment(options, current, f);
        current.pop();
    }
}

impl FamilyStats {
    /// Number of members whose edge set contains `e`.
    pub fn boosters_containing(&self, e: &Edge) -> usize {
        self.edge_counts.get(e).copied().unwrap_or(0)
    }

    pub fn max_boosters_containing(&self) -> usize {
        self.edge_counts.values().copied().max().unwrap_or(0)
    }

    /// Member-index sets forming booster configurations.
    pub fn girth_edges(&self) -> &[Vec<usize>] {
        &self.girth_edges
    }

    /// Clique-booster configurations as (design cliques, member indices).
    pub fn extend_edges(&self) -> &[(Vec<Clique>, Vec<usize>)] {
        &self.extend_edges
    }

    /// Largest number of size-`s` booster configurations containing a fixed `t`-set of members.
    pub fn girth_degree(&self, s: usize, t: usize) -> usize {
        max_tally(
            self.girth_edges
                .iter()
                .filter(|e| e.len() == s)
                .map(|e| tuples(e, t)),
        )
    }

    /// The (t1, t2)-degree of clique-booster configurations with s1 design cliques and s2 members.
    pub fn extend_degree(&self, s1: usize, s2: usize, t1: usize, t2: usize) -> usize {
        let keys = self
            .extend_edges
            .iter()
            .filter(|(c, m)| c.len() == s1 && m.len() == s2)
            .map(|(c, m)| {
                let cs = c
                    .iter()
                    .map(|x| x.colex_rank() as usize)
                    .collect::<Vec<_>>();
                let mut out = Vec::new();
                for a in tuples(&cs, t1) {
                    for b in tuples(m, t2) {
                        out.push((a.clone(), b));
                    }
                }
                out
            });
        max_tally(keys)
    }
}

fn tuples(items: &[usize], t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    crate::hypergraph::for_each_combination(items.len(), t, |idx| {
        out.push(idx.iter().map(|&i| items[i]).collect());
    });
    out
}

fn max_tally<K: std::hash::Hash + Eq>(groups: impl Iterator<Item = Vec<K>>) -> usize {
    let mut counts: HashMap<K, usize> = HashMap::new();
    for group in groups {
        for key in group {
            *counts.entry(key).or_default() += 1;
        }
    }
    counts.into_values().max().unwrap_or(0)
}

/// Counts of members realising the clique set `z` on one side, split by whether the
/// member's root meets V(z) in at most r−1 vertices.
pub fn small_large_counts(family: &[RootedBooster], z: &[Clique]) -> (usize, usize) {
    let zv: BTreeSet<u32> = vertices_of(z);
    let (mut small, mut large) = (0, 0);
    for b in family {
        let inside = |side: &[Clique]| z.iter().all(|c| side.binary_search(c).is_ok());
        if !(inside(b.on()) || inside(b.off())) {
            continue;
        }
        let meet = b
            .root()
            .as_slice()
            .iter()
            .filter(|v| zv.contains(v))
            .count();
        if meet < b.r() {
            small += 1;
        } else {
            large += 1;
        }
    }
    (small, large)
}

/// Statistics for `family` inside `host`, with Erdős configurations up to size `g`.
pub fn booster_family_stats(
    family: &[RootedBooster],
    host: &Hypergraph,
    g: usize,
) -> Result<FamilyStats> {
    let Some(first) = family.first() else {
        return Ok(FamilyStats {
            edge_counts: BTreeMap::new(),
            girth_edges: Vec::new(),
            extend_edges: Vec::new(),
        });
    };
    let (q, r) = (first.q(), first.r());
    if family.iter().any(|b| b.q() != q || b.r() != r) {
        return invalid("family members must share clique size and uniformity");
    }
    let mut edge_counts = BTreeMap::new();
    for b in family {
        b.validate()?;
        for e in b.edges() {
            *edge_counts.entry(e.clone()).or_default() += 1;
        }
    }
    // Member sides holding each clique.
    let mut holders: BTreeMap<Clique, Vec<(usize, bool)>> = BTreeMap::new();
    for (i, b) in family.iter().enumerate() {
        for c in b.on() {
            holders.entry(c.clone()).or_default().push((i, true));
        }
        for c in b.off() {
            holders.entry(c.clone()).or_default().push((i, false));
        }
    }
    let distinct_roots = |members: &BTreeSet<usize>| {
        let roots: BTreeSet<&Clique> = members.iter().map(|&m| family[m].root()).collect();
        roots.len() == members.len()
    };

    let booster_cliques: Vec<Clique> = holders.keys().cloned().collect();
    let mut girth_edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    if g >= 3 {
        for s in 3..=g {
            for f in erdos_configs_through(&booster_cliques, &[], s, q, r)? {
                let options: Vec<Vec<Option<(usize, bool)>>> = f
                    .cliques
                    .iter()
                    .map(|c| holders[c].iter().map(|&h| Some(h)).collect())
                    .collect();
                for_each_assignment(&options, &mut Vec::new(), &mut |a| {
                    let members: BTreeSet<usize> = a.iter().flatten().map(|&(m, _)| m).collect();
                    if members.len() >= 2 && distinct_roots(&members) {
                        girth_edges.insert(members.into_iter().collect());
                    }
                });
            }
        }
    }

    let mut extend_edges: BTreeSet<(Vec<Clique>, Vec<usize>)> = BTreeSet::new();
    if g >= 3 {
        let design = host.all_cliques(q);
        let mut configs: BTreeSet<Vec<Clique>> = BTreeSet::new();
        for c in &booster_cliques {
            for s in 3..=g {
                for f in erdos_configs_through(&design, std::slice::from_ref(c), s, q, r)? {
                    configs.insert(f.cliques);
                }
            }
        }
        for f in configs {
            let options: Vec<Vec<Option<(usize, bool)>>> = f
                .iter()
                .map(|c| {
                    let mut o = vec![None];
                    if let Some(h) = holders.get(c) {
                        o.extend(h.iter().map(|&x| Some(x)));
                    }
                    o
                })
                .collect();
            for_each_assignment(&options, &mut Vec::new(), &mut |a| {
                let design_part: Vec<Clique> = a
                    .iter()
                    .zip(&f)
                    .filter(|(o, _)| o.is_none())
                    .map(|(_, c)| c.clone())
                    .collect();
                let members: BTreeSet<usize> = a.iter().flatten().map(|&(m, _)| m).collect();
                if !design_part.is_empty() && !members.is_empty() && distinct_roots(&members) {
                    extend_edges.insert((design_part, members.into_iter().collect()));
                }
            });
        }
    }
    Ok(FamilyStats {
        edge_counts,
        girth_edges: girth_edges.into_iter().collect(),
        extend_edges: extend_edges.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn even_cycles_have_exact_cogirth() {
        for m in 2..=6 {
            let b = even_cycle(m).to_booster().unwrap();
            let c = cogirth_of(b.b1(), b.b2(), 2, 1, 2 * m).unwrap();
            assert_eq!(c.value.finite(), Some(2 * m), "m = {m}");
        }
    }

    #[test]
    fn heawood_is_girth_six() {
        let h = heawood();
        assert_eq!(h.regular_degree(), Some(3));
        assert_eq!(h.girth(), Some(6));
        let b = base_booster(3, 6, 8, &mut rng()).unwrap();
        assert_eq!(b.vertices().len(), 21);
        assert_eq!(b.b1().len() + b.b2().len(), 14);
    }

    #[test]
    fn random_base_reaches_girth_eight() {
        let g = regular_bipartite(3, 8, 64, &mut rng()).unwrap();
        assert!(g.girth().unwrap() >= 8);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn cone_over_eight_cycle_has_expected_size() {
        let base = even_cycle(4).to_booster().unwrap();
        let ob = cone_construction(&base, 7).unwrap();
        assert_eq!(ob.booster.vertices().len(), 10);
        assert_eq!(ob.booster.edges().len(), 24);
        assert_eq!(ob.booster.b1().len(), 8);
        assert_eq!(ob.overlap(), 2);
    }

    #[test]
    fn cone_rejects_shared_clique_base() {
        let e = |v: u32| VertexSet::from_sorted(vec![v]);
        let c = VertexSet::from_sorted(vec![0, 1]);
        let bad = Booster::new(2, 1, vec![e(0), e(1)], vec![c.clone()], vec![c]);
        assert!(bad.is_err());
    }

    #[test]
    fn reduction_drives_overlap_to_zero() {
        let base = even_cycle(3).to_booster().unwrap();
        let gadget = cone_construction(&base, 5).unwrap();
        let once = reduce_root_overlap(&gadget, &gadget, 5, None).unwrap();
        assert_eq!(once.overlap(), 1);
        let twice = reduce_root_overlap(&once, &gadget, 5, None).unwrap();
        assert_eq!(twice.overlap(), 0);
        assert!(reduce_root_overlap(&twice, &gadget, 5, None).is_err());
    }

    #[test]
    fn gluing_onto_existing_vertices_is_rejected() {
        let base = even_cycle(3).to_booster().unwrap();
        let gadget = cone_construction(&base, 5).unwrap();
        let mut map = default_gluing(&gadget, &gadget).unwrap();
        let outside: u32 = *gadget
            .booster
            .vertices()
            .iter()
            .find(|v| !gadget.s.contains(**v) && !gadget.s_prime.contains(**v))
            .unwrap();
        let free_slot = (0..map.len())
            .find(|&v| !gadget.s.contains(v as u32))
            .unwrap();
        map[free_slot] = outside;
        assert!(reduce_root_overlap(&gadget, &gadget, 5, Some(&map)).is_err());
    }

    #[test]
    fn rooted_boosters_verify() {
        for g in 3..=5 {
            let rb = build_rooted_booster(3, 2, g, None, 16, &mut rng()).unwrap();
            assert_eq!(rb.root().as_slice(), &[0, 1, 2]);
            assert!(rooted_booster_girth(&rb, g).unwrap().value.is_sentinel());
        }
    }

    #[test]
    fn higher_uniformity_needs_base() {
        match build_rooted_booster(4, 3, 4, None, 4, &mut rng()) {
            Err(Error::MissingBaseData(msg)) => assert!(msg.contains("r >= 3")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniformity_one_rooted_booster() {
        let rb = build_rooted_booster(3, 1, 4, None, 8, &mut rng()).unwrap();
        assert!(rooted_booster_girth(&rb, 4).unwrap().value.is_sentinel());
    }

    #[test]
    fn embedding_respects_forbidden_edges() {
        let rb = build_rooted_booster(3, 2, 3, None, 8, &mut rng()).unwrap();
        let host = crate::hypergraph::complete_host(30, 2).unwrap();
        let root = VertexSet::from_sorted(vec![3, 4, 5]);
        let e = embed_rooted_booster(&rb, &root, &host, &HashSet::new(), 8, &mut rng()).unwrap();
        assert_eq!(e.root(), &root);
        assert_eq!(e.edges().len(), rb.edges().len());
        let all: HashSet<Edge> = host.edges().iter().cloned().collect();
        assert!(embed_rooted_booster(&rb, &root, &host, &all, 8, &mut rng()).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let rb = build_rooted_booster(3, 2, 3, None, 8, &mut rng()).unwrap();
        let s = crate::hypergraph::to_json(&rb).unwrap();
        let back: RootedBooster = crate::hypergraph::from_json(&s).unwrap();
        assert_eq!(back, rb);
        assert!(s.contains("\"root\""));
    }
}
