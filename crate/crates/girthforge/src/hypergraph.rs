//! Uniform hypergraphs over dense vertex ids, cliques and packings.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` with every increasing `k`-tuple of indices below `n`.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A sorted set of distinct vertices. Ordered by size, then colexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct VertexSet(Vec<u32>);

/// An r-edge of a hypergraph.
pub type Edge = VertexSet;
/// A q-clique, identified with its vertex set.
pub type Clique = VertexSet;

impl TryFrom<Vec<u32>> for VertexSet {
    type Error = Error;

    fn try_from(mut v: Vec<u32>) -> Result<Self> {
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("repeated vertex in {v:?}"));
        }
        Ok(VertexSet(v))
    }
}

impl From<VertexSet> for Vec<u32> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl VertexSet {
    pub fn new(v: Vec<u32>) -> Result<Self> {
        Self::try_from(v)
    }

    pub fn from_slice(v: &[u32]) -> Result<Self> {
        Self::try_from(v.to_vec())
    }

    /// Caller guarantees `v` is strictly increasing.
    pub(crate) fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn max_vertex(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// Number of shared vertices.
    pub fn shared(&self, other: &VertexSet) -> usize {
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut v: Vec<u32> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        VertexSet(
            self.0
                .iter()
                .copied()
                .filter(|v| !other.contains(*v))
                .collect(),
        )
    }

    pub fn with(&self, v: u32) -> VertexSet {
        let mut w = self.0.clone();
        if let Err(pos) = w.binary_search(&v) {
            w.insert(pos, v);
        }
        VertexSet(w)
    }

    pub fn map(&self, f: impl Fn(u32) -> u32) -> VertexSet {
        let mut v: Vec<u32> = self.0.iter().map(|&x| f(x)).collect();
        v.sort_unstable();
        VertexSet(v)
    }

    /// Colexicographic rank among sets of the same size.
    pub fn colex_rank(&self) -> u64 {
        colex_rank(&self.0)
    }

    pub fn from_colex_rank(mut rank: u64, k: usize) -> VertexSet {
        let mut out = vec![0u32; k];
        for i in (0..k).rev() {
            let mut v = i as u64;
            while binom(v as usize + 1, i + 1) <= rank {
                v += 1;
            }
            out[i] = v as u32;
            rank -= binom(v as usize, i + 1);
        }
        VertexSet(out)
    }

    /// All `k`-subsets in lexicographic order.
    pub fn subsets(&self, k: usize) -> Vec<VertexSet> {
        let mut out = Vec::new();
        for_each_combination(self.0.len(), k, |idx| {
            out.push(VertexSet(idx.iter().map(|&i| self.0[i]).collect()));
        });
        out
    }
}

pub(crate) fn colex_rank(sorted: &[u32]) -> u64 {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| binom(v as usize, i + 1))
        .sum()
}

/// An r-uniform multi-hypergraph on vertices `0..n`, edges kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphRepr", into = "HypergraphRepr")]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

#[derive(Clone, Serialize, Deserialize)]
struct HypergraphRepr {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

impl TryFrom<HypergraphRepr> for Hypergraph {
    type Error = Error;

    fn try_from(h: HypergraphRepr) -> Result<Self> {
        Hypergraph::new(h.n, h.r, h.edges)
    }
}

impl From<Hypergraph> for HypergraphRepr {
    fn from(h: Hypergraph) -> Self {
        HypergraphRepr {
            n: h.n,
            r: h.r,
            edges: h.edges,
        }
    }
}

impl Hypergraph {
    pub fn new(n: usize, r: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if r == 0 {
            return invalid("uniformity must be at least 1");
        }
        for e in &edges {
            if e.len() != r {
                return invalid(format!(
                    "edge {:?} does not have {r} vertices",
                    e.as_slice()
                ));
            }
            if e.max_vertex().is_some_and(|v| v as usize >= n) {
                return invalid(format!(
                    "edge {:?} leaves vertex range 0..{n}",
                    e.as_slice()
                ));
            }
        }
        edges.sort();
        Ok(Hypergraph { n, r, edges })
    }

    pub fn empty(n: usize, r: usize) -> Result<Self> {
        Self::new(n, r, Vec::new())
    }

    pub fn from_edge_set(n: usize, r: usize, edges: &BTreeSet<Edge>) -> Result<Self> {
        Self::new(n, r, edges.iter().cloned().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn is_simple(&self) -> bool {
        self.edges.windows(2).all(|w| w[0] != w[1])
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges.iter().cloned().collect()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Same vertex range, edges outside `remove`.
    pub fn without(&self, remove: &BTreeSet<Edge>) -> Hypergraph {
        Hypergraph {
            n: self.n,
            r: self.r,
            edges: self
                .edges
                .iter()
                .filter(|e| !remove.contains(*e))
                .cloned()
                .collect(),
        }
    }

    /// Number of edges (with multiplicity) containing `s`.
    pub fn multiplicity(&self, s: &VertexSet) -> usize {
        if s.len() > self.r {
            return 0;
        }
        self.edges.iter().filter(|e| s.is_subset_of(e)).count()
    }

    /// |G(U)| for every i-subset U contained in some edge.
    pub fn codegree_counts(&self, i: usize) -> HashMap<VertexSet, usize> {
        let mut counts = HashMap::new();
        if i > self.r {
            return counts;
        }
        for e in &self.edges {
            for s in e.subsets(i) {
                *counts.entry(s).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Maximum i-codegree.
    pub fn max_codegree(&self, i: usize) -> usize {
        if i == 0 {
            return self.edges.len();
        }
        self.codegree_counts(i).into_values().max().unwrap_or(0)
    }

    /// Minimum (r−1)-codegree over all (r−1)-subsets of the vertex range.
    pub fn min_codegree(&self) -> usize {
        let i = self.r - 1;
        if i == 0 {
            return self.edges.len();
        }
        let counts = self.codegree_counts(i);
        if (counts.len() as u64) < binom(self.n, i) {
            0
        } else {
            counts.into_values().min().unwrap_or(0)
        }
    }

    pub fn is_divisible(&self, q: usize) -> Result<bool> {
        if q <= self.r {
            return invalid(format!("clique size {q} must exceed uniformity {}", self.r));
        }
        for i in 0..self.r {
            let d = binom(q - i, self.r - i);
            if i == 0 {
                if !(self.edges.len() as u64).is_multiple_of(d) {
                    return Ok(false);
                }
                continue;
            }
            if self
                .codegree_counts(i)
                .values()
                .any(|&c| !(c as u64).is_multiple_of(d))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All q-cliques through the edge `e`.
    pub fn cliques_containing(&self, e: &Edge, q: usize) -> Result<Vec<Clique>> {
        if !self.contains_edge(e) {
            return invalid(format!("{:?} is not an edge", e.as_slice()));
        }
        if q < self.r {
            return invalid("clique size below uniformity");
        }
        Ok(CliqueFinder::new(self).containing(e.as_slice(), q, None))
    }

    /// Every q-clique of the hypergraph, in canonical order.
    pub fn all_cliques(&self, q: usize) -> Vec<Clique> {
        let finder = CliqueFinder::new(self);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert(e) {
                continue;
            }
            let m = e.max_vertex().unwrap_or(0);
            out.extend(finder.containing(e.as_slice(), q, Some(m)));
        }
        out.sort();
        out
    }
}

pub fn complete_host(n: usize, r: usize) -> Result<Hypergraph> {
    if n == 0 || r == 0 || r > n {
        return invalid(format!("complete host needs 1 <= r <= n, got n={n}, r={r}"));
    }
    let count = binom(n, r);
    if count > 50_000_000 {
        return invalid(format!("K_{n}^{r} has {count} edges, beyond desk scale"));
    }
    let mut edges = Vec::with_capacity(count as usize);
    for_each_combination(n, r, |idx| {
        edges.push(VertexSet(idx.iter().map(|&i| i as u32).collect()));
    });
    edges.sort();
    Ok(Hypergraph { n, r, edges })
}

/// Whether the divisibility conditions for a K_q^r-decomposition of K_n^r hold.
pub fn admissible(n: usize, q: usize, r: usize) -> Result<bool> {
    if r == 0 || q <= r {
        return invalid(format!("need q > r >= 1, got q={q}, r={r}"));
    }
    Ok((0..r).all(|i| {
        let top = if n >= i { binom(n - i, r - i) } else { 0 };
        top % binom(q - i, r - i) == 0
    }))
}

/// Rejects clique lists in which some r-set lies in two members.
pub fn check_matching(cliques: &[Clique], r: usize) -> Result<()> {
    let mut seen: HashSet<Edge> = HashSet::new();
    for c in cliques {
        for e in c.subsets(r) {
            if !seen.insert(e.clone()) {
                return Err(Error::NotAMatching(format!(
                    "r-set {:?} lies in two cliques",
                    e.as_slice()
                )));
            }
        }
    }
    Ok(())
}

/// Adjacency structures for clique enumeration.
pub(crate) struct CliqueFinder {
    n: usize,
    r: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
    edges: HashSet<u64>,
    links: HashMap<u64, Vec<u32>>,
    present: Vec<u32>,
}

impl CliqueFinder {
    pub(crate) fn new(g: &Hypergraph) -> Self {
        let n = g.n;
        let r = g.r;
        let words = n.div_ceil(64);
        let mut f = CliqueFinder {
            n,
            r,
            words,
            rows: Vec::new(),
            edges: HashSet::new(),
            links: HashMap::new(),
            present: Vec::new(),
        };
        match r {
            1 => {
                f.present = g.edges.iter().map(|e| e.as_slice()[0]).collect();
                f.present.dedup();
            }
            2 => {
                f.rows = vec![vec![0u64; words]; n];
                for e in &g.edges {
                    let (a, b) = (e.as_slice()[0] as usize, e.as_slice()[1] as usize);
                    f.rows[a][b / 64] |= 1 << (b % 64);
                    f.rows[b][a / 64] |= 1 << (a % 64);
                }
            }
            _ => {
                for e in &g.edges {
                    let s = e.as_slice();
                    f.edges.insert(colex_rank(s));
                    for skip in 0..r {
                        let t: Vec<u32> = (0..r).filter(|&j| j != skip).map(|j| s[j]).collect();
                        f.links.entry(colex_rank(&t)).or_default().push(s[skip]);
                    }
                }
                for l in f.links.values_mut() {
                    l.sort_unstable();
                    l.dedup();
                }
            }
        }
        f
    }

    /// Cliques of size q containing `e`; extra vertices must exceed `above` when given.
    pub(crate) fn containing(&self, e: &[u32], q: usize, above: Option<u32>) -> Vec<Clique> {
        let need = q - e.len();
        let floor = above.map_or(0, |a| a as usize + 1);
        let mut out = Vec::new();
        match self.r {
            1 => {
                let pool: Vec<u32> = self
                    .present
                    .iter()
                    .copied()
                    .filter(|&v| v as usize >= floor && !e.contains(&v))
                    .collect();
                for_each_combination(pool.len(), need, |idx| {
                    let mut v = e.to_vec();
                    v.extend(idx.iter().map(|&i| pool[i]));
                    v.sort_unstable();
                    out.push(VertexSet(v));
                });
            }
            2 => {
                let (a, b) = (e[0] as usize, e[1] as usize);
                let mut cand: Vec<u64> = (0..self.words)
                    .map(|w| self.rows[a][w] & self.rows[b][w])
                    .collect();
                clear_below(&mut cand, floor);
                let mut chosen = e.to_vec();
                self.extend_r2(&cand, need, &mut chosen, &mut out);
            }
            _ => {
                let mut cand: Option<Vec<u32>> = None;
                for_each_combination(e.len(), self.r - 1, |idx| {
                    let t: Vec<u32> = idx.iter().map(|&i| e[i]).collect();
                    let link = self.links.get(&colex_rank(&t)).cloned().unwrap_or_default();
                    cand = Some(match cand.take() {
                        None => link,
                        Some(c) => intersect_sorted(&c, &link),
                    });
                });
                let cand: Vec<u32> = cand
                    .unwrap_or_default()
                    .into_iter()
                    .filter(|&v| v as usize >= floor && !e.contains(&v))
                    .collect();
                let mut chosen = e.to_vec();
                self.extend_general(&cand, 0, need, &mut chosen, &mut out);
            }
        }
        out
    }

    fn extend_r2(&self, cand: &[u64], need: usize, chosen: &mut Vec<u32>, out: &mut Vec<Clique>) {
        if need == 0 {
            let mut v = chosen.clone();
            v.sort_unstable();
            out.push(VertexSet(v));
            return;
        }
        for w in 0..self.words {
            let mut bits = cand[w];
            while bits != 0 {
                let v = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut next: Vec<u64> =
                    (0..self.words).map(|i| cand[i] & self.rows[v][i]).collect();
                clear_below(&mut next, v + 1);
                chosen.push(v as u32);
                self.extend_r2(&next, need - 1, chosen, out);
                chosen.pop();
            }
        }
    }

    fn extend_general(
        &self,
        cand: &[u32],
        start: usize,
        need: usize,
        chosen: &mut Vec<u32>,
        out: &mut Vec<Clique>,
    ) {
        if need == 0 {
            let mut v = chosen.clone();
            v.sort_unstable();
            out.push(VertexSet(v));
            return;
        }
        for i in start..cand.len() {
            let w = cand[i];
            if self.completes(chosen, w) {
                chosen.push(w);
                self.extend_general(cand, i + 1, need - 1, chosen, out);
                chosen.pop();
            }
        }
    }

    fn completes(&self, chosen: &[u32], w: u32) -> bool {
        let mut ok = true;
        for_each_combination(chosen.len(), self.r - 1, |idx| {
            if !ok {
                return;
            }
            let mut t: Vec<u32> = idx.iter().map(|&i| chosen[i]).collect();
            t.push(w);
            t.sort_unstable();
            ok = self.edges.contains(&colex_rank(&t));
        });
        ok
    }

    #[allow(dead_code)]
    pub(crate) fn n(&self) -> usize {
        self.n
    }
}

fn clear_below(bits: &mut [u64], floor: usize) {
    for (w, word) in bits.iter_mut().enumerate() {
        let lo = w * 64;
        if floor >= lo + 64 {
            *word = 0;
        } else if floor > lo {
            *word &= !((1u64 << (floor - lo)) - 1);
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// A set of edge-disjoint q-cliques of a simple host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PackingRepr", into = "PackingRepr")]
pub struct Packing {
    host: Hypergraph,
    q: usize,
    blocks: Vec<Clique>,
}

#[derive(Clone, Serialize, Deserialize)]
struct PackingRepr {
    n: usize,
    r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<Edge>>,
    q: usize,
    blocks: Vec<Clique>,
}

impl TryFrom<PackingRepr> for Packing {
    type Error = Error;

    fn try_from(p: PackingRepr) -> Result<Self> {
        let host = match p.edges {
            Some(edges) => Hypergraph::new(p.n, p.r, edges)?,
            None => complete_host(p.n, p.r)?,
        };
        Packing::new(host, p.q, p.blocks)
    }
}

impl From<Packing> for PackingRepr {
    fn from(p: Packing) -> Self {
        let complete = p.host.is_simple() && p.host.e() as u64 == binom(p.host.n, p.host.r);
        PackingRepr {
            n: p.host.n,
            r: p.host.r,
            edges: (!complete).then_some(p.host.edges),
            q: p.q,
            blocks: p.blocks,
        }
    }
}

impl Packing {
    pub fn new(host: Hypergraph, q: usize, mut blocks: Vec<Clique>) -> Result<Self> {
        let r = host.r;
        if q <= r {
            return invalid(format!("clique size {q} must exceed uniformity {r}"));
        }
        if !host.is_simple() {
            return invalid("packing hosts must be simple");
        }
        for b in &blocks {
            if b.len() != q {
                return invalid(format!(
                    "block {:?} does not have {q} vertices",
                    b.as_slice()
                ));
            }
            for e in b.subsets(r) {
                if !host.contains_edge(&e) {
                    return invalid(format!(
                        "block {:?} uses {:?}, which is not a host edge",
                        b.as_slice(),
                        e.as_slice()
                    ));
                }
            }
        }
        check_matching(&blocks, r)?;
        blocks.sort();
        Ok(Packing { host, q, blocks })
    }

    /// A packing whose host is the complete r-graph on n vertices.
    pub fn in_complete(n: usize, r: usize, q: usize, blocks: Vec<Clique>) -> Result<Self> {
        Self::new(complete_host(n, r)?, q, blocks)
    }

    pub fn host(&self) -> &Hypergraph {
        &self.host
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.host.r
    }

    pub fn n(&self) -> usize {
        self.host.n
    }

    pub fn blocks(&self) -> &[Clique] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn covered_edges(&self) -> BTreeSet<Edge> {
        self.blocks
            .iter()
            .flat_map(|b| b.subsets(self.host.r))
            .collect()
    }

    /// Host edges not covered by any block.
    pub fn leave(&self) -> Vec<Edge> {
        let covered = self.covered_edges();
        self.host
            .edges
            .iter()
            .filter(|e| !covered.contains(*e))
            .cloned()
            .collect()
    }

    pub fn is_decomposition(&self) -> bool {
        self.covered_edges().len() == self.host.e()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[u32]) -> VertexSet {
        VertexSet::from_slice(v).unwrap()
    }

    #[test]
    fn complete_host_counts() {
        assert_eq!(complete_host(3, 2).unwrap().e(), 3);
        assert_eq!(complete_host(7, 2).unwrap().e(), 21);
        assert_eq!(complete_host(5, 5).unwrap().e(), 1);
        assert!(complete_host(0, 1).is_err());
        assert!(complete_host(3, 4).is_err());
    }

    #[test]
    fn admissible_small() {
        assert!(admissible(7, 3, 2).unwrap());
        assert!(!admissible(6, 3, 2).unwrap());
        assert!(admissible(4, 4, 3).unwrap());
        assert!(admissible(5, 3, 3).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let k7 = complete_host(7, 2).unwrap();
        assert!(k7.is_divisible(3).unwrap());
        let tri = Hypergraph::new(3, 2, vec![vs(&[0, 1]), vs(&[0, 2]), vs(&[1, 2])]).unwrap();
        assert!(tri.is_divisible(3).unwrap());
        let single = Hypergraph::new(2, 2, vec![vs(&[0, 1])]).unwrap();
        assert!(!single.is_divisible(3).unwrap());
    }

    #[test]
    fn codegrees() {
        let k7 = complete_host(7, 2).unwrap();
        assert_eq!(k7.multiplicity(&vs(&[0])), 6);
        assert_eq!(k7.multiplicity(&vs(&[0, 1])), 1);
        assert_eq!(k7.multiplicity(&vs(&[])), 21);
        assert_eq!(k7.max_codegree(1), 6);
        assert_eq!(k7.max_codegree(2), 1);
        assert_eq!(Hypergraph::empty(5, 2).unwrap().max_codegree(1), 0);
        let k6 = complete_host(6, 3).unwrap();
        for i in 0..=3 {
            assert_eq!(k6.max_codegree(i) as u64, binom(6 - i, 3 - i));
        }
    }

    #[test]
    fn cliques_through_edge() {
        let k7 = complete_host(7, 2).unwrap();
        assert_eq!(k7.cliques_containing(&vs(&[0, 1]), 3).unwrap().len(), 5);
        let tri = Hypergraph::new(3, 2, vec![vs(&[0, 1]), vs(&[0, 2]), vs(&[1, 2])]).unwrap();
        assert_eq!(tri.cliques_containing(&vs(&[0, 1]), 3).unwrap().len(), 1);
        let minus = k7.without(&[vs(&[0, 2])].into_iter().collect());
        assert_eq!(minus.cliques_containing(&vs(&[0, 1]), 3).unwrap().len(), 4);
        assert!(minus.cliques_containing(&vs(&[0, 2]), 3).is_err());
    }

    #[test]
    fn clique_counts_general_uniformity() {
        let k7 = complete_host(7, 3).unwrap();
        assert_eq!(k7.all_cliques(5).len() as u64, binom(7, 5));
        assert_eq!(
            k7.cliques_containing(&vs(&[0, 1, 2]), 5).unwrap().len() as u64,
            binom(4, 2)
        );
        let k5 = complete_host(5, 1).unwrap();
        assert_eq!(k5.all_cliques(3).len(), 10);
        let k8 = complete_host(8, 2).unwrap();
        assert_eq!(k8.all_cliques(4).len() as u64, binom(8, 4));
    }

    #[test]
    fn colex_rank_roundtrip() {
        let k = complete_host(9, 3).unwrap();
        for (i, e) in k.edges().iter().enumerate() {
            assert_eq!(e.colex_rank(), i as u64);
            assert_eq!(VertexSet::from_colex_rank(i as u64, 3), *e);
        }
    }

    #[test]
    fn packing_rejects_shared_edge() {
        let r = Packing::in_complete(5, 2, 3, vec![vs(&[0, 1, 2]), vs(&[0, 1, 3])]);
        assert!(matches!(r, Err(Error::NotAMatching(_))));
    }

    #[test]
    fn packing_json_roundtrip_is_stable() {
        let p = Packing::in_complete(7, 2, 3, vec![vs(&[0, 1, 2]), vs(&[0, 3, 4])]).unwrap();
        let s = to_json(&p).unwrap();
        let back: Packing = from_json(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(to_json(&back).unwrap(), s);
    }

    #[test]
    fn combinations_cover_all() {
        let mut count = 0;
        for_each_combination(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut zero = 0;
        for_each_combination(4, 0, |idx| {
            assert!(idx.is_empty());
            zero += 1
        });
        assert_eq!(zero, 1);
    }
}
