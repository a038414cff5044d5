//! Brute-force oracles and random instance builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use girthforge::config_hypergraphs::{
    build_treasury, clique_from_id, clique_id, ConfigHypergraph, DesignHypergraph,
    ReserveHypergraph, Treasury,
};
use girthforge::hypergraph::{complete_host, Clique, Edge, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn vs(v: &[u32]) -> VertexSet {
    VertexSet::from_slice(v).unwrap()
}

pub fn fano() -> Vec<Clique> {
    [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ]
    .iter()
    .map(|b| vs(b))
    .collect()
}

pub fn span(cliques: &[&Clique], ignore: &[u32]) -> usize {
    cliques
        .iter()
        .flat_map(|c| c.as_slice().iter().copied())
        .filter(|v| !ignore.contains(v))
        .collect::<BTreeSet<u32>>()
        .len()
}

/// Calls `f` with every k-subset of `0..n` as an index list.
pub fn subsets(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn go(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            if go(i + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(0, n, k, &mut Vec::with_capacity(k), &mut f)
}

/// Smallest k in [min_k, k_max] such that some k members span at most slope·k + offset
/// vertices outside `ignore`; `None` when there is none.
pub fn brute_min(
    cliques: &[Clique],
    slope: usize,
    offset: i64,
    min_k: usize,
    k_max: usize,
    ignore: &[u32],
) -> Option<usize> {
    (min_k..=k_max.min(cliques.len())).find(|&k| {
        subsets(cliques.len(), k, |idx| {
            let sub: Vec<&Clique> = idx.iter().map(|&i| &cliques[i]).collect();
            span(&sub, ignore) as i64 <= slope as i64 * k as i64 + offset
        })
    })
}

pub fn brute_girth(cliques: &[Clique], q: usize, r: usize, g_max: usize) -> Option<usize> {
    brute_min(cliques, q - r, r as i64, 2, g_max, &[])
}

pub fn brute_cogirth(
    a: &[Clique],
    b: &[Clique],
    q: usize,
    r: usize,
    g_max: usize,
) -> Option<usize> {
    let all: Vec<Clique> = a.iter().chain(b).cloned().collect();
    brute_min(&all, q - r, r as i64 - 1, 2, g_max, &[])
}

pub fn brute_rooted(
    cliques: &[Clique],
    q: usize,
    r: usize,
    root: &Clique,
    g_max: usize,
) -> Option<usize> {
    brute_min(cliques, q - r, -1, 1, g_max, root.as_slice())
}

/// Random set of edge-disjoint triangles on `n` vertices, at most `max` of them.
pub fn random_packing<R: Rng>(n: usize, max: usize, rng: &mut R) -> Vec<Clique> {
    let mut all: Vec<Clique> = Vec::new();
    subsets(n, 3, |idx| {
        all.push(vs(&idx.iter().map(|&i| i as u32).collect::<Vec<_>>()));
        false
    });
    all.shuffle(rng);
    let target = rng.gen_range(0..=max);
    let mut used: BTreeSet<Clique> = BTreeSet::new();
    let mut out = Vec::new();
    for c in all {
        if out.len() == target {
            break;
        }
        let edges = c.subsets(2);
        if edges.iter().all(|e| !used.contains(e)) {
            used.extend(edges);
            out.push(c);
        }
    }
    out
}

pub type Id = u64;

/// A treasury on K_7 whose design part is the edge set of a few lines of a relabelled Fano plane,
/// so that it has perfect matchings; everything else lands in the reserve part.
pub fn random_treasury(rng: &mut ChaCha8Rng) -> (Treasury, Vec<Id>) {
    let host = complete_host(7, 2).unwrap();
    let mut perm: Vec<u32> = (0..7).collect();
    perm.shuffle(rng);
    let mut lines: Vec<Clique> = fano().iter().map(|c| c.map(|v| perm[v as usize])).collect();
    lines.shuffle(rng);
    let keep = rng.gen_range(2..=3);
    let a: BTreeSet<Edge> = lines[..keep].iter().flat_map(|c| c.subsets(2)).collect();
    let mut x: BTreeSet<Edge> = host.edge_set().difference(&a).cloned().collect();
    let drop = rng.gen_range(0..4);
    for _ in 0..drop {
        let pick: Vec<Edge> = x.iter().cloned().collect();
        x.remove(pick.choose(rng).unwrap());
    }
    let g_prime: BTreeSet<Edge> = a.union(&x).cloned().collect();
    let t = build_treasury(&host, &g_prime, &x, 3, 4).unwrap();
    (t, lines[..keep].iter().map(clique_id).collect())
}

pub fn h_edges(t: &Treasury) -> Vec<Vec<Id>> {
    t.h().materialize();
    t.h().edges().cloned().collect()
}

/// Random subtreasury: random subsets of G1 and G2 keeping `protect`, and H′ the induced part of H
/// plus random extra configurations.
pub fn random_subtreasury(t: &Treasury, protect: &[Id], rng: &mut ChaCha8Rng) -> Treasury {
    let keep = |ids: &BTreeSet<Id>, rng: &mut ChaCha8Rng| -> BTreeSet<Id> {
        ids.iter()
            .copied()
            .filter(|id| protect.contains(id) || rng.gen_bool(0.6))
            .collect()
    };
    let g1 = keep(t.g1().edges(), rng);
    let g2 = keep(t.g2().edges(), rng);
    let inner: BTreeSet<Id> = g1.union(&g2).copied().collect();
    let mut h: Vec<Vec<Id>> = h_edges(t)
        .into_iter()
        .filter(|e| e.iter().all(|v| inner.contains(v)))
        .collect();
    let vertices: Vec<Id> = t.h().vertices().iter().copied().collect();
    for _ in 0..rng.gen_range(0..6) {
        let u = *vertices.choose(rng).unwrap();
        let v = *vertices.choose(rng).unwrap();
        if u != v && disjoint(&clique_from_id(u, 3), &clique_from_id(v, 3)) {
            h.push(vec![u, v]);
        }
    }
    Treasury::new(
        DesignHypergraph::new(3, 2, t.g1().vertices().clone(), g1).unwrap(),
        ReserveHypergraph::new(3, 2, t.g2().a().clone(), t.g2().b().clone(), g2).unwrap(),
        ConfigHypergraph::from_edges(3, 2, t.g(), false, t.h().vertices().clone(), h).unwrap(),
    )
    .unwrap()
}

pub fn disjoint(a: &Clique, b: &Clique) -> bool {
    let ea: BTreeSet<Edge> = a.subsets(2).into_iter().collect();
    b.subsets(2).iter().all(|e| !ea.contains(e))
}

/// Subtreasury straight from the definition.
pub fn subtreasury_oracle(sub: &Treasury, t: &Treasury) -> bool {
    if sub.g1().vertices() != t.g1().vertices()
        || sub.g2().a() != t.g2().a()
        || sub.g2().b() != t.g2().b()
    {
        return false;
    }
    if !sub.g1().edges().is_subset(t.g1().edges()) || !sub.g2().edges().is_subset(t.g2().edges()) {
        return false;
    }
    let inner: BTreeSet<Id> = sub.g1().edges().union(sub.g2().edges()).copied().collect();
    let sub_h: BTreeSet<Vec<Id>> = h_edges(sub).into_iter().collect();
    h_edges(t)
        .iter()
        .filter(|e| e.iter().all(|v| inner.contains(v)))
        .all(|e| sub_h.contains(e))
}

/// Every H-avoiding matching of G1 ∪ G2 covering A, by exhaustive search.
pub fn perfect_matchings(t: &Treasury) -> Vec<Vec<Id>> {
    let cliques: Vec<(Id, Vec<Edge>)> = t
        .g1()
        .edges()
        .union(t.g2().edges())
        .map(|&id| (id, clique_from_id(id, 3).subsets(2)))
        .collect();
    let a: Vec<Edge> = t.g2().a().iter().cloned().collect();
    let h = h_edges(t);
    let mut out = Vec::new();
    let mut chosen: Vec<Id> = Vec::new();
    let mut used: BTreeSet<Edge> = BTreeSet::new();
    fn go(
        a: &[Edge],
        cliques: &[(Id, Vec<Edge>)],
        h: &[Vec<Id>],
        chosen: &mut Vec<Id>,
        used: &mut BTreeSet<Edge>,
        out: &mut Vec<Vec<Id>>,
    ) {
        let Some(next) = a.iter().find(|e| !used.contains(*e)) else {
            let set: BTreeSet<Id> = chosen.iter().copied().collect();
            if !h.iter().any(|e| e.iter().all(|v| set.contains(v))) {
                out.push(chosen.clone());
            }
            return;
        };
        for (id, edges) in cliques {
            if edges.contains(next) && edges.iter().all(|e| !used.contains(e)) {
                chosen.push(*id);
                used.extend(edges.iter().cloned());
                go(a, cliques, h, chosen, used, out);
                for e in edges {
                    used.remove(e);
                }
                chosen.pop();
            }
        }
    }
    go(&a, &cliques, &h, &mut chosen, &mut used, &mut out);
    out
}

/// A random matching among the design cliques of `t`.
pub fn random_matching(t: &Treasury, rng: &mut ChaCha8Rng) -> BTreeSet<Id> {
    let mut ids: Vec<Id> = t.g1().edges().union(t.g2().edges()).copied().collect();
    ids.shuffle(rng);
    let target = rng.gen_range(0..=4);
    let mut used: BTreeSet<Edge> = BTreeSet::new();
    let mut out = BTreeSet::new();
    for id in ids {
        if out.len() == target {
            break;
        }
        let edges = clique_from_id(id, 3).subsets(2);
        if edges.iter().all(|e| !used.contains(e)) {
            used.extend(edges);
            out.insert(id);
        }
    }
    out
}
