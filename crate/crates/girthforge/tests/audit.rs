mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{subsets, vs};
use girthforge::config_hypergraphs::{build_treasury, regularity_audit};
use girthforge::hypergraph::{complete_host, Clique, Edge};

fn span6_pasch(c: &[&Clique]) -> bool {
    let edges: BTreeSet<Edge> = c.iter().flat_map(|t| t.subsets(2)).collect();
    let verts: BTreeSet<u32> = c
        .iter()
        .flat_map(|t| t.as_slice().iter().copied())
        .collect();
    edges.len() == 12 && verts.len() == 6
}

#[test]
fn audit_clauses_match_direct_counts() {
    let host = complete_host(7, 2).unwrap();
    let x: BTreeSet<Edge> = [[0, 1], [0, 2], [1, 2], [3, 4], [5, 6], [0, 6]]
        .iter()
        .map(|e| vs(e))
        .collect();
    let t = build_treasury(&host, &host.edge_set(), &x, 3, 4).unwrap();
    let (d, sigma, beta, alpha) = (5.0, 1.0, 0.25, 0.5);
    let rep = regularity_audit(&t, d, sigma, beta, alpha).unwrap();
    assert_eq!(rep.log, "natural");

    let triangles = host.all_cliques(3);
    let a: BTreeSet<Edge> = host.edge_set().difference(&x).cloned().collect();
    let mut g1_deg: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut g2_deg: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut design: Vec<&Clique> = Vec::new();
    for c in &triangles {
        let es = c.subsets(2);
        let in_a = es.iter().filter(|e| a.contains(*e)).count();
        if in_a == 3 {
            design.push(c);
            for e in &es {
                *g1_deg.entry(e.clone()).or_default() += 1;
            }
        } else if in_a == 1 {
            design.push(c);
            for e in &es {
                *g2_deg.entry(e.clone()).or_default() += 1;
            }
        }
    }
    let obs = |k: &str| rep.checks[k].observed.unwrap();
    assert_eq!(
        obs("quasi_regular_upper"),
        *g1_deg.values().max().unwrap() as f64
    );
    let min_a_g1 = a
        .iter()
        .map(|e| g1_deg.get(e).copied().unwrap_or(0))
        .min()
        .unwrap();
    assert_eq!(obs("quasi_regular_lower"), min_a_g1 as f64);
    assert_eq!(
        rep.checks["quasi_regular_lower"].pass,
        min_a_g1 as f64 >= d - sigma
    );
    let min_a_g2 = a
        .iter()
        .map(|e| g2_deg.get(e).copied().unwrap_or(0))
        .min()
        .unwrap();
    assert_eq!(obs("reserve_lower"), min_a_g2 as f64);
    let max_b_g2 = x
        .iter()
        .map(|e| g2_deg.get(e).copied().unwrap_or(0))
        .max()
        .unwrap();
    assert_eq!(obs("reserve_upper"), max_b_g2 as f64);

    let mut config_deg = vec![0usize; triangles.len()];
    subsets(triangles.len(), 4, |idx| {
        let c: Vec<&Clique> = idx.iter().map(|&i| &triangles[i]).collect();
        if span6_pasch(&c) {
            for &i in idx {
                config_deg[i] += 1;
            }
        }
        false
    });
    assert_eq!(
        obs("config_degree_4"),
        *config_deg.iter().max().unwrap() as f64
    );
    let bound = alpha * d.powi(3) * d.ln();
    assert!((rep.checks["config_degree_4"].bound - bound).abs() < 1e-9);

    let mut pair: BTreeMap<(Edge, Edge), usize> = BTreeMap::new();
    for c in &design {
        let es = c.subsets(2);
        for i in 0..3 {
            for j in i + 1..3 {
                *pair.entry((es[i].clone(), es[j].clone())).or_default() += 1;
            }
        }
    }
    assert_eq!(obs("codegree"), *pair.values().max().unwrap() as f64);
    assert!((rep.checks["codegree"].bound - d.powf(1.0 - beta)).abs() < 1e-9);
    assert_eq!(rep.passes(), rep.failing().is_empty());
}

#[test]
fn lower_clause_over_empty_part_fails_without_observation() {
    let host = complete_host(6, 2).unwrap();
    let all = host.edge_set();
    let t = build_treasury(&host, &all, &all, 3, 3).unwrap();
    let rep = regularity_audit(&t, 2.0, 0.5, 0.5, 0.5).unwrap();
    let lower = &rep.checks["quasi_regular_lower"];
    assert_eq!(lower.observed, None);
    assert!(!lower.pass);
    assert!(rep.failing().contains(&"reserve_lower"));
}

#[test]
fn audit_rejects_out_of_range_parameters() {
    let host = complete_host(6, 2).unwrap();
    let t = build_treasury(&host, &host.edge_set(), &BTreeSet::new(), 3, 3).unwrap();
    assert!(regularity_audit(&t, 0.5, 0.0, 0.5, 0.5).is_err());
    assert!(regularity_audit(&t, 4.0, 0.0, 1.0, 0.5).is_err());
    assert!(regularity_audit(&t, 4.0, -1.0, 0.5, 0.5).is_err());
}
