//! Edge counts of vertex-sparsified hypergraphs: the sufficient conditions for the
//! upper-tail bound e(H_p) <= 2·p^k·K, and a Monte Carlo check of that bound.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config_hypergraphs::Check;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KimVuReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    #[serde(rename = "K")]
    pub k_bound: f64,
    pub log: String,
    /// `edges` is e(H) <= K; `star_i` is p^i >= Δ_i(H)/K · ln^(4k+2) n, observed p^i.
    pub checks: BTreeMap<String, Check>,
}

impl KimVuReport {
    pub fn passes(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "p must lie in (0, 1], got {p}"
        )))
    }
}

/// Evaluates every hypothesis of the tail bound for `h` at sampling probability `p` and budget `k_bound`.
pub fn kimvu_check(h: &Hypergraph, p: f64, k_bound: f64) -> Result<KimVuReport> {
    check_probability(p)?;
    if !(k_bound > 0.0 && k_bound.is_finite()) {
        return Err(Error::Precondition(format!(
            "K must be positive and finite, got {k_bound}"
        )));
    }
    let (n, k) = (h.n(), h.r());
    let ln_power = (n.max(1) as f64).ln().powi(4 * k as i32 + 2);
    let mut checks = BTreeMap::new();
    checks.insert(
        "edges".to_string(),
        Check {
            observed: Some(h.e() as f64),
            bound: k_bound,
            pass: h.e() as f64 <= k_bound,
        },
    );
    for i in 1..=k {
        let observed = p.powi(i as i32);
        let bound = h.max_codegree(i) as f64 / k_bound * ln_power;
        checks.insert(
            format!("star_{i}"),
            Check {
                observed: Some(observed),
                bound,
                pass: observed >= bound,
            },
        );
    }
    Ok(KimVuReport {
        n,
        k,
        p,
        k_bound,
        log: "natural".into(),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountRecord {
    pub p: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub edges: usize,
    /// e(H_p) value → number of trials.
    pub histogram: BTreeMap<usize, usize>,
    pub mean: f64,
    /// p^k · e(H).
    pub expected_mean: f64,
    /// 2 · p^k · K, when K was given.
    pub threshold: Option<f64>,
    pub exceed_fraction: Option<f64>,
}

impl EdgeCountRecord {
    pub fn relative_error(&self) -> f64 {
        if self.expected_mean == 0.0 {
            self.mean
        } else {
            (self.mean - self.expected_mean).abs() / self.expected_mean
        }
    }
}

/// Edge count of the subhypergraph induced by the vertices whose uniform draw falls below `p`.
/// Trial `t` uses its own generator seeded from `(base_seed, t)`, so runs at different `p`
/// with the same seed are coupled and e(H_p) is monotone in `p` trial by trial.
pub fn sample_edge_count(h: &Hypergraph, p: f64, base_seed: u64, trial: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial);
    let kept: Vec<bool> = (0..h.n()).map(|_| rng.gen::<f64>() < p).collect();
    h.edges()
        .iter()
        .filter(|e| e.as_slice().iter().all(|&v| kept[v as usize]))
        .count()
}

/// Samples `trials` vertex-sparsified copies of `h` in parallel.
pub fn montecarlo_edge_count<R: Rng>(
    h: &Hypergraph,
    p: f64,
    k_bound: Option<f64>,
    trials: usize,
    rng: &mut R,
) -> Result<EdgeCountRecord> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let base_seed: u64 = rng.gen();
    let counts: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_edge_count(h, p, base_seed, t))
        .collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let mean = counts.iter().sum::<usize>() as f64 / trials as f64;
    let pk = p.powi(h.r() as i32);
    let threshold = k_bound.map(|kb| 2.0 * pk * kb);
    let exceed_fraction =
        threshold.map(|t| counts.iter().filter(|&&c| c as f64 > t).count() as f64 / trials as f64);
    Ok(EdgeCountRecord {
        p,
        trials,
        base_seed,
        edges: h.e(),
        histogram,
        mean,
        expected_mean: pk * h.e() as f64,
        threshold,
        exceed_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_hypergraphs::design_hypergraph;
    use crate::generator::stage_rng;
    use crate::hypergraph::{complete_host, VertexSet};

    #[test]
    fn single_edge_and_empty() {
        let one = Hypergraph::new(3, 2, vec![VertexSet::from_slice(&[0, 1]).unwrap()]).unwrap();
        let rep = kimvu_check(&one, 1.0, 1.0).unwrap();
        assert!(rep.checks["edges"].pass);
        assert_eq!(rep.checks.len(), 3);
        let empty = Hypergraph::empty(5, 3).unwrap();
        assert!(kimvu_check(&empty, 0.3, 1.0).unwrap().passes());
    }

    #[test]
    fn design_hypergraph_degrees() {
        let k20 = complete_host(20, 2).unwrap();
        let d = design_hypergraph(&k20, 3).unwrap();
        let h = d.as_hypergraph();
        assert_eq!(h.max_codegree(1), 18);
        assert_eq!(h.max_codegree(2), 1);
        let rep = kimvu_check(&h, 0.5, 1e9).unwrap();
        let ln = (190f64).ln().powi(14);
        assert!((rep.checks["star_1"].bound - 18.0 / 1e9 * ln).abs() < 1e-9 * ln);
    }

    #[test]
    fn full_probability_keeps_everything() {
        let k8 = complete_host(8, 2).unwrap();
        let rec = montecarlo_edge_count(&k8, 1.0, Some(28.0), 20, &mut stage_rng(1, 0)).unwrap();
        assert_eq!(rec.histogram.len(), 1);
        assert_eq!(rec.mean, 28.0);
        assert_eq!(rec.exceed_fraction, Some(0.0));
    }

    #[test]
    fn coupled_runs_are_monotone() {
        let k12 = complete_host(12, 3).unwrap();
        for t in 0..50 {
            assert!(sample_edge_count(&k12, 0.3, 7, t) <= sample_edge_count(&k12, 0.6, 7, t));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let k4 = complete_host(4, 2).unwrap();
        assert!(kimvu_check(&k4, 0.0, 1.0).is_err());
        assert!(kimvu_check(&k4, 0.5, 0.0).is_err());
        assert!(montecarlo_edge_count(&k4, 0.5, None, 0, &mut stage_rng(0, 0)).is_err());
    }
}
