//! Pairwise graph mixing: Beta-distributed mixing ratios, convex combination
//! of padded edge-weight and feature matrices, and label mixing.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};
use crate::graph::{pad_pair, LabelDistribution, NodeFeaturedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidBeta {
                alpha: self.alpha,
                beta: self.beta,
            })
        }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

impl std::fmt::Display for BetaParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Beta({}, {})", self.alpha, self.beta)
    }
}

/// The five mixing distributions used for the mixing-ratio ablation.
pub const ABLATION_BETAS: [BetaParams; 5] = [
    BetaParams { alpha: 1.0, beta: 1.0 },
    BetaParams { alpha: 2.0, beta: 2.0 },
    BetaParams { alpha: 5.0, beta: 1.0 },
    BetaParams { alpha: 10.0, beta: 1.0 },
    BetaParams { alpha: 20.0, beta: 1.0 },
];

/// A mixed graph with its soft label and the ratio that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedSample {
    pub graph: NodeFeaturedGraph,
    pub label: LabelDistribution,
    pub lambda: f64,
    pub source_ids: (usize, usize),
}

/// Draws one ratio from `Beta(alpha, beta)` as `X / (X + Y)` with
/// `X ~ Gamma(alpha)`, `Y ~ Gamma(beta)`. Draws that round to exactly 0 or 1
/// are rejected and redrawn.
pub fn sample_lambda<R: Rng + ?Sized>(params: BetaParams, rng: &mut R) -> f64 {
    let ga = Gamma::new(params.alpha, 1.0).expect("alpha validated positive");
    let gb = Gamma::new(params.beta, 1.0).expect("beta validated positive");
    loop {
        let x: f64 = ga.sample(rng);
        let y: f64 = gb.sample(rng);
        let s = x + y;
        if s > 0.0 && s.is_finite() {
            let lambda = x / s;
            if lambda > 0.0 && lambda < 1.0 {
                return lambda;
            }
        }
    }
}

/// Like [`sample_lambda`] but also rejects draws within `tol` of 0.5, where
/// the two mirrored decompositions of a mix coincide.
pub fn sample_lambda_distinguishable<R: Rng + ?Sized>(params: BetaParams, tol: f64, rng: &mut R) -> f64 {
    loop {
        let l = sample_lambda(params, rng);
        if (l - 0.5).abs() >= tol {
            return l;
        }
    }
}

/// Beta density `x^(α−1) (1−x)^(β−1) / B(α, β)`.
pub fn beta_pdf(params: BetaParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfUnitInterval { value: x });
    }
    let BetaParams { alpha, beta } = params;
    let num = x.powf(alpha - 1.0) * (1.0 - x).powf(beta - 1.0);
    Ok(num / ln_beta(alpha, beta).exp())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// Mixes two graphs: pads both to the larger node count, then takes
/// `λ·eA + (1−λ)·eB` and `λ·vA + (1−λ)·vB`.
pub fn mix_pair(a: &NodeFeaturedGraph, b: &NodeFeaturedGraph, lambda: f64) -> Result<NodeFeaturedGraph> {
    check_lambda(lambda)?;
    let (pa, pb) = pad_pair(a, b)?;
    let weights = &pa.weights * lambda + &pb.weights * (1.0 - lambda);
    let features = &pa.features * lambda + &pb.features * (1.0 - lambda);
    // Convex combinations of equal entries must stay bit-exact.
    let weights = ndarray::Zip::from(&weights)
        .and(&pa.weights)
        .and(&pb.weights)
        .map_collect(|&m, &x, &y| if x == y { x } else { m });
    let features = ndarray::Zip::from(&features)
        .and(&pa.features)
        .and(&pb.features)
        .map_collect(|&m, &x, &y| if x == y { x } else { m });
    NodeFeaturedGraph::new(features, weights)
}

/// `λ·yA + (1−λ)·yB`.
pub fn mix_labels(a: &LabelDistribution, b: &LabelDistribution, lambda: f64) -> Result<LabelDistribution> {
    if a.num_classes() != b.num_classes() {
        return Err(Error::dims("mix_labels class count", a.num_classes(), b.num_classes()));
    }
    Ok(LabelDistribution(
        a.0.iter()
            .zip(&b.0)
            .map(|(&x, &y)| if x == y { x } else { lambda * x + (1.0 - lambda) * y })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambda_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let uni = BetaParams::new(1.0, 1.0).unwrap();
        let m: f64 = (0..n).map(|_| sample_lambda(uni, &mut rng)).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 0.005, "{m}");
        let skew = BetaParams::new(20.0, 1.0).unwrap();
        let m: f64 = (0..n).map(|_| sample_lambda(skew, &mut rng)).sum::<f64>() / n as f64;
        assert!((m - 20.0 / 21.0).abs() < 0.003, "{m}");
    }

    #[test]
    fn lambda_is_deterministic() {
        let p = BetaParams::new(2.0, 2.0).unwrap();
        let a: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(3);
            (0..50).map(|_| sample_lambda(p, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(3);
            (0..50).map(|_| sample_lambda(p, &mut r)).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|&l| l > 0.0 && l < 1.0));
    }

    #[test]
    fn pdf_values() {
        let p = |a, b| BetaParams::new(a, b).unwrap();
        for x in [0.0, 0.2, 0.9, 1.0] {
            assert!((beta_pdf(p(1.0, 1.0), x).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((beta_pdf(p(2.0, 2.0), 0.5).unwrap() - 1.5).abs() < 1e-12);
        assert!((beta_pdf(p(20.0, 1.0), 1.0).unwrap() - 20.0).abs() < 1e-9);
        assert!(beta_pdf(p(2.0, 2.0), 1.5).is_err());
        assert!(BetaParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn mix_pair_examples() {
        let a = NodeFeaturedGraph::from_edges(array![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], &[(0, 1)]).unwrap();
        let b = NodeFeaturedGraph::from_edges(
            array![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            &[(1, 2)],
        )
        .unwrap();
        let m = mix_pair(&a, &b, 0.7).unwrap();
        assert!((m.weights[[0, 1]] - 0.7).abs() < 1e-15);
        assert!((m.weights[[1, 2]] - 0.3).abs() < 1e-15);
        // node 3 is a dummy on the A side
        let row: Vec<f64> = m.features.row(3).to_vec();
        assert!((row[1] - 0.3).abs() < 1e-15 && row[0] == 0.0 && row[2] == 0.0);
        assert!(crate::graph::validate_graph(&m).is_empty());
        assert!(mix_pair(&a, &b, 1.0).is_err());
        assert!(mix_pair(&a, &b, 0.0).is_err());
        let c = NodeFeaturedGraph::from_edges(Array2::zeros((1, 2)), &[]).unwrap();
        assert!(mix_pair(&a, &c, 0.5).is_err());
    }

    #[test]
    fn self_mix_is_exact() {
        let g = NodeFeaturedGraph::from_edges(array![[0.3, 0.1], [1.0, 0.0], [0.0, 1.0]], &[(0, 2), (1, 2)]).unwrap();
        for l in [0.1, 0.37, 0.5, 0.999] {
            assert_eq!(mix_pair(&g, &g, l).unwrap(), g);
        }
    }

    #[test]
    fn mix_labels_examples() {
        let a = LabelDistribution::one_hot(0, 2);
        let b = LabelDistribution::one_hot(1, 2);
        let m = mix_labels(&a, &b, 0.7).unwrap();
        assert!((m.0[0] - 0.7).abs() < 1e-15 && (m.0[1] - 0.3).abs() < 1e-15);
        assert_eq!(mix_labels(&a, &b, 1.0).unwrap(), a);
        assert!((m.0.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(mix_labels(&a, &LabelDistribution::one_hot(0, 3), 0.5).is_err());
    }
}
