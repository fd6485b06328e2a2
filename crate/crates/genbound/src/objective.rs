//! The measuring-function objective family and its empirical forms.
//!
//! The population objective with measuring function `phi` and generator
//! regularization `lambda` is
//!
//! ```text
//! E_px[phi(D(x))] + E_pz[phi(1 - D(G(z)))] - lambda * E_pz[phi(mean G(z))]
//! ```
//!
//! with two algebraic rewrites: subtracting the constant `2*phi(1/2)` (so a
//! constant-1/2 discriminator scores zero), and the `phi = identity` form
//!
//! ```text
//! E_px[D(x)] - E_pz[D(G(z))] - lambda * E_pz[mean G(z)]
//! ```
//!
//! which is the neural-net distance with generator regularization. The
//! empirical counterparts replace expectations with batch means; every
//! z-side sum is normalized by its own draw count. All the Monte-Carlo
//! variants reuse one set of draws per evaluation (streams derived from the
//! config seed), which makes the cross-variant identities exact.

use crate::classes::Network;
use crate::dist::{derive_stream, SourceSpec};
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;

/// Stream purposes for Monte-Carlo draws.
const STREAM_POP_X: u64 = 0x0b01;
const STREAM_POP_Z: u64 = 0x0b02;

/// Default floor for the guarded logarithm.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-6;

/// The measuring function `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiKind {
    /// `phi(t) = t`.
    Identity,
    /// `phi(t) = ln(max(t, floor))`, total on all reals.
    GuardedLog { floor: f64 },
}

impl PhiKind {
    pub fn guarded_log() -> Self {
        PhiKind::GuardedLog {
            floor: DEFAULT_LOG_FLOOR,
        }
    }

    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            PhiKind::Identity => t,
            PhiKind::GuardedLog { floor } => t.max(floor).ln(),
        }
    }

    /// `phi(1/2)`, the constant separating the first two variants.
    pub fn at_half(self) -> f64 {
        self.apply(0.5)
    }
}

/// Configuration for objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveConfig {
    pub lambda: f64,
    pub phi: PhiKind,
    /// Draw count per Monte-Carlo expectation.
    pub mc_samples: usize,
    pub seed: u64,
}

impl ObjectiveConfig {
    pub fn new(lambda: f64, phi: PhiKind, mc_samples: usize, seed: u64) -> Self {
        ObjectiveConfig {
            lambda,
            phi,
            mc_samples,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mc_samples == 0 {
            return Err(Error::contract("mc_samples must be >= 1"));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::contract(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Which algebraic form of the objective to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveVariant {
    /// `E[phi D(x)] + E[phi(1 - D(G(z)))] - lambda E[phi(mean G(z))]`
    PhiForm,
    /// `PhiForm - 2*phi(1/2)`
    PhiFormCentered,
    /// `E[D(x)] - E[D(G(z))] - lambda E[mean G(z)]` (identity phi)
    NetDistance,
}

fn check_pair(d: &Network, g: &Network) -> Result<()> {
    if d.output_dim() != 1 {
        return Err(Error::contract(format!(
            "discriminator must have one output head, got {}",
            d.output_dim()
        )));
    }
    check_dim(
        "generator output vs discriminator input",
        d.input_dim(),
        g.output_dim(),
    )
}

fn mean_coords(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Accumulated per-draw statistics shared by all variants.
struct Terms {
    /// mean of `phi(D(x_i))`
    phi_dx: f64,
    /// mean of `D(x_i)`
    dx: f64,
    /// mean of `phi(D(G(z_j)))`
    phi_dgz: f64,
    /// mean of `phi(1 - D(G(z_j)))`
    phi_comp_dgz: f64,
    /// mean of `D(G(z_j))`
    dgz: f64,
    /// mean of `phi(mean_coords G(z_j))`
    phi_gz: f64,
    /// mean of `mean_coords G(z_j)`
    gz: f64,
}

fn accumulate(d: &Network, g: &Network, phi: PhiKind, xs: &Matrix, zs: &Matrix) -> Result<Terms> {
    check_pair(d, g)?;
    check_dim("x batch width", d.input_dim(), xs.cols())?;
    check_dim("z batch width", g.input_dim(), zs.cols())?;
    if xs.rows() == 0 || zs.rows() == 0 {
        return Err(Error::contract("objective batches must be non-empty"));
    }
    let mut t = Terms {
        phi_dx: 0.0,
        dx: 0.0,
        phi_dgz: 0.0,
        phi_comp_dgz: 0.0,
        dgz: 0.0,
        phi_gz: 0.0,
        gz: 0.0,
    };
    for row in xs.iter_rows() {
        let v = d.heads[0].eval_unchecked(d.activation, row);
        t.phi_dx += phi.apply(v);
        t.dx += v;
    }
    let mut image = Vec::with_capacity(g.output_dim());
    for row in zs.iter_rows() {
        g.eval_into(row, &mut image);
        let v = d.heads[0].eval_unchecked(d.activation, &image);
        let gbar = mean_coords(&image);
        t.phi_dgz += phi.apply(v);
        t.phi_comp_dgz += phi.apply(1.0 - v);
        t.dgz += v;
        t.phi_gz += phi.apply(gbar);
        t.gz += gbar;
    }
    let n = xs.rows() as f64;
    let m = zs.rows() as f64;
    t.phi_dx /= n;
    t.dx /= n;
    t.phi_dgz /= m;
    t.phi_comp_dgz /= m;
    t.dgz /= m;
    t.phi_gz /= m;
    t.gz /= m;
    Ok(t)
}

fn assemble(t: &Terms, lambda: f64, phi: PhiKind, variant: ObjectiveVariant) -> f64 {
    match variant {
        ObjectiveVariant::PhiForm => t.phi_dx + t.phi_comp_dgz - lambda * t.phi_gz,
        ObjectiveVariant::PhiFormCentered => {
            t.phi_dx + t.phi_comp_dgz - lambda * t.phi_gz - 2.0 * phi.at_half()
        }
        ObjectiveVariant::NetDistance => t.dx - t.dgz - lambda * t.gz,
    }
}

fn population_draws(
    cfg: &ObjectiveConfig,
    px: &SourceSpec,
    pz: &SourceSpec,
) -> Result<(Matrix, Matrix)> {
    cfg.validate()?;
    let xs = px.sample(cfg.mc_samples, derive_stream(cfg.seed, STREAM_POP_X))?;
    let zs = pz.sample(cfg.mc_samples, derive_stream(cfg.seed, STREAM_POP_Z))?;
    Ok((xs, zs))
}

/// Monte-Carlo estimate of the phi-weighted net distance
/// `E[phi D(x)] - E[phi D(G(z))] - lambda E[mean G(z)]` with
/// `cfg.mc_samples` draws per expectation. Deterministic given `cfg.seed`.
pub fn inner_value_population(
    d: &Network,
    g: &Network,
    cfg: &ObjectiveConfig,
    px: &SourceSpec,
    pz: &SourceSpec,
) -> Result<f64> {
    let (xs, zs) = population_draws(cfg, px, pz)?;
    let t = accumulate(d, g, cfg.phi, &xs, &zs)?;
    Ok(t.phi_dx - t.phi_dgz - cfg.lambda * t.gz)
}

/// Fully empirical objective on explicit batches (identity phi):
/// `(1/n) sum D(x_i) - (1/m) sum D(G(z_j)) - lambda (1/m) sum mean G(z_j)`.
pub fn inner_value_empirical_full(
    d: &Network,
    g: &Network,
    lambda: f64,
    x_batch: &Matrix,
    z_batch: &Matrix,
) -> Result<f64> {
    let t = accumulate(d, g, PhiKind::Identity, x_batch, z_batch)?;
    Ok(assemble(&t, lambda, PhiKind::Identity, ObjectiveVariant::NetDistance))
}

/// Discriminator-side empirical objective: empirical x-term, Monte-Carlo
/// z-terms (one shared draw of `cfg.mc_samples` points).
pub fn inner_value_empirical_disc(
    d: &Network,
    g: &Network,
    cfg: &ObjectiveConfig,
    x_batch: &Matrix,
    pz: &SourceSpec,
) -> Result<f64> {
    cfg.validate()?;
    if x_batch.rows() == 0 {
        return Err(Error::contract("x batch must be non-empty"));
    }
    let zs = pz.sample(cfg.mc_samples, derive_stream(cfg.seed, STREAM_POP_Z))?;
    inner_value_empirical_full(d, g, cfg.lambda, x_batch, &zs)
}

/// Evaluates one algebraic variant of the population objective, all three
/// sharing the same Monte-Carlo draws so the identities
/// `PhiForm - PhiFormCentered = 2*phi(1/2)` and (for identity phi)
/// `PhiFormCentered = NetDistance` hold exactly.
pub fn phi_variant_value(
    d: &Network,
    g: &Network,
    cfg: &ObjectiveConfig,
    px: &SourceSpec,
    pz: &SourceSpec,
    variant: ObjectiveVariant,
) -> Result<f64> {
    let (xs, zs) = population_draws(cfg, px, pz)?;
    let t = accumulate(d, g, cfg.phi, &xs, &zs)?;
    Ok(assemble(&t, cfg.lambda, cfg.phi, variant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{ActivationKind, ClassSpec, Network, TwoLayerParams};
    use crate::dist::SourceSpec;

    fn zero_pair(d_x: usize, d_z: usize) -> (Network, Network) {
        let d_spec = ClassSpec::discriminator(d_x, 2, ActivationKind::Clamp01, 1.0);
        let g_spec = ClassSpec::generator(d_z, 2, ActivationKind::Clamp01, 1.0, d_x);
        (Network::zero(&d_spec), Network::zero(&g_spec))
    }

    fn constant_disc(d_x: usize, c: f64) -> Network {
        let mut p = TwoLayerParams::zeros(1, d_x, 1.0);
        p.second_bias = c;
        Network::from_single(p, ActivationKind::Clamp01)
    }

    #[test]
    fn zero_functions_give_zero() {
        let (d, g) = zero_pair(2, 2);
        let cfg = ObjectiveConfig::new(1.0, PhiKind::Identity, 64, 3);
        let px = SourceSpec::uniform(2, 1);
        let pz = SourceSpec::uniform(2, 2);
        let v = inner_value_population(&d, &g, &cfg, &px, &pz).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn constant_discriminator_cancels_at_lambda_zero() {
        let d = constant_disc(2, 0.7);
        let (_, g) = zero_pair(2, 2);
        let cfg = ObjectiveConfig::new(0.0, PhiKind::Identity, 128, 9);
        let px = SourceSpec::uniform(2, 1);
        let pz = SourceSpec::uniform(2, 2);
        let v = inner_value_population(&d, &g, &cfg, &px, &pz).unwrap();
        assert!(v.abs() < 1e-12, "constant D should cancel, got {v}");
    }

    #[test]
    fn empirical_single_sample_reduces_to_pointwise() {
        let d = constant_disc(1, 0.25);
        let g_spec = ClassSpec::generator(1, 1, ActivationKind::Clamp01, 1.0, 1);
        let mut g = Network::zero(&g_spec);
        g.heads[0].second_bias = 0.5;
        let xs = Matrix::from_rows(vec![vec![0.3]]).unwrap();
        let zs = Matrix::from_rows(vec![vec![0.9]]).unwrap();
        let lambda = 2.0;
        let v = inner_value_empirical_full(&d, &g, lambda, &xs, &zs).unwrap();
        // D(x1) - D(G(z1)) - lambda * mean(G(z1)) = 0.25 - 0.25 - 2*0.5
        assert!((v - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn empirical_matches_independent_resummation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let d_spec = ClassSpec::discriminator(2, 3, ActivationKind::Logistic, 1.5);
        let g_spec = ClassSpec::generator(2, 2, ActivationKind::Logistic, 1.5, 2);
        let d = Network::random_feasible(&d_spec, 1.0, &mut rng);
        let g = Network::random_feasible(&g_spec, 1.0, &mut rng);
        let xs = SourceSpec::uniform(2, 5).sample(17, 0).unwrap();
        let zs = SourceSpec::uniform(2, 6).sample(11, 0).unwrap();
        let lambda = 0.3;
        let got = inner_value_empirical_full(&d, &g, lambda, &xs, &zs).unwrap();

        // Independent re-summation, different accumulation order.
        let n = xs.rows() as f64;
        let m = zs.rows() as f64;
        let mut t1 = 0.0;
        for i in (0..xs.rows()).rev() {
            t1 += d.eval_scalar(xs.row(i)).unwrap();
        }
        let mut t2 = 0.0;
        let mut t3 = 0.0;
        for j in (0..zs.rows()).rev() {
            let img = g.eval(zs.row(j)).unwrap();
            t2 += d.eval_scalar(&img).unwrap();
            t3 += img.iter().sum::<f64>() / img.len() as f64;
        }
        let expected = t1 / n - t2 / m - lambda * t3 / m;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn disc_form_agrees_with_full_on_shared_draws() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let d_spec = ClassSpec::discriminator(2, 2, ActivationKind::Clamp01, 1.0);
        let g_spec = ClassSpec::generator(3, 2, ActivationKind::Clamp01, 1.0, 2);
        let d = Network::random_feasible(&d_spec, 1.0, &mut rng);
        let g = Network::random_feasible(&g_spec, 1.0, &mut rng);
        let cfg = ObjectiveConfig::new(0.7, PhiKind::Identity, 53, 8);
        let px = SourceSpec::uniform(2, 21);
        let pz = SourceSpec::uniform(3, 22);
        let xs = px.sample(19, 0).unwrap();
        let via_disc = inner_value_empirical_disc(&d, &g, &cfg, &xs, &pz).unwrap();
        let zs = pz
            .sample(cfg.mc_samples, derive_stream(cfg.seed, STREAM_POP_Z))
            .unwrap();
        let via_full = inner_value_empirical_full(&d, &g, cfg.lambda, &xs, &zs).unwrap();
        assert!((via_disc - via_full).abs() < 1e-12);
    }

    #[test]
    fn lambda_dependence_is_affine_with_known_slope() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        let d_spec = ClassSpec::discriminator(2, 2, ActivationKind::Clamp01, 1.0);
        let g_spec = ClassSpec::generator(2, 2, ActivationKind::Clamp01, 1.0, 2);
        let d = Network::random_feasible(&d_spec, 1.0, &mut rng);
        let g = Network::random_feasible(&g_spec, 1.0, &mut rng);
        let xs = SourceSpec::uniform(2, 31).sample(13, 0).unwrap();
        let zs = SourceSpec::uniform(2, 32).sample(9, 0).unwrap();

        let slope: f64 = -(0..zs.rows())
            .map(|j| {
                let img = g.eval(zs.row(j)).unwrap();
                img.iter().sum::<f64>() / img.len() as f64
            })
            .sum::<f64>()
            / zs.rows() as f64;
        let v0 = inner_value_empirical_full(&d, &g, 0.0, &xs, &zs).unwrap();
        for lambda in [0.25, 0.5, 1.0, 2.0] {
            let v = inner_value_empirical_full(&d, &g, lambda, &xs, &zs).unwrap();
            assert!(
                (v - (v0 + lambda * slope)).abs() < 1e-12,
                "affine in lambda failed at {lambda}"
            );
        }
    }

    #[test]
    fn pointwise_larger_discriminator_does_not_decrease_value() {
        // D = 0 everywhere; D' = pass-through (x on [0,1]). G == 0 maps
        // every z to the origin where D'(0) = D(0) = 0, so only the x-side
        // changes, pointwise upward.
        let (d_zero, g) = zero_pair(1, 1);
        let mut p = TwoLayerParams::zeros(1, 1, 1.0);
        p.first_weights[0][0] = 1.0;
        p.second_weights[0] = 1.0;
        let d_prime = Network::from_single(p, ActivationKind::Clamp01);
        let xs = Matrix::from_rows(vec![vec![0.1], vec![0.5], vec![0.9]]).unwrap();
        let zs = Matrix::from_rows(vec![vec![0.4]]).unwrap();
        let lo = inner_value_empirical_full(&d_zero, &g, 0.7, &xs, &zs).unwrap();
        let hi = inner_value_empirical_full(&d_prime, &g, 0.7, &xs, &zs).unwrap();
        assert!(hi >= lo);
    }

    #[test]
    fn centered_variant_sits_two_phi_half_below() {
        let d = constant_disc(1, 0.5);
        let g_spec = ClassSpec::generator(1, 1, ActivationKind::Clamp01, 1.0, 1);
        let mut g = Network::zero(&g_spec);
        g.heads[0].second_bias = 0.5;
        let cfg = ObjectiveConfig::new(0.0, PhiKind::guarded_log(), 32, 4);
        let px = SourceSpec::uniform(1, 1);
        let pz = SourceSpec::uniform(1, 2);
        let a = phi_variant_value(&d, &g, &cfg, &px, &pz, ObjectiveVariant::PhiForm).unwrap();
        let b =
            phi_variant_value(&d, &g, &cfg, &px, &pz, ObjectiveVariant::PhiFormCentered).unwrap();
        assert_eq!(a - b, 2.0 * cfg.phi.at_half());
    }

    #[test]
    fn centered_log_form_vanishes_at_half() {
        // Hand evaluation: D == 1/2, G == 1/2, lambda = 0 gives
        // ln(1/2) + ln(1 - 1/2) - 2 ln(1/2) = 0.
        let d = constant_disc(1, 0.5);
        let g_spec = ClassSpec::generator(1, 1, ActivationKind::Clamp01, 1.0, 1);
        let mut g = Network::zero(&g_spec);
        g.heads[0].second_bias = 0.5;
        let cfg = ObjectiveConfig::new(0.0, PhiKind::guarded_log(), 64, 4);
        let px = SourceSpec::uniform(1, 1);
        let pz = SourceSpec::uniform(1, 2);
        let v =
            phi_variant_value(&d, &g, &cfg, &px, &pz, ObjectiveVariant::PhiFormCentered).unwrap();
        assert!(v.abs() < 1e-15, "expected exact zero, got {v}");
    }
}
