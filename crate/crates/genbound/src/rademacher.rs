//! Empirical, exact and composition Rademacher-complexity estimation.
//!
//! The quantity estimated throughout is
//!
//! ```text
//! R_n(F) = E_tau [ sup_{f in F} (2/n) sum_i tau_i f(x_i) ],   tau_i ~ +-1
//! ```
//!
//! Monte-Carlo mode draws sign vectors and solves each inner sup by
//! best-of-restarts projected gradient ascent over the continuous class;
//! the zero member is always a candidate, so for the symmetric classes
//! here every per-draw sup (and hence the mean) is non-negative. Exact
//! mode enumerates all `2^n` sign vectors against an explicit finite class
//! and is the oracle the Monte-Carlo path is validated against.

use crate::classes::{
    member_values, ActivationKind, ClassSpec, FiniteClass, Network, ParamGradient,
};
use crate::dist::{derive_stream, stream_rng};
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;
use crate::optim::{ascend_scalar_class, OptConfig};
use rand::Rng;

const STREAM_TAU: u64 = 0x7a;
const STREAM_JOINT_INIT: u64 = 0x7b;

/// Work cap for exact enumeration: `cardinality * 2^n` must stay below this.
pub const EXACT_WORK_CAP: u128 = 1_000_000;
/// Sign-vector cap for exact enumeration.
pub const EXACT_MAX_N: usize = 20;

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    MonteCarlo,
    ExactEnumeration,
}

impl std::fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimateMode::MonteCarlo => write!(f, "monte_carlo"),
            EstimateMode::ExactEnumeration => write!(f, "exact_enumeration"),
        }
    }
}

/// A Rademacher-complexity estimate with its sampling metadata.
#[derive(Debug, Clone)]
pub struct RademacherEstimate {
    pub mean: f64,
    /// Sample standard deviation over sign draws divided by `sqrt(draws)`;
    /// exactly 0 in exact mode.
    pub std_error: f64,
    pub tau_draws: usize,
    pub restarts: usize,
    pub seed: u64,
    pub mode: EstimateMode,
}

fn summarize(sups: &[f64], restarts: usize, seed: u64, mode: EstimateMode) -> RademacherEstimate {
    let t = sups.len() as f64;
    let mean = sups.iter().sum::<f64>() / t;
    let std_error = if sups.len() > 1 && mode == EstimateMode::MonteCarlo {
        let var = sups.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    RademacherEstimate {
        mean,
        std_error,
        tau_draws: sups.len(),
        restarts,
        seed,
        mode,
    }
}

fn draw_signs<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Monte-Carlo estimate of `R_n` for the continuous class described by
/// `spec`, on the given sample. Each sign draw's sup is solved by projected
/// gradient ascent, best of `restarts` starts plus the zero candidate.
pub fn empirical_rademacher(
    spec: &ClassSpec,
    sample: &Matrix,
    tau_draws: usize,
    restarts: usize,
    opt_cfg: &OptConfig,
) -> Result<RademacherEstimate> {
    spec.validate()?;
    check_dim("sample width", spec.input_dim, sample.cols())?;
    if sample.rows() == 0 {
        return Err(Error::contract("sample must be non-empty"));
    }
    if tau_draws == 0 {
        return Err(Error::contract("tau_draws must be >= 1"));
    }
    let n = sample.rows();
    let scale = 2.0 / n as f64;
    let activation = spec.activation;
    let mut sups = Vec::with_capacity(tau_draws);
    for t in 0..tau_draws {
        let mut rng = stream_rng(opt_cfg.seed, derive_stream(STREAM_TAU, t as u64));
        let tau = draw_signs(n, &mut rng);
        let cfg = OptConfig {
            restarts,
            seed: derive_stream(opt_cfg.seed, 0x1000 + t as u64),
            ..opt_cfg.clone()
        };
        let value = |p: &crate::classes::TwoLayerParams| {
            sample
                .iter_rows()
                .zip(&tau)
                .map(|(x, s)| s * p.eval_unchecked(activation, x))
                .sum::<f64>()
                * scale
        };
        let grad = |p: &crate::classes::TwoLayerParams| {
            let mut g = ParamGradient::zeros(p.width(), p.input_dim());
            for (x, s) in sample.iter_rows().zip(&tau) {
                p.accumulate_grad(activation, x, s * scale, &mut g);
            }
            g
        };
        let (_, sup) = ascend_scalar_class(&spec.scalar(), value, grad, &cfg, STREAM_TAU)?;
        sups.push(sup);
    }
    Ok(summarize(&sups, restarts, opt_cfg.seed, EstimateMode::MonteCarlo))
}

/// Exact `R_n` of a finite class: full expectation over all `2^n` sign
/// vectors of the max over members. Refuses when `2^n * cardinality`
/// exceeds [`EXACT_WORK_CAP`], reporting the computed cost.
pub fn exact_rademacher(
    class: &FiniteClass,
    activation: ActivationKind,
    sample: &Matrix,
) -> Result<RademacherEstimate> {
    let n = sample.rows();
    if n == 0 {
        return Err(Error::contract("sample must be non-empty"));
    }
    if class.cardinality() == 0 {
        return Err(Error::contract("finite class has no members"));
    }
    if n > EXACT_MAX_N {
        return Err(Error::CapExceeded {
            what: "exact enumeration sample size",
            cost: n as u128,
            cap: EXACT_MAX_N as u128,
        });
    }
    let cost = (class.cardinality() as u128) << n;
    if cost > EXACT_WORK_CAP {
        return Err(Error::CapExceeded {
            what: "exact enumeration work (cardinality * 2^n)",
            cost,
            cap: EXACT_WORK_CAP,
        });
    }

    let values = member_values(class, activation, sample)?;
    let scale = 2.0 / n as f64;
    let mut total = 0.0;
    for signs in 0u64..(1u64 << n) {
        let mut best = f64::NEG_INFINITY;
        for k in 0..class.cardinality() {
            let row = values.row(k);
            let mut s = 0.0;
            for (i, v) in row.iter().enumerate() {
                if (signs >> i) & 1 == 1 {
                    s += v;
                } else {
                    s -= v;
                }
            }
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    let mean = scale * total / (1u64 << n) as f64;
    Ok(RademacherEstimate {
        mean,
        std_error: 0.0,
        tau_draws: 1 << n,
        restarts: 1,
        seed: 0,
        mode: EstimateMode::ExactEnumeration,
    })
}

/// Monte-Carlo estimate of the composition complexity
/// `E_tau sup_{D, G} (2/m) sum_j tau_j D(G(z_j))` by joint projected
/// ascent over discriminator and generator parameters.
pub fn empirical_rademacher_composition(
    d_spec: &ClassSpec,
    g_spec: &ClassSpec,
    z_sample: &Matrix,
    tau_draws: usize,
    restarts: usize,
    opt_cfg: &OptConfig,
) -> Result<RademacherEstimate> {
    d_spec.validate()?;
    g_spec.validate()?;
    check_dim(
        "generator output vs discriminator input",
        d_spec.input_dim,
        g_spec.output_dim,
    )?;
    check_dim("z sample width", g_spec.input_dim, z_sample.cols())?;
    if z_sample.rows() == 0 {
        return Err(Error::contract("sample must be non-empty"));
    }
    if tau_draws == 0 {
        return Err(Error::contract("tau_draws must be >= 1"));
    }
    opt_cfg.validate()?;

    let m = z_sample.rows();
    let scale = 2.0 / m as f64;
    let mut sups = Vec::with_capacity(tau_draws);

    for t in 0..tau_draws {
        let mut rng = stream_rng(opt_cfg.seed, derive_stream(STREAM_TAU, t as u64));
        let tau = draw_signs(m, &mut rng);

        let objective = |d: &Network, g: &Network| -> f64 {
            let mut image = Vec::with_capacity(g.output_dim());
            z_sample
                .iter_rows()
                .zip(&tau)
                .map(|(z, s)| {
                    g.eval_into(z, &mut image);
                    s * d.heads[0].eval_unchecked(d.activation, &image)
                })
                .sum::<f64>()
                * scale
        };

        // Zero candidate: D == 0 makes the sum 0 regardless of G.
        let mut best = 0.0;
        for restart in 0..restarts {
            let stream = derive_stream(STREAM_JOINT_INIT, (t * restarts + restart) as u64);
            let mut rng_init = stream_rng(opt_cfg.seed, stream);
            let mut d = Network::random_feasible(&d_spec.scalar(), opt_cfg.init_scale, &mut rng_init);
            let mut g = Network::random_feasible(g_spec, opt_cfg.init_scale, &mut rng_init);
            let mut v = objective(&d, &g);
            if v > best {
                best = v;
            }
            let mut image = Vec::with_capacity(g.output_dim());
            for step in 0..opt_cfg.steps {
                let mut gd = ParamGradient::zeros(d.heads[0].width(), d.heads[0].input_dim());
                let mut ggs: Vec<ParamGradient> = g
                    .heads
                    .iter()
                    .map(|h| ParamGradient::zeros(h.width(), h.input_dim()))
                    .collect();
                for (z, s) in z_sample.iter_rows().zip(&tau) {
                    g.eval_into(z, &mut image);
                    d.heads[0].accumulate_grad(d.activation, &image, s * scale, &mut gd);
                    let dinput = d.heads[0].input_grad(d.activation, &image);
                    for (h, gg) in ggs.iter_mut().enumerate() {
                        g.heads[h].accumulate_grad(
                            g.activation,
                            z,
                            s * scale * dinput[h],
                            gg,
                        );
                    }
                }
                if !gd.is_finite() || ggs.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFiniteGradient {
                        step,
                        restart,
                        detail: "composition ascent".into(),
                    });
                }
                d.heads[0].step(&gd, opt_cfg.step_size);
                d.heads[0].project();
                for (head, gg) in g.heads.iter_mut().zip(&ggs) {
                    head.step(gg, opt_cfg.step_size);
                    head.project();
                }
                v = objective(&d, &g);
                if v > best {
                    best = v;
                }
            }
        }
        sups.push(best);
    }
    Ok(summarize(&sups, restarts, opt_cfg.seed, EstimateMode::MonteCarlo))
}
