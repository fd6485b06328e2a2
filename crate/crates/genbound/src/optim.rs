//! Projected-gradient training and generalization-gap measurement.
//!
//! The only optimizer here is plain projected gradient ascent/descent with a
//! constant step: every iterate is projected back onto the class budget, so
//! the constraints the bounds rely on hold at every step. Restarts start
//! from independent feasible initializations; the zero network is always
//! included as a candidate, which also pins the best value at >= the zero
//! function's value.

use crate::bounds::{theorem1_disc, theorem1_full, Variant};
use crate::classes::{ClassSpec, Network, ParamGradient, TwoLayerParams};
use crate::dist::{derive_stream, stream_rng, SourceSpec};
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;
use crate::objective::{inner_value_empirical_full, ObjectiveConfig};
use crate::rademacher::{empirical_rademacher, empirical_rademacher_composition};

const STREAM_DISC_INIT: u64 = 0x01;
const STREAM_GEN_INIT: u64 = 0x02;
const STREAM_TRAIN_X: u64 = 0x11;
const STREAM_TRAIN_Z: u64 = 0x12;
const STREAM_HOLD_X: u64 = 0x13;
const STREAM_HOLD_Z: u64 = 0x14;
const STREAM_RADEMACHER: u64 = 0x15;

/// Projected-gradient settings.
#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub step_size: f64,
    pub steps: usize,
    pub restarts: usize,
    /// Discriminator ascent steps per generator step in minimax training.
    pub inner_disc_steps: usize,
    pub seed: u64,
    /// Initialization half-width as a fraction of the budget, in `(0, 1]`.
    pub init_scale: f64,
}

impl OptConfig {
    pub fn new(step_size: f64, steps: usize, restarts: usize, seed: u64) -> Self {
        OptConfig {
            step_size,
            steps,
            restarts,
            inner_disc_steps: 3,
            seed,
            init_scale: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) {
            return Err(Error::contract("step_size must be > 0"));
        }
        if self.steps == 0 || self.restarts == 0 || self.inner_disc_steps == 0 {
            return Err(Error::contract(
                "steps, restarts and inner_disc_steps must be >= 1",
            ));
        }
        if !(self.init_scale > 0.0 && self.init_scale <= 1.0) {
            return Err(Error::contract("init_scale must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        OptConfig { seed, ..self.clone() }
    }
}

/// Best-of-restarts projected gradient ascent of `value`/`grad` over a
/// scalar class. Each restart runs `cfg.steps` constant-step updates with
/// per-step projection; the best feasible iterate seen anywhere (including
/// the zero network) wins.
pub(crate) fn ascend_scalar_class<V, G>(
    spec: &ClassSpec,
    value: V,
    grad: G,
    cfg: &OptConfig,
    stream_domain: u64,
) -> Result<(TwoLayerParams, f64)>
where
    V: Fn(&TwoLayerParams) -> f64,
    G: Fn(&TwoLayerParams) -> ParamGradient,
{
    spec.validate()?;
    cfg.validate()?;
    let zero = TwoLayerParams::zeros(spec.width, spec.input_dim, spec.budget_v);
    let mut best_value = value(&zero);
    let mut best = zero;

    for restart in 0..cfg.restarts {
        let mut rng = stream_rng(
            cfg.seed,
            derive_stream(stream_domain, restart as u64),
        );
        let mut params = TwoLayerParams::random_feasible(
            spec.width,
            spec.input_dim,
            spec.budget_v,
            cfg.init_scale,
            &mut rng,
        );
        // Start from the better of the draw and its second-layer negation:
        // for a sign-weighted objective one of the two sits on the rising
        // side of the activation, which avoids dead clamp regions.
        let negated = params.negated_second();
        if value(&negated) > value(&params) {
            params = negated;
        }
        let mut v = value(&params);
        if v > best_value {
            best_value = v;
            best = params.clone();
        }
        for step in 0..cfg.steps {
            let g = grad(&params);
            if !g.is_finite() {
                return Err(Error::NonFiniteGradient {
                    step,
                    restart,
                    detail: "scalar-class ascent".into(),
                });
            }
            params.step(&g, cfg.step_size);
            params.project();
            v = value(&params);
            if v > best_value {
                best_value = v;
                best = params.clone();
            }
        }
        debug_assert!(params.is_feasible(1e-9));
    }
    Ok((best, best_value))
}

/// Where the generator-side sample for discriminator maximization comes from.
pub enum ZData<'a> {
    /// A fixed batch of z draws.
    Batch(&'a Matrix),
    /// `draws` Monte-Carlo points from a source (stream derived from the
    /// objective seed).
    Population { pz: &'a SourceSpec, draws: usize },
}

/// Maximizes the empirical objective over the discriminator class with the
/// generator held fixed:
///
/// ```text
/// (1/n) sum_i D(x_i) - (1/m) sum_j D(y_j) - lambda * (1/m) sum_j mean(y_j)
/// ```
///
/// where `y_j = G(z_j)`, or `y_j = z_j` when `fixed_g` is `None` (the
/// z-side points are then read as already living in x-space). The lambda
/// term does not depend on `D`; it shifts the reported value only.
pub fn maximize_disc(
    d_spec: &ClassSpec,
    fixed_g: Option<&Network>,
    x_batch: &Matrix,
    z_data: ZData<'_>,
    cfg: &OptConfig,
    obj_cfg: &ObjectiveConfig,
) -> Result<(TwoLayerParams, f64)> {
    d_spec.validate()?;
    obj_cfg.validate()?;
    if x_batch.rows() == 0 {
        return Err(Error::contract("x batch must be non-empty"));
    }
    check_dim("x batch width", d_spec.input_dim, x_batch.cols())?;

    let z_rows = match z_data {
        ZData::Batch(m) => m.clone(),
        ZData::Population { pz, draws } => {
            pz.sample(draws, derive_stream(obj_cfg.seed, STREAM_TRAIN_Z))?
        }
    };
    // Materialize the generator images once; D sees a fixed point cloud.
    let images = match fixed_g {
        Some(g) => {
            check_dim("generator output", d_spec.input_dim, g.output_dim())?;
            check_dim("z batch width", g.input_dim(), z_rows.cols())?;
            let mut im = Matrix::zeros(z_rows.rows(), g.output_dim());
            let mut buf = Vec::new();
            for (j, z) in z_rows.iter_rows().enumerate() {
                g.eval_into(z, &mut buf);
                im.row_mut(j).copy_from_slice(&buf);
            }
            im
        }
        None => {
            check_dim("z batch width (identity generator)", d_spec.input_dim, z_rows.cols())?;
            z_rows.clone()
        }
    };
    let m = images.rows() as f64;
    let n = x_batch.rows() as f64;
    let lambda_term = obj_cfg.lambda
        * images
            .iter_rows()
            .map(|r| r.iter().sum::<f64>() / r.len() as f64)
            .sum::<f64>()
        / m;
    let activation = d_spec.activation;

    let value = |p: &TwoLayerParams| {
        let pos: f64 = x_batch
            .iter_rows()
            .map(|r| p.eval_unchecked(activation, r))
            .sum::<f64>()
            / n;
        let neg: f64 = images
            .iter_rows()
            .map(|r| p.eval_unchecked(activation, r))
            .sum::<f64>()
            / m;
        pos - neg - lambda_term
    };
    let grad = |p: &TwoLayerParams| {
        let mut g = ParamGradient::zeros(p.width(), p.input_dim());
        for r in x_batch.iter_rows() {
            p.accumulate_grad(activation, r, 1.0 / n, &mut g);
        }
        for r in images.iter_rows() {
            p.accumulate_grad(activation, r, -1.0 / m, &mut g);
        }
        g
    };
    ascend_scalar_class(d_spec, value, grad, cfg, STREAM_DISC_INIT)
}

/// Output of minimax training.
#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Final discriminator (single head).
    pub d_hat: TwoLayerParams,
    /// Final generator heads.
    pub g_hat: Vec<TwoLayerParams>,
    /// Empirical objective at `(d_hat, g_hat)`, re-evaluated after training.
    pub value: f64,
    /// `(outer step, value)` trace of the winning restart.
    pub trace: Vec<(usize, f64)>,
    pub activation_d: crate::classes::ActivationKind,
    pub activation_g: crate::classes::ActivationKind,
}

impl TrainResult {
    pub fn discriminator(&self) -> Network {
        Network::from_single(self.d_hat.clone(), self.activation_d)
    }

    pub fn generator(&self) -> Network {
        Network {
            heads: self.g_hat.clone(),
            activation: self.activation_g,
        }
    }
}

/// Alternating projected-gradient minimax training of the empirical
/// objective: `inner_disc_steps` discriminator ascent steps, then one
/// generator descent step, for `cfg.steps` rounds. The restart whose final
/// value is lowest (the generator's goal) is reported; ties break toward
/// the earlier restart index.
pub fn minimax_train(
    d_spec: &ClassSpec,
    g_spec: &ClassSpec,
    x_batch: &Matrix,
    z_batch: &Matrix,
    lambda: f64,
    cfg: &OptConfig,
) -> Result<TrainResult> {
    d_spec.validate()?;
    g_spec.validate()?;
    cfg.validate()?;
    check_dim(
        "generator output vs discriminator input",
        d_spec.input_dim,
        g_spec.output_dim,
    )?;
    check_dim("x batch width", d_spec.input_dim, x_batch.cols())?;
    check_dim("z batch width", g_spec.input_dim, z_batch.cols())?;
    if x_batch.rows() == 0 || z_batch.rows() == 0 {
        return Err(Error::contract("training batches must be non-empty"));
    }

    let n = x_batch.rows() as f64;
    let m = z_batch.rows() as f64;
    let mut best: Option<TrainResult> = None;

    for restart in 0..cfg.restarts {
        let mut rng_d = stream_rng(cfg.seed, derive_stream(STREAM_DISC_INIT, restart as u64));
        let mut rng_g = stream_rng(cfg.seed, derive_stream(STREAM_GEN_INIT, restart as u64));
        let mut d = Network::random_feasible(&d_spec.scalar(), cfg.init_scale, &mut rng_d);
        let mut g = Network::random_feasible(g_spec, cfg.init_scale, &mut rng_g);
        let mut trace = Vec::with_capacity(cfg.steps);

        let mut image = Vec::with_capacity(g.output_dim());
        for outer in 0..cfg.steps {
            for inner in 0..cfg.inner_disc_steps {
                // Ascent on D of (1/n) sum D(x) - (1/m) sum D(G(z)).
                let mut gd = ParamGradient::zeros(d.heads[0].width(), d.heads[0].input_dim());
                for r in x_batch.iter_rows() {
                    d.heads[0].accumulate_grad(d.activation, r, 1.0 / n, &mut gd);
                }
                for z in z_batch.iter_rows() {
                    g.eval_into(z, &mut image);
                    d.heads[0].accumulate_grad(d.activation, &image, -1.0 / m, &mut gd);
                }
                if !gd.is_finite() {
                    return Err(Error::NonFiniteGradient {
                        step: outer * cfg.inner_disc_steps + inner,
                        restart,
                        detail: "discriminator ascent".into(),
                    });
                }
                d.heads[0].step(&gd, cfg.step_size);
                d.heads[0].project();
            }

            // One descent step on G of -(1/m) sum D(G(z)) - lambda (1/m) sum mean G(z).
            let d_x = g.output_dim() as f64;
            let mut head_grads: Vec<ParamGradient> = g
                .heads
                .iter()
                .map(|h| ParamGradient::zeros(h.width(), h.input_dim()))
                .collect();
            for z in z_batch.iter_rows() {
                g.eval_into(z, &mut image);
                let dinput = d.heads[0].input_grad(d.activation, &image);
                for (h, (head, hg)) in g.heads.iter().zip(head_grads.iter_mut()).enumerate() {
                    // d(value)/d(theta_h) = -(1/m) [dD/dy_h + lambda/d_x] * dG_h/dtheta
                    let scale = -(dinput[h] + lambda / d_x) / m;
                    head.accumulate_grad(g.activation, z, scale, hg);
                }
            }
            for (head, hg) in g.heads.iter_mut().zip(&head_grads) {
                if !hg.is_finite() {
                    return Err(Error::NonFiniteGradient {
                        step: outer,
                        restart,
                        detail: "generator descent".into(),
                    });
                }
                // hg is d(value)/d(theta); the generator descends the value.
                head.step(hg, -cfg.step_size);
                head.project();
            }
            debug_assert!(d.is_feasible(1e-9) && g.is_feasible(1e-9));

            let value = inner_value_empirical_full(&d, &g, lambda, x_batch, z_batch)?;
            trace.push((outer, value));
        }

        let value = inner_value_empirical_full(&d, &g, lambda, x_batch, z_batch)?;
        let candidate = TrainResult {
            d_hat: d.heads.remove(0),
            g_hat: g.heads,
            value,
            trace,
            activation_d: d_spec.activation,
            activation_g: g_spec.activation,
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.value < b.value,
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// How the empirical-vs-population gap is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// Train jointly, re-evaluate the trained pair on hold-out draws.
    JointEmpirical,
    /// Fix the trained generator and re-maximize only the discriminator on
    /// empirical vs hold-out terms (shared z draws on both sides).
    DiscriminatorOnly,
}

/// Configuration of one gap measurement.
#[derive(Debug, Clone)]
pub struct GapConfig {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub delta: f64,
    /// Hold-out Monte-Carlo draw count for population estimates.
    pub holdout: usize,
    /// Sign draws per Rademacher estimate.
    pub tau_draws: usize,
    pub mode: GapMode,
    pub seed: u64,
}

/// One experiment row: sizes, values, the signed gap and the assembled
/// Theorem-1 bounds, plus the complexity estimates that fed them.
#[derive(Debug, Clone)]
pub struct GapRecord {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub budget_v: f64,
    pub d_x: usize,
    pub d_z: usize,
    pub delta: f64,
    pub value_empirical: f64,
    pub value_population: f64,
    /// `value_empirical - value_population` (signed).
    pub gap: f64,
    pub rademacher_d: f64,
    pub rademacher_dg: f64,
    pub rademacher_g: f64,
    pub bound_verbatim: f64,
    pub bound_conservative: f64,
    pub seed: u64,
}

/// Difference between the empirical objective on the training batches and
/// the same objective on reference batches, at fixed `(d, g)`. With the
/// reference batches equal to the training batches this is exactly zero.
pub fn objective_gap(
    d: &Network,
    g: &Network,
    lambda: f64,
    x_train: &Matrix,
    z_train: &Matrix,
    x_ref: &Matrix,
    z_ref: &Matrix,
) -> Result<f64> {
    let emp = inner_value_empirical_full(d, g, lambda, x_train, z_train)?;
    let pop = inner_value_empirical_full(d, g, lambda, x_ref, z_ref)?;
    Ok(emp - pop)
}

/// Trains on fresh `(n, m)` samples, estimates the population value on
/// `holdout`-sized draws, estimates the three Rademacher complexities on
/// the training batches, and assembles the Theorem-1 bounds.
pub fn measure_gap(
    d_spec: &ClassSpec,
    g_spec: &ClassSpec,
    px: &SourceSpec,
    pz: &SourceSpec,
    gap_cfg: &GapConfig,
    opt_cfg: &OptConfig,
    obj_cfg: &ObjectiveConfig,
) -> Result<GapRecord> {
    if gap_cfg.holdout < 10_000 {
        return Err(Error::contract(format!(
            "holdout must be >= 10000, got {}",
            gap_cfg.holdout
        )));
    }
    if !(gap_cfg.delta > 0.0 && gap_cfg.delta < 1.0) {
        return Err(Error::contract("delta must lie in (0, 1)"));
    }
    let x_train = px.sample(gap_cfg.n, derive_stream(gap_cfg.seed, STREAM_TRAIN_X))?;
    let z_train = pz.sample(gap_cfg.m, derive_stream(gap_cfg.seed, STREAM_TRAIN_Z))?;
    let x_hold = px.sample(gap_cfg.holdout, derive_stream(gap_cfg.seed, STREAM_HOLD_X))?;
    let z_hold = pz.sample(gap_cfg.holdout, derive_stream(gap_cfg.seed, STREAM_HOLD_Z))?;

    let train_cfg = opt_cfg.with_seed(derive_stream(gap_cfg.seed, opt_cfg.seed));
    let trained = minimax_train(
        d_spec,
        g_spec,
        &x_train,
        &z_train,
        gap_cfg.lambda,
        &train_cfg,
    )?;
    let d = trained.discriminator();
    let g = trained.generator();

    let (value_empirical, value_population) = match gap_cfg.mode {
        GapMode::JointEmpirical => {
            let emp = trained.value;
            let pop =
                inner_value_empirical_full(&d, &g, gap_cfg.lambda, &x_hold, &z_hold)?;
            (emp, pop)
        }
        GapMode::DiscriminatorOnly => {
            let z_shared = ZData::Batch(&z_hold);
            let obj = ObjectiveConfig {
                lambda: gap_cfg.lambda,
                ..obj_cfg.clone()
            };
            let (_, emp) =
                maximize_disc(d_spec, Some(&g), &x_train, z_shared, &train_cfg, &obj)?;
            let z_shared = ZData::Batch(&z_hold);
            let (_, pop) =
                maximize_disc(d_spec, Some(&g), &x_hold, z_shared, &train_cfg, &obj)?;
            (emp, pop)
        }
    };
    let gap = value_empirical - value_population;

    let rad_seed = derive_stream(gap_cfg.seed, STREAM_RADEMACHER);
    let rad_d = empirical_rademacher(
        &d_spec.scalar(),
        &x_train,
        gap_cfg.tau_draws,
        opt_cfg.restarts,
        &opt_cfg.with_seed(derive_stream(rad_seed, 1)),
    )?;
    let rad_g = empirical_rademacher(
        &g_spec.scalar(),
        &z_train,
        gap_cfg.tau_draws,
        opt_cfg.restarts,
        &opt_cfg.with_seed(derive_stream(rad_seed, 2)),
    )?;
    let rad_dg = empirical_rademacher_composition(
        d_spec,
        g_spec,
        &z_train,
        gap_cfg.tau_draws,
        opt_cfg.restarts,
        &opt_cfg.with_seed(derive_stream(rad_seed, 3)),
    )?;

    let qx = d_spec.sup_envelope();
    let qz = g_spec.sup_envelope();
    let (bound_verbatim, bound_conservative) = match gap_cfg.mode {
        GapMode::JointEmpirical => {
            let v = theorem1_full(
                rad_d.mean,
                rad_dg.mean,
                rad_g.mean,
                qx,
                qz,
                gap_cfg.lambda,
                gap_cfg.n,
                gap_cfg.m,
                gap_cfg.delta,
                Variant::Verbatim,
            )?;
            let c = theorem1_full(
                rad_d.mean,
                rad_dg.mean,
                rad_g.mean,
                qx,
                qz,
                gap_cfg.lambda,
                gap_cfg.n,
                gap_cfg.m,
                gap_cfg.delta,
                Variant::Conservative,
            )?;
            (v.value, c.value)
        }
        GapMode::DiscriminatorOnly => {
            let b = theorem1_disc(rad_d.mean, qx, gap_cfg.n, gap_cfg.delta)?;
            (b.value, b.value)
        }
    };

    Ok(GapRecord {
        n: gap_cfg.n,
        m: gap_cfg.m,
        lambda: gap_cfg.lambda,
        budget_v: d_spec.budget_v,
        d_x: d_spec.input_dim,
        d_z: g_spec.input_dim,
        delta: gap_cfg.delta,
        value_empirical,
        value_population,
        gap,
        rademacher_d: rad_d.mean,
        rademacher_dg: rad_dg.mean,
        rademacher_g: rad_g.mean,
        bound_verbatim,
        bound_conservative,
        seed: gap_cfg.seed,
    })
}
