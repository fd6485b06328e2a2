//! Constrained two-layer function classes.
//!
//! A member of the base class maps `x in [0,1]^d` to `s(v . x + v_0)` where
//! the activation `s` is non-decreasing with range inside `[0,1]` and the
//! first-layer weights obey an l1 budget `|v_0| + sum_i |v_i| <= V`. The full
//! class takes linear combinations of `width` such units with second-layer
//! coefficients box-bounded by the same `V`:
//!
//! ```text
//! f(x) = sum_u c_u * s(v_u . x + b_u) + c_0,   |c_u| <= V, |c_0| <= V
//! ```
//!
//! Everything downstream (objectives, projected-gradient training,
//! Rademacher estimation, closed-form bounds) works over this parameterization.
//! The sup-norm envelope of the class is `V * (width + 1)`, exposed as
//! [`ClassSpec::sup_envelope`].

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;

/// Default cap on the cardinality of an enumerated finite class.
pub const DEFAULT_CARDINALITY_CAP: u128 = 1_000_000;

/// First-layer activation.
///
/// Both choices are non-decreasing with range inside `[0,1]`; `Clamp01` is
/// 1-Lipschitz, `Logistic` is 1/4-Lipschitz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    /// `x -> min(max(x, 0), 1)`.
    Clamp01,
    /// `x -> 1 / (1 + exp(-x))`.
    Logistic,
}

impl ActivationKind {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            ActivationKind::Clamp01 => z.clamp(0.0, 1.0),
            ActivationKind::Logistic => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative of the activation. `Clamp01` is non-differentiable at 0
    /// and 1; the right-derivative is used there (1 at 0, 0 at 1), so the
    /// value is deterministic at the kinks.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            ActivationKind::Clamp01 => {
                if (0.0..1.0).contains(&z) {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Logistic => {
                let s = self.apply(z);
                s * (1.0 - s)
            }
        }
    }

    /// Lipschitz constant of the activation.
    pub fn lipschitz(self) -> f64 {
        match self {
            ActivationKind::Clamp01 => 1.0,
            ActivationKind::Logistic => 0.25,
        }
    }
}

/// Evaluates one hidden unit: `s(weights . x + bias)`.
pub fn eval_unit(weights: &[f64], bias: f64, activation: ActivationKind, x: &[f64]) -> Result<f64> {
    check_dim("eval_unit input", weights.len(), x.len())?;
    Ok(activation.apply(dot(weights, x) + bias))
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(ai, bi)| ai * bi).sum()
}

/// Weights of a scalar-output two-layer network under the class budget.
///
/// Invariants (see [`TwoLayerParams::validate`]):
/// * per hidden unit `u`: `|first_bias[u]| + sum_i |first_weights[u][i]| <= budget_v`
/// * `|second_weights[u]| <= budget_v` and `|second_bias| <= budget_v`
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerParams {
    /// Per-unit first-layer weight rows, `width x input_dim`.
    pub first_weights: Vec<Vec<f64>>,
    /// Per-unit first-layer biases.
    pub first_bias: Vec<f64>,
    /// Second-layer coefficients, one per unit.
    pub second_weights: Vec<f64>,
    /// Second-layer bias.
    pub second_bias: f64,
    /// Weight budget `V >= 1`.
    pub budget_v: f64,
}

impl TwoLayerParams {
    pub fn zeros(width: usize, input_dim: usize, budget_v: f64) -> Self {
        TwoLayerParams {
            first_weights: vec![vec![0.0; input_dim]; width],
            first_bias: vec![0.0; width],
            second_weights: vec![0.0; width],
            second_bias: 0.0,
            budget_v,
        }
    }

    pub fn width(&self) -> usize {
        self.second_weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.first_weights.first().map_or(0, |r| r.len())
    }

    /// Checks the class invariants up to `tol` slack.
    pub fn is_feasible(&self, tol: f64) -> bool {
        let v = self.budget_v;
        self.first_weights
            .iter()
            .zip(&self.first_bias)
            .all(|(row, b)| b.abs() + row.iter().map(|w| w.abs()).sum::<f64>() <= v + tol)
            && self.second_weights.iter().all(|w| w.abs() <= v + tol)
            && self.second_bias.abs() <= v + tol
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget_v >= 1.0) {
            return Err(Error::contract(format!(
                "budget V must be >= 1, got {}",
                self.budget_v
            )));
        }
        if self.first_weights.len() != self.width() || self.first_bias.len() != self.width() {
            return Err(Error::contract("inconsistent widths across layers"));
        }
        if !self.is_feasible(1e-9) {
            return Err(Error::contract("weights violate the class budget"));
        }
        Ok(())
    }

    /// Scalar output `sum_u c_u s(v_u . x + b_u) + c_0`.
    pub fn eval(&self, activation: ActivationKind, x: &[f64]) -> Result<f64> {
        check_dim("network input", self.input_dim(), x.len())?;
        Ok(self.eval_unchecked(activation, x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, activation: ActivationKind, x: &[f64]) -> f64 {
        debug_assert_eq!(self.input_dim(), x.len());
        let mut out = self.second_bias;
        for u in 0..self.width() {
            out += self.second_weights[u]
                * activation.apply(dot(&self.first_weights[u], x) + self.first_bias[u]);
        }
        out
    }

    /// Closed-form gradient of the scalar output with respect to every
    /// weight and bias. At `Clamp01` kinks the activation's right-derivative
    /// is used, so the result is a deterministic one-sided subgradient.
    pub fn grad(&self, activation: ActivationKind, x: &[f64]) -> Result<ParamGradient> {
        check_dim("network input", self.input_dim(), x.len())?;
        let mut g = ParamGradient::zeros(self.width(), self.input_dim());
        self.accumulate_grad(activation, x, 1.0, &mut g);
        Ok(g)
    }

    /// Adds `scale * d(output)/d(params)` into `g`.
    pub(crate) fn accumulate_grad(
        &self,
        activation: ActivationKind,
        x: &[f64],
        scale: f64,
        g: &mut ParamGradient,
    ) {
        for u in 0..self.width() {
            let pre = dot(&self.first_weights[u], x) + self.first_bias[u];
            let h = activation.apply(pre);
            let dh = activation.derivative(pre);
            g.second_weights[u] += scale * h;
            let back = scale * self.second_weights[u] * dh;
            g.first_bias[u] += back;
            for (gw, xi) in g.first_weights[u].iter_mut().zip(x) {
                *gw += back * xi;
            }
        }
        g.second_bias += scale;
    }

    /// Gradient of the scalar output with respect to the input point
    /// (`sum_u c_u s'(pre_u) v_u`); used to backpropagate through a
    /// discriminator into generator parameters.
    pub(crate) fn input_grad(&self, activation: ActivationKind, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.input_dim()];
        for u in 0..self.width() {
            let pre = dot(&self.first_weights[u], x) + self.first_bias[u];
            let back = self.second_weights[u] * activation.derivative(pre);
            for (gi, wi) in g.iter_mut().zip(&self.first_weights[u]) {
                *gi += back * wi;
            }
        }
        g
    }

    /// Takes a gradient step `params += scale * grad` (no projection).
    pub(crate) fn step(&mut self, grad: &ParamGradient, scale: f64) {
        for u in 0..self.width() {
            for (w, g) in self.first_weights[u].iter_mut().zip(&grad.first_weights[u]) {
                *w += scale * g;
            }
            self.first_bias[u] += scale * grad.first_bias[u];
            self.second_weights[u] += scale * grad.second_weights[u];
        }
        self.second_bias += scale * grad.second_bias;
    }

    /// Projects every layer back onto the feasible set.
    pub fn project(&mut self) {
        let v = self.budget_v;
        for u in 0..self.width() {
            let (w, b) = project_first_layer(&self.first_weights[u], self.first_bias[u], v)
                .expect("budget is positive");
            self.first_weights[u] = w;
            self.first_bias[u] = b;
        }
        let (w, b) = project_second_layer(&self.second_weights, self.second_bias, v)
            .expect("budget is positive");
        self.second_weights = w;
        self.second_bias = b;
    }

    /// The member with the second layer negated; for a symmetric class this
    /// is `-f`.
    pub fn negated_second(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.second_weights {
            *w = -*w;
        }
        out.second_bias = -out.second_bias;
        out
    }

    /// Draws uniform parameters in `[-V*scale, V*scale]` and projects them
    /// onto the feasible set.
    pub fn random_feasible<R: Rng>(
        width: usize,
        input_dim: usize,
        budget_v: f64,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let half = budget_v * scale;
        let mut p = TwoLayerParams::zeros(width, input_dim, budget_v);
        for u in 0..width {
            for w in &mut p.first_weights[u] {
                *w = rng.gen_range(-half..=half);
            }
            p.first_bias[u] = rng.gen_range(-half..=half);
            p.second_weights[u] = rng.gen_range(-half..=half);
        }
        p.second_bias = rng.gen_range(-half..=half);
        p.project();
        p
    }
}

/// Gradient with the same shape as [`TwoLayerParams`].
#[derive(Debug, Clone)]
pub struct ParamGradient {
    pub first_weights: Vec<Vec<f64>>,
    pub first_bias: Vec<f64>,
    pub second_weights: Vec<f64>,
    pub second_bias: f64,
}

impl ParamGradient {
    pub fn zeros(width: usize, input_dim: usize) -> Self {
        ParamGradient {
            first_weights: vec![vec![0.0; input_dim]; width],
            first_bias: vec![0.0; width],
            second_weights: vec![0.0; width],
            second_bias: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.first_weights
            .iter()
            .flatten()
            .chain(&self.first_bias)
            .chain(&self.second_weights)
            .chain(std::iter::once(&self.second_bias))
            .all(|v| v.is_finite())
    }

    /// Flattens to `(bias-first) unit rows ++ second layer ++ second bias`;
    /// only used by finite-difference tests, where a stable coordinate
    /// order matters.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (row, b) in self.first_weights.iter().zip(&self.first_bias) {
            out.push(*b);
            out.extend_from_slice(row);
        }
        out.extend_from_slice(&self.second_weights);
        out.push(self.second_bias);
        out
    }
}

/// Euclidean projection of the concatenated `(bias, weights)` vector onto
/// the l1 ball of radius `V`.
///
/// Uses the sort-based soft-threshold construction: when the point is
/// outside the ball the projection is `sign(y_i) * max(|y_i| - theta, 0)`
/// with `theta` chosen so the result has l1 norm exactly `V`.
pub fn project_first_layer(weights: &[f64], bias: f64, v: f64) -> Result<(Vec<f64>, f64)> {
    if !(v > 0.0) {
        return Err(Error::contract(format!("projection radius must be > 0, got {v}")));
    }
    let mut y: Vec<f64> = Vec::with_capacity(weights.len() + 1);
    y.push(bias);
    y.extend_from_slice(weights);

    let l1: f64 = y.iter().map(|t| t.abs()).sum();
    if l1 <= v {
        return Ok((weights.to_vec(), bias));
    }

    let mut mags: Vec<f64> = y.iter().map(|t| t.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - v) / (k + 1) as f64;
        if *m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    let shrink = |t: f64| t.signum() * (t.abs() - theta).max(0.0);
    let bias_out = shrink(y[0]);
    let weights_out = y[1..].iter().map(|&t| shrink(t)).collect();
    Ok((weights_out, bias_out))
}

/// Per-coordinate clamp of the second layer onto `[-V, V]`.
pub fn project_second_layer(weights: &[f64], bias: f64, v: f64) -> Result<(Vec<f64>, f64)> {
    if !(v > 0.0) {
        return Err(Error::contract(format!("projection radius must be > 0, got {v}")));
    }
    Ok((
        weights.iter().map(|w| w.clamp(-v, v)).collect(),
        bias.clamp(-v, v),
    ))
}

/// Description of a function class: dimensions, width, activation and budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    pub input_dim: usize,
    pub width: usize,
    pub activation: ActivationKind,
    pub budget_v: f64,
    /// 1 for discriminators; `d_x` for generators (independent output heads).
    pub output_dim: usize,
}

impl ClassSpec {
    pub fn discriminator(
        input_dim: usize,
        width: usize,
        activation: ActivationKind,
        budget_v: f64,
    ) -> Self {
        ClassSpec {
            input_dim,
            width,
            activation,
            budget_v,
            output_dim: 1,
        }
    }

    pub fn generator(
        input_dim: usize,
        width: usize,
        activation: ActivationKind,
        budget_v: f64,
        output_dim: usize,
    ) -> Self {
        ClassSpec {
            input_dim,
            width,
            activation,
            budget_v,
            output_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.width == 0 || self.output_dim == 0 {
            return Err(Error::contract("class dimensions must be positive"));
        }
        if !(self.budget_v >= 1.0) {
            return Err(Error::contract(format!(
                "budget V must be >= 1, got {}",
                self.budget_v
            )));
        }
        Ok(())
    }

    /// Sup-norm envelope `V * (width + 1)` of any member's output; used as
    /// the `Q_x` / `Q_z` constants in the bounds.
    pub fn sup_envelope(&self) -> f64 {
        self.budget_v * (self.width as f64 + 1.0)
    }

    /// The same class viewed as a scalar-output (single head) class.
    pub fn scalar(&self) -> ClassSpec {
        ClassSpec {
            output_dim: 1,
            ..self.clone()
        }
    }
}

/// A (possibly multi-head) network drawn from a class: one
/// [`TwoLayerParams`] per output coordinate, sharing activation and budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub heads: Vec<TwoLayerParams>,
    pub activation: ActivationKind,
}

impl Network {
    pub fn zero(spec: &ClassSpec) -> Self {
        Network {
            heads: (0..spec.output_dim)
                .map(|_| TwoLayerParams::zeros(spec.width, spec.input_dim, spec.budget_v))
                .collect(),
            activation: spec.activation,
        }
    }

    pub fn from_single(params: TwoLayerParams, activation: ActivationKind) -> Self {
        Network {
            heads: vec![params],
            activation,
        }
    }

    pub fn random_feasible<R: Rng>(spec: &ClassSpec, scale: f64, rng: &mut R) -> Self {
        Network {
            heads: (0..spec.output_dim)
                .map(|_| {
                    TwoLayerParams::random_feasible(
                        spec.width,
                        spec.input_dim,
                        spec.budget_v,
                        scale,
                        rng,
                    )
                })
                .collect(),
            activation: spec.activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.heads.first().map_or(0, |h| h.input_dim())
    }

    pub fn output_dim(&self) -> usize {
        self.heads.len()
    }

    /// Evaluates every head; `|out_k| <= V * (width + 1)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("network input", self.input_dim(), x.len())?;
        Ok(self
            .heads
            .iter()
            .map(|h| h.eval_unchecked(self.activation, x))
            .collect())
    }

    /// Scalar evaluation; the network must have exactly one head.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<f64> {
        if self.output_dim() != 1 {
            return Err(Error::contract(format!(
                "expected a scalar network, got {} heads",
                self.output_dim()
            )));
        }
        check_dim("network input", self.input_dim(), x.len())?;
        Ok(self.heads[0].eval_unchecked(self.activation, x))
    }

    pub(crate) fn eval_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.heads
                .iter()
                .map(|h| h.eval_unchecked(self.activation, x)),
        );
    }

    pub fn project(&mut self) {
        for h in &mut self.heads {
            h.project();
        }
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.heads.iter().all(|h| h.is_feasible(tol))
    }
}

/// An explicit, ordered list of class members (all sharing one shape).
#[derive(Debug, Clone)]
pub struct FiniteClass {
    pub members: Vec<TwoLayerParams>,
}

impl FiniteClass {
    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    /// True when the second-layer negation of every member is also a member.
    pub fn is_symmetric(&self) -> bool {
        self.members
            .iter()
            .all(|m| self.contains(&m.negated_second()))
    }

    pub fn contains(&self, params: &TwoLayerParams) -> bool {
        self.members.iter().any(|m| m == params)
    }
}

/// Symmetric uniform grid over `[-V, V]` with an exact zero and exact
/// negation pairs: `grid[i] = (i - h) * (V / h)` for `h = (levels-1)/2`.
fn symmetric_grid(levels: usize, v: f64) -> Vec<f64> {
    let h = (levels as i64 - 1) / 2;
    let step = v / h as f64;
    (0..levels as i64).map(|i| (i - h) as f64 * step).collect()
}

/// Enumerates every parameter assignment on a symmetric grid, keeping the
/// first-layer tuples that satisfy the l1 budget. The result is ordered,
/// negation-closed and contains the zero function.
///
/// `grid_levels` must be odd (a symmetric uniform grid with an even number
/// of points cannot contain 0) and at least 3. Cardinality above
/// [`DEFAULT_CARDINALITY_CAP`] is refused up front with the computed count.
pub fn enumerate_finite_class(spec: &ClassSpec, grid_levels: usize) -> Result<FiniteClass> {
    enumerate_finite_class_capped(spec, grid_levels, DEFAULT_CARDINALITY_CAP)
}

pub fn enumerate_finite_class_capped(
    spec: &ClassSpec,
    grid_levels: usize,
    cap: u128,
) -> Result<FiniteClass> {
    spec.validate()?;
    if grid_levels < 3 || grid_levels % 2 == 0 {
        return Err(Error::contract(format!(
            "grid_levels must be odd and >= 3 so the grid contains 0, got {grid_levels}"
        )));
    }
    let grid = symmetric_grid(grid_levels, spec.budget_v);

    // All feasible (bias, weights) first-layer tuples, in lexicographic
    // grid-index order.
    let mut unit_tuples: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut idx = vec![0usize; spec.input_dim + 1];
    loop {
        let bias = grid[idx[0]];
        let weights: Vec<f64> = idx[1..].iter().map(|&i| grid[i]).collect();
        if bias.abs() + weights.iter().map(|w| w.abs()).sum::<f64>() <= spec.budget_v + 1e-12 {
            unit_tuples.push((weights, bias));
        }
        if !advance(&mut idx, grid_levels) {
            break;
        }
    }

    let card = (unit_tuples.len() as u128).pow(spec.width as u32)
        * (grid_levels as u128).pow(spec.width as u32 + 1);
    if card > cap {
        return Err(Error::CapExceeded {
            what: "finite class cardinality",
            cost: card,
            cap,
        });
    }

    let mut members = Vec::with_capacity(card as usize);
    let mut unit_idx = vec![0usize; spec.width];
    loop {
        let mut second_idx = vec![0usize; spec.width + 1];
        loop {
            let params = TwoLayerParams {
                first_weights: unit_idx
                    .iter()
                    .map(|&u| unit_tuples[u].0.clone())
                    .collect(),
                first_bias: unit_idx.iter().map(|&u| unit_tuples[u].1).collect(),
                second_weights: second_idx[..spec.width]
                    .iter()
                    .map(|&i| grid[i])
                    .collect(),
                second_bias: grid[second_idx[spec.width]],
                budget_v: spec.budget_v,
            };
            members.push(params);
            if !advance(&mut second_idx, grid_levels) {
                break;
            }
        }
        if !advance(&mut unit_idx, unit_tuples.len()) {
            break;
        }
    }

    Ok(FiniteClass { members })
}

/// Advances a mixed-radix counter in lexicographic order; false on wrap.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Evaluates every member of a finite class on every sample row, producing
/// the `cardinality x n` value matrix used by exact Rademacher enumeration.
pub fn member_values(
    class: &FiniteClass,
    activation: ActivationKind,
    sample: &Matrix,
) -> Result<Matrix> {
    let mut values = Matrix::zeros(class.cardinality(), sample.rows());
    for (k, m) in class.members.iter().enumerate() {
        check_dim("finite class member input", m.input_dim(), sample.cols())?;
        for (i, row) in sample.iter_rows().enumerate() {
            values.row_mut(k)[i] = m.eval_unchecked(activation, row);
        }
    }
    Ok(values)
}
