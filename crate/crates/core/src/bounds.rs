//! Bound shapes and their verification: each estimate the sieve machinery
//! produces is evaluated as a formula with all absolute constants set to 1
//! and an explicit `eps`, then compared against the exact quantity it
//! dominates. The unspecified constants are surfaced as measured ratios,
//! never asserted.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};

use crate::arith::gcd;
use crate::expsum::{sieve_sum_squares, CoefficientSequence};
use crate::farey::{dirichlet_approx, FareyBlock, RationalApprox};
use crate::{Error, Result};

/// Identifier of one evaluable bound shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `K (N + 1/delta) Z` — the general large-sieve bound for arbitrary
    /// sample points.
    General,
    /// `log(2Q) (Q^3 + (N sqrt(Q) + sqrt(N) Q^2) N^eps) Z` — the earlier
    /// square-moduli estimate used as a comparison baseline.
    SquareBaseline,
    /// `log(Q) N^eps (Q^3 + N^{5/4}) Z` — the improved square-moduli shape.
    SquareImproved,
    /// `delta^{-eps} (q0^{3/2} delta + q0^{1/2} delta r^{-1/2} z^{-1} + delta^{-1/4})`
    /// — window-count bound from the Fourier route.
    WindowFourier,
    /// `delta^{-eps} (1 + q0 r z + q0^{3/2} delta)` — window-count bound from
    /// the elementary divisor route.
    WindowElementary,
    /// The two window bounds combined through the minimum of their middle
    /// terms.
    WindowCombined,
    /// `delta^{-eps} (q0^{3/2} delta + delta^{-1/4})` — what the combination
    /// collapses to.
    WindowFinal,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::General => "general",
            BoundKind::SquareBaseline => "square_baseline",
            BoundKind::SquareImproved => "square_improved",
            BoundKind::WindowFourier => "window_fourier",
            BoundKind::WindowElementary => "window_elementary",
            BoundKind::WindowCombined => "window_combined",
            BoundKind::WindowFinal => "window_final",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "general" => BoundKind::General,
            "square_baseline" => BoundKind::SquareBaseline,
            "square_improved" => BoundKind::SquareImproved,
            "window_fourier" => BoundKind::WindowFourier,
            "window_elementary" => BoundKind::WindowElementary,
            "window_combined" => BoundKind::WindowCombined,
            "window_final" => BoundKind::WindowFinal,
            other => return Err(Error::Unsupported(format!("unknown bound kind `{other}`"))),
        })
    }

    fn required_params(&self) -> &'static [&'static str] {
        match self {
            BoundKind::General => &["K", "N", "Z", "delta"],
            BoundKind::SquareBaseline | BoundKind::SquareImproved => &["N", "Q", "Z", "eps"],
            BoundKind::WindowFourier | BoundKind::WindowElementary | BoundKind::WindowCombined => {
                &["delta", "eps", "q0", "r", "z"]
            }
            BoundKind::WindowFinal => &["delta", "eps", "q0"],
        }
    }
}

pub type Params = BTreeMap<String, f64>;

/// One evaluated bound shape, the exact quantity it dominates (when the
/// caller measured it), and their ratio.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub params: Params,
    pub shape_value: f64,
    pub exact_value: f64,
    pub ratio: Option<f64>,
}

impl BoundReport {
    /// Attach a measured exact value and compute the ratio.
    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact_value = exact;
        self.ratio = if self.shape_value > 0.0 {
            Some(exact / self.shape_value)
        } else {
            None
        };
        self
    }
}

fn get(params: &Params, key: &str) -> f64 {
    params[key]
}

fn check_range(key: &str, v: f64, ok: bool, range: &'static str) -> Result<()> {
    if !ok || !v.is_finite() {
        return Err(Error::OutOfRange {
            what: match key {
                "K" => "K",
                "N" => "N",
                "Q" => "Q",
                "Z" => "Z",
                "delta" => "delta",
                "eps" => "eps",
                "q0" => "q0",
                "r" => "r",
                _ => "z",
            },
            value: v,
            range,
        });
    }
    Ok(())
}

/// Evaluate the shape of `kind` at `params` with all constants set to 1.
///
/// `params` must contain exactly the names the kind requires; the measured
/// exact value starts at 0 (ratio undefined) and is attached with
/// [`BoundReport::with_exact`].
pub fn evaluate_bound(kind: BoundKind, params: &Params) -> Result<BoundReport> {
    let required = kind.required_params();
    for &key in required {
        if !params.contains_key(key) {
            return Err(Error::MissingParam(key.into()));
        }
    }
    for key in params.keys() {
        if !required.contains(&key.as_str()) {
            return Err(Error::ExtraParam(key.clone()));
        }
    }
    for (key, &v) in params {
        match key.as_str() {
            "delta" => check_range(key, v, v > 0.0 && v <= 0.5, "(0, 1/2]")?,
            "r" => check_range(key, v, v >= 1.0, "[1, inf)")?,
            "z" => check_range(key, v, v > 0.0, "(0, inf)")?,
            "N" | "Q" | "q0" => check_range(key, v, v >= 1.0, "[1, inf)")?,
            "Z" | "K" | "eps" => check_range(key, v, v >= 0.0, "[0, inf)")?,
            _ => unreachable!(),
        }
    }
    let shape_value = match kind {
        BoundKind::General => {
            get(params, "K") * (get(params, "N") + 1.0 / get(params, "delta")) * get(params, "Z")
        }
        BoundKind::SquareBaseline => {
            let (n, q, z, eps) = (
                get(params, "N"),
                get(params, "Q"),
                get(params, "Z"),
                get(params, "eps"),
            );
            (2.0 * q).ln() * (q.powi(3) + (n * q.sqrt() + n.sqrt() * q * q) * n.powf(eps)) * z
        }
        BoundKind::SquareImproved => {
            let (n, q, z, eps) = (
                get(params, "N"),
                get(params, "Q"),
                get(params, "Z"),
                get(params, "eps"),
            );
            // log Q would zero the shape at Q = 1; reported with max(log Q, 1)
            // there, as recorded in the output schema notes
            let log_q = if q >= 2.0 { q.ln() } else { q.ln().max(1.0) };
            log_q * n.powf(eps) * (q.powi(3) + n.powf(1.25)) * z
        }
        BoundKind::WindowFourier => {
            let (d, eps, q0, r, z) = window_params(params);
            d.powf(-eps) * (q0.powf(1.5) * d + q0.sqrt() * d / (r.sqrt() * z) + d.powf(-0.25))
        }
        BoundKind::WindowElementary => {
            let (d, eps, q0, r, z) = window_params(params);
            d.powf(-eps) * (1.0 + q0 * r * z + q0.powf(1.5) * d)
        }
        BoundKind::WindowCombined => {
            let (d, eps, q0, r, z) = window_params(params);
            let middle = (q0 * r * z).min(q0.sqrt() * d / (r.sqrt() * z));
            d.powf(-eps) * (q0.powf(1.5) * d + middle + d.powf(-0.25))
        }
        BoundKind::WindowFinal => {
            let d = get(params, "delta");
            let (eps, q0) = (get(params, "eps"), get(params, "q0"));
            d.powf(-eps) * (q0.powf(1.5) * d + d.powf(-0.25))
        }
    };
    Ok(BoundReport {
        kind,
        params: params.clone(),
        shape_value,
        exact_value: 0.0,
        ratio: None,
    })
}

fn window_params(params: &Params) -> (f64, f64, f64, f64, f64) {
    (
        get(params, "delta"),
        get(params, "eps"),
        get(params, "q0"),
        get(params, "r"),
        get(params, "z"),
    )
}

// ---------------------------------------------------------------------------
// window-congruence inclusion
// ---------------------------------------------------------------------------

/// A fraction counted in the window that failed one of the decomposition
/// conditions.
#[derive(Debug, Clone)]
pub struct InclusionViolation {
    pub a: u64,
    pub q: u64,
    pub m: i128,
    pub reason: String,
}

/// Result of checking every counted fraction of one window.
#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub q0: f64,
    pub delta: f64,
    pub approx: RationalApprox,
    pub delta_window: f64,
    pub counted: u64,
    pub m_zero: u64,
    pub violations: Vec<InclusionViolation>,
}

/// Verify, for every block fraction `a/q^2` within circle distance `delta`
/// of `alpha = b/r + z`, the decomposition behind the window-count bounds:
/// with `a'` the representative of `a` nearest `alpha` on the line and
/// `m = a' r - b q^2`, either `m = 0` and `r = q^2`, or `m != 0`,
/// `m = -b q^2 (mod r)` and `(y - 4 dw) r z <= m <= (y + 4 dw) r z` for
/// `y = q^2`.
///
/// Requires `tau = 1/sqrt(delta)`, `z >= delta` and
/// `q0 delta / z <= delta_window <= q0`.
pub fn verify_window_congruence(
    q0: f64,
    delta: f64,
    approx: &RationalApprox,
    delta_window: f64,
) -> Result<InclusionReport> {
    approx.validate()?;
    let tau_expected = 1.0 / delta.sqrt();
    if (approx.tau - tau_expected).abs() > 1e-9 * tau_expected {
        return Err(Error::Precondition(format!(
            "tau = {} but 1/sqrt(delta) = {tau_expected}",
            approx.tau
        )));
    }
    if !(approx.z >= delta) {
        return Err(Error::Precondition(format!(
            "z = {:e} below delta = {delta:e}",
            approx.z
        )));
    }
    let dw_lo = q0 * delta / approx.z;
    if !(delta_window >= dw_lo && delta_window <= q0) {
        return Err(Error::Precondition(format!(
            "delta_window = {delta_window:e} outside [{dw_lo:e}, {q0:e}]"
        )));
    }
    let alpha = approx.alpha();
    let block = FareyBlock::enumerate(q0)?;
    let (b, r) = (approx.b as i128, approx.r as i128);
    let rz = approx.r as f64 * approx.z;
    let mut counted = 0u64;
    let mut m_zero = 0u64;
    let mut violations = Vec::new();
    for f in block.fractions() {
        if !crate::farey::in_window(f.circle_pos(), alpha, delta) {
            continue;
        }
        counted += 1;
        let qq = f.denominator() as i128;
        let shift = (alpha - f.value()).round() as i128;
        let a_near = f.a() as i128 + shift * qq;
        let m = a_near * r - b * qq;
        if m == 0 {
            m_zero += 1;
            if r != qq {
                violations.push(InclusionViolation {
                    a: f.a(),
                    q: f.q(),
                    m,
                    reason: format!("m = 0 but r = {r} differs from q^2 = {qq}"),
                });
            }
            continue;
        }
        if (m + b * qq).rem_euclid(r) != 0 {
            violations.push(InclusionViolation {
                a: f.a(),
                q: f.q(),
                m,
                reason: "m not congruent to -b q^2 mod r".into(),
            });
            continue;
        }
        let y = qq as f64;
        let lo = (y - 4.0 * delta_window) * rz;
        let hi = (y + 4.0 * delta_window) * rz;
        let mf = m as f64;
        if !(mf >= lo && mf <= hi) {
            violations.push(InclusionViolation {
                a: f.a(),
                q: f.q(),
                m,
                reason: format!("m = {mf:e} outside [{lo:e}, {hi:e}]"),
            });
        }
    }
    Ok(InclusionReport {
        q0,
        delta,
        approx: *approx,
        delta_window,
        counted,
        m_zero,
        violations,
    })
}

/// Run `draws` random window-congruence verifications with parameters drawn
/// to satisfy the preconditions and `delta_window = q0 delta / z`.
pub fn inclusion_random_scan(
    draws: usize,
    seed: u64,
    q0_max: f64,
    delta_min: f64,
    delta_max: f64,
) -> Result<Vec<InclusionReport>> {
    if !(q0_max >= 10.0) || !(delta_min > 0.0) || !(delta_max >= delta_min) || delta_max > 0.25 {
        return Err(Error::Precondition(
            "need q0_max >= 10, 0 < delta_min <= delta_max <= 1/4".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut reports = Vec::with_capacity(draws);
    for _ in 0..draws {
        let q0 = 10.0 * (q0_max / 10.0).powf(uniform());
        let delta = delta_min * (delta_max / delta_min).powf(uniform());
        let tau = 1.0 / delta.sqrt();
        let r = 1 + (uniform() * tau.floor()) as u64;
        let r = r.min(tau.floor() as u64).max(1);
        let b = if r == 1 {
            0
        } else {
            loop {
                let cand = (uniform() * r as f64) as u64 % r;
                if gcd(cand, r) == 1 {
                    break cand as i64;
                }
            }
        };
        let z_hi = 1.0 / (r as f64 * tau);
        let z = delta + uniform() * (z_hi - delta);
        let approx = RationalApprox { b, r, z, tau };
        let delta_window = q0 * delta / z;
        reports.push(verify_window_congruence(q0, delta, &approx, delta_window)?);
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// the minimum/mean-inequality chain
// ---------------------------------------------------------------------------

/// Numeric check of the inequality chain that collapses the combined window
/// bound: `min{q0 r z, sqrt(q0) delta / (sqrt(r) z)} <= q0^{3/4} delta^{3/8}`
/// (for `r <= 1/sqrt(delta)`, `delta <= z <= sqrt(delta)/r`), the identity
/// `q0^{3/4} delta^{3/8} = sqrt((q0^{3/2} delta) * delta^{-1/4})`, and the
/// arithmetic-geometric mean step up to the sum of the two terms.
#[derive(Debug, Clone, Copy)]
pub struct ChainCheck {
    pub q0: f64,
    pub delta: f64,
    pub r: f64,
    pub z: f64,
    pub min_term: f64,
    pub crossover_value: f64,
    pub gm_value: f64,
    pub sum_value: f64,
    pub ok_min: bool,
    pub ok_identity: bool,
    pub ok_am_gm: bool,
}

impl ChainCheck {
    pub fn ok(&self) -> bool {
        self.ok_min && self.ok_identity && self.ok_am_gm
    }
}

const CHAIN_TOL: f64 = 1e-12;

pub fn verify_min_chain(q0: f64, delta: f64, r: f64, z: f64) -> ChainCheck {
    let min_term = (q0 * r * z).min(q0.sqrt() * delta / (r.sqrt() * z));
    let crossover_value = q0.powf(0.75) * delta.powf(0.375);
    let gm_value = (q0.powf(1.5) * delta * delta.powf(-0.25)).sqrt();
    let sum_value = q0.powf(1.5) * delta + delta.powf(-0.25);
    let slack = |a: f64| CHAIN_TOL * a.abs().max(1.0);
    ChainCheck {
        q0,
        delta,
        r,
        z,
        min_term,
        crossover_value,
        gm_value,
        sum_value,
        ok_min: min_term <= crossover_value + slack(crossover_value),
        ok_identity: (gm_value - crossover_value).abs() <= slack(crossover_value),
        ok_am_gm: crossover_value <= sum_value + slack(sum_value),
    }
}

/// Evaluate [`verify_min_chain`] on every `(q0, delta)` cell with
/// `draws_per_cell` random admissible `(r, z)`: `r` an integer in
/// `[1, 1/sqrt(delta)]` and `z` in `[delta, sqrt(delta)/r]`, plus the two
/// deterministic corner points of the `z` range.
pub fn chain_random_scan(
    q0_list: &[f64],
    delta_list: &[f64],
    draws_per_cell: usize,
    seed: u64,
) -> Vec<ChainCheck> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut out = Vec::new();
    for &q0 in q0_list {
        for &delta in delta_list {
            let tau = 1.0 / delta.sqrt();
            for i in 0..draws_per_cell {
                let r = if i == 0 {
                    1.0
                } else if i == 1 {
                    tau.floor()
                } else {
                    (1.0 + uniform() * (tau.floor() - 1.0)).floor()
                };
                let z_hi = delta.sqrt() / r;
                for z in [delta, z_hi, delta + uniform() * (z_hi - delta)] {
                    out.push(verify_min_chain(q0, delta, r, z));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// grid scans
// ---------------------------------------------------------------------------

/// Window-count bound scan: at each `(q0, delta, alpha)` the exact count is
/// compared against all four window bound shapes.
#[derive(Debug, Clone)]
pub struct WindowBoundGrid {
    pub q0_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub alphas_per_cell: usize,
    pub seed: u64,
    pub eps: f64,
}

impl Default for WindowBoundGrid {
    fn default() -> Self {
        Self {
            q0_list: vec![10.0, 100.0, 1000.0, 10_000.0],
            delta_list: vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2],
            alphas_per_cell: 4,
            seed: 0,
            eps: 0.05,
        }
    }
}

/// For each grid point draw `alpha`, approximate it at `tau = 1/sqrt(delta)`,
/// count the window exactly and report the four shape ratios. When the
/// approximation lands below the `z >= delta` regime the shapes are evaluated
/// at `z = delta`, the value the reduction to positive `z` ends at.
pub fn window_bound_scan(grid: &WindowBoundGrid) -> Result<Vec<BoundReport>> {
    for &q0 in &grid.q0_list {
        if !(1.0..=1e4).contains(&q0) {
            return Err(Error::OutOfRange {
                what: "q0",
                value: q0,
                range: "[1, 1e4]",
            });
        }
    }
    for &d in &grid.delta_list {
        if !(1e-6..=1e-2).contains(&d) {
            return Err(Error::OutOfRange {
                what: "delta",
                value: d,
                range: "[1e-6, 1e-2]",
            });
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(grid.seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let kinds = [
        BoundKind::WindowFourier,
        BoundKind::WindowElementary,
        BoundKind::WindowCombined,
        BoundKind::WindowFinal,
    ];
    let mut out = Vec::new();
    for &q0 in &grid.q0_list {
        let block = FareyBlock::enumerate(q0)?;
        for &delta in &grid.delta_list {
            let tau = 1.0 / delta.sqrt();
            for _ in 0..grid.alphas_per_cell {
                let alpha = uniform();
                let approx = dirichlet_approx(alpha, tau)?;
                let z_eff = approx.z.abs().max(delta);
                let count = block.count_in_interval(alpha, delta)? as f64;
                for kind in kinds {
                    let mut params = Params::new();
                    params.insert("delta".into(), delta);
                    params.insert("eps".into(), grid.eps);
                    params.insert("q0".into(), q0);
                    if kind != BoundKind::WindowFinal {
                        params.insert("r".into(), approx.r as f64);
                        params.insert("z".into(), z_eff);
                    }
                    out.push(evaluate_bound(kind, &params)?.with_exact(count));
                }
            }
        }
    }
    Ok(out)
}

/// Exact sieve sums for random-phase coefficients against the two
/// square-moduli shapes, one report pair per `(N, Q, seed)`.
pub fn sieve_ratio_grid(
    n_list: &[usize],
    q_list: &[u64],
    seeds: &[u64],
    eps: f64,
) -> Result<Vec<BoundReport>> {
    if seeds.is_empty() {
        return Err(Error::ZeroInput { what: "seeds" });
    }
    for &n in n_list {
        if n == 0 || n > 1 << 14 {
            return Err(Error::OutOfRange {
                what: "N",
                value: n as f64,
                range: "[1, 2^14]",
            });
        }
    }
    for &q in q_list {
        if q == 0 || q > 64 {
            return Err(Error::OutOfRange {
                what: "Q",
                value: q as f64,
                range: "[1, 64]",
            });
        }
    }
    let mut out = Vec::new();
    for &n in n_list {
        for &q in q_list {
            for &seed in seeds {
                let seq = CoefficientSequence::random_phases(n, seed)?;
                let exact = sieve_sum_squares(&seq, q)?;
                for kind in [BoundKind::SquareImproved, BoundKind::SquareBaseline] {
                    let mut params = Params::new();
                    params.insert("N".into(), n as f64);
                    params.insert("Q".into(), q as f64);
                    params.insert("Z".into(), seq.z_value());
                    params.insert("eps".into(), eps);
                    let mut report = evaluate_bound(kind, &params)?.with_exact(exact);
                    report.params.insert("seed".into(), seed as f64);
                    out.push(report);
                }
            }
        }
    }
    Ok(out)
}
