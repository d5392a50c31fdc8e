//! The explicit bounds on `a_n(C_phi)` as evaluable functions of `n`.
//!
//! Every bound carries its constants ledger and a rigor flag. Values are
//! assembled in log domain: the cusp minoration at `n = 1e5` sits around
//! `exp(-5e5 / log n)`, far below what f64 can hold linearly.

use crate::disk::{
    interpolation_constant_bounds, DiskPoint, PointSequence,
};
use crate::error::{Error, Result};
use crate::symbols::{pseudo_hyperbolic_derivative, Modulus, Symbol};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

/// Exponent bookkeeping and every constant a bound can draw on, per `p`.
///
/// The minoration constant splits into the three proof cases:
/// `c_1 = 1/12`, `c_p = 12^{-1/p} / tau_p` for `1 < p <= 2`, and
/// `c_p = 12^{-1/2} / tau_2` for `p > 2` (with `tau_2` the type-2 constant
/// of L^p, configurable like `tau_p`).
#[derive(Debug, Clone, Serialize)]
pub struct BoundConstants {
    pub p: f64,
    /// `min(p, 2)`.
    pub p_tilde: f64,
    /// Conjugate exponent (`inf` at p = 1).
    pub p_star: f64,
    /// Type constant; 1 is exact at p = 2 and a placeholder elsewhere.
    pub tau_p: f64,
    /// Minoration constant of the matching proof case.
    pub c_p: f64,
    /// Interpolation-constant factor Lambda (the paper allows up to 4e).
    pub lambda_constant: f64,
    /// Separation rate of the geometric test sequence: pi^2 / 2.
    pub alpha: f64,
    /// `pi^2 / (2^theta theta)` when a lens parameter is in play.
    pub beta_theta: Option<f64>,
    /// Constant of the discrete Carleson embedding.
    pub carleson_constant: f64,
    /// Carleson-window prefactor C (default sqrt(2), not pinned down).
    pub window_c: f64,
    /// Globally-regular upper bound constants K, kappa, chi.
    pub upper_k: f64,
    pub upper_kappa: f64,
    pub upper_chi: f64,
}

impl BoundConstants {
    pub fn for_p(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must lie in [1, inf), got {p}")));
        }
        let mut c = BoundConstants {
            p,
            p_tilde: p.min(2.0),
            p_star: if p > 1.0 { p / (p - 1.0) } else { f64::INFINITY },
            tau_p: 1.0,
            c_p: 0.0,
            lambda_constant: 12.0,
            alpha: PI * PI / 2.0,
            beta_theta: None,
            carleson_constant: 12.0,
            window_c: std::f64::consts::SQRT_2,
            upper_k: 1.0,
            upper_kappa: 1.0,
            upper_chi: 0.5,
        };
        c.refresh_c_p();
        Ok(c)
    }

    /// Records the lens parameter so `beta_theta` appears in the ledger.
    pub fn with_lens(mut self, theta: f64) -> Self {
        self.beta_theta = Some(beta_for_lens(theta));
        self
    }

    fn refresh_c_p(&mut self) {
        self.c_p = if self.p == 1.0 {
            1.0 / 12.0
        } else if self.p <= 2.0 {
            12f64.powf(-1.0 / self.p) / self.tau_p
        } else {
            12f64.powf(-0.5) / self.tau_p
        };
    }

    /// Exponent `1 / max(p*, 2)` of the radial minoration.
    pub fn inv_max_pstar_two(&self) -> f64 {
        if self.p_star.is_infinite() {
            0.0
        } else {
            1.0 / self.p_star.max(2.0)
        }
    }

    /// Whether the lower-bound constants are all pinned down: at p = 2 the
    /// cotype constant is exactly 1 (Hilbert), and at p = 1 the proof uses
    /// no type constant at all. A tau >= 1 only shrinks the bound, so
    /// overriding it upward keeps rigor.
    pub fn rigorous_lower(&self) -> bool {
        self.p == 1.0 || (self.p == 2.0 && self.tau_p >= 1.0)
    }

    /// Applies a CLI `--set key=value` override.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "tau_p" => {
                if value <= 0.0 {
                    return Err(Error::Config("tau_p must be positive".into()));
                }
                self.tau_p = value;
                self.refresh_c_p();
            }
            "lambda" => self.lambda_constant = value,
            "carleson" => self.carleson_constant = value,
            "window_c" => self.window_c = value,
            "upper_k" => self.upper_k = value,
            "upper_kappa" => self.upper_kappa = value,
            "upper_chi" => {
                if !(value > 0.0 && value < 1.0) {
                    return Err(Error::Config("upper_chi must lie in (0, 1)".into()));
                }
                self.upper_chi = value;
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown constant `{other}` (known: tau_p, lambda, carleson, window_c, upper_k, upper_kappa, upper_chi)"
                )))
            }
        }
        Ok(())
    }
}

/// `beta_theta = pi^2 / (2^theta theta)`.
pub fn beta_for_lens(theta: f64) -> f64 {
    PI * PI / (2f64.powf(theta) * theta)
}

/// Decay constant `beta_{p,theta} = sqrt(2 beta (1 - theta) / p)` of the
/// closed-form lens minoration.
pub fn beta_p_theta(theta: f64, p: f64) -> f64 {
    (2.0 * beta_for_lens(theta) * (1.0 - theta) / p).sqrt()
}

/// Per-n values of one named bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub n_values: Vec<usize>,
    /// Linear values; may underflow to 0 for deep n (see `log_values`).
    pub values: Vec<f64>,
    /// Natural logs, always finite unless the bound is genuinely zero.
    pub log_values: Vec<f64>,
    pub constants: BoundConstants,
    pub rigorous: bool,
    pub parameters: BTreeMap<String, String>,
}

impl BoundReport {
    fn from_log(
        name: &str,
        n_values: Vec<usize>,
        log_values: Vec<f64>,
        constants: &BoundConstants,
        rigorous: bool,
        parameters: BTreeMap<String, String>,
    ) -> Self {
        assert_eq!(n_values.len(), log_values.len());
        BoundReport {
            bound_name: name.into(),
            values: log_values.iter().map(|l| l.exp()).collect(),
            n_values,
            log_values,
            constants: constants.clone(),
            rigorous,
            parameters,
        }
    }

    /// Merges single-n reports of the same bound into one table.
    pub fn merge(reports: Vec<BoundReport>) -> Option<BoundReport> {
        let mut iter = reports.into_iter();
        let mut merged = iter.next()?;
        for r in iter {
            merged.n_values.extend(r.n_values);
            merged.values.extend(r.values);
            merged.log_values.extend(r.log_values);
            for (k, v) in r.parameters {
                let entry = merged.parameters.entry(k).or_default();
                if entry.is_empty() {
                    *entry = v;
                } else if !entry.ends_with(&v) {
                    entry.push(';');
                    entry.push_str(&v);
                }
            }
        }
        Some(merged)
    }

    /// CSV with header `bound,n,value,rigorous,params`.
    pub fn to_csv(&self) -> String {
        let params = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let mut out = String::from("bound,n,value,rigorous,params\n");
        for (n, v) in self.n_values.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{:e},{},\"{}\"\n",
                self.bound_name, n, v, self.rigorous, params
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bound report serializes")
    }
}

// ---------------------------------------------------------------------------
// Lower bound from separated sequences (the main estimate)
// ---------------------------------------------------------------------------

/// Lower bound on `a_n(C_phi)` from a sequence `u` of length n:
///
/// `a_n >= c_p kappa_v^{-1} (1 + log(1/delta_u))^{-1/min(p,2)}
///         inf_j ((1-|u_j|^2)/(1-|v_j|^2))^{1/p}`,
///
/// where `v_j = phi(u_j)` and `kappa_v` is replaced by its computable
/// upper bound, so the reported number is a certified (smaller) bound.
pub fn lobo_lower_bound(
    phi: &Symbol,
    u: &PointSequence,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    let v_points = u
        .points()
        .iter()
        .map(|p| phi.evaluate_point(p))
        .collect::<Result<Vec<_>>>()?;
    let v = PointSequence::new(v_points)?;
    let sep_v = interpolation_constant_bounds(&v);

    let log_mu = u
        .points()
        .iter()
        .zip(v.points())
        .map(|(uj, vj)| uj.log_one_minus_sq() - vj.log_one_minus_sq())
        .fold(f64::INFINITY, f64::min)
        / constants.p;

    let log_value = constants.c_p.ln()
        - sep_v.log_kappa_upper
        - (1.0 - u.log_separation()).ln() / constants.p_tilde
        + log_mu;

    let mut parameters = BTreeMap::new();
    parameters.insert("n".into(), u.len().to_string());
    parameters.insert("log_delta_u".into(), format!("{:.6}", u.log_separation()));
    parameters.insert("log_delta_v".into(), format!("{:.6}", v.log_separation()));
    parameters.insert(
        "log_kappa_v_upper".into(),
        format!("{:.6}", sep_v.log_kappa_upper),
    );

    Ok(BoundReport::from_log(
        "lobo",
        vec![u.len()],
        vec![log_value],
        constants,
        constants.rigorous_lower(),
        parameters,
    ))
}

/// The closed-form optimal rate `epsilon* = sqrt(3 beta p / (1-theta)) / sqrt(n)`
/// of the geometric sequence for a lens symbol; `None` when it leaves (0, 1).
fn lens_epsilon_star(theta: f64, p: f64, n: usize) -> Option<f64> {
    let eps = (3.0 * beta_for_lens(theta) * p / (1.0 - theta)).sqrt() / (n as f64).sqrt();
    (eps > 0.0 && eps < 1.0).then_some(eps)
}

/// Optimizes the sequence `u_j = 1 - sigma^j` over a sigma grid and returns
/// the best sequence with its bound.
pub fn optimize_lobo_sequence(
    phi: &Symbol,
    n: usize,
    constants: &BoundConstants,
) -> Result<(PointSequence, BoundReport)> {
    if n == 0 {
        return Err(Error::Parameter("bound index n must be >= 1".into()));
    }
    let mut sigmas: Vec<f64> = log_spaced(0.01, 0.999, 200);
    let mut eps_star = None;
    if let Symbol::Lens { theta } = phi {
        if let Some(eps) = lens_epsilon_star(*theta, constants.p, n) {
            sigmas.push((-eps).exp());
            eps_star = Some(eps);
        }
    }

    let mut best: Option<(f64, f64, PointSequence, BoundReport)> = None;
    for &sigma in &sigmas {
        let u = match crate::disk::geometric_test_sequence(sigma, n) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let report = match lobo_lower_bound(phi, &u, constants) {
            Ok(r) => r,
            Err(Error::DegenerateSequence { .. }) | Err(Error::OutsideDisk { .. }) => continue,
            Err(e) => return Err(e),
        };
        let log_value = report.log_values[0];
        if best.as_ref().map_or(true, |(b, _, _, _)| log_value > *b) {
            best = Some((log_value, sigma, u, report));
        }
    }
    let (_, sigma, u, mut report) = best.ok_or_else(|| {
        Error::Parameter(format!(
            "no admissible sigma for `{}` at n = {n} (images collide?)",
            phi.name()
        ))
    })?;
    report.parameters.insert("sigma".into(), format!("{sigma}"));
    if let Some(eps) = eps_star {
        report
            .parameters
            .insert("epsilon_star".into(), format!("{eps}"));
    }
    Ok((u, report))
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

// ---------------------------------------------------------------------------
// Closed-form lens minoration
// ---------------------------------------------------------------------------

/// A single evaluated bound with its log value.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticBound {
    pub value: f64,
    pub log_value: f64,
    pub beta_p_theta: f64,
    pub alpha_prime: f64,
}

/// Closed-form lower bound for lens maps:
/// `a_n >= alpha'_{p,theta} n^{-1/(2 p~)} exp(-beta_{p,theta} sqrt(n))`.
///
/// Valid once n is large enough for `epsilon* < 1`.
pub fn lens_asymptotic_lower_bound(
    theta: f64,
    constants: &BoundConstants,
    n: usize,
) -> Result<AsymptoticBound> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!(
            "lens asymptotic bound needs theta in (0,1), got {theta}"
        )));
    }
    let p = constants.p;
    if lens_epsilon_star(theta, p, n).is_none() {
        return Err(Error::Parameter(format!(
            "n = {n} too small: epsilon* >= 1 for theta = {theta}, p = {p}"
        )));
    }
    let beta = beta_for_lens(theta);
    let alpha = constants.alpha;
    let lambda = constants.lambda_constant;
    let alpha_ptheta = constants.c_p
        / (lambda
            * (beta + 1.0)
            * (alpha + 1.0).powf(1.0 / constants.p_tilde)
            * 2f64.powf((1.0 - theta) / p));
    let alpha_prime = alpha_ptheta * (beta * p / (2.0 * (1.0 - theta))).powf(1.0 / (2.0 * constants.p_tilde));
    let bpt = beta_p_theta(theta, p);
    let log_value =
        alpha_prime.ln() - (n as f64).ln() / (2.0 * constants.p_tilde) - bpt * (n as f64).sqrt();
    Ok(AsymptoticBound {
        value: log_value.exp(),
        log_value,
        beta_p_theta: bpt,
        alpha_prime,
    })
}

// ---------------------------------------------------------------------------
// Radial minoration (omega-radial symbols)
// ---------------------------------------------------------------------------

/// Log value of the radial minoration objective at a fixed `sigma`,
/// assembled from the certified proof chain:
///
/// `c_p / (60 * 2^{1/p}) * (omega^{-1}(a s^n)/(a s^n))^{1/p}
///  * (1-s) * (1 + 5/(1-s))^{-1/min(p,2)} * exp(-5/(1-s))`
///
/// with `a = 1 - phi(0)`. The interpolation factor uses the certified
/// `kappa_v <= 60 (1-s)^{-1} e^{5/(1-s)}` and the Carleson factor
/// `(1 + log(1/delta_u))^{-1/p~} >= (1 + 5/(1-s))^{-1/p~}`.
pub fn radial_objective_log(
    modulus: &Modulus,
    constants: &BoundConstants,
    a: f64,
    n: usize,
    sigma: f64,
) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Parameter(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let one_minus = 1.0 - sigma;
    let log_h = a.ln() + n as f64 * sigma.ln();
    let log_ratio = modulus.log_omega_inv(log_h) - log_h;
    Ok(constants.c_p.ln() - 60f64.ln() - 2f64.ln() / constants.p
        + one_minus.ln()
        - (1.0 + 5.0 / one_minus).ln() / constants.p_tilde
        - 5.0 / one_minus
        + log_ratio / constants.p)
}

/// Analytic sigma candidates the grid must contain for the shipped symbols.
pub fn radial_analytic_sigmas(phi: &Symbol, constants: &BoundConstants, n: usize) -> Vec<f64> {
    let p = constants.p;
    let mut out = Vec::new();
    match phi {
        Symbol::Lens { theta } => {
            // K = (1/(10 sqrt p)) sqrt((1-theta)/theta), sigma = 1 - 1/(K sqrt n),
            // plus the exponent-optimal K = (1/(2 sqrt p)) sqrt((1-theta)/theta).
            for scale in [10.0, 2.0] {
                let k = (1.0 / (scale * p.sqrt())) * ((1.0 - theta) / theta).sqrt();
                let x = 1.0 / (k * (n as f64).sqrt());
                if x > 0.0 && x < 1.0 {
                    out.push(1.0 - x);
                }
            }
        }
        Symbol::Cusp => {
            if n >= 2 {
                let x = (n as f64).ln() / (4.0 * n as f64);
                if x < 1.0 {
                    out.push(1.0 - x);
                }
            }
        }
        Symbol::ShapiroTaylor { .. } => {
            let a = 1.0 - phi.value_at_zero().re;
            let sigma = 1.0 / (E * a.powf(1.0 / n as f64));
            if sigma > 0.0 && sigma < 1.0 {
                out.push(sigma);
            }
        }
        _ => {}
    }
    out
}

/// Radial lower bound for an omega-radial symbol: the supremum of the
/// radial objective over a sigma grid (200 log-spaced points by default,
/// plus the example-specific closed-form choices).
pub fn radial_lower_bound(
    phi: &Symbol,
    constants: &BoundConstants,
    n: usize,
    sigma_grid: Option<&[f64]>,
) -> Result<BoundReport> {
    let modulus = phi.modulus().ok_or_else(|| Error::Unsupported {
        symbol: phi.name(),
        what: "radial lower bound needs a modulus of continuity".into(),
    })?;
    let a = phi.radial_gap(1.0)?;
    if !(a > 0.0) {
        return Err(Error::Parameter(format!(
            "radial bound needs a = 1 - phi(0) > 0, got {a}"
        )));
    }
    let mut sigmas: Vec<f64> = match sigma_grid {
        Some(g) => g.to_vec(),
        None => log_spaced(0.01, 0.999, 200),
    };
    sigmas.extend(radial_analytic_sigmas(phi, constants, n));

    let mut best = f64::NEG_INFINITY;
    let mut best_sigma = f64::NAN;
    for &sigma in &sigmas {
        if !(sigma > 0.0 && sigma < 1.0) {
            continue;
        }
        let v = radial_objective_log(&modulus, constants, a, n, sigma)?;
        if v > best {
            best = v;
            best_sigma = sigma;
        }
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("a".into(), format!("{a}"));
    parameters.insert("sigma".into(), format!("{best_sigma}"));
    parameters.insert(
        "c_prime_p".into(),
        format!("{}", constants.c_p / (60.0 * 2f64.powf(1.0 / constants.p))),
    );
    Ok(BoundReport::from_log(
        "radial",
        vec![n],
        vec![best],
        constants,
        constants.rigorous_lower() && modulus.rigorous,
        parameters,
    ))
}

// ---------------------------------------------------------------------------
// Geometric decay floor
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct DecayFloor {
    /// Grid supremum of `(phi^#)^2`: any `r` below it floors the decay.
    pub value: f64,
    /// Set when the supremum is below 1e-12 (constant-like symbol).
    pub degenerate: bool,
}

/// Grid supremum of the squared pseudo-hyperbolic derivative: the decay
/// floor `a_n >= c r^n` holds for every `r` below this value.
pub fn geometric_decay_floor(phi: &Symbol, grid_size: usize) -> Result<DecayFloor> {
    let angular = 48usize;
    let radial = (grid_size / angular).max(12);
    let mut sup: f64 = 0.0;
    let mut probe = |z: Complex64| -> Result<()> {
        let s = pseudo_hyperbolic_derivative(phi, &DiskPoint::new(z)?)?;
        sup = sup.max(s * s);
        Ok(())
    };
    // Bulk rings plus boundary-refined rings (gaps down to 1e-6) for
    // boundary-contact symbols.
    for i in 0..radial {
        let r = if i % 2 == 0 {
            0.97 * (i as f64 + 0.5) / radial as f64
        } else {
            1.0 - 10f64.powf(-6.0 * (i + 1) as f64 / radial as f64)
        };
        for j in 0..angular {
            probe(Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.29) / angular as f64))?;
        }
    }
    // Real diameter, where radial symbols peak: uniform sweep through the
    // origin and log-refined approaches to both boundary points.
    probe(Complex64::new(0.0, 0.0))?;
    for i in 0..200 {
        let x = -0.995 + 1.99 * i as f64 / 199.0;
        probe(Complex64::new(x, 0.0))?;
    }
    for i in 1..=100 {
        let g = 10f64.powf(-6.0 * i as f64 / 100.0);
        probe(Complex64::new(1.0 - g, 0.0))?;
        probe(Complex64::new(g - 1.0, 0.0))?;
    }
    // Schwarz-Pick caps phi# at 1; shave the rounding overshoot of the
    // complex-path evaluation at deep boundary gaps.
    let sup = sup.min(1.0);
    Ok(DecayFloor {
        value: sup,
        degenerate: sup < 1e-12,
    })
}

// ---------------------------------------------------------------------------
// Carl-Triebel eigenvalue minoration
// ---------------------------------------------------------------------------

/// Inverts the Carl-Triebel inequality
/// `prod_{j<=n} |lambda_j| <= 16^n ||T||^m a_{m+1}^{n-m}` into a lower
/// bound on `a_{m+1}`.
pub fn carl_triebel_lower_bound(
    lambda_moduli: &[f64],
    norm: f64,
    n: usize,
    m: usize,
) -> Result<f64> {
    if n == 0 || n > lambda_moduli.len() {
        return Err(Error::Parameter(format!(
            "need 1 <= n <= {} eigenvalues, got n = {n}",
            lambda_moduli.len()
        )));
    }
    if m >= n {
        return Err(Error::Parameter(format!("need m < n, got m = {m}, n = {n}")));
    }
    for w in lambda_moduli.windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::Parameter(
                "eigenvalue moduli must be non-increasing".into(),
            ));
        }
    }
    if norm + 1e-12 < lambda_moduli[0] {
        return Err(Error::Parameter(format!(
            "norm {norm} is below the largest eigenvalue modulus {}",
            lambda_moduli[0]
        )));
    }
    let sum_log: f64 = lambda_moduli[..n].iter().map(|l| l.ln()).sum();
    let log_bound = (sum_log - n as f64 * 16f64.ln() - m as f64 * norm.ln()) / (n - m) as f64;
    Ok(log_bound.exp())
}

/// The normalized-symbol specialization (2n eigenvalues `s^{j-1}`,
/// `m = n - 1`): `ln a_n >= (2n - 1) ln s - ln(256 ||T||)`; its slope in n
/// is exactly `2 ln s`, driving the `beta^- >= (phi^#)^2` floor.
pub fn carl_triebel_specialization_log(s: f64, norm: f64, n: usize) -> f64 {
    (2.0 * n as f64 - 1.0) * s.ln() - 2.0 * 16f64.ln() - norm.ln()
}

// ---------------------------------------------------------------------------
// Carleson-window upper bound
// ---------------------------------------------------------------------------

/// Grid of Carleson windows `S(xi, h)`.
#[derive(Debug, Clone)]
pub struct WindowGrid {
    /// Boundary angles of the window centers.
    pub xis: Vec<f64>,
    /// Window sizes.
    pub hs: Vec<f64>,
}

impl Default for WindowGrid {
    fn default() -> Self {
        WindowGrid {
            xis: (0..64).map(|i| 2.0 * PI * i as f64 / 64.0).collect(),
            hs: (0..=9).map(|k| 2f64.powi(-k)).collect(),
        }
    }
}

/// Boundary samples that keep the default grid's smallest windows above
/// the 100-sample resolution threshold for spread-out pushforwards.
pub const DEFAULT_WINDOW_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct CarlesonWindowBound {
    /// `C sqrt(n) (sup window ratio)^{1/p}` with `n = #zeros + 1`.
    pub value: f64,
    /// The extremal window ratio `(1/h) int_{S(xi,h)} |B|^p dm_phi`.
    pub window_supremum: f64,
    /// Extremal window (angle, size).
    pub extremal: (f64, f64),
    /// Samples that landed in the extremal window.
    pub samples_in_extremal: usize,
    /// Set when fewer than 100 samples hit the extremal window.
    pub resolution_warning: bool,
}

/// Boundary-pushforward sampler for the Carleson-window bound; the samples
/// of `phi(e^{it})` depend only on the symbol and are reused across
/// Blaschke products.
#[derive(Debug, Clone)]
pub struct WindowEstimator {
    points: Vec<Complex64>,
}

impl WindowEstimator {
    /// Samples the boundary pushforward with jittered stratification.
    pub fn new<R: Rng>(phi: &Symbol, samples: usize, rng: &mut R) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Parameter("need at least one boundary sample".into()));
        }
        let mut points = Vec::with_capacity(samples);
        let mut failures = 0usize;
        for j in 0..samples {
            let t = 2.0 * PI * (j as f64 + rng.gen::<f64>()) / samples as f64;
            match phi.evaluate(Complex64::from_polar(1.0, t)) {
                Ok(w) => points.push(w),
                Err(_) => failures += 1,
            }
        }
        if failures * 100 > samples {
            return Err(Error::Parameter(format!(
                "{failures}/{samples} boundary evaluations failed for `{}`",
                phi.name()
            )));
        }
        Ok(WindowEstimator { points })
    }

    /// Upper bound on `a_n` with `n = #zeros + 1` for the Blaschke product
    /// with the given zeros.
    pub fn bound(
        &self,
        blaschke_zeros: &[DiskPoint],
        constants: &BoundConstants,
        grid: &WindowGrid,
    ) -> CarlesonWindowBound {
        let p = constants.p;
        let weights: Vec<f64> = self
            .points
            .iter()
            .map(|&w| crate::disk::blaschke_modulus(blaschke_zeros, w).powf(p))
            .collect();
        let total = self.points.len() as f64;

        let mut sup = 0.0f64;
        let mut extremal = (0.0, 1.0);
        let mut extremal_count = 0usize;
        for &xi in &grid.xis {
            let center = Complex64::from_polar(1.0, xi);
            for &h in &grid.hs {
                let mut mass = 0.0;
                let mut count = 0usize;
                for (w, b) in self.points.iter().zip(&weights) {
                    if (w - center).norm() <= h {
                        mass += b;
                        count += 1;
                    }
                }
                let ratio = mass / total / h;
                if ratio > sup {
                    sup = ratio;
                    extremal = (xi, h);
                    extremal_count = count;
                }
            }
        }

        let n = blaschke_zeros.len() + 1;
        let value = constants.window_c * (n as f64).sqrt() * sup.powf(1.0 / p);
        CarlesonWindowBound {
            value,
            window_supremum: sup,
            extremal,
            samples_in_extremal: extremal_count,
            resolution_warning: extremal_count < 100,
        }
    }
}

/// Monte-Carlo estimate of the Carleson-window upper bound
/// `a_n <= C sqrt(n) (sup_{h,xi} (1/h) int_{S(xi,h)} |B|^p dm_phi)^{1/p}`
/// for the Blaschke product with the given zeros (`n = #zeros + 1`).
///
/// Never rigorous: the constant C is not pinned down by the theory.
pub fn carleson_window_upper_bound<R: Rng>(
    phi: &Symbol,
    blaschke_zeros: &[DiskPoint],
    constants: &BoundConstants,
    grid: &WindowGrid,
    samples: usize,
    rng: &mut R,
) -> Result<CarlesonWindowBound> {
    Ok(WindowEstimator::new(phi, samples, rng)?.bound(blaschke_zeros, constants, grid))
}

// ---------------------------------------------------------------------------
// Globally-regular upper bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GlobalUpperBound {
    pub value: f64,
    pub log_value: f64,
    /// The dyadic level `N_k` the bound was read at.
    pub n_k: usize,
}

/// Upper bound for globally-regular symbols whose image touches the
/// boundary at `l` points:
/// `a_k <= K [omega^{-1}(kappa 2^{-N_k}) / (kappa 2^{-N_k})]^{1/p}`,
/// where `N_k` is the largest integer with `l N d_N < k` and
/// `d_N = floor[log(kappa 2^{-N} / omega^{-1}(kappa 2^{-N})) / log(chi^{-p})] + 1`.
///
/// K, kappa, chi are not quantified by the theory; never rigorous.
pub fn global_regular_upper_bound(
    modulus: &Modulus,
    constants: &BoundConstants,
    contact_points: usize,
    k: usize,
) -> Result<GlobalUpperBound> {
    if contact_points == 0 || k == 0 {
        return Err(Error::Parameter(
            "need l >= 1 contact points and k >= 1".into(),
        ));
    }
    let p = constants.p;
    let kappa = constants.upper_kappa;
    let chi = constants.upper_chi;
    let log_chi_inv_p = p * (1.0 / chi).ln();

    let d_of = |n: usize| -> Result<usize> {
        let log_h = kappa.ln() - n as f64 * 2f64.ln();
        let log_ratio = log_h - modulus.log_omega_inv(log_h);
        if log_ratio < 0.0 {
            return Err(Error::Parameter(format!(
                "modulus does not decay: omega^{{-1}}(x) > x at dyadic level {n}"
            )));
        }
        Ok((log_ratio / log_chi_inv_p).floor() as usize + 1)
    };
    d_of(1)?;

    let mut n_k = 0usize;
    let mut n = 1usize;
    loop {
        let d = d_of(n)?;
        if contact_points * n * d < k {
            n_k = n;
            n += 1;
        } else {
            break;
        }
    }
    let log_h = kappa.ln() - n_k as f64 * 2f64.ln();
    let log_value = constants.upper_k.ln() + (modulus.log_omega_inv(log_h) - log_h) / p;
    Ok(GlobalUpperBound {
        value: log_value.exp(),
        log_value,
        n_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::geometric_test_sequence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_ledger() {
        let c2 = BoundConstants::for_p(2.0).unwrap();
        assert!((c2.c_p - 12f64.powf(-0.5)).abs() < 1e-15);
        assert!((c2.c_p - 0.2887).abs() < 1e-4);
        assert!(c2.rigorous_lower());
        assert_eq!(c2.p_star, 2.0);

        let c1 = BoundConstants::for_p(1.0).unwrap();
        assert!((c1.c_p - 1.0 / 12.0).abs() < 1e-15);
        assert!(c1.rigorous_lower());
        assert!(c1.p_star.is_infinite());
        assert_eq!(c1.inv_max_pstar_two(), 0.0);

        let c4 = BoundConstants::for_p(4.0).unwrap();
        assert!((c4.c_p - 12f64.powf(-0.5)).abs() < 1e-15);
        assert!(!c4.rigorous_lower());
        assert!((c4.inv_max_pstar_two() - 0.5).abs() < 1e-15);

        let mut c = BoundConstants::for_p(2.0).unwrap();
        c.set("tau_p", 2.0).unwrap();
        assert!((c.c_p - 12f64.powf(-0.5) / 2.0).abs() < 1e-15);
        assert!(c.set("no_such_constant", 1.0).is_err());
        assert!((BoundConstants::for_p(2.0).unwrap().alpha - PI * PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lobo_single_point_example() {
        // u = (0), phi(0) = 0, p = 2: c_2 / (2e) ~ 0.0531.
        let constants = BoundConstants::for_p(2.0).unwrap();
        let u = PointSequence::new(vec![DiskPoint::real(0.0).unwrap()]).unwrap();
        let lens = Symbol::lens(0.5).unwrap();
        let report = lobo_lower_bound(&lens, &u, &constants).unwrap();
        let expect = 12f64.powf(-0.5) / (2.0 * E);
        assert!((report.values[0] - expect).abs() < 1e-12);
        assert!((report.values[0] - 0.0531).abs() < 1e-4);
        assert!(report.rigorous);
    }

    #[test]
    fn lobo_mu_factor_matches_lens_identity() {
        // mu_n >= (sigma^n / 2)^{(1-theta)/p} for u_j = 1 - sigma^j.
        let theta = 0.5;
        let sigma = 0.5f64;
        let n = 12;
        let lens = Symbol::lens(theta).unwrap();
        let u = geometric_test_sequence(sigma, n).unwrap();
        let log_mu_min = u
            .points()
            .iter()
            .map(|uj| {
                let vj = lens.evaluate_point(uj).unwrap();
                uj.log_one_minus_sq() - vj.log_one_minus_sq()
            })
            .fold(f64::INFINITY, f64::min);
        let floor = (1.0 - theta) * (sigma.powi(n as i32) / 2.0).ln();
        assert!(
            log_mu_min >= floor - 1e-12,
            "mu floor violated: {log_mu_min} < {floor}"
        );
    }

    #[test]
    fn optimizer_dominates_fixed_sigma() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let lens = Symbol::lens(0.5).unwrap();
        let (_, best) = optimize_lobo_sequence(&lens, 8, &constants).unwrap();
        for sigma in [0.3, 0.5, 0.8] {
            let u = geometric_test_sequence(sigma, 8).unwrap();
            let fixed = lobo_lower_bound(&lens, &u, &constants).unwrap();
            assert!(best.log_values[0] >= fixed.log_values[0] - 1e-12);
        }
        // n = 1 degenerates gracefully.
        let (seq, report) = optimize_lobo_sequence(&lens, 1, &constants).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(report.values[0] > 0.0);
        // Constant symbols admit no valid sequence.
        let c = Symbol::constant(Complex64::new(0.3, 0.0)).unwrap();
        assert!(optimize_lobo_sequence(&c, 3, &constants).is_err());
    }

    #[test]
    fn lens_asymptotic_constants() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        // The two closed forms of beta_{p,theta} agree.
        for &theta in &[0.2, 0.5, 0.8] {
            let direct = beta_p_theta(theta, 2.0);
            let alt = 2f64.powf((1.0 - theta) / 2.0) * PI * ((1.0 - theta) / theta).sqrt()
                / 2f64.sqrt();
            assert!((direct - alt).abs() < 1e-12, "theta={theta}: {direct} vs {alt}");
        }
        assert!((beta_p_theta(0.5, 2.0) - 2.641).abs() < 1e-3);
        // Monotone in theta: -> 0 near 1, grows toward 0.
        assert!(beta_p_theta(0.999, 2.0) < 0.1);
        assert!(beta_p_theta(0.05, 2.0) > 10.0);
        // Small n is rejected (epsilon* >= 1).
        assert!(lens_asymptotic_lower_bound(0.5, &constants, 25).is_err());
        let b = lens_asymptotic_lower_bound(0.5, &constants, 400).unwrap();
        assert!(b.value > 0.0 && b.log_value < 0.0);
    }

    #[test]
    fn radial_bound_cusp_exponent_scale() {
        // At the paper's sigma = 1 - log n / (4n), the leading term of the
        // cusp minoration is exp(-20 n / log n).
        let constants = BoundConstants::for_p(2.0).unwrap();
        let cusp = Symbol::cusp();
        let modulus = cusp.modulus().unwrap();
        let a = cusp.radial_gap(1.0).unwrap();
        for &n in &[1000usize, 10000] {
            let sigma = 1.0 - (n as f64).ln() / (4.0 * n as f64);
            let log_v = radial_objective_log(&modulus, &constants, a, n, sigma).unwrap();
            let leading = -20.0 * n as f64 / (n as f64).ln();
            assert!(
                log_v < leading && log_v > 1.3 * leading,
                "n={n}: log value {log_v} vs leading {leading}"
            );
        }
    }

    #[test]
    fn radial_bound_reports_supremum() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let lens = Symbol::lens(0.5).unwrap();
        let report = radial_lower_bound(&lens, &constants, 50, None).unwrap();
        assert!(report.rigorous);
        assert!(report.log_values[0].is_finite());
        // The supremum dominates a few manual sigmas.
        let modulus = lens.modulus().unwrap();
        for sigma in [0.3, 0.9, 0.99] {
            let v = radial_objective_log(&modulus, &constants, 1.0, 50, sigma).unwrap();
            assert!(report.log_values[0] >= v - 1e-12);
        }
        // Shapiro-Taylor: bound exists but is not rigorous (K_theta free).
        let st = Symbol::shapiro_taylor_auto(1.0).unwrap();
        let r = radial_lower_bound(&st, &constants, 50, None).unwrap();
        assert!(!r.rigorous);
        // Symbols without a modulus are rejected.
        assert!(radial_lower_bound(&Symbol::Identity, &constants, 10, None).is_err());
    }

    #[test]
    fn decay_floor_examples() {
        // Automorphism: phi# = 1 everywhere.
        let phi = Symbol::mobius(Complex64::new(0.5, 0.0)).unwrap();
        let floor = geometric_decay_floor(&phi, 2000).unwrap();
        assert!((floor.value - 1.0).abs() < 1e-9);
        // Scaling: sup at the origin, floor = c^2.
        let phi = Symbol::scaling(Complex64::new(0.5, 0.0)).unwrap();
        let floor = geometric_decay_floor(&phi, 2000).unwrap();
        assert!(floor.value >= 0.25 - 1e-9 && floor.value <= 0.25 + 1e-6);
        // Lens: the contraction is exactly theta on the real axis and
        // nowhere larger, so the floor is theta^2.
        let lens = Symbol::lens(0.5).unwrap();
        let floor = geometric_decay_floor(&lens, 4000).unwrap();
        assert!(
            (floor.value - 0.25).abs() < 1e-6,
            "lens floor = {}",
            floor.value
        );
        // Constant symbol flags degeneracy.
        let c = Symbol::constant(Complex64::new(0.2, 0.1)).unwrap();
        assert!(geometric_decay_floor(&c, 500).unwrap().degenerate);
    }

    #[test]
    fn carl_triebel_examples() {
        // n = 1, m = 0: a_1 >= |lambda_1| / 16.
        let b = carl_triebel_lower_bound(&[2.0], 2.0, 1, 0).unwrap();
        assert!((b - 2.0 / 16.0).abs() < 1e-12);
        // Zero eigenvalues give a zero bound.
        let b = carl_triebel_lower_bound(&[0.0, 0.0], 1.0, 2, 0).unwrap();
        assert_eq!(b, 0.0);
        // Bad shapes are rejected.
        assert!(carl_triebel_lower_bound(&[1.0, 2.0], 2.0, 2, 0).is_err());
        assert!(carl_triebel_lower_bound(&[1.0], 1.0, 1, 1).is_err());
        assert!(carl_triebel_lower_bound(&[1.0], 0.5, 1, 0).is_err());
        // Specialization slope: consecutive log differences are 2 ln s.
        let s = 0.6f64;
        let d = carl_triebel_specialization_log(s, 1.0, 500)
            - carl_triebel_specialization_log(s, 1.0, 499);
        assert!((d - 2.0 * s.ln()).abs() < 1e-12);
    }

    #[test]
    fn carleson_window_trivial_blaschke() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // h down to 2^-7 keeps >= 100 samples per window for the uniform
        // pushforward of the identity.
        let grid = WindowGrid {
            xis: (0..64).map(|i| 2.0 * PI * i as f64 / 64.0).collect(),
            hs: (0..=7).map(|k| 2f64.powi(-k)).collect(),
        };
        let b = carleson_window_upper_bound(
            &Symbol::Identity,
            &[],
            &constants,
            &grid,
            DEFAULT_WINDOW_SAMPLES,
            &mut rng,
        )
        .unwrap();
        // For the identity the window ratio is ~ 1/pi at every h.
        assert!(
            (b.window_supremum - 1.0 / PI).abs() < 0.05,
            "sup = {}",
            b.window_supremum
        );
        assert!(b.value > 0.3 && b.value < 1.2, "value = {}", b.value);
        assert!(!b.resolution_warning);
    }

    #[test]
    fn carleson_window_zeros_lower_the_supremum() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let lens = Symbol::lens(0.5).unwrap();
        let zeros: Vec<DiskPoint> = (1..=5)
            .map(|j| {
                let u = DiskPoint::real_from_gap(0.5f64.powi(j)).unwrap();
                lens.evaluate_point(&u).unwrap()
            })
            .collect();
        let grid = WindowGrid::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let plain =
            carleson_window_upper_bound(&lens, &[], &constants, &grid, 8192, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let damped =
            carleson_window_upper_bound(&lens, &zeros, &constants, &grid, 8192, &mut rng).unwrap();
        assert!(
            damped.window_supremum < plain.window_supremum,
            "zeros did not damp the window mass: {} vs {}",
            damped.window_supremum,
            plain.window_supremum
        );
    }

    #[test]
    fn global_upper_identity_modulus_is_flat() {
        // omega^{-1}(h) = h: bracket 1, bound K for every k.
        let constants = BoundConstants::for_p(2.0).unwrap();
        let modulus = Symbol::lens(1.0)
            .unwrap()
            .modulus()
            .map(|m| m.with_constant(1.0))
            .unwrap();
        for k in [1usize, 10, 1000] {
            let b = global_regular_upper_bound(&modulus, &constants, 2, k).unwrap();
            assert!(
                (b.value - constants.upper_k).abs() < 1e-12,
                "k={k}: {}",
                b.value
            );
        }
    }

    #[test]
    fn global_upper_decays_for_lens_and_cusp() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let lens_mod = Symbol::lens(0.5).unwrap().modulus().unwrap();
        let b100 = global_regular_upper_bound(&lens_mod, &constants, 2, 100).unwrap();
        let b10000 = global_regular_upper_bound(&lens_mod, &constants, 2, 10000).unwrap();
        assert!(b10000.log_value < b100.log_value);
        assert!(b10000.n_k > b100.n_k);

        let cusp_mod = Symbol::cusp().modulus().unwrap();
        let c100 = global_regular_upper_bound(&cusp_mod, &constants, 1, 100).unwrap();
        let c10000 = global_regular_upper_bound(&cusp_mod, &constants, 1, 10000).unwrap();
        assert!(c10000.log_value < c100.log_value);
    }

    #[test]
    fn report_serialization_round_trip() {
        let constants = BoundConstants::for_p(2.0).unwrap();
        let lens = Symbol::lens(0.5).unwrap();
        let (_, report) = optimize_lobo_sequence(&lens, 3, &constants).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("bound,n,value,rigorous,params\n"));
        assert!(csv.contains("lobo,3,"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["bound_name"], "lobo");
        assert!(json["constants"]["c_p"].as_f64().unwrap() > 0.0);
    }
}
