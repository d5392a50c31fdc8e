//! Pseudo-hyperbolic geometry of the unit disk.
//!
//! Distances, Blaschke products, separation and interpolation constants,
//! evaluation-functional norms and Carleson embedding constants. Everything
//! here is a pure function of immutable inputs.
//!
//! Real points are stored together with their boundary gap `1 - x`, kept
//! exact at construction. Sequences like `u_j = 1 - sigma^j` walk within
//! f64 rounding distance of the boundary after a few dozen terms, and every
//! quantity of interest (`rho`, `1 - |u|^2`, separation products) survives
//! only when computed from the gaps rather than from the rounded points.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Two points are treated as coincident when their pseudo-hyperbolic
/// distance falls below this (below double-precision resolution of the
/// Blaschke quotient).
pub const DISTINCTNESS_TOL: f64 = 1e-14;

/// Default numerical constant Lambda of the interpolation-constant bound.
pub const LAMBDA_DEFAULT: f64 = 12.0;

/// Constant of the discrete Carleson embedding.
pub const CARLESON_CONSTANT: f64 = 12.0;

/// Distance of a real point to its nearest boundary point, kept exact.
///
/// Radial test sequences crowd against +1 and their automorphism images
/// against -1, both within f64 rounding distance of the boundary; the gap
/// is the coordinate that survives there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryGap {
    /// `1 - x` for a real point `x` closest to +1.
    ToPlusOne(f64),
    /// `1 + x` for a real point `x` closest to -1.
    ToMinusOne(f64),
}

impl BoundaryGap {
    fn valid(&self) -> bool {
        let (BoundaryGap::ToPlusOne(g) | BoundaryGap::ToMinusOne(g)) = *self;
        g > 0.0 && g < 2.0
    }

    /// Normalizes so the stored gap is the one below 1 (exact: `2 - g` is
    /// representable without rounding for `g` in `[1, 2]`).
    fn normalized(self) -> BoundaryGap {
        match self {
            BoundaryGap::ToPlusOne(g) if g > 1.0 => BoundaryGap::ToMinusOne(2.0 - g),
            BoundaryGap::ToMinusOne(g) if g > 1.0 => BoundaryGap::ToPlusOne(2.0 - g),
            other => other,
        }
    }

    fn point_value(&self) -> f64 {
        match *self {
            BoundaryGap::ToPlusOne(g) => 1.0 - g,
            BoundaryGap::ToMinusOne(g) => g - 1.0,
        }
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    value: Complex64,
    /// Exact boundary gap for points on the real diameter.
    real_repr: Option<BoundaryGap>,
}

impl DiskPoint {
    /// Point from a complex value, requiring `|z| < 1` strictly.
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.norm() < 1.0) {
            return Err(Error::OutsideDisk {
                modulus: value.norm(),
            });
        }
        let real_repr = (value.im == 0.0).then(|| {
            if value.re >= 0.0 {
                BoundaryGap::ToPlusOne(1.0 - value.re)
            } else {
                BoundaryGap::ToMinusOne(1.0 + value.re)
            }
        });
        Ok(DiskPoint { value, real_repr })
    }

    /// Real point `x` with `|x| < 1`.
    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    /// Real point given as its gap `1 - x` to the boundary point +1.
    ///
    /// This is the only faithful way to construct points like
    /// `1 - sigma^200`, whose value is indistinguishable from 1 in f64.
    pub fn real_from_gap(gap: f64) -> Result<Self> {
        Self::from_boundary_gap(BoundaryGap::ToPlusOne(gap))
    }

    /// Real point from either boundary gap.
    pub fn from_boundary_gap(gap: BoundaryGap) -> Result<Self> {
        if !gap.valid() {
            return Err(Error::OutsideDisk {
                modulus: gap.point_value().abs(),
            });
        }
        let gap = gap.normalized();
        Ok(DiskPoint {
            value: Complex64::new(gap.point_value(), 0.0),
            real_repr: Some(gap),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn is_real(&self) -> bool {
        self.real_repr.is_some()
    }

    /// Exact boundary gap for real points.
    pub fn boundary_gap(&self) -> Option<BoundaryGap> {
        self.real_repr
    }

    /// `1 - x` for real points; rounds for points crowding -1.
    pub fn real_gap(&self) -> Option<f64> {
        self.real_repr.map(|r| match r {
            BoundaryGap::ToPlusOne(g) => g,
            BoundaryGap::ToMinusOne(g) => 2.0 - g,
        })
    }

    /// `1 - |z|^2`, computed from the exact gap for real points.
    pub fn one_minus_sq(&self) -> f64 {
        match self.real_repr {
            Some(BoundaryGap::ToPlusOne(g)) | Some(BoundaryGap::ToMinusOne(g)) => g * (2.0 - g),
            None => 1.0 - self.value.norm_sqr(),
        }
    }

    /// `ln(1 - |z|^2)` without underflow for deep boundary gaps.
    pub fn log_one_minus_sq(&self) -> f64 {
        match self.real_repr {
            Some(BoundaryGap::ToPlusOne(g)) | Some(BoundaryGap::ToMinusOne(g)) => {
                g.ln() + (2.0 - g).ln()
            }
            None => (1.0 - self.value.norm_sqr()).ln(),
        }
    }
}

/// Pseudo-hyperbolic distance `rho(z, w) = |z - w| / |1 - conj(w) z|`.
///
/// For a pair of real points the quotient is formed from the boundary gaps,
/// which keeps it exact for points crowding the boundary (at either end).
pub fn pseudo_hyperbolic_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    use BoundaryGap::*;
    match (z.real_repr, w.real_repr) {
        (Some(ToPlusOne(g)), Some(ToPlusOne(h))) | (Some(ToMinusOne(h)), Some(ToMinusOne(g))) => {
            // Same end: |z - w| = |h - g|, 1 - zw = g + h - gh.
            let num = (h - g).abs();
            if num == 0.0 {
                0.0
            } else {
                num / (g + h - g * h)
            }
        }
        (Some(ToPlusOne(g)), Some(ToMinusOne(h))) | (Some(ToMinusOne(h)), Some(ToPlusOne(g))) => {
            // Opposite ends: |z - w| = 2 - g - h, 1 - zw = 2 - g - h + gh;
            // both stay near 2, no cancellation.
            let num = 2.0 - g - h;
            num.abs() / (num + g * h)
        }
        _ => {
            let num = (z.value - w.value).norm();
            let den = (Complex64::new(1.0, 0.0) - w.value.conj() * z.value).norm();
            num / den
        }
    }
}

/// Disk automorphism `Phi_a(z) = (a - z) / (1 - conj(a) z)`.
///
/// Involution: `Phi_a(Phi_a(z)) = z`; swaps `a` and the origin.
pub fn mobius_automorphism(a: &DiskPoint, z: &DiskPoint) -> DiskPoint {
    let av = a.value();
    let zv = z.value();
    let w = (av - zv) / (Complex64::new(1.0, 0.0) - av.conj() * zv);
    // The image is inside the disk whenever the inputs are; bypass the
    // modulus check, which can trip on rounding for near-boundary inputs.
    let real_repr = (w.im == 0.0).then(|| {
        if w.re >= 0.0 {
            BoundaryGap::ToPlusOne(1.0 - w.re)
        } else {
            BoundaryGap::ToMinusOne(1.0 + w.re)
        }
    });
    DiskPoint { value: w, real_repr }
}

/// Norm of the evaluation functional at `a` on H^p:
/// `(1 / (1 - |a|^2))^{1/p}`.
pub fn evaluation_norm(a: &DiskPoint, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("evaluation norm needs p >= 1, got {p}")));
    }
    Ok(a.one_minus_sq().powf(-1.0 / p))
}

/// An ordered finite sequence of pairwise distinct disk points, with its
/// separation data computed once at construction.
#[derive(Debug, Clone)]
pub struct PointSequence {
    points: Vec<DiskPoint>,
    /// `ln delta_sigma`, accumulated in log-domain.
    log_delta: f64,
}

impl PointSequence {
    pub fn new(points: Vec<DiskPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("point sequence must be non-empty".into()));
        }
        let log_delta = log_uniform_separation(&points)?;
        Ok(PointSequence { points, log_delta })
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `ln delta_sigma`; 0 for a single point (empty product).
    pub fn log_separation(&self) -> f64 {
        self.log_delta
    }

    /// Uniform separation constant `delta_sigma` in (0, 1].
    pub fn separation(&self) -> f64 {
        self.log_delta.exp()
    }
}

/// `ln inf_j prod_{k != j} rho(z_j, z_k)`, with the coincidence check.
fn log_uniform_separation(points: &[DiskPoint]) -> Result<f64> {
    let n = points.len();
    let mut log_products = vec![0.0f64; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let rho = pseudo_hyperbolic_distance(&points[j], &points[k]);
            if rho < DISTINCTNESS_TOL {
                return Err(Error::DegenerateSequence { i: j, j: k, rho });
            }
            let l = rho.ln();
            log_products[j] += l;
            log_products[k] += l;
        }
    }
    Ok(log_products.iter().cloned().fold(0.0f64, f64::min))
}

/// Uniform separation constant of the sequence (Blaschke-product infimum).
pub fn uniform_separation_constant(seq: &PointSequence) -> f64 {
    seq.separation()
}

/// Two-sided bounds on the interpolation constant of a sequence, derived
/// from its uniform separation constant.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SeparationData {
    pub delta: f64,
    /// `1 / delta`.
    pub kappa_lower: f64,
    /// `(2e / delta) (1 + 2 log(1/delta))` (Vinogradov-Gorin-Hruscev form).
    pub kappa_upper: f64,
    pub lambda_constant: f64,
    /// `ln delta` (separation constants underflow for long sequences).
    pub log_delta: f64,
    /// `ln kappa_upper`; `kappa_upper` itself can overflow.
    pub log_kappa_upper: f64,
}

/// Computes `delta` and both interpolation-constant bounds
/// `1/delta <= kappa <= (2e/delta)(1 + 2 log(1/delta))`.
pub fn interpolation_constant_bounds(seq: &PointSequence) -> SeparationData {
    let log_delta = seq.log_separation();
    let log_inv = -log_delta;
    let log_kappa_upper = (2.0 * std::f64::consts::E).ln() + log_inv + (1.0 + 2.0 * log_inv).ln();
    SeparationData {
        delta: log_delta.exp(),
        kappa_lower: log_inv.exp(),
        kappa_upper: log_kappa_upper.exp(),
        lambda_constant: LAMBDA_DEFAULT,
        log_delta,
        log_kappa_upper,
    }
}

/// Constant of the discrete Carleson embedding for the sequence:
/// `12 (1 + log(1/delta_sigma))`.
pub fn carleson_embedding_constant(seq: &PointSequence) -> f64 {
    CARLESON_CONSTANT * (1.0 - seq.log_separation())
}

/// Bound on `gamma_mu` for the discrete measure
/// `sum_j (1 - |z_j|^2) delta_{z_j}`: `1 + 2 log(1/delta_sigma)`.
pub fn carleson_discrete_measure_bound(seq: &PointSequence) -> f64 {
    1.0 - 2.0 * seq.log_separation()
}

/// The test sequence `u_j = 1 - sigma^j`, `j = 1..n`, built gap-exact.
pub fn geometric_test_sequence(sigma: f64, n: usize) -> Result<PointSequence> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Parameter(format!(
            "geometric test sequence needs sigma in (0,1), got {sigma}"
        )));
    }
    if n == 0 {
        return Err(Error::Parameter("geometric test sequence needs n >= 1".into()));
    }
    let mut gap = 1.0;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        gap *= sigma;
        points.push(DiskPoint::real_from_gap(gap)?);
    }
    PointSequence::new(points)
}

/// Modulus of a Blaschke product with the given zeros, evaluated at `w`:
/// `prod_j rho(z_j, w)`.
pub fn blaschke_modulus(zeros: &[DiskPoint], w: Complex64) -> f64 {
    zeros
        .iter()
        .map(|z| {
            let num = (z.value() - w).norm();
            let den = (Complex64::new(1.0, 0.0) - z.value().conj() * w).norm();
            num / den
        })
        .product()
}

/// H^p norm of a polynomial with the given coefficients, by trapezoidal
/// quadrature of `|f(e^{it})|^p` on the circle.
///
/// The grid starts at `min_points` (rounded up to a power of two) and
/// doubles until the relative change drops below 1e-10. Integrands are
/// smooth and periodic, so the trapezoid rule converges spectrally except
/// near zeros of `f` on the circle; the doubling guard covers those.
pub fn hardy_norm(coefficients: &[Complex64], p: f64, min_points: usize) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("hardy norm needs p >= 1, got {p}")));
    }
    let mut m = min_points.next_power_of_two().max(64);
    let mut last = mean_abs_pow(coefficients, p, m);
    loop {
        m *= 2;
        let next = mean_abs_pow(coefficients, p, m);
        let denom = next.abs().max(f64::MIN_POSITIVE);
        if ((next - last) / denom).abs() < 1e-10 || m >= 1 << 17 {
            return Ok(next.powf(1.0 / p));
        }
        last = next;
    }
}

fn mean_abs_pow(coefficients: &[Complex64], p: f64, m: usize) -> f64 {
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let mut acc = 0.0;
    for j in 0..m {
        let z = Complex64::from_polar(1.0, step * j as f64);
        // Horner evaluation of the polynomial at z.
        let mut f = Complex64::new(0.0, 0.0);
        for c in coefficients.iter().rev() {
            f = f * z + c;
        }
        acc += f.norm().powf(p);
    }
    acc / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> DiskPoint {
        DiskPoint::new(Complex64::new(x, y)).unwrap()
    }

    #[test]
    fn distance_examples() {
        // rho(0, w) = |w|
        let origin = pt(0.0, 0.0);
        let w = pt(0.3, 0.4);
        assert!((pseudo_hyperbolic_distance(&origin, &w) - 0.5).abs() < 1e-15);
        // rho(z, z) = 0
        assert_eq!(pseudo_hyperbolic_distance(&w, &w), 0.0);
        // rho(0.5, -0.5) = 1 / 1.25 = 0.8
        let a = pt(0.5, 0.0);
        let b = pt(-0.5, 0.0);
        assert!((pseudo_hyperbolic_distance(&a, &b) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn distance_rejects_boundary() {
        assert!(DiskPoint::real(1.0).is_err());
        assert!(DiskPoint::new(Complex64::new(0.8, 0.7)).is_err());
    }

    #[test]
    fn gap_representation_survives_rounding() {
        // 1 - 0.5^200 is exactly 1.0 in f64; the gap constructor keeps it.
        let far = DiskPoint::real_from_gap(0.5f64.powi(200)).unwrap();
        let near = DiskPoint::real_from_gap(0.5f64.powi(199)).unwrap();
        let rho = pseudo_hyperbolic_distance(&far, &near);
        // rho = (g - h) / (g + h - gh) with g = 2h: = h / (3h - 2h^2) ~ 1/3.
        assert!((rho - 1.0 / 3.0).abs() < 1e-12, "rho = {rho}");
    }

    #[test]
    fn gap_representation_survives_rounding_at_minus_one() {
        // Automorphism images of a deep geometric sequence crowd -1; the
        // mirrored gap keeps their mutual distances exact.
        let a = DiskPoint::from_boundary_gap(BoundaryGap::ToMinusOne(1e-40)).unwrap();
        let b = DiskPoint::from_boundary_gap(BoundaryGap::ToMinusOne(2e-40)).unwrap();
        let rho = pseudo_hyperbolic_distance(&a, &b);
        assert!((rho - 1.0 / 3.0).abs() < 1e-12, "rho = {rho}");
        // Mixed ends: two points hugging opposite boundary points are far
        // (the true value 1 - gh/2 rounds up to 1.0 here).
        let c = DiskPoint::real_from_gap(1e-40).unwrap();
        let rho = pseudo_hyperbolic_distance(&a, &c);
        assert!(rho <= 1.0 && rho > 1.0 - 1e-12, "rho = {rho}");
        assert!((a.one_minus_sq() - 2e-40).abs() < 1e-52);
    }

    #[test]
    fn separation_examples() {
        // Single point: empty product, delta = 1.
        let single = PointSequence::new(vec![pt(0.3, 0.1)]).unwrap();
        assert_eq!(uniform_separation_constant(&single), 1.0);
        // (0.5, 0.75): rho = 0.25 / 0.625 = 0.4.
        let seq = geometric_test_sequence(0.5, 2).unwrap();
        assert!((uniform_separation_constant(&seq) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn separation_log_domain_matches_naive_product() {
        for &sigma in &[0.3, 0.6, 0.9] {
            let seq = geometric_test_sequence(sigma, 12).unwrap();
            let pts = seq.points();
            let naive = (0..pts.len())
                .map(|j| {
                    (0..pts.len())
                        .filter(|&k| k != j)
                        .map(|k| pseudo_hyperbolic_distance(&pts[j], &pts[k]))
                        .product::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            let log_domain = seq.separation();
            assert!(
                ((naive - log_domain) / naive).abs() < 1e-12,
                "sigma={sigma}: naive={naive:e} log={log_domain:e}"
            );
        }
    }

    #[test]
    fn separation_detects_coincident_points() {
        let a = pt(0.25, 0.0);
        let err = PointSequence::new(vec![a, a]);
        assert!(matches!(err, Err(Error::DegenerateSequence { .. })));
    }

    #[test]
    fn separation_lower_bound_geometric_sequence() {
        // delta_u >= e^{-alpha/(1-sigma)} with alpha = pi^2/2 (sigma = 0.5, n = 200).
        let sigma = 0.5;
        let seq = geometric_test_sequence(sigma, 200).unwrap();
        let floor = -std::f64::consts::PI.powi(2) / 2.0 / (1.0 - sigma);
        assert!(
            seq.log_separation() >= floor,
            "log delta = {} < {}",
            seq.log_separation(),
            floor
        );
        assert!(seq.separation() >= 5.17e-5);
    }

    #[test]
    fn interpolation_bound_examples() {
        let single = PointSequence::new(vec![pt(0.0, 0.0)]).unwrap();
        let data = interpolation_constant_bounds(&single);
        assert!((data.delta - 1.0).abs() < 1e-15);
        assert!((data.kappa_lower - 1.0).abs() < 1e-15);
        assert!((data.kappa_upper - 2.0 * std::f64::consts::E).abs() < 1e-12);

        // delta = 0.4: lower 2.5, upper (2e/0.4)(1 + 2 log 2.5) ~ 38.497
        let seq = geometric_test_sequence(0.5, 2).unwrap();
        let data = interpolation_constant_bounds(&seq);
        assert!((data.kappa_lower - 2.5).abs() < 1e-12);
        let expect = 2.0 * std::f64::consts::E / 0.4 * (1.0 + 2.0 * (2.5f64).ln());
        assert!((data.kappa_upper - expect).abs() < 1e-9);
        assert!(data.kappa_lower <= data.kappa_upper);
    }

    #[test]
    fn carleson_constant_examples() {
        let single = PointSequence::new(vec![pt(0.2, 0.0)]).unwrap();
        assert!((carleson_embedding_constant(&single) - 12.0).abs() < 1e-15);

        let seq = geometric_test_sequence(0.5, 2).unwrap(); // delta = 0.4
        let expect = 12.0 * (1.0 + (2.5f64).ln());
        assert!((carleson_embedding_constant(&seq) - expect).abs() < 1e-12);
        assert!((carleson_discrete_measure_bound(&seq) - (1.0 + 2.0 * (2.5f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn evaluation_norm_examples() {
        let origin = pt(0.0, 0.0);
        assert!((evaluation_norm(&origin, 7.3).unwrap() - 1.0).abs() < 1e-15);
        let a = pt(0.6, 0.0);
        assert!((evaluation_norm(&a, 2.0).unwrap() - 1.25).abs() < 1e-12);
        assert!((evaluation_norm(&a, 1.0).unwrap() - 1.5625).abs() < 1e-12);
        assert!(evaluation_norm(&a, 0.5).is_err());
    }

    #[test]
    fn mobius_examples() {
        let a = pt(0.3, -0.2);
        let z = pt(0.1, 0.4);
        // Phi_a(a) = 0, Phi_a(0) = a, Phi_0(z) = -z.
        assert!(mobius_automorphism(&a, &a).value().norm() < 1e-15);
        assert!((mobius_automorphism(&a, &pt(0.0, 0.0)).value() - a.value()).norm() < 1e-15);
        let origin = pt(0.0, 0.0);
        assert!((mobius_automorphism(&origin, &z).value() + z.value()).norm() < 1e-15);
        // Involution.
        let back = mobius_automorphism(&a, &mobius_automorphism(&a, &z));
        assert!((back.value() - z.value()).norm() < 1e-13);
    }

    #[test]
    fn mobius_invariance_of_distance() {
        let a = pt(0.35, 0.15);
        let z = pt(-0.4, 0.2);
        let w = pt(0.6, -0.3);
        let d0 = pseudo_hyperbolic_distance(&z, &w);
        let d1 = pseudo_hyperbolic_distance(
            &mobius_automorphism(&a, &z),
            &mobius_automorphism(&a, &w),
        );
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn geometric_sequence_examples() {
        let seq = geometric_test_sequence(0.9, 1).unwrap();
        assert!((seq.points()[0].value().re - 0.1).abs() < 1e-15);
        let seq = geometric_test_sequence(0.5, 200).unwrap();
        assert_eq!(seq.len(), 200);
        assert_eq!(seq.points()[199].real_gap().unwrap(), 0.5f64.powi(200));
        assert!(geometric_test_sequence(1.0, 3).is_err());
    }

    #[test]
    fn appending_point_never_increases_separation() {
        let mut pts = vec![pt(0.1, 0.0), pt(-0.3, 0.2), pt(0.5, -0.4)];
        let before = PointSequence::new(pts.clone()).unwrap().separation();
        pts.push(pt(0.7, 0.1));
        let after = PointSequence::new(pts).unwrap().separation();
        assert!(after <= before + 1e-15);
    }

    #[test]
    fn hardy_norm_matches_parseval_at_p2() {
        // ||f||_2^2 = sum |c_k|^2.
        let coeffs = vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.05, -0.3),
            Complex64::new(0.0, 0.17),
        ];
        let parseval = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let quad = hardy_norm(&coeffs, 2.0, 4096).unwrap();
        assert!(((quad - parseval) / parseval).abs() < 1e-10);
    }
}
