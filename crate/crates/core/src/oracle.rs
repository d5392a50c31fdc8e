//! Ground truth at p = 2: the matrix of `C_phi` on the monomial basis of
//! H^2, truncated to N x N, with singular values as approximation numbers.
//!
//! Entry `(m, k)` is the m-th Taylor coefficient of `phi^k` (`C_phi z^k =
//! phi^k`). On finite matrices the approximation numbers coincide with the
//! singular values, and compressions grow monotonically into the operator:
//! `s_n(M_N) <= s_n(M_2N) <= a_n(C_phi)`.

use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::symbols::{self, Symbol};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Per-index relative stability threshold for truncation convergence.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Truncated matrix of a composition operator on the monomial basis.
#[derive(Debug, Clone)]
pub struct TruncatedMatrix {
    entries: DMatrix<Complex64>,
    truncation: usize,
    symbol: Symbol,
    real: bool,
}

impl TruncatedMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn symbol_name(&self) -> String {
        self.symbol.name()
    }

    /// Whether all entries are real (real-coefficient symbol).
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Littlewood subordination bound `((1+|phi(0)|)/(1-|phi(0)|))^{1/2}`
    /// on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let c = self.symbol.value_at_zero().norm();
        ((1.0 + c) / (1.0 - c)).sqrt()
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = if self.real {
            let m = DMatrix::from_fn(self.truncation, self.truncation, |i, j| {
                self.entries[(i, j)].re
            });
            m.singular_values().iter().cloned().collect()
        } else {
            self.entries.clone().singular_values().iter().cloned().collect()
        };
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

/// Builds the truncated matrix of `C_phi` at a power-of-two truncation.
///
/// All columns come from one circle sampling of `phi`; column `k` is the
/// FFT of the k-th elementwise power. A reconstruction check runs on a few
/// columns and the build retries on a denser grid if it fails.
pub fn build_matrix(phi: &Symbol, truncation: usize) -> Result<TruncatedMatrix> {
    if !truncation.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "truncation must be a power of two, got {truncation}"
        )));
    }
    let mut oversample = 8;
    loop {
        match try_build(phi, truncation, oversample) {
            Ok(m) => return Ok(m),
            Err(Error::Accuracy { residual, tolerance }) => {
                oversample *= 2;
                if truncation * oversample > (1 << 17) {
                    return Err(Error::Accuracy { residual, tolerance });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

fn try_build(phi: &Symbol, n: usize, oversample: usize) -> Result<TruncatedMatrix> {
    let sampler = symbols::PowerSampler::new(phi, n, oversample)?;
    let samples = &sampler.samples;

    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    const CHUNK: usize = 32;
    data.par_chunks_mut(n * CHUNK).enumerate().try_for_each(
        |(chunk_idx, cols)| -> Result<()> {
            let k0 = chunk_idx * CHUNK;
            let mut power: Vec<Complex64> = samples
                .iter()
                .map(|&w| pow_complex(w, k0))
                .collect();
            for (local, col) in cols.chunks_mut(n).enumerate() {
                let k = k0 + local;
                if k == 0 {
                    col[0] = Complex64::new(1.0, 0.0);
                } else {
                    if local > 0 {
                        for (p, &w) in power.iter_mut().zip(samples.iter()) {
                            *p *= w;
                        }
                    }
                    let coeffs = sampler.coefficients_of(&power, n);
                    col.copy_from_slice(&coeffs);
                }
            }
            // Spot-check the last column of the chunk off-grid.
            let k_check = (k0 + cols.len() / n - 1).max(1);
            if k_check < n && (k_check == 1 || k_check == n - 1 || k_check % 512 == 0) {
                let start = (k_check - k0) * n;
                let residual = sampler.reconstruction_residual(
                    phi,
                    k_check,
                    &cols[start..start + n],
                )?;
                if residual > symbols::TAYLOR_RESIDUAL_TOL {
                    return Err(Error::Accuracy {
                        residual,
                        tolerance: symbols::TAYLOR_RESIDUAL_TOL,
                    });
                }
            }
            Ok(())
        },
    )?;

    let real = phi.is_real_on_reals();
    if real {
        for v in &mut data {
            v.im = 0.0;
        }
    }
    let entries = DMatrix::from_vec(n, n, data);

    let matrix = TruncatedMatrix {
        entries,
        truncation: n,
        symbol: phi.clone(),
        real,
    };
    // Column-norm invariant from Littlewood subordination.
    let bound = matrix.norm_bound() + 1e-9;
    for k in 0..n {
        let norm = matrix.entries.column(k).norm();
        if norm > bound {
            return Err(Error::Accuracy {
                residual: norm - bound,
                tolerance: 0.0,
            });
        }
    }
    Ok(matrix)
}

fn pow_complex(w: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else if w.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        w.powu(k as u32)
    }
}

/// Indexed singular values of a truncation, with convergence metadata.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SingularValueTable {
    /// `s_1 >= s_2 >= ... >= s_{max_n}` at the given truncation.
    pub values: Vec<f64>,
    pub truncation: usize,
    /// Largest index (1-based) whose value is truncation-stable.
    pub converged_upto: usize,
    /// Whether `s_{max_n}` was stable under the doubling; callers wanting a
    /// second doubling rebuild at 2N and compare again.
    pub converged: bool,
}

impl SingularValueTable {
    /// CSV with header `n,sigma,truncation,converged`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sigma,truncation,converged\n");
        for (i, s) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{},{:e},{},{}\n",
                i + 1,
                s,
                self.truncation,
                i + 1 <= self.converged_upto
            ));
        }
        out
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Approximation numbers of the truncated operator: singular values with a
/// per-index convergence check against the doubled truncation.
pub fn approximation_numbers(matrix: &TruncatedMatrix, max_n: usize) -> Result<SingularValueTable> {
    let n = matrix.truncation();
    if max_n == 0 || max_n > n {
        return Err(Error::Parameter(format!(
            "max_n must lie in 1..={n}, got {max_n}"
        )));
    }
    let s_base = matrix.singular_values();
    let doubled = build_matrix(matrix.symbol(), 2 * n)?;
    let s_doubled = doubled.singular_values();

    let mut converged_upto = 0;
    for i in 0..max_n {
        if relative_change(s_base[i], s_doubled[i]) < CONVERGENCE_TOL {
            converged_upto = i + 1;
        } else {
            break;
        }
    }
    let converged = relative_change(s_base[max_n - 1], s_doubled[max_n - 1]) < CONVERGENCE_TOL;

    Ok(SingularValueTable {
        values: s_base[..max_n].to_vec(),
        truncation: n,
        converged_upto,
        converged,
    })
}

/// Leading eigenvalues of the truncation of `C_{psi_a}`, where
/// `psi_a = Phi_{phi(a)} . phi . Phi_a` fixes the origin.
///
/// Because `psi_a(0) = 0`, the m-th coefficient of `psi_a^k` vanishes for
/// `m < k` and the truncated matrix is lower triangular up to extraction
/// noise; its eigenvalues are the diagonal entries, the k-th being
/// `(psi_a'(0))^k` in exact arithmetic. The strictly upper part is required
/// to be at noise level, then dropped.
pub fn eigenvalues_normalized(
    phi: &Symbol,
    a: &DiskPoint,
    count: usize,
    truncation: usize,
) -> Result<EigenvalueReport> {
    let sharp = symbols::pseudo_hyperbolic_derivative(phi, a)?;
    if sharp <= 0.0 {
        return Err(Error::Parameter(
            "eigenvalues of the normalized symbol need phi#(a) > 0".into(),
        ));
    }
    if count > truncation {
        return Err(Error::Parameter(format!(
            "asked for {count} eigenvalues at truncation {truncation}"
        )));
    }
    let psi = phi.normalize_at(a)?;
    let m = build_matrix(&psi, truncation)?;
    let mut upper: f64 = 0.0;
    for k in 1..truncation {
        for row in 0..k {
            upper = upper.max(m.entries()[(row, k)].norm());
        }
    }
    if upper > 1e-10 {
        return Err(Error::Accuracy {
            residual: upper,
            tolerance: 1e-10,
        });
    }
    let mut eigen: Vec<Complex64> = (0..truncation).map(|i| m.entries()[(i, i)]).collect();
    eigen.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    eigen.truncate(count);
    Ok(EigenvalueReport {
        eigenvalues: eigen,
        ill_conditioned: sharp.powi(count as i32) < 1e-12,
    })
}

#[derive(Debug, Clone)]
pub struct EigenvalueReport {
    /// Largest-modulus eigenvalues, descending by modulus.
    pub eigenvalues: Vec<Complex64>,
    /// Set when `|psi_a'(0)|^J` drops below 1e-12.
    pub ill_conditioned: bool,
}

/// Approximation, Bernstein and Gelfand numbers of a small matrix; the
/// first exact via SVD, the other two by randomized subspace search.
#[derive(Debug, Clone, Copy)]
pub struct SNumberCheck {
    /// `a_n`: the n-th singular value (Eckart-Young).
    pub approximation: f64,
    /// Best lower witness `max_E sigma_min(M|_E)` over sampled n-dim `E`.
    pub bernstein: f64,
    /// Best upper witness `min_L sigma_max(M|_L)` over sampled
    /// codimension-(n-1) subspaces `L`.
    pub gelfand: f64,
}

impl SNumberCheck {
    /// Search slack of the Gelfand witness (0 at the optimum).
    pub fn gelfand_gap(&self) -> f64 {
        self.gelfand - self.approximation
    }

    /// Search slack of the Bernstein witness (0 at the optimum).
    pub fn bernstein_gap(&self) -> f64 {
        self.approximation - self.bernstein
    }
}

/// Cross-checks `a_n = b_n = c_n` on a small matrix.
///
/// Half the draw budget samples subspaces uniformly, the other half walks a
/// shrinking random neighbourhood of the incumbent; both witnesses stay on
/// the safe side of `a_n` by construction.
pub fn snumber_cross_check<R: Rng>(
    m: &DMatrix<f64>,
    n: usize,
    draws: usize,
    rng: &mut R,
) -> Result<SNumberCheck> {
    let d = m.nrows();
    if d != m.ncols() || d == 0 || d > 8 {
        return Err(Error::Parameter(format!(
            "s-number brute force is limited to square matrices of dimension <= 8, got {d}x{}",
            m.ncols()
        )));
    }
    if n == 0 || n > d {
        return Err(Error::Parameter(format!("index must lie in 1..={d}, got {n}")));
    }
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let a_n = sv[n - 1];

    let bernstein = subspace_search(m, n, draws, rng, true);
    let gelfand = subspace_search(m, d - n + 1, draws, rng, false);

    Ok(SNumberCheck {
        approximation: a_n,
        bernstein,
        gelfand,
    })
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_orthonormal<R: Rng>(d: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, k, |_, _| standard_normal(rng));
    g.qr().q()
}

/// Searches `extremize sigma_{min or max}(M Q)` over d x k orthonormal Q.
fn subspace_search<R: Rng>(
    m: &DMatrix<f64>,
    k: usize,
    draws: usize,
    rng: &mut R,
    maximize_min: bool,
) -> f64 {
    let d = m.nrows();
    let score = |q: &DMatrix<f64>| -> f64 {
        let restricted = m * q;
        let sv = restricted.singular_values();
        if maximize_min {
            sv.iter().cloned().fold(f64::INFINITY, f64::min)
        } else {
            sv.iter().cloned().fold(0.0, f64::max)
        }
    };
    let better = |candidate: f64, incumbent: f64| {
        if maximize_min {
            candidate > incumbent
        } else {
            candidate < incumbent
        }
    };

    let mut best_q = random_orthonormal(d, k, rng);
    let mut best = score(&best_q);
    let uniform_phase = draws / 2;
    for _ in 1..uniform_phase {
        let q = random_orthonormal(d, k, rng);
        let s = score(&q);
        if better(s, best) {
            best = s;
            best_q = q;
        }
    }
    let refine_phase = draws - uniform_phase;
    for i in 0..refine_phase {
        let tau = 10f64.powf(-3.0 * i as f64 / refine_phase.max(1) as f64);
        let g = DMatrix::from_fn(d, k, |_, _| standard_normal(rng));
        let q = (&best_q + tau * g).qr().q();
        let s = score(&q);
        if better(s, best) {
            best = s;
            best_q = q;
        }
    }
    best
}

/// Residual of the adjoint identity `C_phi^*(e_a) = e_{phi(a)}` on the
/// truncated matrix: `||M^H k_a - k_{phi(a)}|| / ||k_{phi(a)}||` over the
/// first N kernel coefficients `k_a = (conj(a)^m)`.
pub fn adjoint_kernel_check(phi: &Symbol, a: &DiskPoint, truncation: usize) -> Result<f64> {
    let m = build_matrix(phi, truncation)?;
    let b = phi.evaluate(a.value())?;
    let ka = kernel_vector(a.value(), truncation);
    let kb = kernel_vector(b, truncation);
    let n = truncation;
    let mut residual_sq = 0.0;
    let mut norm_sq = 0.0;
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for row in 0..n {
            acc += m.entries()[(row, k)].conj() * ka[row];
        }
        residual_sq += (acc - kb[k]).norm_sqr();
        norm_sq += kb[k].norm_sqr();
    }
    Ok((residual_sq / norm_sq).sqrt())
}

fn kernel_vector(a: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        out.push(p);
        p *= a.conj();
    }
    out
}

/// `|| sum_j coeffs_j e_{v_j} ||` in (H^2)^* via the reproducing-kernel
/// Gram matrix.
pub fn kernel_combination_norm(points: &[DiskPoint], coeffs: &[Complex64]) -> f64 {
    assert_eq!(points.len(), coeffs.len());
    let mut acc = 0.0;
    for (pj, cj) in points.iter().zip(coeffs) {
        for (pk, ck) in points.iter().zip(coeffs) {
            let gram = (Complex64::new(1.0, 0.0) - pj.value().conj() * pk.value()).inv();
            acc += (cj * ck.conj() * gram).re;
        }
    }
    acc.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_examples() {
        // Identity symbol -> identity matrix.
        let m = build_matrix(&Symbol::Identity, 16).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m.entries()[(i, j)].re - expect).abs() < 1e-12);
                assert!(m.entries()[(i, j)].im.abs() < 1e-12);
            }
        }
        // Constant zero -> single 1 at (0, 0).
        let zero = Symbol::constant(Complex64::new(0.0, 0.0)).unwrap();
        let m = build_matrix(&zero, 16).unwrap();
        assert!((m.entries()[(0, 0)].re - 1.0).abs() < 1e-12);
        let total: f64 = m.entries().iter().map(|c| c.norm()).sum();
        assert!((total - 1.0).abs() < 1e-10);
        // Scaling c -> diagonal (1, c, c^2, ...).
        let scale = Symbol::scaling(Complex64::new(0.5, 0.0)).unwrap();
        let m = build_matrix(&scale, 16).unwrap();
        for k in 0..16 {
            assert!((m.entries()[(k, k)].re - 0.5f64.powi(k as i32)).abs() < 1e-12);
        }
        assert!(build_matrix(&Symbol::Identity, 24).is_err());
    }

    #[test]
    fn column_zero_is_exact() {
        let lens = Symbol::lens(0.5).unwrap();
        let m = build_matrix(&lens, 32).unwrap();
        assert_eq!(m.entries()[(0, 0)], Complex64::new(1.0, 0.0));
        for row in 1..32 {
            assert_eq!(m.entries()[(row, 0)], Complex64::new(0.0, 0.0));
        }
        assert!(m.is_real());
    }

    #[test]
    fn diagonal_singular_values() {
        let scale = Symbol::scaling(Complex64::new(0.5, 0.0)).unwrap();
        let m = build_matrix(&scale, 64).unwrap();
        let table = approximation_numbers(&m, 8).unwrap();
        for (i, s) in table.values.iter().enumerate() {
            assert!((s - 0.5f64.powi(i as i32)).abs() < 1e-10, "s_{} = {s}", i + 1);
        }
        assert!(table.converged);
        assert_eq!(table.converged_upto, 8);
        // Identity: all singular values 1.
        let m = build_matrix(&Symbol::Identity, 64).unwrap();
        let table = approximation_numbers(&m, 5).unwrap();
        assert!(table.values.iter().all(|s| (s - 1.0).abs() < 1e-10));
    }

    #[test]
    fn singular_values_monotone_under_doubling() {
        for sym in [
            Symbol::lens(0.5).unwrap(),
            Symbol::mobius(Complex64::new(0.5, 0.0)).unwrap(),
            Symbol::shapiro_taylor_auto(1.0).unwrap(),
        ] {
            let small = build_matrix(&sym, 64).unwrap().singular_values();
            let big = build_matrix(&sym, 128).unwrap().singular_values();
            for i in 0..64 {
                assert!(
                    small[i] <= big[i] + 1e-9,
                    "{}: s_{}({}) = {} > {}",
                    sym.name(),
                    i + 1,
                    64,
                    small[i],
                    big[i]
                );
            }
        }
    }

    #[test]
    fn operator_norm_bound_holds() {
        for sym in [
            Symbol::lens(0.3).unwrap(),
            Symbol::mobius(Complex64::new(0.5, 0.0)).unwrap(),
            Symbol::constant(Complex64::new(0.3, 0.2)).unwrap(),
        ] {
            let m = build_matrix(&sym, 128).unwrap();
            let s1 = m.singular_values()[0];
            assert!(
                s1 <= m.norm_bound() + 1e-9,
                "{}: s_1 = {s1} > {}",
                sym.name(),
                m.norm_bound()
            );
        }
    }

    #[test]
    fn eigenvalues_of_scaling_are_powers() {
        let scale = Symbol::scaling(Complex64::new(0.5, 0.0)).unwrap();
        let origin = DiskPoint::real(0.0).unwrap();
        let rep = eigenvalues_normalized(&scale, &origin, 6, 64).unwrap();
        for (j, ev) in rep.eigenvalues.iter().enumerate() {
            assert!(
                (ev.norm() - 0.5f64.powi(j as i32)).abs() < 1e-10,
                "lambda_{} = {ev}",
                j + 1
            );
        }
        assert!(!rep.ill_conditioned);
    }

    #[test]
    fn eigenvalues_of_normalized_automorphism_are_unimodular() {
        let phi = Symbol::mobius(Complex64::new(0.4, 0.0)).unwrap();
        let a = DiskPoint::real(0.2).unwrap();
        let rep = eigenvalues_normalized(&phi, &a, 5, 64).unwrap();
        for ev in &rep.eigenvalues {
            assert!((ev.norm() - 1.0).abs() < 1e-9, "|lambda| = {}", ev.norm());
        }
    }

    #[test]
    fn eigenvalue_moduli_dominated_by_operator_norm() {
        let lens = Symbol::lens(0.5).unwrap();
        let a = DiskPoint::real(0.3).unwrap();
        let rep = eigenvalues_normalized(&lens, &a, 8, 128).unwrap();
        let psi = lens.normalize_at(&a).unwrap();
        let s1 = build_matrix(&psi, 128).unwrap().singular_values()[0];
        for ev in &rep.eigenvalues {
            assert!(ev.norm() <= s1 + 1e-9);
        }
    }

    #[test]
    fn snumber_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Diagonal (3, 2, 1): a_2 = 2.
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let check = snumber_cross_check(&m, 2, 2000, &mut rng).unwrap();
        assert!((check.approximation - 2.0).abs() < 1e-12);
        assert!(check.bernstein <= 2.0 + 1e-9);
        assert!(check.gelfand >= 2.0 - 1e-9);
        assert!(check.gelfand_gap() < 0.05);
        assert!(check.bernstein_gap() < 0.05);
        // n = 1: a_1 is the operator norm, and the Gelfand witness is exact.
        let check = snumber_cross_check(&m, 1, 100, &mut rng).unwrap();
        assert!((check.approximation - 3.0).abs() < 1e-12);
        assert!((check.gelfand - 3.0).abs() < 1e-12);
    }

    #[test]
    fn snumber_random_matrix_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = DMatrix::from_fn(5, 5, |_, _| standard_normal(&mut rng));
        let check = snumber_cross_check(&m, 3, 4000, &mut rng).unwrap();
        assert!(check.bernstein <= check.approximation + 1e-9);
        assert!(check.gelfand >= check.approximation - 1e-9);
        assert!(check.gelfand_gap() < 0.1, "gap = {}", check.gelfand_gap());
        assert!(snumber_cross_check(&m, 9, 10, &mut rng).is_err());
    }

    #[test]
    fn adjoint_identity_examples() {
        // phi = identity: exact.
        let r = adjoint_kernel_check(&Symbol::Identity, &DiskPoint::real(0.4).unwrap(), 64).unwrap();
        assert!(r < 1e-12, "identity residual {r}");
        // a = 0: k_0 = e_0, row zero of M^H is column zero of M.
        let lens = Symbol::lens(0.5).unwrap();
        let r = adjoint_kernel_check(&lens, &DiskPoint::real(0.0).unwrap(), 64).unwrap();
        assert!(r < 1e-12, "a = 0 residual {r}");
        // Generic point, small truncation.
        let r = adjoint_kernel_check(&lens, &DiskPoint::real(0.5).unwrap(), 128).unwrap();
        assert!(r < 1e-10, "lens residual {r}");
    }

    #[test]
    fn kernel_norm_matches_closed_form_single_point() {
        // ||e_a|| = (1 - |a|^2)^{-1/2} at p = 2.
        let a = DiskPoint::real(0.6).unwrap();
        let norm = kernel_combination_norm(&[a], &[Complex64::new(1.0, 0.0)]);
        let expect = (1.0f64 - 0.36).powf(-0.5);
        assert!((norm - expect).abs() < 1e-12);
    }
}
