//! Analytic self-maps of the disk used as composition-operator symbols.
//!
//! Each symbol evaluates itself and its derivative anywhere in the disk,
//! exposes an exact boundary-gap map `g -> 1 - phi(1 - g)` along the real
//! diameter, and (for the boundary-touching maps) a modulus of continuity
//! pair `(omega, omega^{-1})` for the radial bounds.

use crate::disk::{BoundaryGap, DiskPoint};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An analytic self-map of the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Identity,
    /// `z -> value`, `|value| < 1`.
    Constant { value: Complex64 },
    /// `z -> factor * z`, `|factor| <= 1`.
    Scaling { factor: Complex64 },
    /// Disk automorphism `Phi_a(z) = (a - z)/(1 - conj(a) z)`.
    Mobius { a: Complex64 },
    /// Lens map `lambda_theta` with principal powers, `0 < theta <= 1`.
    Lens { theta: f64 },
    /// Cusp map, shipped as its radial profile only.
    Cusp,
    /// Shapiro-Taylor map `exp(-f_theta . g_theta)`, `g_theta = eps phi_0`.
    ShapiroTaylor { theta: f64, eps: f64 },
    /// `psi_a = Phi_{phi(a)} . phi . Phi_a`; fixes the origin.
    Normalized {
        inner: Box<Symbol>,
        at: Complex64,
        image: Complex64,
    },
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn check_in_disk(v: Complex64, what: &str) -> Result<()> {
    if v.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Construction(format!(
            "{what} must lie in the open disk, got modulus {}",
            v.norm()
        )))
    }
}

impl Symbol {
    pub fn identity() -> Symbol {
        Symbol::Identity
    }

    pub fn constant(value: Complex64) -> Result<Symbol> {
        check_in_disk(value, "constant value")?;
        Ok(Symbol::Constant { value })
    }

    pub fn scaling(factor: Complex64) -> Result<Symbol> {
        if factor.norm() > 1.0 {
            return Err(Error::Construction(format!(
                "scaling factor must have modulus <= 1, got {}",
                factor.norm()
            )));
        }
        Ok(Symbol::Scaling { factor })
    }

    pub fn mobius(a: Complex64) -> Result<Symbol> {
        check_in_disk(a, "automorphism parameter")?;
        Ok(Symbol::Mobius { a })
    }

    /// Lens map of parameter `theta`; `theta = 1` degenerates to the identity.
    pub fn lens(theta: f64) -> Result<Symbol> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Construction(format!(
                "lens parameter must lie in (0, 1], got {theta}"
            )));
        }
        Ok(Symbol::Lens { theta })
    }

    pub fn cusp() -> Symbol {
        Symbol::Cusp
    }

    /// Shapiro-Taylor map with an explicit half-disk radius `eps`.
    ///
    /// Construction fails when `Re(f_theta . g_theta)` is not strictly
    /// positive on the check grid, i.e. `eps` is too large for `theta`.
    pub fn shapiro_taylor(theta: f64, eps: f64) -> Result<Symbol> {
        if !(theta > 0.0) {
            return Err(Error::Construction(format!(
                "shapiro-taylor parameter must be positive, got {theta}"
            )));
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::Construction(format!(
                "shapiro-taylor eps must lie in (0, 0.5], got {eps}"
            )));
        }
        let sym = Symbol::ShapiroTaylor { theta, eps };
        let margin = sym.shapiro_taylor_positivity_margin();
        if margin <= 0.0 {
            return Err(Error::Construction(format!(
                "Re(f_theta . g_theta) reaches {margin:.3e} on the check grid for eps = {eps}"
            )));
        }
        Ok(sym)
    }

    /// Shapiro-Taylor map with the largest `eps` from the ladder
    /// `0.5, 0.25, 0.1, 0.05, 0.025, 0.01, ...` passing the positivity check.
    pub fn shapiro_taylor_auto(theta: f64) -> Result<Symbol> {
        const LADDER: [f64; 9] = [0.5, 0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.0025, 0.001];
        for &eps in &LADDER {
            if let Ok(sym) = Symbol::shapiro_taylor(theta, eps) {
                return Ok(sym);
            }
        }
        Err(Error::Construction(format!(
            "no eps in the ladder passes the positivity check for theta = {theta}"
        )))
    }

    fn shapiro_taylor_positivity_margin(&self) -> f64 {
        let Symbol::ShapiroTaylor { theta, eps } = *self else {
            unreachable!()
        };
        let mut min = f64::INFINITY;
        for ir in 1..=40 {
            let r = ir as f64 / 40.0 * 0.9995;
            for it in 0..96 {
                let z = Complex64::from_polar(r, 2.0 * PI * (it as f64 + 0.5) / 96.0);
                let w = eps * phi0(z);
                min = min.min(f_theta(theta, w).re);
            }
        }
        min
    }

    /// Normalization `psi_a = Phi_{phi(a)} . phi . Phi_a`; fixes 0 and has
    /// `|psi_a'(0)| = phi^#(a)`.
    pub fn normalize_at(&self, a: &DiskPoint) -> Result<Symbol> {
        let image = self.evaluate(a.value())?;
        check_in_disk(image, "phi(a)")?;
        Ok(Symbol::Normalized {
            inner: Box::new(self.clone()),
            at: a.value(),
            image,
        })
    }

    /// Name in the CLI symbol grammar.
    pub fn name(&self) -> String {
        match self {
            Symbol::Identity => "identity".into(),
            Symbol::Constant { value } => {
                if value.im == 0.0 {
                    format!("constant:value={}", value.re)
                } else {
                    format!("constant:value={}+{}i", value.re, value.im)
                }
            }
            Symbol::Scaling { factor } => {
                if factor.im == 0.0 {
                    format!("scaling:c={}", factor.re)
                } else {
                    format!("scaling:c={}+{}i", factor.re, factor.im)
                }
            }
            Symbol::Mobius { a } => {
                if a.im == 0.0 {
                    format!("mobius:a={}", a.re)
                } else {
                    format!("mobius:a={}+{}i", a.re, a.im)
                }
            }
            Symbol::Lens { theta } => format!("lens:theta={theta}"),
            Symbol::Cusp => "cusp".into(),
            Symbol::ShapiroTaylor { theta, eps } => {
                format!("shapiro_taylor:theta={theta},eps={eps}")
            }
            Symbol::Normalized { inner, at, .. } => {
                format!("normalized({},a={})", inner.name(), at)
            }
        }
    }

    /// Parses the grammar `name` or `name:key=value,key=value`.
    pub fn parse(spec: &str) -> Result<Symbol> {
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n, p),
            None => (spec, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for pair in params.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                Error::SymbolParse(spec.into(), format!("expected key=value, got `{pair}`"))
            })?;
            let value: f64 = v.parse().map_err(|_| {
                Error::SymbolParse(spec.into(), format!("`{v}` is not a number"))
            })?;
            kv.insert(k.to_string(), value);
        }
        let get = |key: &str| -> Result<f64> {
            kv.get(key)
                .copied()
                .ok_or_else(|| Error::SymbolParse(spec.into(), format!("missing parameter `{key}`")))
        };
        match name {
            "identity" => Ok(Symbol::Identity),
            "constant" => Symbol::constant(Complex64::new(get("value")?, 0.0)),
            "scaling" => Symbol::scaling(Complex64::new(get("c")?, 0.0)),
            "mobius" => Symbol::mobius(Complex64::new(get("a")?, 0.0)),
            "lens" => Symbol::lens(get("theta")?),
            "cusp" => Ok(Symbol::Cusp),
            "shapiro_taylor" => match kv.get("eps") {
                Some(&eps) => Symbol::shapiro_taylor(get("theta")?, eps),
                None => Symbol::shapiro_taylor_auto(get("theta")?),
            },
            other => Err(Error::SymbolParse(
                spec.into(),
                format!("unknown symbol `{other}`"),
            )),
        }
    }

    /// Whether the symbol takes real values on the real diameter.
    pub fn is_real_on_reals(&self) -> bool {
        match self {
            Symbol::Identity | Symbol::Lens { .. } | Symbol::Cusp | Symbol::ShapiroTaylor { .. } => {
                true
            }
            Symbol::Constant { value } => value.im == 0.0,
            Symbol::Scaling { factor } => factor.im == 0.0,
            Symbol::Mobius { a } => a.im == 0.0,
            Symbol::Normalized { inner, at, .. } => inner.is_real_on_reals() && at.im == 0.0,
        }
    }

    /// Whether `evaluate` works off the real diameter.
    pub fn supports_complex_eval(&self) -> bool {
        match self {
            Symbol::Cusp => false,
            Symbol::Normalized { inner, .. } => inner.supports_complex_eval(),
            _ => true,
        }
    }

    /// `phi(0)`.
    pub fn value_at_zero(&self) -> Complex64 {
        match self {
            Symbol::Identity | Symbol::Scaling { .. } | Symbol::Lens { .. } => Complex64::new(0.0, 0.0),
            Symbol::Constant { value } => *value,
            Symbol::Mobius { a } => *a,
            Symbol::Cusp | Symbol::ShapiroTaylor { .. } => {
                Complex64::new(1.0 - self.radial_gap(1.0).unwrap(), 0.0)
            }
            Symbol::Normalized { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// `phi(z)` for `|z| <= 1` (boundary values where they extend
    /// continuously). Radial-profile-only symbols reject complex arguments.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Symbol::Identity => Ok(z),
            Symbol::Constant { value } => Ok(*value),
            Symbol::Scaling { factor } => Ok(factor * z),
            Symbol::Mobius { a } => Ok((a - z) / (ONE - a.conj() * z)),
            Symbol::Lens { theta } => {
                let a = (ONE + z).powf(*theta);
                let b = (ONE - z).powf(*theta);
                let den = a + b;
                if den.norm() == 0.0 {
                    return Err(Error::Parameter(format!("lens map undefined at z = {z}")));
                }
                Ok((a - b) / den)
            }
            Symbol::Cusp => {
                if z.im == 0.0 && z.re >= 0.0 && z.re < 1.0 {
                    Ok(Complex64::new(1.0 - self.radial_gap(1.0 - z.re)?, 0.0))
                } else {
                    Err(Error::Unsupported {
                        symbol: self.name(),
                        what: "only the radial profile on [0, 1) is available".into(),
                    })
                }
            }
            Symbol::ShapiroTaylor { theta, eps } => {
                let w = eps * phi0(z);
                Ok((-f_theta(*theta, w)).exp())
            }
            Symbol::Normalized { inner, at, image } => {
                let inside = (at - z) / (ONE - at.conj() * z);
                let mapped = inner.evaluate(inside)?;
                Ok((image - mapped) / (ONE - image.conj() * mapped))
            }
        }
    }

    /// `phi'(z)` in closed form.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Symbol::Identity => Ok(ONE),
            Symbol::Constant { .. } => Ok(Complex64::new(0.0, 0.0)),
            Symbol::Scaling { factor } => Ok(*factor),
            Symbol::Mobius { a } => {
                let d = ONE - a.conj() * z;
                Ok(Complex64::new(a.norm_sqr() - 1.0, 0.0) / (d * d))
            }
            Symbol::Lens { theta } => {
                // lambda' = 4 theta (1 - z^2)^{theta - 1} / ((1+z)^t + (1-z)^t)^2
                let s = (ONE + z).powf(*theta) + (ONE - z).powf(*theta);
                Ok(4.0 * *theta * (ONE - z * z).powf(*theta - 1.0) / (s * s))
            }
            Symbol::Cusp => Err(Error::Unsupported {
                symbol: self.name(),
                what: "derivative of the radial-profile-only cusp map".into(),
            }),
            Symbol::ShapiroTaylor { theta, eps } => {
                let w = eps * phi0(z);
                let value = (-f_theta(*theta, w)).exp();
                Ok(-value * f_theta_prime(*theta, w) * eps * phi0_prime(z))
            }
            Symbol::Normalized { inner, at, image } => {
                let phi_at = |b: Complex64, x: Complex64| (b - x) / (ONE - b.conj() * x);
                let dphi = |b: Complex64, x: Complex64| {
                    let d = ONE - b.conj() * x;
                    Complex64::new(b.norm_sqr() - 1.0, 0.0) / (d * d)
                };
                let inside = phi_at(*at, z);
                let mapped = inner.evaluate(inside)?;
                Ok(dphi(*image, mapped) * inner.derivative(inside)? * dphi(*at, z))
            }
        }
    }

    /// Boundary gap of the image of a real point: `g -> 1 - phi(1 - g)` with
    /// `g in (0, 2)`, formed so that it stays exact as `g -> 0`.
    pub fn radial_gap(&self, g: f64) -> Result<f64> {
        if !(g > 0.0 && g < 2.0) {
            return Err(Error::Parameter(format!(
                "radial gap must lie in (0, 2), got {g}"
            )));
        }
        if !self.is_real_on_reals() {
            return Err(Error::Unsupported {
                symbol: self.name(),
                what: "radial gap map of a non-real symbol".into(),
            });
        }
        match self {
            Symbol::Identity => Ok(g),
            Symbol::Constant { value } => Ok(1.0 - value.re),
            Symbol::Scaling { factor } => Ok(1.0 - factor.re + factor.re * g),
            Symbol::Mobius { a } => {
                // 1 - Phi_a(1 - g) = (1 - a)(2 - g) / ((1 - a) + a g)
                let a = a.re;
                Ok((1.0 - a) * (2.0 - g) / ((1.0 - a) + a * g))
            }
            Symbol::Lens { theta } => {
                // 1 - lambda(1 - g) = 2 g^t / ((2 - g)^t + g^t)
                let gt = g.powf(*theta);
                Ok(2.0 * gt / ((2.0 - g).powf(*theta) + gt))
            }
            Symbol::Cusp => {
                if g > 1.0 {
                    return Err(Error::Unsupported {
                        symbol: self.name(),
                        what: "radial profile is given on [0, 1) only".into(),
                    });
                }
                // 1 - chi(r) = 1 / (1 + (2/pi) log(1 / (2 arctan((1-r)/(1+r)))))
                let arc = 2.0 * (g / (2.0 - g)).atan();
                Ok(1.0 / (1.0 + 2.0 / PI * (1.0 / arc).ln()))
            }
            Symbol::ShapiroTaylor { theta, eps } => {
                // phi_0(1 - g) = tan(delta / 4), delta = atan2(g (2-g), 2(1-g));
                // stays accurate as the argument of m(z) approaches pi.
                let delta = f64::atan2(g * (2.0 - g), 2.0 * (1.0 - g));
                let w = eps * (delta / 4.0).tan();
                let f = w * (-w.ln()).powf(*theta);
                Ok(-(-f).exp_m1())
            }
            Symbol::Normalized { .. } => {
                let v = self.evaluate(Complex64::new(1.0 - g, 0.0))?;
                Ok(1.0 - v.re)
            }
        }
    }

    /// Image boundary gap of a real point, resolved to whichever end of the
    /// diameter the image is near.
    ///
    /// The plain `radial_gap` rounds to 2 once the image crowds -1 (every
    /// automorphism sends `1^-` there); these forms stay exact.
    pub fn radial_image(&self, g: f64) -> Result<BoundaryGap> {
        match self {
            Symbol::Mobius { a } => {
                if !(g > 0.0 && g < 2.0) {
                    return Err(Error::Parameter(format!(
                        "radial gap must lie in (0, 2), got {g}"
                    )));
                }
                if a.im != 0.0 {
                    return Err(Error::Unsupported {
                        symbol: self.name(),
                        what: "radial image of a non-real symbol".into(),
                    });
                }
                let a = a.re;
                let den = (1.0 - a) + a * g;
                let plus = (1.0 - a) * (2.0 - g) / den;
                if plus <= 1.0 {
                    Ok(BoundaryGap::ToPlusOne(plus))
                } else {
                    // 1 + Phi_a(1 - g) = (1 + a) g / ((1 - a) + a g)
                    Ok(BoundaryGap::ToMinusOne((1.0 + a) * g / den))
                }
            }
            Symbol::Lens { theta } => {
                if !(g > 0.0 && g < 2.0) {
                    return Err(Error::Parameter(format!(
                        "radial gap must lie in (0, 2), got {g}"
                    )));
                }
                let gt = g.powf(*theta);
                let ct = (2.0 - g).powf(*theta);
                if g <= 1.0 {
                    Ok(BoundaryGap::ToPlusOne(2.0 * gt / (gt + ct)))
                } else {
                    // 1 + lambda(1 - g) = 2 (2 - g)^theta / (g^t + (2-g)^t)
                    Ok(BoundaryGap::ToMinusOne(2.0 * ct / (gt + ct)))
                }
            }
            Symbol::Scaling { factor } if factor.im == 0.0 => {
                if !(g > 0.0 && g < 2.0) {
                    return Err(Error::Parameter(format!(
                        "radial gap must lie in (0, 2), got {g}"
                    )));
                }
                let c = factor.re;
                let plus = (1.0 - c) + c * g;
                if plus <= 1.0 {
                    Ok(BoundaryGap::ToPlusOne(plus))
                } else {
                    Ok(BoundaryGap::ToMinusOne((1.0 + c) - c * g))
                }
            }
            _ => Ok(BoundaryGap::ToPlusOne(self.radial_gap(g)?)),
        }
    }

    /// Image of a disk point, carrying the exact gap along the real path.
    pub fn evaluate_point(&self, z: &DiskPoint) -> Result<DiskPoint> {
        match z.boundary_gap() {
            Some(repr) if self.is_real_on_reals() => {
                let g = match repr {
                    BoundaryGap::ToPlusOne(g) => g,
                    BoundaryGap::ToMinusOne(h) => 2.0 - h,
                };
                DiskPoint::from_boundary_gap(self.radial_image(g)?)
            }
            _ => DiskPoint::new(self.evaluate(z.value())?),
        }
    }

    /// Modulus-of-continuity pair for omega-radial symbols, when shipped.
    pub fn modulus(&self) -> Option<Modulus> {
        match self {
            Symbol::Lens { theta } => {
                // C_theta calibrated as the sup of (1 - lambda(r))/(1-r)^theta
                // over a 1000-point radial grid reaching g = 1e-12.
                let mut c: f64 = 0.0;
                for i in 0..1000 {
                    let g = 10f64.powf(-12.0 + 12.301 * (i as f64 + 1.0) / 1000.0);
                    let ratio = self.radial_gap(g).unwrap() / g.powf(*theta);
                    c = c.max(ratio);
                }
                Some(Modulus {
                    kind: ModulusKind::PowerLaw { c, theta: *theta },
                    rigorous: true,
                })
            }
            Symbol::Cusp => Some(Modulus {
                kind: ModulusKind::CuspLog,
                rigorous: true,
            }),
            Symbol::ShapiroTaylor { theta, .. } => Some(Modulus {
                // K_theta is not pinned down; default 1, non-rigorous.
                kind: ModulusKind::LogPower { k: 1.0, theta: *theta },
                rigorous: false,
            }),
            _ => None,
        }
    }
}

/// Pseudo-hyperbolic derivative `phi^#(z) = |phi'(z)| (1-|z|^2)/(1-|phi(z)|^2)`.
pub fn pseudo_hyperbolic_derivative(phi: &Symbol, z: &DiskPoint) -> Result<f64> {
    let deriv = phi.derivative(z.value())?.norm();
    if deriv == 0.0 {
        return Ok(0.0);
    }
    let image = phi.evaluate_point(z)?;
    Ok(deriv * z.one_minus_sq() / image.one_minus_sq())
}

/// Modulus of continuity `omega` with its inverse, in plain and log form.
#[derive(Debug, Clone, Copy)]
pub struct Modulus {
    kind: ModulusKind,
    /// False when the shape is taken from the literature without an explicit
    /// constant (Shapiro-Taylor K_theta).
    pub rigorous: bool,
}

#[derive(Debug, Clone, Copy)]
enum ModulusKind {
    /// `omega(h) = c h^theta`, `omega^{-1}(h) = (h/c)^{1/theta}`.
    PowerLaw { c: f64, theta: f64 },
    /// `omega(h) = 2 / log(1/h)`, `omega^{-1}(h) = exp(-2/h)`.
    CuspLog,
    /// `omega^{-1}(h) = k h (log(1/h))^{-theta}`; omega by bisection.
    LogPower { k: f64, theta: f64 },
}

impl Modulus {
    /// Override the free multiplicative constant (K_theta for the
    /// Shapiro-Taylor shape, C_theta for power laws).
    pub fn with_constant(mut self, value: f64) -> Modulus {
        match &mut self.kind {
            ModulusKind::PowerLaw { c, .. } => *c = value,
            ModulusKind::LogPower { k, .. } => *k = value,
            ModulusKind::CuspLog => {}
        }
        self
    }

    pub fn omega(&self, x: f64) -> f64 {
        match self.kind {
            ModulusKind::PowerLaw { c, theta } => c * x.powf(theta),
            ModulusKind::CuspLog => {
                let l = (1.0 / x).ln();
                if l <= 0.0 {
                    f64::INFINITY
                } else {
                    2.0 / l
                }
            }
            ModulusKind::LogPower { .. } => {
                // Invert omega^{-1} by bisection on its monotone range (0, 1/e].
                let target = x;
                let (mut lo, mut hi) = (1e-300, (-1.0f64).exp());
                if self.omega_inv_raw(hi) <= target {
                    return f64::INFINITY;
                }
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if self.omega_inv_raw(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (lo * hi).sqrt()
            }
        }
    }

    fn omega_inv_raw(&self, h: f64) -> f64 {
        self.log_omega_inv(h.ln()).exp()
    }

    pub fn omega_inv(&self, h: f64) -> f64 {
        self.omega_inv_raw(h)
    }

    /// `ln omega^{-1}(h)` from `ln h`; total on (-inf, 0) so that deep
    /// radial sweeps (`h = a sigma^n` with `n ~ 1e5`) never underflow.
    pub fn log_omega_inv(&self, log_h: f64) -> f64 {
        match self.kind {
            ModulusKind::PowerLaw { c, theta } => (log_h - c.ln()) / theta,
            ModulusKind::CuspLog => {
                if log_h < -700.0 {
                    f64::NEG_INFINITY
                } else {
                    -2.0 / log_h.exp()
                }
            }
            ModulusKind::LogPower { k, theta } => {
                if log_h >= 0.0 {
                    return k.ln() + log_h;
                }
                k.ln() + log_h - theta * (-log_h).ln()
            }
        }
    }
}

// --- Shapiro-Taylor building blocks ---

/// Conformal map from the disk onto the right half-disk `V_1`.
pub fn phi0(z: Complex64) -> Complex64 {
    let m = (z - Complex64::i()) / (Complex64::i() * z - ONE);
    // m maps the disk onto the upper half-plane; snap boundary rounding
    // noise back onto the principal branch approached from above.
    let m = if m.im < 0.0 && m.im > -1e-10 * (m.norm() + 1.0) {
        Complex64::new(m.re, 0.0)
    } else {
        m
    };
    let q = m.sqrt();
    (q - Complex64::i()) / (ONE - Complex64::i() * q)
}

fn phi0_prime(z: Complex64) -> Complex64 {
    let den = Complex64::i() * z - ONE;
    let m = (z - Complex64::i()) / den;
    let m = if m.im < 0.0 && m.im > -1e-10 * (m.norm() + 1.0) {
        Complex64::new(m.re, 0.0)
    } else {
        m
    };
    let q = m.sqrt();
    let dq = -ONE / (den * den) / q; // q' = m' / (2q), m' = -2 / (iz - 1)^2
    let dphi = 2.0 * dq / ((ONE - Complex64::i() * q) * (ONE - Complex64::i() * q));
    dphi
}

/// `f_theta(w) = w (-log w)^theta` with the principal logarithm.
fn f_theta(theta: f64, w: Complex64) -> Complex64 {
    if w.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    w * (-w.ln()).powf(theta)
}

fn f_theta_prime(theta: f64, w: Complex64) -> Complex64 {
    let l = -w.ln();
    l.powf(theta) - theta * l.powf(theta - 1.0)
}

// --- Taylor coefficients by discrete Fourier analysis ---

/// Reconstruction residual above which extraction reports an accuracy error.
pub const TAYLOR_RESIDUAL_TOL: f64 = 1e-9;

/// Tail mass of the sampling circle relative to one full turn of aliasing:
/// `radius^n_fft = ALIAS_TARGET`.
const ALIAS_TARGET: f64 = 1e-13;

/// First `count` Taylor coefficients of `phi^power`.
#[derive(Debug, Clone)]
pub struct TaylorCoefficients {
    pub coefficients: Vec<Complex64>,
    pub radius_used: f64,
    /// Residual of the off-grid reconstruction check.
    pub residual: f64,
}

/// Shared sampler: one pass of `phi` on a circle, reused across powers.
pub(crate) struct PowerSampler {
    pub samples: Vec<Complex64>,
    pub radius: f64,
    pub n_fft: usize,
    fft: Arc<dyn rustfft::Fft<f64>>,
}

impl PowerSampler {
    /// Samples `phi` on a circle sized for `count` coefficients: the grid is
    /// oversampled 8x and the radius chosen so a full aliasing turn carries
    /// `1e-13` of weight while `r^{-m}` amplification stays below ~45.
    pub(crate) fn new(phi: &Symbol, count: usize, oversample: usize) -> Result<Self> {
        if !count.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "coefficient count must be a power of two, got {count}"
            )));
        }
        if !phi.supports_complex_eval() {
            return Err(Error::Unsupported {
                symbol: phi.name(),
                what: "taylor extraction needs evaluation off the real axis".into(),
            });
        }
        let n_fft = (count * oversample).max(64);
        let radius = (ALIAS_TARGET.ln() / n_fft as f64).exp();
        let step = 2.0 * PI / n_fft as f64;
        let samples = (0..n_fft)
            .map(|j| phi.evaluate(Complex64::from_polar(radius, step * j as f64)))
            .collect::<Result<Vec<_>>>()?;
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        Ok(PowerSampler {
            samples,
            radius,
            n_fft,
            fft,
        })
    }

    /// Coefficients `c_0..c_{count-1}` of the analytic function whose values
    /// on the sampling circle are `values`.
    pub(crate) fn coefficients_of(&self, values: &[Complex64], count: usize) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.fft.process(&mut buf);
        let scale = 1.0 / self.n_fft as f64;
        let inv_r = 1.0 / self.radius;
        let mut r_pow = 1.0;
        let mut out = Vec::with_capacity(count);
        for item in buf.iter().take(count) {
            out.push(item * scale * r_pow);
            r_pow *= inv_r;
        }
        out
    }

    /// Off-grid accuracy check: compares the partial sum against direct
    /// evaluation of `phi^power` on a smaller circle where the discarded
    /// tail is provably below the tolerance.
    pub(crate) fn reconstruction_residual(
        &self,
        phi: &Symbol,
        power: usize,
        coeffs: &[Complex64],
    ) -> Result<f64> {
        let count = coeffs.len();
        let rho = ((ALIAS_TARGET.ln() - (count as f64).ln()) / count as f64)
            .exp()
            .min(self.radius);
        let mut worst: f64 = 0.0;
        for j in 0..24 {
            let t = 2.0 * PI * (j as f64 + 0.37) / 24.0;
            let z = Complex64::from_polar(rho, t);
            let mut sum = Complex64::new(0.0, 0.0);
            for c in coeffs.iter().rev() {
                sum = sum * z + c;
            }
            let direct = pow_complex(phi.evaluate(z)?, power);
            worst = worst.max((sum - direct).norm() / (1.0 + direct.norm()));
        }
        Ok(worst)
    }
}

fn pow_complex(w: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        return ONE;
    }
    if w.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    w.powu(k as u32)
}

/// First `count` Taylor coefficients of `phi^power`, extracted from circle
/// samples; retries on a denser grid until the off-grid reconstruction
/// residual passes, and reports an accuracy error if it never does.
pub fn taylor_coefficients(phi: &Symbol, count: usize, power: usize) -> Result<TaylorCoefficients> {
    let mut oversample = 8;
    let mut last_residual = f64::INFINITY;
    while count * oversample <= (1 << 17) {
        let sampler = PowerSampler::new(phi, count, oversample)?;
        let values: Vec<Complex64> = sampler.samples.iter().map(|&w| pow_complex(w, power)).collect();
        let coeffs = sampler.coefficients_of(&values, count);
        let residual = sampler.reconstruction_residual(phi, power, &coeffs)?;
        if residual <= TAYLOR_RESIDUAL_TOL {
            return Ok(TaylorCoefficients {
                coefficients: coeffs,
                radius_used: sampler.radius,
                residual,
            });
        }
        last_residual = residual;
        oversample *= 2;
    }
    Err(Error::Accuracy {
        residual: last_residual,
        tolerance: TAYLOR_RESIDUAL_TOL,
    })
}
