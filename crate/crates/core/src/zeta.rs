//! Complex-argument zeta machinery.
//!
//! The spectral zeta function of a module is `sum mult * magnitude^(-z)` over
//! its spectrum. For self-similar length families this has a closed form
//! built from three pieces: a power prefactor, a rational function of
//! `w = 2^(-z)`, and the Riemann zeta function. The module provides the
//! Riemann zeta function on the right half plane, geometric zeta functions of
//! length families, closed forms for trees and the gasket, certified
//! truncated spectral sums, and the localized gasket trace against a plane
//! function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::gasket::{self, PlanePoint};
use crate::numerics::KahanSum;
use crate::spectrum::SpectrumSpec;
use crate::{Error, Result};

/// Tolerance for detecting evaluation at a pole.
const POLE_TOL: f64 = 1e-12;

fn pole_err(z: Complex64) -> Error {
    Error::Pole { re: z.re, im: z.im }
}

/// Riemann zeta function for `re(z) > 0`, `z != 1`, by the accelerated
/// alternating series (Chebyshev-weighted eta series). Relative accuracy is
/// better than `1e-12` on the strip `re(z) in (0, 8]`, `|im(z)| <= 60`.
pub fn riemann_zeta(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 || !z.re.is_finite() {
        return Err(Error::InvalidInput(format!(
            "riemann zeta implemented for re(z) > 0 only, got re = {}",
            z.re
        )));
    }
    if (z - Complex64::new(1.0, 0.0)).norm() < POLE_TOL {
        return Err(pole_err(z));
    }
    let t = z.im.abs();
    // series length from the (3+sqrt(8))^-n error bound, with headroom for
    // the exp(pi |t| / 2) growth of the bound along the imaginary direction
    let ln10 = std::f64::consts::LN_10;
    let digits = 17.0 + ((1.0 + 2.0 * t).ln() + t * PI / 2.0) / ln10;
    let rate = (3.0 + 8.0_f64.sqrt()).ln();
    let mut n = ((digits * ln10 + 3.0_f64.ln()) / rate).ceil() as usize + 4;
    if z.re < 0.5 {
        n = n * 3 / 2 + 8;
    }
    n = n.clamp(24, 200);

    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = vec![0.0_f64; n + 1];
    let mut term = 1.0 / n as f64;
    let mut acc = term;
    d[0] = n as f64 * acc;
    for i in 0..n {
        let i_f = i as f64;
        let n_f = n as f64;
        term *= 4.0 * (n_f + i_f) * (n_f - i_f) / ((2.0 * i_f + 1.0) * (2.0 * i_f + 2.0));
        acc += term;
        d[i + 1] = n_f * acc;
    }

    let mut sum = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for k in 0..n {
        let kp1 = (k + 1) as f64;
        sum += sign * (d[k] - d[n]) * (-z * kp1.ln()).exp();
        sign = -sign;
    }
    // d_n * (1 - 2^(1-z)); the eta-to-zeta conversion factor vanishes on
    // the line re(z) = 1 at im(z) = 2 pi k / ln 2, which no caller hits
    let denom = d[n] * (Complex64::new(1.0, 0.0) - ((1.0 - z) * 2.0_f64.ln()).exp());
    if denom.norm() < POLE_TOL * d[n] {
        return Err(pole_err(z));
    }
    Ok(-sum / denom)
}

/// `sum_{k>=0} (2k+1)^(-z) = (1 - 2^(-z)) * zeta(z)`.
pub fn odd_zeta_factor(z: Complex64) -> Result<Complex64> {
    let w = two_pow_neg(z);
    Ok((Complex64::new(1.0, 0.0) - w) * riemann_zeta(z)?)
}

fn two_pow_neg(z: Complex64) -> Complex64 {
    (-z * 2.0_f64.ln()).exp()
}

/// Self-similar family of edge lengths: level `n >= 1` holds
/// `initial_count * count_ratio^(n-1)` edges of length
/// `initial_length * length_ratio^(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricLengthFamily {
    initial_count: u64,
    count_ratio: f64,
    initial_length: f64,
    length_ratio: f64,
}

impl GeometricLengthFamily {
    pub fn new(
        initial_count: u64,
        count_ratio: f64,
        initial_length: f64,
        length_ratio: f64,
    ) -> Result<Self> {
        if initial_count == 0 {
            return Err(Error::DegenerateFamily("initial count must be positive".into()));
        }
        if count_ratio <= 0.0 || !count_ratio.is_finite() {
            return Err(Error::DegenerateFamily(format!(
                "count ratio must be positive, got {count_ratio}"
            )));
        }
        if initial_length <= 0.0 || !initial_length.is_finite() {
            return Err(Error::NonpositiveLength(initial_length));
        }
        if !(length_ratio > 0.0 && length_ratio < 1.0) {
            return Err(Error::DegenerateFamily(format!(
                "length ratio must lie in (0, 1), got {length_ratio}"
            )));
        }
        Ok(GeometricLengthFamily {
            initial_count,
            count_ratio,
            initial_length,
            length_ratio,
        })
    }

    /// The family of the fractal tree on two free generators:
    /// `4 * 3^(n-1)` edges of length `2^(-n)`.
    pub fn f2() -> Self {
        GeometricLengthFamily {
            initial_count: 4,
            count_ratio: 3.0,
            initial_length: 0.5,
            length_ratio: 0.5,
        }
    }

    pub fn initial_count(&self) -> u64 {
        self.initial_count
    }
    pub fn count_ratio(&self) -> f64 {
        self.count_ratio
    }
    pub fn initial_length(&self) -> f64 {
        self.initial_length
    }
    pub fn length_ratio(&self) -> f64 {
        self.length_ratio
    }

    /// Edge count at level `n >= 1` (as a real; see [`Self::count_int`]).
    pub fn count(&self, n: u32) -> f64 {
        self.initial_count as f64 * self.count_ratio.powi(n as i32 - 1)
    }

    /// Integral edge count at level `n`, rejecting non-integral families.
    pub fn count_int(&self, n: u32) -> Result<u64> {
        let c = self.count(n);
        if !c.is_finite() || c > u64::MAX as f64 / 4.0 {
            return Err(Error::RangeExhausted(u64::MAX));
        }
        let r = c.round();
        if (c - r).abs() > 1e-9 * c.max(1.0) {
            return Err(Error::DegenerateFamily(format!(
                "level {n} count {c} is not integral"
            )));
        }
        Ok(r as u64)
    }

    pub fn length(&self, n: u32) -> f64 {
        self.initial_length * self.length_ratio.powi(n as i32 - 1)
    }

    /// Geometric series sum `sum_n count(n) * length(n)^s` when it converges.
    pub fn length_power_sum(&self, s: f64) -> Option<f64> {
        let ratio = self.count_ratio * self.length_ratio.powf(s);
        if ratio >= 1.0 {
            return None;
        }
        Some(self.initial_count as f64 * self.initial_length.powf(s) / (1.0 - ratio))
    }
}

/// Geometric zeta function `sum_e len(e)^z` of a family, in closed form
/// `c0 * l0^z / (1 - m * rho^z)`; evaluated by analytic continuation away
/// from its poles.
pub fn geometric_zeta(fam: &GeometricLengthFamily, z: Complex64) -> Result<Complex64> {
    let numer = fam.initial_count as f64 * (z * fam.initial_length.ln()).exp();
    let ratio = fam.count_ratio * (z * fam.length_ratio.ln()).exp();
    let denom = Complex64::new(1.0, 0.0) - ratio;
    if denom.norm() < POLE_TOL * (1.0 + ratio.norm()) {
        return Err(pole_err(z));
    }
    Ok(numer / denom)
}

/// Spectral zeta function of the tree over a length family:
/// `2^(z+1) * pi^(-z) * (1 - 2^(-z)) * geometric_zeta(z) * zeta(z)`.
pub fn tree_zeta(fam: &GeometricLengthFamily, z: Complex64) -> Result<Complex64> {
    let two = ((z + 1.0) * 2.0_f64.ln()).exp();
    let pi_pow = (-z * PI.ln()).exp();
    let odd = Complex64::new(1.0, 0.0) - two_pow_neg(z);
    Ok(two * pi_pow * odd * geometric_zeta(fam, z)? * riemann_zeta(z)?)
}

/// Spectral zeta function of the gasket module:
/// `2^(z+1) * (1 - 2^(-z)) / (1 - 3 * 2^(-z)) * zeta(z)`.
pub fn gasket_zeta(z: Complex64) -> Result<Complex64> {
    MeromorphicForm::gasket().evaluate(z)
}

/// Real-coefficient polynomial, ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly(pub Vec<f64>);

impl RealPoly {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.0.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    pub fn deriv(&self) -> RealPoly {
        if self.0.len() <= 1 {
            return RealPoly(vec![0.0]);
        }
        RealPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.0
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    /// Magnitude scale of the coefficients, for relative zero tests.
    pub fn coeff_scale(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs())).max(1e-300)
    }
}

/// Symbolic closed form of a spectral zeta function:
/// `coeff * 2^(a z + b) * pi^(c z) * N(2^(-z)) / D(2^(-z)) * zeta(z)?`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicForm {
    pub coeff: f64,
    pub two_exp_linear: f64,
    pub two_exp_const: f64,
    pub pi_exp_linear: f64,
    pub numer: RealPoly,
    pub denom: RealPoly,
    pub riemann_factor: bool,
}

impl MeromorphicForm {
    /// `2^(z+1) (1 - w) / (1 - 3w) * zeta(z)` with `w = 2^(-z)`.
    pub fn gasket() -> Self {
        MeromorphicForm {
            coeff: 1.0,
            two_exp_linear: 1.0,
            two_exp_const: 1.0,
            pi_exp_linear: 0.0,
            numer: RealPoly(vec![1.0, -1.0]),
            denom: RealPoly(vec![1.0, -3.0]),
            riemann_factor: true,
        }
    }

    /// Closed form for a tree family with dyadic lengths
    /// (`l0 = 2^(-i)`, `rho = 2^(-j)`), as a rational function of `2^(-z)`.
    pub fn tree(fam: &GeometricLengthFamily) -> Result<Self> {
        let i = dyadic_exponent(fam.initial_length()).ok_or_else(|| {
            Error::InvalidInput(format!(
                "initial length {} is not a dyadic power 2^-i",
                fam.initial_length()
            ))
        })?;
        let j = dyadic_exponent(fam.length_ratio()).ok_or_else(|| {
            Error::InvalidInput(format!(
                "length ratio {} is not a dyadic power 2^-j",
                fam.length_ratio()
            ))
        })?;
        if j == 0 {
            return Err(Error::DegenerateFamily("length ratio must be < 1".into()));
        }
        // numer = c0 * w^i * (1 - w)
        let mut numer = vec![0.0; i + 2];
        numer[i] = fam.initial_count() as f64;
        numer[i + 1] = -(fam.initial_count() as f64);
        // denom = 1 - m * w^j
        let mut denom = vec![0.0; j + 1];
        denom[0] = 1.0;
        denom[j] = -fam.count_ratio();
        Ok(MeromorphicForm {
            coeff: 1.0,
            two_exp_linear: 1.0,
            two_exp_const: 1.0,
            pi_exp_linear: -1.0,
            numer: RealPoly(numer),
            denom: RealPoly(denom),
            riemann_factor: true,
        })
    }

    /// Everything except the Riemann factor.
    pub fn rational_part(&self, z: Complex64) -> Result<Complex64> {
        let w = two_pow_neg(z);
        let d = self.denom.eval(w);
        if d.norm() < POLE_TOL * self.denom.coeff_scale() * (1.0 + w.norm()) {
            return Err(pole_err(z));
        }
        let pow2 = ((self.two_exp_linear * z + self.two_exp_const) * 2.0_f64.ln()).exp();
        let powpi = (self.pi_exp_linear * z * PI.ln()).exp();
        Ok(self.coeff * pow2 * powpi * self.numer.eval(w) / d)
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let rational = self.rational_part(z)?;
        if self.riemann_factor {
            Ok(rational * riemann_zeta(z)?)
        } else {
            Ok(rational)
        }
    }
}

fn dyadic_exponent(x: f64) -> Option<usize> {
    if !(x > 0.0 && x <= 1.0) {
        return None;
    }
    let e = -x.log2();
    let r = e.round();
    if (e - r).abs() < 1e-12 && r >= 0.0 {
        Some(r as usize)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Truncated spectral sums with certified tails
// ---------------------------------------------------------------------------

/// An arithmetic magnitude family `(offset + step*j) * scale`, `j >= 0`, with
/// per-line multiplicity `mult`. Scale and multiplicity are carried as
/// logarithms so that deep geometric levels (where `mult ~ 3^n` alone would
/// overflow) stay representable through their product.
#[derive(Debug, Clone, Copy)]
struct ArithDesc {
    ln_scale: f64,
    offset: f64,
    step: f64,
    ln_mult: f64,
}

impl ArithDesc {
    fn odd_multiples(scale: f64, mult: f64) -> Self {
        ArithDesc {
            ln_scale: scale.ln(),
            offset: 1.0,
            step: 2.0,
            ln_mult: mult.ln(),
        }
    }
}

enum TruncDesc {
    Finite(Vec<ArithDesc>),
    /// Level `i >= 0`: scale `scale0 * scale_ratio^i`, multiplicity
    /// `mult0 * mult_ratio^i`; odd-multiple shape (offset 1, step 2).
    Geometric {
        scale0: f64,
        scale_ratio: f64,
        mult0: f64,
        mult_ratio: f64,
    },
}

fn positive(len: f64) -> Result<f64> {
    if len > 0.0 && len.is_finite() {
        Ok(len)
    } else {
        Err(Error::NonpositiveLength(len))
    }
}

fn trunc_desc(spec: &SpectrumSpec) -> Result<TruncDesc> {
    Ok(match spec {
        SpectrumSpec::Edge { len } => TruncDesc::Finite(vec![ArithDesc::odd_multiples(
            PI / (2.0 * positive(*len)?),
            2.0,
        )]),
        SpectrumSpec::GraphEdges(lens) => TruncDesc::Finite(
            lens.iter()
                .map(|&l| Ok(ArithDesc::odd_multiples(PI / (2.0 * positive(l)?), 2.0)))
                .collect::<Result<_>>()?,
        ),
        SpectrumSpec::Circle { radius, translated } => {
            let radius = positive(*radius)?;
            if *translated {
                TruncDesc::Finite(vec![ArithDesc::odd_multiples(1.0 / (2.0 * radius), 2.0)])
            } else {
                // zero mode carries no weight in |D|^(-z); skip it
                TruncDesc::Finite(vec![ArithDesc {
                    ln_scale: (1.0 / radius).ln(),
                    offset: 1.0,
                    step: 1.0,
                    ln_mult: 2f64.ln(),
                }])
            }
        }
        SpectrumSpec::Interval { alpha } => TruncDesc::Finite(vec![ArithDesc {
            ln_scale: (PI / positive(*alpha)?).ln(),
            offset: 1.0,
            step: 1.0,
            ln_mult: 2f64.ln(),
        }]),
        SpectrumSpec::Gasket => TruncDesc::Geometric {
            scale0: 0.5,
            scale_ratio: 2.0,
            mult0: 2.0,
            mult_ratio: 3.0,
        },
        SpectrumSpec::TreeFamily(fam) => TruncDesc::Geometric {
            scale0: PI / (2.0 * fam.initial_length()),
            scale_ratio: 1.0 / fam.length_ratio(),
            mult0: 2.0 * fam.initial_count() as f64,
            mult_ratio: fam.count_ratio(),
        },
    })
}

/// Abscissa of convergence of the spectral zeta function of a spec.
pub fn abscissa_of(spec: &SpectrumSpec) -> Result<f64> {
    Ok(match trunc_desc(spec)? {
        TruncDesc::Finite(_) => 1.0,
        TruncDesc::Geometric {
            scale_ratio,
            mult_ratio,
            ..
        } => (mult_ratio.ln() / scale_ratio.ln()).max(1.0),
    })
}

const MAX_LEVELS: u32 = 4000;
const MAX_TERMS_PER_FAMILY: f64 = 1e7;
/// Euler-Maclaurin remainder constant `2 zeta(4) / (2 pi)^4`.
const EM_CONST: f64 = 0.001388925;

/// Sum `mult * sum_j ((offset + step j) scale)^(-z)` with a certified
/// absolute error bound: a direct partial sum plus the integral and
/// curvature corrections of the tail, with the standard remainder bound.
fn family_sum(desc: &ArithDesc, z: Complex64, eps_abs: f64) -> Result<(Complex64, f64)> {
    let sigma = z.re;
    debug_assert!(sigma > 1.0);
    let zmag = z.norm();
    let deriv4 = zmag * (zmag + 1.0) * (zmag + 2.0) * (zmag + 3.0);
    let prefactor_mag = (desc.ln_mult - sigma * desc.ln_scale).exp();
    if prefactor_mag == 0.0 {
        // the whole family underflows; it contributes nothing measurable
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let eps_inner = (eps_abs / prefactor_mag).max(1e-300);
    // remainder(X) = EM_CONST * deriv4 * step^3 * X^(-sigma-3) / (sigma+3)
    let numerator = EM_CONST * deriv4 * desc.step.powi(3) / (sigma + 3.0);
    let mut x_start = (numerator / eps_inner).powf(1.0 / (sigma + 3.0));
    x_start = x_start.max(desc.offset + 16.0 * desc.step);
    let terms = (x_start - desc.offset) / desc.step;
    if !terms.is_finite() || terms > MAX_TERMS_PER_FAMILY {
        return Err(Error::TargetUnachievable { target: eps_abs });
    }
    let a = terms.ceil() as u64;
    let xa = desc.offset + desc.step * a as f64;

    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for j in 0..a {
        let x = desc.offset + desc.step * j as f64;
        let term = (-z * x.ln()).exp();
        re.add(term.re);
        im.add(term.im);
    }
    let mut inner = Complex64::new(re.value(), im.value());

    // Euler-Maclaurin tail from index a: integral + boundary corrections
    let g = |order: f64| (-(z + order) * xa.ln()).exp();
    let integral = g(-1.0) / (desc.step * (z - 1.0));
    let g0 = g(0.0);
    let g1 = -z * desc.step * g(1.0);
    let g3 = -z * (z + 1.0) * (z + 2.0) * desc.step.powi(3) * g(3.0);
    inner += integral + 0.5 * g0 - g1 / 12.0 + g3 / 720.0;

    let remainder = numerator * xa.powf(-(sigma + 3.0));
    let prefactor = (Complex64::new(desc.ln_mult, 0.0) - z * desc.ln_scale).exp();
    Ok((prefactor * inner, prefactor_mag * remainder))
}

/// Elementary upper bound for `sum_j (offset + step j)^(-sigma)`.
fn family_mag_bound(desc: &ArithDesc, sigma: f64) -> f64 {
    desc.offset.powf(-sigma)
        + (desc.offset + desc.step / 2.0).powf(1.0 - sigma) / (desc.step * (sigma - 1.0))
}

/// Truncated spectral zeta sum with a certified tail bound below
/// `target_accuracy`. Errors when `re(z)` is at or below the abscissa of
/// convergence, or when the target cannot be met within the term caps.
pub fn truncated_spectral_zeta(
    spec: &SpectrumSpec,
    z: Complex64,
    target_accuracy: f64,
) -> Result<(Complex64, f64)> {
    if target_accuracy <= 0.0 || target_accuracy.is_nan() {
        return Err(Error::InvalidInput("target accuracy must be positive".into()));
    }
    let sigma = z.re;
    let abscissa = abscissa_of(spec)?;
    if sigma <= abscissa {
        return Err(Error::BelowAbscissa { sigma, abscissa });
    }
    match trunc_desc(spec)? {
        TruncDesc::Finite(fams) => {
            let eps_each = target_accuracy / (2.0 * fams.len() as f64);
            let mut total = Complex64::new(0.0, 0.0);
            let mut bound = 0.0;
            for f in &fams {
                let (v, b) = family_sum(f, z, eps_each)?;
                total += v;
                bound += b;
            }
            Ok((total, bound))
        }
        TruncDesc::Geometric {
            scale0,
            scale_ratio,
            mult0,
            mult_ratio,
        } => {
            let q = mult_ratio * scale_ratio.powf(-sigma);
            debug_assert!(q < 1.0);
            let odd_bound = family_mag_bound(&ArithDesc::odd_multiples(1.0, 1.0), sigma);
            // log-space level weight mult_n * scale_n^(-sigma); deep levels
            // stay representable through the combined exponent
            let ln_weight = |n: u32| {
                mult0.ln() + n as f64 * mult_ratio.ln()
                    - sigma * (scale0.ln() + n as f64 * scale_ratio.ln())
            };
            // number of levels so the whole-level tail is below target/2
            let mut levels = 0u32;
            loop {
                let tail = ln_weight(levels + 1).exp() * odd_bound / (1.0 - q);
                if tail <= target_accuracy / 2.0 {
                    break;
                }
                levels += 1;
                if levels > MAX_LEVELS {
                    return Err(Error::TargetUnachievable {
                        target: target_accuracy,
                    });
                }
            }
            let eps_level = target_accuracy / (2.0 * (levels + 1) as f64);
            let mut total = Complex64::new(0.0, 0.0);
            let mut bound = ln_weight(levels + 1).exp() * odd_bound / (1.0 - q);
            for n in 0..=levels {
                let desc = ArithDesc {
                    ln_scale: scale0.ln() + n as f64 * scale_ratio.ln(),
                    offset: 1.0,
                    step: 2.0,
                    ln_mult: mult0.ln() + n as f64 * mult_ratio.ln(),
                };
                let (v, b) = family_sum(&desc, z, eps_level)?;
                total += v;
                bound += b;
            }
            Ok((total, bound))
        }
    }
}

// ---------------------------------------------------------------------------
// Localized gasket trace
// ---------------------------------------------------------------------------

/// Per-triangle spectral factor at level `n`:
/// `2 * 2^(-(n-1) z) * (1 - 2^(-z)) * zeta(z)`.
pub fn gasket_level_factor(n: u32, z: Complex64) -> Result<Complex64> {
    let pow = (-(n as f64 - 1.0) * z * 2.0_f64.ln()).exp();
    Ok(2.0 * pow * odd_zeta_factor(z)?)
}

/// Truncated localized trace of a plane function against the gasket module:
/// the sum over levels `n <= level_cap` of the per-triangle perimeter
/// averages of `f` times the per-triangle spectral factor. Perimeter
/// averages use composite trapezoid quadrature with `quad_points`
/// subintervals per side (corners included), which is exact for functions
/// affine along each side.
pub fn localized_gasket_trace<F: Fn(PlanePoint) -> f64>(
    f: F,
    z: Complex64,
    level_cap: u32,
    quad_points: u32,
) -> Result<Complex64> {
    let abscissa = gasket::gasket_dimension();
    if z.re <= abscissa {
        return Err(Error::BelowAbscissa {
            sigma: z.re,
            abscissa,
        });
    }
    let sums = gasket::level_average_sums(&f, level_cap, quad_points);
    let mut total = Complex64::new(0.0, 0.0);
    for (n, s) in sums.iter().enumerate() {
        total += s * gasket_level_factor(n as u32, z)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_basel() {
        let v = riemann_zeta(c(2.0, 0.0)).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn zeta_classical_values() {
        let z4 = riemann_zeta(c(4.0, 0.0)).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-13);
        let z6 = riemann_zeta(c(6.0, 0.0)).unwrap();
        assert!((z6.re - PI.powi(6) / 945.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_pole_rejected() {
        assert!(matches!(riemann_zeta(c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(riemann_zeta(c(0.0, 1.0)).is_err());
    }

    #[test]
    fn odd_factor_values() {
        let v = odd_zeta_factor(c(2.0, 0.0)).unwrap();
        assert!((v.re - PI * PI / 8.0).abs() < 1e-13);
        let v4 = odd_zeta_factor(c(4.0, 0.0)).unwrap();
        assert!((v4.re - PI.powi(4) / 96.0).abs() < 1e-13);
    }

    #[test]
    fn odd_factor_matches_direct_sum() {
        // sum (2k+1)^{-3} truncated; tail below 1e-11
        let mut s = 0.0;
        for k in 0..1_000_000u64 {
            s += ((2 * k + 1) as f64).powi(-3);
        }
        let v = odd_zeta_factor(c(3.0, 0.0)).unwrap();
        assert!((v.re - s).abs() < 1e-10);
    }

    #[test]
    fn geometric_zeta_f2() {
        let fam = GeometricLengthFamily::f2();
        let v = geometric_zeta(&fam, c(2.0, 0.0)).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12, "got {v}");
        let v3 = geometric_zeta(&fam, c(3.0, 0.0)).unwrap();
        assert!((v3.re - 0.8).abs() < 1e-12);
    }

    #[test]
    fn geometric_zeta_partial_sum_oracle() {
        let fam = GeometricLengthFamily::f2();
        let mut s = 0.0;
        for n in 1..=200u32 {
            s += fam.count(n) * fam.length(n).powi(2);
        }
        let v = geometric_zeta(&fam, c(2.0, 0.0)).unwrap();
        assert!((v.re - s).abs() < 1e-10);
    }

    #[test]
    fn geometric_zeta_pole_line() {
        let fam = GeometricLengthFamily::f2();
        let d = 3.0_f64.ln() / 2.0_f64.ln();
        assert!(matches!(
            geometric_zeta(&fam, c(d, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn tree_zeta_f2_at_two() {
        let fam = GeometricLengthFamily::f2();
        let v = tree_zeta(&fam, c(2.0, 0.0)).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12, "got {v}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn tree_closed_form_expression() {
        // 8 pi^(-z) (1 - w) / (1 - 3w) * zeta(z) with w = 2^(-z)
        let fam = GeometricLengthFamily::f2();
        for &(re, im) in &[(2.0, 0.0), (2.5, 7.0), (1.9, -2.0)] {
            let z = c(re, im);
            let w = two_pow_neg(z);
            let expect = 8.0 * (-z * PI.ln()).exp() * (Complex64::new(1.0, 0.0) - w)
                / (Complex64::new(1.0, 0.0) - 3.0 * w)
                * riemann_zeta(z).unwrap();
            let got = tree_zeta(&fam, z).unwrap();
            assert!((got - expect).norm() < 1e-12 * expect.norm(), "z = {z}");
        }
    }

    #[test]
    fn truncated_tree_matches_closed_form() {
        let fam = GeometricLengthFamily::f2();
        let z = c(3.0, 0.0);
        let (v, bound) =
            truncated_spectral_zeta(&SpectrumSpec::TreeFamily(fam.clone()), z, 1e-8).unwrap();
        let closed = tree_zeta(&fam, z).unwrap();
        assert!((v - closed).norm() <= bound, "diff {}", (v - closed).norm());
    }

    #[test]
    fn localized_trace_level_zero_only() {
        // cap 0: single-triangle contribution, 2 * 2^z * odd_factor * average
        let z = c(2.5, 0.0);
        let t = localized_gasket_trace(|p| p.x + 1.0, z, 0, 64).unwrap();
        let corners = crate::gasket::base_corners();
        let avg = (corners[0].x + corners[1].x + corners[2].x) / 3.0 + 1.0;
        let expect = 2.0 * (z * 2.0_f64.ln()).exp() * odd_zeta_factor(z).unwrap() * avg;
        assert!((t - expect).norm() < 1e-10 * expect.norm(), "{t} vs {expect}");
    }

    #[test]
    fn tree_form_matches_direct_product() {
        let fam = GeometricLengthFamily::f2();
        let form = MeromorphicForm::tree(&fam).unwrap();
        for &(re, im) in &[(2.0, 0.0), (3.0, 1.5), (1.7, -4.0), (2.5, 11.0)] {
            let z = c(re, im);
            let a = form.evaluate(z).unwrap();
            let b = tree_zeta(&fam, z).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "z={z} {a} {b}");
        }
    }

    #[test]
    fn gasket_zeta_at_two_is_four_pi_squared() {
        let v = gasket_zeta(c(2.0, 0.0)).unwrap();
        assert!((v.re - 4.0 * PI * PI).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn gasket_zeta_at_three() {
        // 2^4 * (7/8) / (5/8) = 22.4
        let v = gasket_zeta(c(3.0, 0.0)).unwrap();
        let expect = 22.4 * riemann_zeta(c(3.0, 0.0)).unwrap().re;
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn gasket_proportional_to_f2_tree() {
        let fam = GeometricLengthFamily::f2();
        for &(re, im) in &[(2.0, 0.0), (1.9, 3.0), (2.4, -7.0), (3.0, 0.5)] {
            let z = c(re, im);
            let h = (z * PI.ln()).exp() * ((z - 2.0) * 2.0_f64.ln()).exp(); // pi^z 2^(z-2)
            let lhs = gasket_zeta(z).unwrap();
            let rhs = h * tree_zeta(&fam, z).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * lhs.norm(), "z={z}");
        }
    }

    #[test]
    fn gasket_zeta_pole_at_dimension() {
        let d = 3.0_f64.ln() / 2.0_f64.ln();
        assert!(matches!(gasket_zeta(c(d, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn truncated_gasket_matches_closed_form() {
        let z = c(2.0, 0.0);
        let (v, bound) = truncated_spectral_zeta(&SpectrumSpec::Gasket, z, 1e-6).unwrap();
        assert!(bound <= 1e-6);
        let closed = gasket_zeta(z).unwrap();
        assert!((v - closed).norm() <= bound, "diff {} bound {bound}", (v - closed).norm());
    }

    #[test]
    fn truncated_single_edge_matches_odd_sum() {
        // edge pi/2: magnitudes are the odd integers, multiplicity 2
        let z = c(2.0, 0.0);
        let (v, bound) = truncated_spectral_zeta(
            &SpectrumSpec::Edge { len: PI / 2.0 },
            z,
            1e-8,
        )
        .unwrap();
        let expect = 2.0 * odd_zeta_factor(z).unwrap();
        assert!((v - expect).norm() <= bound + 1e-12);
        assert!((v.re - PI * PI / 4.0).abs() < 1e-7);
    }

    #[test]
    fn truncated_close_to_the_abscissa() {
        // thousands of levels; the log-space weights keep deep levels finite
        let d = 3.0_f64.ln() / 2.0_f64.ln();
        let z = c(d + 0.02, 0.0);
        let (v, bound) = truncated_spectral_zeta(&SpectrumSpec::Gasket, z, 1e-4).unwrap();
        assert!(v.re.is_finite() && bound.is_finite());
        let closed = gasket_zeta(z).unwrap();
        assert!(
            (v - closed).norm() <= bound,
            "diff {} bound {bound}",
            (v - closed).norm()
        );
    }

    #[test]
    fn truncated_below_abscissa_errors() {
        assert!(matches!(
            truncated_spectral_zeta(&SpectrumSpec::Gasket, c(1.2, 0.0), 1e-6),
            Err(Error::BelowAbscissa { .. })
        ));
    }

    #[test]
    fn truncated_matches_brute_force_partial() {
        // brute-force check at a comfortable exponent
        let z = c(3.0, 0.0);
        let (v, bound) = truncated_spectral_zeta(&SpectrumSpec::Gasket, z, 1e-8).unwrap();
        let mut brute = 0.0;
        for line in crate::spectrum::gasket_spectrum().take(200_000) {
            brute += line.multiplicity as f64 * line.magnitude.powf(-3.0);
        }
        assert!((v.re - brute).abs() < 1e-6 + bound);
    }

    #[test]
    fn localized_trace_of_one_reconstructs_levels() {
        let z = c(2.0, 0.0);
        let cap = 10;
        let t = localized_gasket_trace(|_| 1.0, z, cap, 4).unwrap();
        let mut expect = Complex64::new(0.0, 0.0);
        for n in 0..=cap {
            expect += 3.0_f64.powi(n as i32) * gasket_level_factor(n, z).unwrap();
        }
        assert!((t - expect).norm() < 1e-9 * expect.norm());
    }
}
