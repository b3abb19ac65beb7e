//! Metric dimensions, complex-dimension pole sets, and Dixmier-type traces.
//!
//! The metric dimension of a self-similar length family is the abscissa
//! `log(m)/log(1/rho)` where its length-power series starts diverging; the
//! empirical counterpart is the log-log slope of the eigenvalue counting
//! function. Complex dimensions are the poles of the meromorphically
//! continued spectral zeta function: vertical arithmetic progressions with
//! spacing `2 pi / log 2` over each root of the denominator polynomial in
//! `w = 2^(-z)`, plus the Riemann pole at `z = 1`. Dixmier-type trace values
//! come from the residue at the abscissa and, exploratorily, from
//! logarithmic partial sums.

use num_complex::Complex64;

use crate::numerics::KahanSum;
use crate::spectrum::{sample_counts, SpectrumStream};
use crate::zeta::{riemann_zeta, GeometricLengthFamily, MeromorphicForm, RealPoly};
use crate::{Error, Result};

/// Vertical spacing of complex dimensions for base-2 self-similar forms.
pub fn oscillatory_period() -> f64 {
    2.0 * std::f64::consts::PI / 2.0_f64.ln()
}

/// A pole of a meromorphic continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleRecord {
    pub location: Complex64,
    pub order: u32,
    /// Residue for simple poles; for a double pole (a denominator root
    /// falling on the Riemann pole) this is the coefficient of
    /// `(z - z0)^(-2)` instead.
    pub residue: Complex64,
}

/// Rectangular window in the complex plane, contained in `re > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Window {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if !(re_min < re_max && im_min < im_max && re_min > 0.0)
            || !re_max.is_finite()
            || !im_min.is_finite()
            || !im_max.is_finite()
        {
            return Err(Error::InvalidWindow);
        }
        Ok(w)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// Abscissa where `sum count(n) * length(n)^s` starts diverging:
/// `log(m) / log(1/rho)`; families with `m <= 1` converge for every positive
/// exponent and report 0.
pub fn metric_dimension_analytic(fam: &GeometricLengthFamily) -> f64 {
    if fam.count_ratio() <= 1.0 {
        return 0.0;
    }
    fam.count_ratio().ln() / (1.0 / fam.length_ratio()).ln()
}

/// Least-squares fit of `log N(lambda)` against `log lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    /// Two standard errors of the slope.
    pub band: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Sampling density used for dimension regressions: log-periodic counting
/// functions with period `2 pi / log 2` in `log lambda` need several samples
/// per oscillation.
pub const SAMPLES_PER_DECADE: usize = 24;

/// Empirical metric dimension: regression slope of the counting function on
/// geometrically spaced thresholds in `[lambda_min, lambda_max]`.
pub fn metric_dimension_empirical(
    stream: SpectrumStream,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<RegressionFit> {
    if !(lambda_min > 0.0 && lambda_max > lambda_min) {
        return Err(Error::InvalidInput(
            "need 0 < lambda_min < lambda_max".into(),
        ));
    }
    let decades = (lambda_max / lambda_min).log10();
    let steps = (decades * SAMPLES_PER_DECADE as f64).ceil() as usize;
    let thresholds: Vec<f64> = (0..=steps)
        .map(|i| lambda_min * 10f64.powf(i as f64 / SAMPLES_PER_DECADE as f64))
        .take_while(|&t| t <= lambda_max * (1.0 + 1e-12))
        .collect();
    let counts = sample_counts(stream, &thresholds);
    let pts: Vec<(f64, f64)> = thresholds
        .iter()
        .zip(&counts)
        .filter(|&(_, &n)| n > 0)
        .map(|(&t, &n)| (t.ln(), (n as f64).ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::TooFewSamples {
            need: 8,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(RegressionFit {
        slope,
        band: 2.0 * stderr,
        intercept,
        points: pts.len(),
    })
}

// ---------------------------------------------------------------------------
// Complex dimensions
// ---------------------------------------------------------------------------

/// Roots of a real polynomial with multiplicities. Binomials are solved
/// exactly; general polynomials fall back to Durand-Kerner iteration.
fn poly_roots(p: &RealPoly) -> Vec<(Complex64, u32)> {
    let deg = p.degree();
    if deg == 0 {
        return Vec::new();
    }
    let coeffs = &p.0[..=deg];
    let nonzero: Vec<usize> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(i, _)| i)
        .collect();
    if nonzero == [0, deg] {
        // c0 + cd w^d: roots on a circle, solved exactly
        let ratio = -coeffs[0] / coeffs[deg];
        let r = ratio.abs().powf(1.0 / deg as f64);
        let base_arg = if ratio >= 0.0 { 0.0 } else { std::f64::consts::PI };
        return (0..deg)
            .map(|t| {
                let theta = (base_arg + 2.0 * std::f64::consts::PI * t as f64) / deg as f64;
                (Complex64::from_polar(r, theta), 1)
            })
            .collect();
    }
    durand_kerner(coeffs)
}

fn durand_kerner(coeffs: &[f64]) -> Vec<(Complex64, u32)> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |x: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let radius = 1.0 + monic.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut xs: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..400 {
        let mut delta = 0.0_f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= xs[i] - xs[j];
                }
            }
            let step = eval(xs[i]) / denom;
            xs[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * radius {
            break;
        }
    }
    // cluster coincident roots into multiplicities
    let mut out: Vec<(Complex64, u32)> = Vec::new();
    'next: for x in xs {
        for (root, mult) in out.iter_mut() {
            if (x - *root).norm() < 1e-8 * radius {
                *root = (*root * (*mult as f64) + x) / (*mult as f64 + 1.0);
                *mult += 1;
                continue 'next;
            }
        }
        out.push((x, 1));
    }
    out
}

/// Exact pole enumeration within a window: each denominator root `w_r` of
/// the form contributes the vertical progression
/// `z = -log2(w_r) + i k 2 pi / log 2`, the Riemann factor contributes
/// `z = 1`, and numerator zeros cancel coincident poles. Residues of simple
/// poles are computed analytically.
pub fn complex_dimensions(form: &MeromorphicForm, window: &Window) -> Result<Vec<PoleRecord>> {
    Window::new(window.re_min, window.re_max, window.im_min, window.im_max)?;
    if form.denom.degree() == 0 && !form.riemann_factor {
        return Ok(Vec::new());
    }
    let ln2 = 2.0_f64.ln();
    let period = oscillatory_period();
    let mut records: Vec<PoleRecord> = Vec::new();
    let mut riemann_consumed = false;

    for (w_root, mult) in poly_roots(&form.denom) {
        if w_root.norm() < 1e-14 {
            continue; // w = 0 corresponds to re(z) -> +infinity
        }
        if form.numer.eval(w_root).norm() < 1e-9 * form.numer.coeff_scale() {
            continue; // cancelled by a numerator zero
        }
        let re0 = -w_root.norm().ln() / ln2;
        let im0 = -w_root.arg() / ln2;
        if re0 < window.re_min || re0 > window.re_max {
            continue;
        }
        let k_min = ((window.im_min - im0) / period).ceil() as i64;
        let k_max = ((window.im_max - im0) / period).floor() as i64;
        for k in k_min..=k_max {
            let z0 = Complex64::new(re0, im0 + k as f64 * period);
            let coincides_riemann =
                form.riemann_factor && (z0 - Complex64::new(1.0, 0.0)).norm() < 1e-9;
            let order = mult + if coincides_riemann { 1 } else { 0 };
            let residue = if order == 1 {
                simple_denominator_residue(form, z0, w_root)?
            } else if coincides_riemann && mult == 1 {
                // coefficient of (z-1)^(-2)
                denominator_leading_factor(form, z0, w_root)?
            } else {
                Complex64::new(f64::NAN, f64::NAN)
            };
            if coincides_riemann {
                riemann_consumed = true;
            }
            records.push(PoleRecord {
                location: z0,
                order,
                residue,
            });
        }
    }

    let one = Complex64::new(1.0, 0.0);
    if form.riemann_factor && !riemann_consumed && window.contains(one) {
        // residue of zeta at 1 is 1
        match form.rational_part(one) {
            Ok(pref) => {
                if pref.norm() > 0.0 {
                    records.push(PoleRecord {
                        location: one,
                        order: 1,
                        residue: pref,
                    });
                }
            }
            Err(Error::Pole { .. }) => {} // handled on the denominator side
            Err(e) => return Err(e),
        }
    }

    records.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .expect("finite pole locations")
    });
    Ok(records)
}

/// Residue of the form at a simple pole coming from denominator root `w_r`:
/// the denominator contributes `d/dz D(2^(-z)) = -ln 2 * w * D'(w)`.
fn simple_denominator_residue(
    form: &MeromorphicForm,
    z0: Complex64,
    w_root: Complex64,
) -> Result<Complex64> {
    let lead = denominator_leading_factor(form, z0, w_root)?;
    Ok(lead * riemann_zeta(z0)?)
}

/// The non-zeta factor `coeff 2^(az+b) pi^(cz) N(w) / (D'(w) (-ln2) w)` at a
/// denominator root.
fn denominator_leading_factor(
    form: &MeromorphicForm,
    z0: Complex64,
    w_root: Complex64,
) -> Result<Complex64> {
    let ln2 = 2.0_f64.ln();
    let pow2 = ((form.two_exp_linear * z0 + form.two_exp_const) * ln2).exp();
    let powpi = (form.pi_exp_linear * z0 * std::f64::consts::PI.ln()).exp();
    let dprime = form.denom.deriv().eval(w_root);
    if dprime.norm() == 0.0 {
        return Err(Error::InvalidInput(
            "repeated denominator root where a simple one was expected".into(),
        ));
    }
    Ok(form.coeff * pow2 * powpi * form.numer.eval(w_root) / (dprime * (-ln2) * w_root))
}

/// Dixmier-type trace value of `|D|^(-d)` by the residue formula: the
/// residue of the form at its simple real pole `d`, divided by `d`. This is
/// the limit `lim_{x->1+} (x-1) * zeta_form(d x)`.
pub fn dixmier_residue(form: &MeromorphicForm, d: f64) -> Result<f64> {
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::NotAPole(d));
    }
    let w = (-d * 2.0_f64.ln()).exp();
    let w_c = Complex64::new(w, 0.0);
    if form.denom.eval(w_c).norm() > 1e-9 * form.denom.coeff_scale() {
        return Err(Error::NotAPole(d));
    }
    if form.denom.deriv().eval(w_c).norm() < 1e-12 * form.denom.coeff_scale() {
        return Err(Error::NotAPole(d)); // not simple
    }
    if form.riemann_factor && (d - 1.0).abs() < 1e-9 {
        return Err(Error::NotAPole(d)); // double pole with the Riemann factor
    }
    let z0 = Complex64::new(d, 0.0);
    let res = simple_denominator_residue(form, z0, w_c)?;
    Ok(res.re / d)
}

/// Logarithmic partial sums `(1/log N) sum_{j<N} |lambda_j|^(-d)` over the
/// first `N` eigenvalue magnitudes counted with multiplicity, for each `N`
/// in the (strictly increasing) list. Exploratory output: for self-similar
/// spectra the sequence oscillates log-periodically around the residue value.
pub fn dixmier_partial_sums(
    stream: SpectrumStream,
    d: f64,
    n_list: &[u64],
) -> Result<Vec<f64>> {
    if n_list.iter().any(|&n| n <= 1) {
        return Err(Error::DegenerateN);
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("N list must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(n_list.len());
    let mut acc = KahanSum::new();
    let mut count = 0u64;
    let mut idx = 0;
    for line in stream {
        if idx == n_list.len() {
            break;
        }
        let weight = line.magnitude.powf(-d);
        while idx < n_list.len() && count + line.multiplicity >= n_list[idx] {
            let take = n_list[idx] - count;
            let mut partial = acc;
            partial.add(take as f64 * weight);
            out.push(partial.value() / (n_list[idx] as f64).ln());
            idx += 1;
        }
        acc.add(line.multiplicity as f64 * weight);
        count += line.multiplicity;
    }
    if idx < n_list.len() {
        return Err(Error::RangeExhausted(n_list[idx]));
    }
    Ok(out)
}
