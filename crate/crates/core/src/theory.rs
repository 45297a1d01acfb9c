//! Closed-form constants and sample-complexity formulas.
//!
//! Everything involving `4^{βn} B(βn, βn)` or `B(n-1, n-1)^2` is evaluated
//! as the exponential of a log-space expression built on [`log_beta`], so
//! the formulas stay finite for half-dimensions in the thousands.
//!
//! The spectral gap reported here is the eigenvalue separation `μ1 - μ2`
//! of `Q(X) = μ1 X + μ2 (I - X)`, i.e. `2n c / (2n - 1)` with
//! `c = 1 / (βn 4^{βn} B(βn, βn))`. The Stirling-type envelope
//! [`gap_bounds`] is reported alongside but not enforced: at small complex
//! dimensions (`n = 2, 3`) the true separation exceeds its upper curve.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};
use crate::field::FieldKind;
use crate::special::log_beta;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    pub field: FieldKind,
    pub n: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub gap: f64,
    /// Lower envelope of the gap, present when `βn >= 2`.
    pub gap_lower: Option<f64>,
    /// Upper envelope of the gap, present when `βn >= 2`.
    pub gap_upper: Option<f64>,
}

impl TheoryConstants {
    pub fn new(field: FieldKind, n: usize) -> Result<Self> {
        let (mu1, mu2) = mu_pair(field, n)?;
        let gap = spectral_gap(field, n)?;
        let bounds = gap_bounds(field, n);
        Ok(TheoryConstants {
            field,
            n,
            mu1,
            mu2,
            gap,
            gap_lower: bounds.map(|b| b.0),
            gap_upper: bounds.map(|b| b.1),
        })
    }

    pub fn beta_n(&self) -> f64 {
        self.field.beta() * self.n as f64
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("half-dimension n must be >= 1"));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

fn check_confidence(d: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("D must be nonnegative and finite, got {d}")));
    }
    Ok(())
}

/// `ln c` with `c = 1 / (βn 4^{βn} B(βn, βn))`.
fn log_mu_offset(field: FieldKind, n: usize) -> Result<f64> {
    let a = field.beta() * n as f64;
    Ok(-(a.ln() + 2.0 * a * LN_2 + log_beta(a, a)?))
}

/// `(μ1, μ2)`: the eigenvalues of `E[Q̂] = μ1 X + μ2 (I - X)`.
pub fn mu_pair(field: FieldKind, n: usize) -> Result<(f64, f64)> {
    check_n(n)?;
    let c = log_mu_offset(field, n)?.exp();
    Ok((0.5 + c, 0.5 - c / (2 * n - 1) as f64))
}

/// `μ1 - μ2`.
pub fn spectral_gap(field: FieldKind, n: usize) -> Result<f64> {
    check_n(n)?;
    let log_ratio = (2.0 * n as f64).ln() - ((2 * n - 1) as f64).ln();
    Ok((log_mu_offset(field, n)? + log_ratio).exp())
}

/// The Stirling envelope
/// `(n-1)√(2βn-1) / (√(2π) βn (2n-1))` and `4/e` times it, for `βn >= 2`.
pub fn gap_bounds(field: FieldKind, n: usize) -> Option<(f64, f64)> {
    let a = field.beta() * n as f64;
    if a < 2.0 {
        return None;
    }
    let lower = (n as f64 - 1.0) * (2.0 * a - 1.0).sqrt()
        / ((2.0 * PI).sqrt() * a * (2.0 * n as f64 - 1.0));
    Some((lower, 4.0 / E * lower))
}

fn positive_gap(field: FieldKind, n: usize) -> Result<f64> {
    let gap = spectral_gap(field, n)?;
    if gap <= 0.0 {
        return Err(Error::invalid(format!(
            "spectral gap vanishes for ({field}, n = {n})"
        )));
    }
    Ok(gap)
}

fn ceil_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x > u64::MAX as f64 {
        return Err(Error::invalid(format!("measurement count {x} overflows")));
    }
    Ok(x.ceil().max(1.0) as u64)
}

/// Right-hand side of the pointwise sample bound,
/// `(14/3) gap^-2 δ^-2 (log(4n) + D)`, before rounding.
pub fn pointwise_m_real(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    check_confidence(d)?;
    let gap = positive_gap(field, n)?;
    Ok(14.0 / 3.0 / (gap * gap * delta * delta) * ((4.0 * n as f64).ln() + d))
}

pub fn pointwise_m(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<u64> {
    ceil_count(pointwise_m_real(field, n, delta, d)?)
}

/// Accuracy the pointwise bound certifies at `m` measurements.
pub fn pointwise_delta(field: FieldKind, n: usize, m: u64, d: f64) -> Result<f64> {
    check_n(n)?;
    check_confidence(d)?;
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    let gap = positive_gap(field, n)?;
    Ok((14.0 / 3.0 / (gap * gap) * ((4.0 * n as f64).ln() + d) / m as f64).sqrt())
}

/// `2 s^-2 (8βn log(1 + 128√(2βn-1) / (2√(2π)) s^-1) + extra + D)`.
fn net_bound(field: FieldKind, n: usize, s: f64, extra: f64, d: f64) -> f64 {
    let a = field.beta() * n as f64;
    let k = 128.0 * (2.0 * a - 1.0).sqrt() / (2.0 * (2.0 * PI).sqrt());
    2.0 / (s * s) * (8.0 * a * (k / s).ln_1p() + extra + d)
}

/// Uniform sample bound before rounding, with `ε = gap δ / 8`.
pub fn uniform_m_real(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    check_confidence(d)?;
    let eps = positive_gap(field, n)? * delta / 8.0;
    Ok(net_bound(field, n, eps, 2.0 * LN_2, d))
}

pub fn uniform_m(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<u64> {
    ceil_count(uniform_m_real(field, n, delta, d)?)
}

/// Smallest `δ` with `uniform_m_real(δ) <= m`, by bisection on `log δ`
/// until the bracket is narrower than `1e-6` relative.
pub fn uniform_delta(field: FieldKind, n: usize, m: u64, d: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    let target = m as f64;
    let (mut lo, mut hi) = (1e-12_f64, 1e12_f64);
    if uniform_m_real(field, n, hi, d)? > target {
        return Err(Error::invalid(format!("no accuracy is certified at m = {m}")));
    }
    while hi - lo > 1e-6 * lo {
        let mid = (lo * hi).sqrt();
        if uniform_m_real(field, n, mid, d)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Sample bound for uniform concentration of the measurement Hamming
/// distance, before rounding.
pub fn hamming_conc_m_real(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    check_confidence(d)?;
    Ok(net_bound(field, n, delta, LN_2, d))
}

pub fn hamming_conc_m(field: FieldKind, n: usize, delta: f64, d: f64) -> Result<u64> {
    ceil_count(hamming_conc_m_real(field, n, delta, d)?)
}

/// `4βn log(1 + 2/ε)`: log-cardinality bound of an ε-net of rank-one
/// projections on `F^{2n}`.
pub fn net_log_cardinality(field: FieldKind, n: usize, eps: f64) -> Result<f64> {
    check_n(n)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid(format!("net radius must be positive, got {eps}")));
    }
    Ok(4.0 * field.beta() * n as f64 * (2.0 / eps).ln_1p())
}

/// `δ + 2 τ / gap`: error bound for recovery from a measurement with at
/// most a `τ` fraction of flipped bits.
pub fn noisy_error_bound(field: FieldKind, n: usize, delta: f64, tau: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::invalid(format!("tau must lie in [0, 1), got {tau}")));
    }
    Ok(delta + 2.0 * tau / positive_gap(field, n)?)
}

/// Expected-deviation bound `√(log(4n) / 2m) + log(4n) / 3m` for `‖Q̂ - Q(X)‖`.
pub fn bernstein_mean_bound(n: usize, m: u64) -> f64 {
    let l = (4.0 * n as f64).ln();
    let m = m as f64;
    (l / (2.0 * m)).sqrt() + l / (3.0 * m)
}

/// Slope `32√(2βn-1) / (e√(2π))` bounding `|E d^t - E d|` per unit `|t|`.
pub fn soft_drift_slope(field: FieldKind, n: usize) -> f64 {
    let a = field.beta() * n as f64;
    32.0 * (2.0 * a - 1.0).max(0.0).sqrt() / (E * (2.0 * PI).sqrt())
}

/// Parameters `(βn, βn)` of the Beta law of `tr(PX)`.
pub fn measurement_beta_params(field: FieldKind, n: usize) -> (f64, f64) {
    let a = field.beta() * n as f64;
    (a, a)
}

/// Variance `1 / (4 (2βn + 1))` of that Beta law.
pub fn measurement_variance(field: FieldKind, n: usize) -> f64 {
    1.0 / (4.0 * (2.0 * field.beta() * n as f64 + 1.0))
}

/// Probability that a uniform rank-`n` projection, compressed to a fixed
/// 2-plane, has eigenvalues `λ2 < 1/2 < λ1`.
pub fn dsep_probability(field: FieldKind, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("separation probability needs n >= 2"));
    }
    let nf = n as f64;
    let lb = log_beta(nf - 1.0, nf - 1.0)?;
    match field {
        FieldKind::Real => {
            let h = 0.5 * (nf - 1.0);
            Ok((log_beta(h, h)? - nf * LN_2 - lb).exp())
        }
        FieldKind::Complex => {
            let log_term = (8.0 * nf - 4.0).ln()
                - 2.0 * (nf - 1.0).ln()
                - (4.0 * nf - 3.0) * LN_2
                - 2.0 * lb;
            Ok(0.5 + log_term.exp())
        }
    }
}

/// Joint density of the eigenvalues `(λ1, λ2)` of the compression of a
/// uniform rank-`n` projection on `F^{2n}` to a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDensity {
    pub field: FieldKind,
    pub n: usize,
    pub log_mn: f64,
}

impl EigenDensity {
    pub fn new(field: FieldKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("eigenvalue density needs n >= 2"));
        }
        let nf = n as f64;
        let lb = log_beta(nf - 1.0, nf - 1.0)?;
        let log_mn = match field {
            FieldKind::Real => (2.0 / (nf - 1.0)).ln() + lb,
            FieldKind::Complex => -(8.0 * nf - 4.0).ln() + 2.0 * lb,
        };
        Ok(EigenDensity { field, n, log_mn })
    }

    pub fn normalizer(&self) -> f64 {
        self.log_mn.exp()
    }

    /// `p_n(x, y)` on `{0 <= y <= x <= 1}`, zero elsewhere.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) || y > x {
            return 0.0;
        }
        let diff = x - y;
        if diff == 0.0 {
            return 0.0;
        }
        let beta = self.field.beta();
        let base = x * (1.0 - x) * y * (1.0 - y);
        let expo = beta * (self.n as f64 - 1.0) - 1.0;
        let log_base = if expo == 0.0 { 0.0 } else { expo * base.ln() };
        (2.0 * beta * diff.ln() + log_base - self.log_mn).exp()
    }

    /// Mass of `p_n` over a grid cell. The cell must lie on or below the
    /// diagonal: either `y_hi <= x_lo` (a full square in the domain) or
    /// `xr == yr` (the lower triangle of a diagonal square).
    pub fn cell_mass(&self, xr: (f64, f64), yr: (f64, f64), order: usize) -> Result<f64> {
        let (nodes, weights) = gauss_legendre(order);
        let map = |t: f64, (a, b): (f64, f64)| 0.5 * (b - a) * t + 0.5 * (a + b);
        if yr.1 <= xr.0 {
            let jac = 0.25 * (xr.1 - xr.0) * (yr.1 - yr.0);
            let mut s = 0.0;
            for (xi, wx) in nodes.iter().zip(&weights) {
                for (yi, wy) in nodes.iter().zip(&weights) {
                    s += wx * wy * self.eval(map(*xi, xr), map(*yi, yr));
                }
            }
            Ok(s * jac)
        } else if xr == yr {
            // Collapsed map x = a + h u, y = a + h u v with Jacobian h^2 u.
            let (a, h) = (xr.0, xr.1 - xr.0);
            let mut s = 0.0;
            for (ui, wu) in nodes.iter().zip(&weights) {
                let u = 0.5 * (ui + 1.0);
                for (vi, wv) in nodes.iter().zip(&weights) {
                    let v = 0.5 * (vi + 1.0);
                    s += wu * wv * u * self.eval(a + h * u, a + h * u * v);
                }
            }
            Ok(s * 0.25 * h * h)
        } else {
            Err(Error::invalid("cell straddles the diagonal"))
        }
    }

    /// Total mass over the domain. Substitutes `x = sin²θ`, `y = sin²φ`,
    /// which cancels the inverse square-root edge singularity at β(n-1) = 1/2,
    /// then integrates the triangle `φ <= θ` with a collapsed map.
    pub fn total_mass(&self, order: usize) -> f64 {
        let (nodes, weights) = gauss_legendre(order);
        let half_pi = 0.5 * std::f64::consts::PI;
        let mut s = 0.0;
        for (ui, wu) in nodes.iter().zip(&weights) {
            let theta = half_pi * 0.5 * (ui + 1.0);
            let (st, ct) = theta.sin_cos();
            for (vi, wv) in nodes.iter().zip(&weights) {
                let phi = theta * 0.5 * (vi + 1.0);
                let (sp, cp) = phi.sin_cos();
                let jac = 4.0 * st * ct * sp * cp * theta;
                s += wu * wv * jac * self.eval(st * st, sp * sp);
            }
        }
        s * 0.25 * half_pi
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
