//! Frobenius-series machinery for the biconfluent-Heun form of the radial
//! problem: recurrence parameters, coefficient generation, polynomial
//! termination, strength solvers, and the analytic wavefunction.
//!
//! The series lives on the dimensionless variable `chi = sqrt(scale) r` with
//! the wavefunction ansatz `f = chi^{alpha + 1/2} exp(-(chi^2 - b_tilde
//! chi)/2) F(chi)`, `F = sum C_k chi^k`. A degree-`n` polynomial `F` requires
//! both `R = 2n` and `C_{n+1} = 0`; the recurrence then zeroes every later
//! coefficient.

use crate::error::{Error, Result};
use crate::model::{DerivedScales, FieldConfig, PhysParams, SeriesScales};
use nalgebra::DMatrix;

/// Recurrence parameters of the series.
///
/// `q_eta` is the product `Q eta = eta - (alpha + 1/2) b_tilde` kept as the
/// primitive: `Q` alone is singular at `eta = 0` while the product stays
/// regular everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqrParams {
    /// `P = alpha + 1/2`; always `>= 1/2`.
    pub p: f64,
    /// `Q eta = eta - P b_tilde`.
    pub q_eta: f64,
    /// `R = lambda / scale + b_tilde^2 / 4 - 2P - 1`; equals `2n` on a
    /// degree-`n` polynomial solution.
    pub r: f64,
}

impl PqrParams {
    pub fn new(p: f64, q_eta: f64, r: f64) -> Self {
        Self { p, q_eta, r }
    }

    /// Parameters from scaled-equation inputs at a given energy.
    pub fn from_series(ss: &SeriesScales, energy: f64) -> Self {
        let p = ss.alpha + 0.5;
        let r = ss.lambda(energy) / ss.scale + ss.b_tilde * ss.b_tilde / 4.0 - 2.0 * p - 1.0;
        Self { p, q_eta: ss.eta - p * ss.b_tilde, r }
    }

    /// Like [`PqrParams::from_series`] but with the `eta` of the series
    /// replaced (used when scanning strength roots at fixed energy).
    pub fn with_eta(p: f64, b_tilde: f64, eta: f64, r: f64) -> Self {
        Self { p, q_eta: eta - p * b_tilde, r }
    }
}

/// Series parameters in the radical convention (`scale = 2 gamma`), the one
/// in which the closed-form energy satisfies the degree condition `R = 2n`
/// exactly.
pub fn pqr_from_scales(scales: &DerivedScales, energy: f64) -> PqrParams {
    PqrParams::from_series(&scales.series_scales_radical(), energy)
}

/// A generated coefficient list `C_0 .. C_N` together with the parameters
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunSeries {
    pub coeffs: Vec<f64>,
    pub pqr: PqrParams,
    pub b_tilde: f64,
}

impl HeunSeries {
    /// The `eta` this series was built at (`q_eta + P b_tilde`).
    pub fn eta(&self) -> f64 {
        self.pqr.q_eta + self.pqr.p * self.b_tilde
    }

    /// Polynomial part and its first two derivatives at `chi`.
    pub fn poly_parts(&self, chi: f64) -> (f64, f64, f64) {
        // Horner evaluation of S, S', S''.
        let (mut s, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
        for &c in self.coeffs.iter().rev() {
            s2 = s2 * chi + 2.0 * s1;
            s1 = s1 * chi + s;
            s = s * chi + c;
        }
        (s, s1, s2)
    }
}

/// Run the recurrence
/// `C_{k+2} = ((Q eta - b_tilde (k+1)) C_{k+1} - (R - 2k) C_k) / ((k+2)(k+2P+1))`
/// seeded with `C_{-1} = 0`, `C_0 = 1`, up to `C_{n_max}`. The seed relation
/// `C_1 = Q eta / (2P)` is the recurrence itself at shift index `-1`.
pub fn heun_coefficients(pqr: &PqrParams, b_tilde: f64, n_max: usize) -> HeunSeries {
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(1.0);
    if n_max >= 1 {
        coeffs.push(pqr.q_eta / (2.0 * pqr.p));
    }
    for k in 0..n_max.saturating_sub(1) {
        let kf = k as f64;
        let num = (pqr.q_eta - b_tilde * (kf + 1.0)) * coeffs[k + 1] - (pqr.r - 2.0 * kf) * coeffs[k];
        let den = (kf + 2.0) * (kf + 2.0 * pqr.p + 1.0);
        coeffs.push(num / den);
    }
    HeunSeries { coeffs, pqr: *pqr, b_tilde }
}

/// The pair of termination residuals for a degree-`n` polynomial solution:
/// `(R - 2n, C_{n+1})`. Both must vanish; the recurrence then propagates
/// zeros to every higher coefficient.
pub fn termination_residuals(series: &HeunSeries, n: usize) -> (f64, f64) {
    assert!(
        series.coeffs.len() >= n + 2,
        "series too short: need C_{} but have {} coefficients",
        n + 1,
        series.coeffs.len()
    );
    (series.pqr.r - 2.0 * n as f64, series.coeffs[n + 1])
}

/// Coefficients (ascending powers of `eta`) of the polynomial
/// `C_{n+1}(eta)` obtained by running the recurrence with `R = 2n` and the
/// coefficients carried as exact dense polynomials in `eta` (degree `k` at
/// step `k`).
pub fn termination_polynomial(p: f64, b_tilde: f64, n: usize) -> Vec<f64> {
    let r = 2.0 * n as f64;
    let mut prev: Vec<f64> = Vec::new(); // C_{-1} = 0
    let mut cur: Vec<f64> = vec![1.0]; // C_0
    for step in 0..=n {
        let k = step as f64 - 1.0;
        let lin0 = -p * b_tilde - b_tilde * (k + 1.0);
        let den = (k + 2.0) * (k + 2.0 * p + 1.0);
        let fac = r - 2.0 * k;
        let mut next = vec![0.0f64; cur.len() + 1];
        for (i, &ci) in cur.iter().enumerate() {
            next[i + 1] += ci; // eta * C_{k+1}
            next[i] += lin0 * ci;
        }
        for (i, &pi) in prev.iter().enumerate() {
            next[i] -= fac * pi;
        }
        for v in next.iter_mut() {
            *v /= den;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// All real roots of a dense polynomial (ascending coefficients), found via
/// the balanced companion matrix with tiny imaginary parts (relative
/// `1e-10`) cleaned up. Empty when every root is complex or the polynomial
/// degenerates to a constant (including the identically-zero polynomial).
pub fn real_roots(poly: &[f64]) -> Vec<f64> {
    let max_abs = poly.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max_abs == 0.0 {
        return Vec::new();
    }
    // Drop negligible leading coefficients so the companion matrix stays sane.
    let mut deg = poly.len() - 1;
    while deg > 0 && poly[deg].abs() <= 1e-14 * max_abs {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![-poly[0] / poly[1]],
        2 => {
            let (c, b, a) = (poly[0], poly[1], poly[2]);
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return Vec::new();
            }
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut roots = if q == 0.0 {
                vec![0.0, 0.0]
            } else {
                vec![q / a, c / q]
            };
            roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
            roots
        }
        _ => {
            let lead = poly[deg];
            let mut companion = DMatrix::<f64>::zeros(deg, deg);
            for i in 1..deg {
                companion[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                companion[(i, deg - 1)] = -poly[i] / lead;
            }
            nalgebra::linalg::balancing::balance_parlett_reinsch(&mut companion);
            let eigs = companion.complex_eigenvalues();
            let mut roots: Vec<f64> = eigs
                .iter()
                .filter(|z| z.im.abs() <= 1e-10 * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .collect();
            roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
            roots
        }
    }
}

/// Real `eta` values at which the degree-`(n+1)` coefficient `C_{n+1}(eta)`
/// vanishes with `R` pinned to `2n`, in ascending order. An empty list means
/// every root is complex (or the polynomial degenerated).
pub fn solve_eta_for_termination(p: f64, b_tilde: f64, n: usize) -> Vec<f64> {
    real_roots(&termination_polynomial(p, b_tilde, n))
}

/// One polynomial solution of the scaled radial problem: the strength it
/// belongs to and the terminated series that solves the equation containing
/// that strength.
#[derive(Debug, Clone)]
pub struct TerminatedSolution {
    /// Root of the termination polynomial the series is built at.
    pub eta_root: f64,
    /// Coulomb strength whose radial equation this series solves. The
    /// recurrence's sign convention for the Coulomb-type coefficient is
    /// opposite the radial equation's, so the series built at `eta_root`
    /// solves the equation whose `1/chi` coefficient is `-eta_root`; `g`
    /// is mapped accordingly.
    pub g: f64,
    pub series: HeunSeries,
}

/// Every polynomial (degree-`n`) solution available at the energy fixing
/// `R = 2n`, sorted by ascending strength `g`. The series carry a few extra
/// coefficients past `C_{n+1}` so the zero tail is visible.
pub fn terminated_solutions(ss: &SeriesScales, n: usize) -> Vec<TerminatedSolution> {
    let p = ss.alpha + 0.5;
    let mut out: Vec<TerminatedSolution> = solve_eta_for_termination(p, ss.b_tilde, n)
        .into_iter()
        .map(|eta_root| {
            let pqr = PqrParams::with_eta(p, ss.b_tilde, eta_root, 2.0 * n as f64);
            TerminatedSolution {
                eta_root,
                g: ss.g_from_eta(-eta_root),
                series: heun_coefficients(&pqr, ss.b_tilde, n + 3),
            }
        })
        .collect();
    out.sort_by(|a, b| a.g.partial_cmp(&b.g).unwrap());
    out
}

/// Real magnetic-field roots of `B -> C_{n+1}(B)` over `[b_lo, b_hi]` at
/// fixed potential parameters, with `R` pinned to `2n` (radical-convention
/// scales). Sign changes are located on `panels` uniform panels (at least
/// 64) and bisected to `1e-12` absolute; an empty list means no sign change
/// (in particular the identically-zero coefficient, where every field value
/// is trivially a root).
pub fn solve_b_for_termination(
    params: &PhysParams,
    n: usize,
    m: i32,
    nu: f64,
    b_lo: f64,
    b_hi: f64,
) -> Result<Vec<f64>> {
    if !(b_lo >= 0.0 && b_hi > b_lo) {
        return Err(Error::InvalidParameter(format!(
            "field bracket [{b_lo}, {b_hi}] (need 0 <= lo < hi)"
        )));
    }
    let coeff = |b_field: f64| -> Result<f64> {
        let fields = FieldConfig::new(b_field, nu)?;
        let ss = crate::model::derive_scales(params, &fields, m)?.series_scales_radical();
        let pqr = PqrParams::with_eta(ss.alpha + 0.5, ss.b_tilde, ss.eta, 2.0 * n as f64);
        Ok(heun_coefficients(&pqr, ss.b_tilde, n + 1).coeffs[n + 1])
    };
    const PANELS: usize = 128;
    let mut samples = Vec::with_capacity(PANELS + 1);
    for i in 0..=PANELS {
        let b = b_lo + (b_hi - b_lo) * i as f64 / PANELS as f64;
        samples.push((b, coeff(b)?));
    }
    let scale = samples.iter().fold(0.0f64, |mx, (_, c)| mx.max(c.abs()));
    if scale == 0.0 {
        // Identically-zero coefficient: every field satisfies the condition,
        // which the sign-change contract reports as "no isolated root".
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let (ba, fa) = w[0];
        let (bb, fb) = w[1];
        if fa == 0.0 {
            roots.push(ba);
            continue;
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (ba, bb, fa);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = coeff(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    if let Some(&(bb, fb)) = samples.last() {
        if fb == 0.0 {
            roots.push(bb);
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10);
    Ok(roots)
}

/// The analytic wavefunction
/// `f(chi) = chi^{alpha+1/2} exp(-(chi^2 - b_tilde chi)/2) sum C_k chi^k`.
///
/// The exponent is `alpha + 1/2`: regularity `f(0) = 0` together with the
/// `u = f / sqrt(r) ~ r^alpha` origin behavior demand it.
pub fn wavefunction(series: &HeunSeries, alpha: f64, chi: f64) -> f64 {
    if chi == 0.0 {
        return 0.0;
    }
    let (s, _, _) = series.poly_parts(chi);
    prefactor(series.b_tilde, alpha, chi) * s
}

/// `(f, f', f'')` at `chi > 0` by analytic differentiation of the ansatz.
pub fn wavefunction_parts(series: &HeunSeries, alpha: f64, chi: f64) -> (f64, f64, f64) {
    debug_assert!(chi > 0.0);
    let a = prefactor(series.b_tilde, alpha, chi);
    let a1 = (alpha + 0.5) / chi + series.b_tilde / 2.0 - chi;
    let a1p = -(alpha + 0.5) / (chi * chi) - 1.0;
    let (s, s1, s2) = series.poly_parts(chi);
    let f = a * s;
    let fp = a * (a1 * s + s1);
    let fpp = a * ((a1 * a1 + a1p) * s + 2.0 * a1 * s1 + s2);
    (f, fp, fpp)
}

fn prefactor(b_tilde: f64, alpha: f64, chi: f64) -> f64 {
    chi.powf(alpha + 0.5) * (-(chi * chi - b_tilde * chi) / 2.0).exp()
}

/// Canonical biconfluent-Heun parameter list `(alpha_H, beta_H, gamma_H,
/// delta_H)` of the mapped equation, in the radical convention:
/// `alpha_H = 2 alpha`, `beta_H = b_tilde`, `gamma_H = lambda/scale +
/// b_tilde^2/4`, `delta_H = 2 eta`. On a degree-`n` polynomial solution
/// `gamma_H = 2n + alpha_H + 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BchParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn bch_map(scales: &DerivedScales, energy: f64) -> BchParams {
    let ss = scales.series_scales_radical();
    BchParams {
        alpha: 2.0 * ss.alpha,
        beta: ss.b_tilde,
        gamma: ss.lambda(energy) / ss.scale + ss.b_tilde * ss.b_tilde / 4.0,
        delta: 2.0 * ss.eta,
    }
}
