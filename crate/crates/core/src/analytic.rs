//! The log-volume F of a shape window, region volumes, the main-term
//! constant C_ℓ and empirical-versus-predicted comparison.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::basis::{Bound, ShapeWindow};
use crate::error::{Error, Result};
use crate::f2::{gl_order, volume_constant};
use crate::sieve::{euler_product, omega1, EulerProduct};
use crate::Rational;

/// Polynomial with rational coefficients in the variables r_2, …, r_ℓ
/// (r_j = log R_j) and one free variable t. Exponent vectors have length ℓ;
/// slot ℓ−1 holds t.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPolynomial {
    ell: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl LogPolynomial {
    fn constant(ell: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; ell], c);
        }
        LogPolynomial { ell, terms }
    }

    fn t_slot(&self) -> usize {
        self.ell - 1
    }

    /// Slot of r_j.
    fn r_slot(j: usize) -> usize {
        j - 2
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Replaces t by r_j.
    fn substitute_t(&self, j: usize) -> Self {
        let mut out = LogPolynomial { ell: self.ell, terms: BTreeMap::new() };
        let (ts, rs) = (self.t_slot(), Self::r_slot(j));
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[rs] += e2[ts];
            e2[ts] = 0;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// s ↦ ∫_{r_j}^{s} p(t) dt, returned as a polynomial in t = s.
    fn integrate_from(&self, j: usize) -> Self {
        let ts = self.t_slot();
        let mut anti = LogPolynomial { ell: self.ell, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[ts] += 1;
            anti.add_term(e2, c / Rational::from_integer(BigInt::from(e[ts] + 1)));
        }
        let mut out = anti.clone();
        for (e, c) in anti.substitute_t(j).terms {
            out.add_term(e, -c);
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Exact evaluation at the given r_2..r_ℓ (t is absent after assembly).
    pub fn evaluate(&self, logs: &[f64]) -> f64 {
        let xs: Vec<Rational> = logs.iter().map(|&x| Rational::from_float(x).unwrap_or_else(Rational::zero)).collect();
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (k, &p) in e.iter().enumerate().take(self.ell - 1) {
                for _ in 0..p {
                    term *= &xs[k];
                }
            }
            total += term;
        }
        total.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for LogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                write!(f, "{}", if neg { "-" } else { "" })?;
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.iter().all(|&p| p == 0) {
                factors.push(if mag.is_integer() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) });
            }
            for (k, &p) in e.iter().enumerate() {
                let name = if k == self.ell - 1 { "t".to_string() } else { format!("L{}", k + 2) };
                match p {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{p}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Lower limit index for a_j in the iterated integral, j = 2..=ℓ.
fn lower_index(ell: usize, j: usize, displayed: bool) -> usize {
    if displayed {
        if j == 2 {
            2
        } else {
            j - 1
        }
    } else if j == ell {
        ell - 1
    } else {
        j
    }
}

/// F as a polynomial in L_j = log R_j. The region version integrates a_j
/// from R_j (j < ℓ) and a_ℓ from R_{ℓ−1}; the displayed version integrates
/// a_j from R_{j−1} (j ≥ 3) and a_2 from R_2.
pub fn volume_polynomial(ell: usize, displayed: bool) -> LogPolynomial {
    assert!(ell >= 2);
    let mut p = LogPolynomial::constant(ell, Rational::one());
    for j in 2..=ell {
        p = p.integrate_from(lower_index(ell, j, displayed));
    }
    p.substitute_t(ell)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeMethod {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for VolumeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VolumeMethod::ClosedForm => "closed_form",
            VolumeMethod::Quadrature => "quadrature",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeValue {
    pub window: ShapeWindow,
    pub value: f64,
    pub method: VolumeMethod,
}

enum WindowKind {
    Empty,
    Unbounded,
    Logs(Vec<f64>),
}

/// Logs shifted by log R_2; F only depends on differences.
fn window_logs(window: &ShapeWindow) -> WindowKind {
    let b = window.bounds();
    if b[..b.len() - 1].iter().any(|x| !x.is_finite()) {
        return WindowKind::Empty;
    }
    if !window.is_bounded() {
        return WindowKind::Unbounded;
    }
    let base = match &b[0] {
        Bound::Finite(q) => q.clone(),
        Bound::Infinite => unreachable!(),
    };
    let logs = b
        .iter()
        .map(|x| match x {
            Bound::Finite(q) => (q / &base).to_f64().unwrap_or(f64::INFINITY).ln(),
            Bound::Infinite => f64::INFINITY,
        })
        .collect();
    WindowKind::Logs(logs)
}

fn closed_form(window: &ShapeWindow, displayed: bool) -> VolumeValue {
    let value = match window_logs(window) {
        WindowKind::Empty => 0.0,
        WindowKind::Unbounded => f64::INFINITY,
        WindowKind::Logs(logs) => volume_polynomial(window.ell(), displayed).evaluate(&logs),
    };
    VolumeValue { window: window.clone(), value, method: VolumeMethod::ClosedForm }
}

/// Log-volume of {R_j ≤ a_j (2 ≤ j ≤ ℓ−1), a_2 ≤ … ≤ a_ℓ ≤ R_ℓ} under
/// ∏ da_j/a_j. Infinite when R_ℓ = ∞ and zero on an empty region.
pub fn shape_volume_f(window: &ShapeWindow) -> VolumeValue {
    closed_form(window, false)
}

/// The iterated integral with inner limits R_{j−1}; equal to
/// [`shape_volume_f`] for ℓ = 3.
pub fn shape_volume_f_displayed(window: &ShapeWindow) -> VolumeValue {
    closed_form(window, true)
}

const QUADRATURE_BUDGET: u64 = 10_000_000;
const MAX_DEPTH: u32 = 40;

const KRONROD_NODES: [f64; 4] = [0.0, 0.434_243_749_346_802_6, 0.774_596_669_241_483_4, 0.960_491_268_708_020_3];
const KRONROD_WEIGHTS: [f64; 4] =
    [0.450_916_538_658_474_1, 0.401_397_414_775_962_2, 0.268_488_089_868_333_4, 0.104_656_226_026_467_3];
// Gauss 3-point rule on the nodes 0 and ±0.7745966692414834
const GAUSS_WEIGHTS: [f64; 2] = [8.0 / 9.0, 5.0 / 9.0];

struct Quadrature {
    tol: f64,
    evaluations: u64,
}

impl Quadrature {
    /// (Kronrod, Gauss) estimates on [a, b].
    fn rule(&mut self, f: &mut dyn FnMut(&mut Self, f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let f0 = f(self, c)?;
        let mut k = KRONROD_WEIGHTS[0] * f0;
        let mut g = GAUSS_WEIGHTS[0] * f0;
        for i in 1..4 {
            let fl = f(self, c - h * KRONROD_NODES[i])?;
            let fr = f(self, c + h * KRONROD_NODES[i])?;
            k += KRONROD_WEIGHTS[i] * (fl + fr);
            if i == 2 {
                g += GAUSS_WEIGHTS[1] * (fl + fr);
            }
        }
        self.evaluations += 7;
        if self.evaluations > QUADRATURE_BUDGET {
            return Err(Error::Nonconvergence(self.evaluations));
        }
        Ok((k * h, g * h))
    }

    fn adaptive(&mut self, f: &mut dyn FnMut(&mut Self, f64) -> Result<f64>, a: f64, b: f64, depth: u32) -> Result<f64> {
        let (k, g) = self.rule(f, a, b)?;
        if (k - g).abs() <= self.tol * k.abs().max(1e-300) || b - a < 1e-12 {
            return Ok(k);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Nonconvergence(self.evaluations));
        }
        let m = 0.5 * (a + b);
        Ok(self.adaptive(f, a, m, depth + 1)? + self.adaptive(f, m, b, depth + 1)?)
    }

    /// ∫ over x_j ∈ [r_{lower(j)}, upper] of the inner integral, in log
    /// coordinates.
    fn level(&mut self, logs: &[f64], ell: usize, j: usize, upper: f64, displayed: bool) -> Result<f64> {
        let lo = logs[lower_index(ell, j, displayed) - 2];
        if upper <= lo {
            return Ok(0.0);
        }
        if j == 2 {
            let mut one = |_: &mut Self, _: f64| Ok(1.0);
            return self.adaptive(&mut one, lo, upper, 0);
        }
        let mut inner = |q: &mut Self, x: f64| q.level(logs, ell, j - 1, x, displayed);
        self.adaptive(&mut inner, lo, upper, 0)
    }
}

/// Nested adaptive Gauss–Kronrod (3/7 points) over the region, in log space.
pub fn shape_volume_f_quadrature(window: &ShapeWindow, tol: f64) -> Result<VolumeValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidWindow(format!("tolerance {tol} must be positive")));
    }
    let value = match window_logs(window) {
        WindowKind::Empty => 0.0,
        WindowKind::Unbounded => f64::INFINITY,
        WindowKind::Logs(logs) => {
            let ell = window.ell();
            let mut q = Quadrature { tol, evaluations: 0 };
            q.level(&logs, ell, ell, logs[ell - 2], false)?
        }
    };
    Ok(VolumeValue { window: window.clone(), value, method: VolumeMethod::Quadrature })
}

/// Vol 𝒢_σ(Y; R) = c_ℓ·Y·F per ordering σ, and ℓ! times that in total.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionVolume {
    pub y: f64,
    pub f: f64,
    pub c_ell: Rational,
    pub ell: usize,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

impl RegionVolume {
    pub fn per_sigma(&self) -> f64 {
        if self.y == 0.0 {
            return 0.0;
        }
        self.c_ell.to_f64().unwrap_or(f64::NAN) * self.y * self.f
    }

    /// c_ℓ·ℓ!, the coefficient of Y·F in the total.
    pub fn total_coefficient(&self) -> Rational {
        &self.c_ell * factorial(self.ell)
    }

    pub fn total(&self) -> f64 {
        if self.y == 0.0 {
            return 0.0;
        }
        self.total_coefficient().to_f64().unwrap_or(f64::NAN) * self.y * self.f
    }
}

pub fn region_volume(y: f64, window: &ShapeWindow, n: u32) -> Result<RegionVolume> {
    let ell = (1usize << n) - 1;
    if window.ell() != ell {
        return Err(Error::DimensionMismatch { expected: ell - 1, actual: window.bounds().len() });
    }
    if y.is_nan() || y < 0.0 {
        return Err(Error::InvalidWindow(format!("Y = {y} must be nonnegative")));
    }
    Ok(RegionVolume { y, f: shape_volume_f(window).value, c_ell: volume_constant(n)?, ell })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainTermConstant {
    pub n: u32,
    pub omega1: u64,
    pub c_ell: Rational,
    pub gl_order: u128,
    /// ω₁·c_ℓ·ℓ!/(4^ℓ·#GL_n(F_2)).
    pub rational_part: Rational,
    pub euler: EulerProduct,
    pub pmax: u64,
    /// C_ℓ with the truncated Euler product.
    pub value: f64,
    /// Interval for C_ℓ with the full Euler product.
    pub lower: f64,
    pub upper: f64,
}

impl MainTermConstant {
    pub fn uncertainty(&self) -> f64 {
        self.upper - self.lower
    }

    /// C_ℓ·F·X^{1/2^{n−1}}.
    pub fn predict(&self, x: f64, f: f64) -> f64 {
        if x <= 0.0 || f == 0.0 {
            return 0.0;
        }
        self.value * f * x.powf(1.0 / (1u64 << (self.n - 1)) as f64)
    }
}

pub fn main_term_constant(n: u32, pmax: u64) -> Result<MainTermConstant> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let ell = (1usize << n) - 1;
    let omega = omega1(n)?;
    let c_ell = volume_constant(n)?;
    let gl = gl_order(n);
    let rational_part = Rational::from_integer(BigInt::from(omega)) * &c_ell * factorial(ell)
        / Rational::from_integer(BigInt::from(4u32).pow(ell as u32) * BigInt::from(gl));
    let euler = euler_product(ell as u32, pmax)?;
    let r = rational_part.to_f64().unwrap_or(f64::NAN);
    let (lo, hi) = euler.limit_bounds();
    Ok(MainTermConstant {
        n,
        omega1: omega,
        c_ell,
        gl_order: gl,
        rational_part,
        value: r * euler.value(),
        lower: r * lo,
        upper: r * hi,
        euler,
        pmax,
    })
}

/// C_ℓ·F(R)·X^{1/2^{n−1}}.
pub fn predicted_count(x: f64, n: u32, window: &ShapeWindow, pmax: u64) -> Result<f64> {
    let c = main_term_constant(n, pmax)?;
    Ok(c.predict(x, shape_volume_f(window).value))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub x: f64,
    pub y: f64,
    pub empirical: u64,
    pub predicted: f64,
    pub ratio: f64,
    /// (count − predicted)/Y^{(ℓ−1)/ℓ}.
    pub normalized_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub n: u32,
    pub rows: Vec<ComparisonRow>,
    /// Least-squares slope of ratio against 1/log X; None with fewer than two
    /// distinct checkpoints.
    pub slope_vs_inverse_log: Option<f64>,
}

impl ComparisonReport {
    /// Whether |ratio − 1| is nonincreasing over the last `k` checkpoints.
    pub fn tail_distance_nonincreasing(&self, k: usize) -> bool {
        let start = self.rows.len().saturating_sub(k);
        let d: Vec<f64> = self.rows[start..].iter().map(|r| (r.ratio - 1.0).abs()).collect();
        d.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn last_ratio(&self) -> Option<f64> {
        self.rows.last().map(|r| r.ratio)
    }
}

pub fn compare_asymptotic(
    n: u32,
    empirical: &[(f64, u64)],
    predicted: impl Fn(f64) -> f64,
) -> Result<ComparisonReport> {
    if empirical.is_empty() {
        return Err(Error::InvalidWindow("no checkpoints".into()));
    }
    let ell = ((1u64 << n) - 1) as f64;
    let root = (1u64 << (n - 1)) as f64;
    let mut rows = Vec::with_capacity(empirical.len());
    for &(x, count) in empirical {
        let p = predicted(x);
        if p == 0.0 || !p.is_finite() {
            return Err(Error::ZeroPrediction(format!("X = {x} (got {p})")));
        }
        let y = x.powf(1.0 / root);
        rows.push(ComparisonRow {
            x,
            y,
            empirical: count,
            predicted: p,
            ratio: count as f64 / p,
            normalized_residual: (count as f64 - p) / y.powf((ell - 1.0) / ell),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.x > 1.0).map(|r| (1.0 / r.x.ln(), r.ratio)).collect();
    let slope = least_squares_slope(&pts);
    Ok(ComparisonReport { n, rows, slope_vs_inverse_log: slope })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}
