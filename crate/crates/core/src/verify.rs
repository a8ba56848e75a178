//! Invariant suite run by `multiquad verify`: every structural identity the
//! library relies on, checked on fixed and seeded random inputs.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::analytic::{shape_volume_f, shape_volume_f_quadrature};
use crate::basis::{closed_form, gram_full, gram_projected, gram_raw, integral_basis, shape_params, Bound, ShapeWindow};
use crate::f2::{exponent_matrix, ordered_bases, sign_matrix, Permutation, SignMatrix};
use crate::field::{classify_case, discriminant, RamificationCase};
use crate::matrix::Matrix;
use crate::param::{
    canonical_form, enumerate_lattice_points, orbit, radicands_from_tuple, tuple_from_radicands, LatticeQuery,
    TupleFilter,
};
use crate::sample::{random_carefree_tuple, random_fields, rng};
use crate::sieve::{local_count_bruteforce, local_count_formula, omega1, omega1_by_kernel};
use crate::{Element, Rational};

/// Deliberate corruption used to check that the suite notices failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    FlipSignEntry,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub max_n: u32,
    pub seed: u64,
    pub fields_per_case: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_n: 3, seed: 0, fields_per_case: 10, fault: None }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for InvariantResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn outcome(name: &'static str, r: std::result::Result<String, String>) -> InvariantResult {
    match r {
        Ok(detail) => InvariantResult { name, passed: true, detail },
        Err(detail) => InvariantResult { name, passed: false, detail },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cases_for(n: u32) -> Vec<RamificationCase> {
    let mut c = vec![RamificationCase::One, RamificationCase::Two];
    if n >= 2 {
        c.push(RamificationCase::Three);
    }
    c
}

/// A_n² = 2ⁿ I for n ≤ 6.
pub fn check_sign_matrices(fault: Option<Fault>) -> std::result::Result<String, String> {
    for n in 1..=6 {
        let mut a: SignMatrix = sign_matrix(n).map_err(|e| e.to_string())?;
        if fault == Some(Fault::FlipSignEntry) && n == 2 {
            a = a.with_flipped_entry(1, 2);
        }
        let m = a.matrix();
        let sq = m.mul(m);
        let expect = Matrix::identity(m.rows()).scale(&(1i64 << n));
        ensure(sq == expect, || format!("A_{n}^2 != 2^{n} I"))?;
    }
    Ok("n = 1..6".into())
}

/// |det C| is the same for every σ: all 6 for n = 2, a sample for n = 3.
pub fn check_exponent_determinants() -> std::result::Result<String, String> {
    let d2: Vec<BigInt> = Permutation::all(3)
        .iter()
        .map(|s| exponent_matrix(2, s).map(|e| e.det().abs()))
        .collect::<crate::Result<_>>()
        .map_err(|e| e.to_string())?;
    ensure(d2.iter().all(|d| *d == BigInt::from(3)), || format!("n=2 determinants {d2:?}"))?;
    let perms = Permutation::all(7);
    let d3: Vec<BigInt> = perms
        .iter()
        .step_by(97)
        .map(|s| exponent_matrix(3, s).map(|e| e.det().abs()))
        .collect::<crate::Result<_>>()
        .map_err(|e| e.to_string())?;
    ensure(d3.iter().all(|d| *d == d3[0]), || "n=3 determinant depends on sigma".into())?;
    Ok(format!("|det| = 3 (n=2), {} (n=3, {} orderings)", d3[0], d3.len()))
}

pub fn check_discriminants(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut checked = 0;
    for n in 1..=cfg.max_n.min(3) {
        for case in cases_for(n) {
            for rad in random_fields(cfg.seed, n, case, cfg.fields_per_case).map_err(|e| e.to_string())? {
                let basis = integral_basis(&rad, case).map_err(|e| e.to_string())?;
                let det = gram_full(&basis).map_err(|e| e.to_string())?.det();
                let disc = Rational::from_integer(discriminant(&rad, case));
                ensure(det == disc, || format!("{:?}: det {det} vs {disc}", rad.radicands()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} fields"))
}

pub fn check_closed_form_grams(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut checked = 0;
    for n in 1..=cfg.max_n.min(3) {
        for case in cases_for(n) {
            for rad in random_fields(cfg.seed + 1, n, case, cfg.fields_per_case).map_err(|e| e.to_string())? {
                let basis = integral_basis(&rad, case).map_err(|e| e.to_string())?;
                let raw = gram_raw(&basis).map_err(|e| e.to_string())?;
                let raw_cf: Matrix<Rational> = closed_form::raw(&rad, case).map_err(|e| e.to_string())?;
                ensure(raw == raw_cf, || format!("raw Gram differs for {:?}", rad.radicands()))?;
                let proj = gram_projected(&basis).map_err(|e| e.to_string())?;
                let proj_cf: Matrix<Rational> = closed_form::projected(&rad, case).map_err(|e| e.to_string())?;
                ensure(proj == proj_cf, || format!("projected Gram differs for {:?}", rad.radicands()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} fields"))
}

/// Solves x·B = v for x, with B square and invertible.
fn solve_row(b: &Matrix<Rational>, v: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.rows();
    // augmented system Bᵀ x = v
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|k| b[(k, i)].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= pv * &f;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// The basis spans a ring: every product b_i b_j has integer coordinates.
pub fn check_multiplication_closure(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut checked = 0;
    for n in 1..=cfg.max_n.min(3) {
        for case in cases_for(n) {
            for rad in random_fields(cfg.seed + 2, n, case, cfg.fields_per_case.min(5)).map_err(|e| e.to_string())? {
                let basis = integral_basis(&rad, case).map_err(|e| e.to_string())?;
                let elems: &[Element] = basis.elements();
                let b = Matrix::from_rows(elems.iter().map(|e| e.coeffs().to_vec()).collect());
                for x in elems {
                    for y in elems {
                        let prod = x.multiply(y).map_err(|e| e.to_string())?;
                        let coords = solve_row(&b, prod.coeffs()).ok_or("basis is singular")?;
                        ensure(coords.iter().all(|c| c.is_integer()), || {
                            format!("{:?}: product leaves the lattice", rad.radicands())
                        })?;
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} fields"))
}

pub fn check_round_trip(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut r = rng(cfg.seed + 3);
    let mut checked = 0;
    for n in 2..=cfg.max_n.clamp(2, 3) {
        for _ in 0..100 {
            let t = random_carefree_tuple(&mut r, n, 300, 50_000, false).map_err(|e| e.to_string())?;
            let rad = radicands_from_tuple(&t).map_err(|e| e.to_string())?;
            let back = tuple_from_radicands(&rad).map_err(|e| e.to_string())?;
            ensure(back == t, || format!("{t} came back as {back}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} tuples"))
}

pub fn check_orbits(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut r = rng(cfg.seed + 4);
    let mut checked = 0;
    for n in 2..=cfg.max_n.clamp(2, 3) {
        let size = ordered_bases(n).len();
        for _ in 0..10 {
            let t = random_carefree_tuple(&mut r, n, 60, 1_000, true).map_err(|e| e.to_string())?;
            let o = orbit(&t).map_err(|e| e.to_string())?;
            ensure(o.len() == size, || format!("orbit of {t} has {} members", o.len()))?;
            let rad = radicands_from_tuple(&t).map_err(|e| e.to_string())?;
            let (case, disc, shape) =
                (classify_case(&rad), discriminant(&rad, classify_case(&rad)), shape_params(&rad).ok().map(|s| s.lambdas().to_vec()));
            let canon = canonical_form(&t).map_err(|e| e.to_string())?;
            for u in &o {
                let rad_u = radicands_from_tuple(u).map_err(|e| e.to_string())?;
                let cu = classify_case(&rad_u);
                ensure(cu == case && discriminant(&rad_u, cu) == disc, || format!("{u} differs from {t}"))?;
                ensure(shape_params(&rad_u).ok().map(|s| s.lambdas().to_vec()) == shape, || format!("shape of {u}"))?;
                ensure(canonical_form(u).map_err(|e| e.to_string())? == canon, || format!("canonical form of {u}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} orbits"))
}

pub fn check_local_counts() -> std::result::Result<String, String> {
    for (p, ell) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let f = local_count_formula(p, ell).map_err(|e| e.to_string())?;
        let b = local_count_bruteforce(p, ell).map_err(|e| e.to_string())?;
        ensure(f == BigInt::from(b), || format!("p={p} ell={ell}: {f} vs {b}"))?;
    }
    Ok("7 (p, ell) pairs".into())
}

pub fn check_omega(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut parts = Vec::new();
    for n in 1..=cfg.max_n.min(3) {
        let a = omega1(n).map_err(|e| e.to_string())?;
        let b = omega1_by_kernel(n).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("n={n}: {a} vs {b}"))?;
        parts.push(format!("n={n}: {a}"));
    }
    Ok(parts.join(", "))
}

pub fn check_volume(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    let mut r = rng(cfg.seed + 5);
    use rand::Rng;
    for ell in [3usize, 7] {
        for _ in 0..5 {
            let mut logs: Vec<f64> = (0..ell - 1).map(|_| r.random_range(0.0..3.0)).collect();
            logs.sort_by(f64::total_cmp);
            let bounds = logs.iter().map(|l| Bound::Finite(Rational::from_float(l.exp()).unwrap_or_else(Rational::one))).collect();
            let w = ShapeWindow::new(bounds).map_err(|e| e.to_string())?;
            let a = shape_volume_f(&w).value;
            let b = shape_volume_f_quadrature(&w, 1e-11).map_err(|e| e.to_string())?.value;
            ensure((a - b).abs() <= 1e-9 * a.abs().max(1e-300), || format!("{w}: {a} vs {b}"))?;
        }
    }
    Ok("10 windows".into())
}

pub fn check_small_enumeration() -> std::result::Result<String, String> {
    let w: ShapeWindow = "1,5".parse().map_err(|e: crate::Error| e.to_string())?;
    let q = LatticeQuery::new(2, 400, w.clone()).map_err(|e| e.to_string())?.with_filter(TupleFilter::ALL);
    let (pts, _) = enumerate_lattice_points(&q).map_err(|e| e.to_string())?;
    let mut naive = Vec::new();
    for a in 1..400u64 {
        for b in 1..400 / a + 1 {
            for c in 1..400 / (a * b) + 1 {
                if a * b * c >= 400 {
                    continue;
                }
                let mut d = [a * c, b * c, a * b];
                d.sort_unstable();
                if d[2] <= 5 * d[0] {
                    naive.push(vec![a, b, c]);
                }
            }
        }
    }
    naive.sort();
    let got: Vec<Vec<u64>> = pts.iter().map(|t| t.g().to_vec()).collect();
    ensure(got == naive, || format!("{} points vs {} naive", got.len(), naive.len()))?;
    Ok(format!("{} points", got.len()))
}

pub fn check_galois_traces(cfg: &VerifyConfig) -> std::result::Result<String, String> {
    for n in 1..=cfg.max_n.min(3) {
        for rad in random_fields(cfg.seed + 6, n, RamificationCase::One, 3).map_err(|e| e.to_string())? {
            let basis = integral_basis(&rad, RamificationCase::One).map_err(|e| e.to_string())?;
            for x in basis.elements() {
                ensure(x.trace() == x.trace_via_conjugates(), || "trace mismatch".into())?;
            }
        }
    }
    Ok("trace = sum of conjugates".into())
}

pub fn run_suite(cfg: &VerifyConfig) -> Vec<InvariantResult> {
    vec![
        outcome("sign_matrix_square", check_sign_matrices(cfg.fault)),
        outcome("exponent_determinant", check_exponent_determinants()),
        outcome("discriminant_equals_gram_det", check_discriminants(cfg)),
        outcome("closed_form_gram", check_closed_form_grams(cfg)),
        outcome("multiplication_closure", check_multiplication_closure(cfg)),
        outcome("tuple_round_trip", check_round_trip(cfg)),
        outcome("orbit_invariants", check_orbits(cfg)),
        outcome("local_counts", check_local_counts()),
        outcome("omega1_enumerators", check_omega(cfg)),
        outcome("volume_closed_form", check_volume(cfg)),
        outcome("small_enumeration", check_small_enumeration()),
        outcome("galois_traces", check_galois_traces(cfg)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let results = run_suite(&VerifyConfig { fields_per_case: 3, ..VerifyConfig::default() });
        for r in &results {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn fault_is_detected() {
        assert!(check_sign_matrices(Some(Fault::FlipSignEntry)).is_err());
    }
}
