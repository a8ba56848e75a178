//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//! Runs with `harness = false` so every line is printed even on success.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use multiquad::basis::closed_form;
use multiquad::f2::dot;
use multiquad::param::{is_strongly_carefree, DEFAULT_NODE_BUDGET};
use multiquad::sample::{random_carefree_tuple, random_fields, rng};
use multiquad::sieve::{omega1_by_kernel, two_adic_density};
use multiquad::{
    classify_case, compare_asymptotic, count_lattice_points, discriminant, enumerate_fields,
    enumerate_lattice_points, euler_product, exponent_matrix, gram_full, gram_projected, integral_basis,
    local_count_bruteforce, local_count_formula, local_density, main_term_constant, omega1, orbit,
    radicand_lattice, radicands_from_tuple, shape_params, shape_volume_f, shape_volume_f_quadrature,
    sign_matrix, tuple_from_radicands, volume_constant, CarefreeTuple, GeneratingSet, LatticeQuery,
    Matrix, Permutation, RadicandVector, RamificationCase, Rational, ShapeWindow, TupleFilter,
};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

const CASES: [RamificationCase; 3] = [RamificationCase::One, RamificationCase::Two, RamificationCase::Three];

fn sign_matrix_identity() -> Outcome {
    for n in 1..=6u32 {
        let a = sign_matrix(n).map_err(e)?;
        let sq = a.matrix().mul(a.matrix());
        let expected = Matrix::from_fn(a.dim(), a.dim(), |i, j| if i == j { 1i64 << n } else { 0 });
        ensure(sq == expected, || format!("A_{n}^2 != 2^{n} I"))?;
    }
    let reference = vec![vec![1, 1, 1, 1], vec![1, -1, 1, -1], vec![1, 1, -1, -1], vec![1, -1, -1, 1]];
    ensure(sign_matrix(2).map_err(e)?.matrix().row_vecs() == reference, || "A_2 differs from the reference matrix".into())?;
    Ok("n = 1..6, A_2 matches the reference".into())
}

fn gens_field(gens: &[u64]) -> Result<RadicandVector, String> {
    radicand_lattice(&GeneratingSet::new(gens.to_vec())).map_err(e)
}

fn discriminant_oracle() -> Outcome {
    for (gens, want) in [(&[85u64, 221][..], 1_221_025u64), (&[2, 5], 1600), (&[2, 3], 2304)] {
        let rad = gens_field(gens)?;
        let case = classify_case(&rad);
        let d = discriminant(&rad, case);
        ensure(d == BigInt::from(want), || format!("{gens:?}: discriminant {d}, expected {want}"))?;
        let normalized = multiquad::normalize_generators(&rad).map_err(e)?;
        let det = gram_full(&integral_basis(&normalized, case).map_err(e)?).map_err(e)?.det();
        ensure(det == Rational::from_integer(BigInt::from(want)), || format!("{gens:?}: det {det}"))?;
    }
    let mut checked = 0;
    for n in [2u32, 3] {
        for case in CASES {
            for rad in random_fields(20 + n as u64, n, case, 200).map_err(e)? {
                ensure(classify_case(&rad) == case, || format!("{:?} sampled for case {case}", rad.radicands()))?;
                let det = gram_full(&integral_basis(&rad, case).map_err(e)?).map_err(e)?.det();
                let disc = Rational::from_integer(discriminant(&rad, case));
                ensure(det == disc, || format!("{:?}: det {det} vs {disc}", rad.radicands()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("3 examples, {checked} random fields"))
}

fn gram_equivalence() -> Outcome {
    let mut checked = 0;
    for n in [2u32, 3] {
        for case in CASES {
            for rad in random_fields(30 + n as u64, n, case, 50).map_err(e)? {
                let basis = integral_basis(&rad, case).map_err(e)?;
                let raw = multiquad::basis::gram_raw(&basis).map_err(e)?;
                let raw_cf: Matrix<Rational> = closed_form::raw(&rad, case).map_err(e)?;
                ensure(raw == raw_cf, || format!("raw Gram differs for {:?}", rad.radicands()))?;
                let proj = gram_projected(&basis).map_err(e)?;
                let proj_cf: Matrix<Rational> = closed_form::projected(&rad, case).map_err(e)?;
                ensure(proj == proj_cf, || format!("projected Gram differs for {:?}", rad.radicands()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} fields, raw and projected"))
}

fn local_counts() -> Outcome {
    let mut parts = Vec::new();
    for (p, ell) in [(3u64, 1u32), (3, 2), (3, 3), (5, 2), (7, 2), (3, 7)] {
        let f = local_count_formula(p, ell).map_err(e)?;
        let b = local_count_bruteforce(p, ell).map_err(e)?;
        ensure(f == BigInt::from(b), || format!("(p, l) = ({p}, {ell}): formula {f}, exhaustive {b}"))?;
        parts.push(format!("({p},{ell})={b}"));
    }
    let mu = local_density(3, 3).map_err(e)?.density;
    ensure(mu == Rational::new(16.into(), 27.into()), || format!("mu_3 = {mu}"))?;
    Ok(format!("{}, mu_3 = {mu}", parts.join(" ")))
}

/// Representative primes per odd class mod 4, with the case read off the
/// actual radicands.
fn omega1_by_radicands(n: u32) -> Result<u64, String> {
    let ell = (1usize << n) - 1;
    let primes = multiquad::arith::primes_up_to(400);
    let mut count = 0;
    for code in 0..(1u32 << ell) {
        let mut pools: [Vec<u64>; 2] = [1, 3].map(|r| primes.iter().copied().filter(|p| p % 4 == r).collect());
        let g: Vec<u64> = (0..ell).map(|i| pools[(code >> i & 1) as usize].pop().expect("enough primes")).collect();
        let rad = radicands_from_tuple(&CarefreeTuple::new(g).map_err(e)?).map_err(e)?;
        if classify_case(&rad) == RamificationCase::One {
            count += 1;
        }
    }
    Ok(count)
}

fn omega_one() -> Outcome {
    let w2 = omega1(2).map_err(e)?;
    ensure(w2 == 2, || format!("omega_1(2) = {w2}"))?;
    let w3 = omega1(3).map_err(e)?;
    let k3 = omega1_by_kernel(3).map_err(e)?;
    let r3 = omega1_by_radicands(3)?;
    ensure(w3 == k3 && k3 == r3, || format!("omega_1(3): classes {w3}, kernel {k3}, radicands {r3}"))?;
    ensure(omega1_by_radicands(2)? == 2, || "omega_1(2) from radicands".into())?;
    Ok(format!("omega_1(2) = 2, omega_1(3) = {w3} by three enumerators"))
}

fn volume_constant_check() -> Outcome {
    let dets: BTreeSet<BigInt> =
        Permutation::all(3).iter().map(|s| exponent_matrix(2, s).map(|m| m.det().abs())).collect::<Result<_, _>>().map_err(e)?;
    ensure(dets.len() == 1 && dets.contains(&BigInt::from(3)), || format!("|det C| over sigma: {dets:?}"))?;
    let c = volume_constant(2).map_err(e)?;
    ensure(c == Rational::new(1.into(), 3.into()), || format!("c_3 = {c}"))?;
    Ok("|det C| = 3 for all 6 sigma, c_3 = 1/3".into())
}

fn volume_function() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r2: f64 = r.random_range(1.0..5.0);
        let r3: f64 = r2 * r.random_range(1.0f64..4.0).exp();
        let w: ShapeWindow = format!("{r2},{r3}").parse().map_err(e)?;
        let [a, b] = w.to_f64()[..] else { return Err("window length".into()) };
        let exact = 0.5 * (b / a).ln().powi(2);
        let closed = shape_volume_f(&w).value;
        let quad = shape_volume_f_quadrature(&w, 1e-12).map_err(e)?.value;
        let rel = ((quad - exact) / exact).abs().max(((closed - exact) / exact).abs());
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("window ({r2}, {r3}): closed {closed}, quadrature {quad}, exact {exact}"))?;
    }
    let w: ShapeWindow = format!("1,{}", std::f64::consts::E).parse().map_err(e)?;
    let f = shape_volume_f(&w).value;
    ensure((f - 0.5).abs() <= 1e-12, || format!("F(1, e) = {f}"))?;
    Ok(format!("20 windows, worst relative error {worst:.2e}, F(1, e) = {f}"))
}

/// Window as (R2, R3) with R3 = None for ∞, both as p/q.
struct OracleWindow {
    text: &'static str,
    r2: (u64, u64),
    r3: Option<(u64, u64)>,
}

/// Triples g ≥ 1 with g1 g2 g3 < y whose sorted radicands (a c, b c, a b)
/// satisfy R2 ≤ D2/D1 and D3/D1 ≤ R3.
fn naive_points(y: u64, w: &OracleWindow) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for a in 1..y {
        for b in 1..y {
            if a * b >= y {
                break;
            }
            for c in 1..y {
                if a * b * c >= y {
                    break;
                }
                let mut d = [a * c, b * c, a * b];
                d.sort_unstable();
                let lower = d[1] as u128 * w.r2.1 as u128 >= w.r2.0 as u128 * d[0] as u128;
                let upper = w.r3.is_none_or(|(p, q)| d[2] as u128 * q as u128 <= p as u128 * d[0] as u128);
                if lower && upper {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

fn small_enumeration() -> Outcome {
    let windows = [
        OracleWindow { text: "1,inf", r2: (1, 1), r3: None },
        OracleWindow { text: "1,10", r2: (1, 1), r3: Some((10, 1)) },
        OracleWindow { text: "2,3", r2: (2, 1), r3: Some((3, 1)) },
        OracleWindow { text: "5/3,5/2", r2: (5, 3), r3: Some((5, 2)) },
        OracleWindow { text: "1,1", r2: (1, 1), r3: Some((1, 1)) },
    ];
    let mut compared = 0usize;
    for w in &windows {
        let window: ShapeWindow = w.text.parse().map_err(e)?;
        let mut all = naive_points(1000, w);
        all.sort_by_key(|g| g.iter().product::<u64>());
        for y in 1..=1000u64 {
            let mut want: Vec<Vec<u64>> = all.iter().take_while(|g| g.iter().product::<u64>() < y).cloned().collect();
            want.sort();
            let q = LatticeQuery::new(2, y, window.clone()).map_err(e)?.with_filter(TupleFilter::ALL);
            let (pts, _) = enumerate_lattice_points(&q).map_err(e)?;
            let mut got: Vec<Vec<u64>> = pts.iter().map(|t| t.g().to_vec()).collect();
            got.sort();
            ensure(got == want, || format!("window {} Y = {y}: {} points vs {} from the oracle", w.text, got.len(), want.len()))?;
            compared += got.len();
        }
    }
    Ok(format!("5 windows, Y = 1..=1000, {compared} points compared"))
}

fn carefree_density() -> Outcome {
    let y = 1_000_000u64;
    let window: ShapeWindow = "1,10".parse().map_err(e)?;
    let q = LatticeQuery::new(2, y, window.clone()).map_err(e)?.with_filter(TupleFilter::NONDEGENERATE);
    let count = count_lattice_points(&q).map_err(e)?.total;
    let f = shape_volume_f(&window).value;
    let c3 = volume_constant(2).map_err(e)?.to_f64().ok_or("c_3")?;
    let volume = c3 * 6.0 * y as f64 * f;
    let ratio = count as f64 / volume;
    let euler = euler_product(3, 100_000).map_err(e)?;
    let two = two_adic_density(3).to_f64().ok_or("2-adic density")?;
    let (lo, hi) = euler.limit_bounds();
    let (lo, hi) = (two * lo, two * hi);
    let worst = ((ratio / lo) - 1.0).abs().max(((ratio / hi) - 1.0).abs());
    let detail = format!("#R = {count}, ratio {ratio:.6}, product in [{lo:.9}, {hi:.9}], deviation {:.2}%", 100.0 * worst);
    ensure(worst <= 0.05, || detail.clone())?;
    Ok(detail)
}

fn main_term_trend() -> Outcome {
    let window: ShapeWindow = "1,10".parse().map_err(e)?;
    let checkpoints: Vec<u128> = (6..=10).map(|k| 10u128.pow(k)).collect();
    let max = *checkpoints.last().expect("nonempty");
    let fields = enumerate_fields(2, max, Some(RamificationCase::One), &window, DEFAULT_NODE_BUDGET).map_err(e)?;
    let series: Vec<(f64, u64)> = checkpoints
        .iter()
        .map(|&x| {
            let bound = BigInt::from(x);
            (x as f64, fields.partition_point(|r| r.discriminant <= bound) as u64)
        })
        .collect();
    let c = main_term_constant(2, 100_000).map_err(e)?;
    let f = shape_volume_f(&window).value;
    let report = compare_asymptotic(2, &series, |x| c.predict(x, f)).map_err(e)?;
    let ratios: Vec<String> = report.rows.iter().map(|r| format!("{:.4}", r.ratio)).collect();
    let last = report.last_ratio().ok_or("no rows")?;
    let detail = format!("ratios [{}]", ratios.join(", "));
    ensure((0.85..=1.15).contains(&last), || format!("{detail}: last ratio outside [0.85, 1.15]"))?;
    ensure(report.tail_distance_nonincreasing(3), || format!("{detail}: distance from 1 increases at the tail"))?;
    Ok(detail)
}

fn orbits() -> Outcome {
    let mut r = rng(11);
    for (n, size) in [(2u32, 6usize), (3, 168)] {
        for _ in 0..50 {
            let t = random_carefree_tuple(&mut r, n, 80, 5_000, true).map_err(e)?;
            let o = orbit(&t).map_err(e)?;
            ensure(o.len() == size, || format!("orbit of {t} has {} members", o.len()))?;
            let invariants = |u: &CarefreeTuple| -> Result<_, String> {
                let rad = radicands_from_tuple(u).map_err(e)?;
                let case = classify_case(&rad);
                let shape = shape_params(&rad).map_err(e)?.lambdas().to_vec();
                Ok((case, discriminant(&rad, case), shape))
            };
            let base = invariants(&t)?;
            for u in &o {
                ensure(invariants(u)? == base, || format!("{u} and {t} differ"))?;
            }
        }
    }
    Ok("50 tuples each for n = 2, 3; orbit sizes 6 and 168".into())
}

fn round_trip() -> Outcome {
    let mut r = rng(12);
    for n in [2u32, 3] {
        let ell = (1usize << n) - 1;
        for k in 0..500 {
            let t = random_carefree_tuple(&mut r, n, 60, 10_000, k % 2 == 0).map_err(e)?;
            ensure(is_strongly_carefree(&t), || format!("{t} is not strongly carefree"))?;
            let rad = radicands_from_tuple(&t).map_err(e)?;
            let expected: Vec<u64> = std::iter::once(1)
                .chain((1..=ell).map(|j| (0..ell).filter(|&i| dot(i + 1, j)).map(|i| t.g()[i]).product()))
                .collect();
            ensure(rad.radicands() == expected, || format!("{t}: radicands {:?}", rad.radicands()))?;
            let back = tuple_from_radicands(&rad).map_err(e)?;
            ensure(back == t, || format!("{t} came back as {back}"))?;
        }
    }
    Ok("500 tuples each for n = 2, 3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 sign matrix identity", Duration::from_secs(1), sign_matrix_identity),
        ("2 discriminant oracle", Duration::from_secs(30), discriminant_oracle),
        ("3 gram equivalence", Duration::from_secs(60), gram_equivalence),
        ("4 local counts", Duration::from_secs(300), local_counts),
        ("5 omega_1", Duration::from_secs(60), omega_one),
        ("6 volume constant", Duration::from_secs(1), volume_constant_check),
        ("7 volume function F", Duration::from_secs(10), volume_function),
        ("8 small-Y enumeration", Duration::from_secs(120), small_enumeration),
        ("9 carefree density", Duration::from_secs(600), carefree_density),
        ("10 main term trend", Duration::from_secs(1200), main_term_trend),
        ("11 orbits", Duration::from_secs(120), orbits),
        ("12 round trip", Duration::from_secs(10), round_trip),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit:?} limit")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!("{} criterion {name}: {detail} ({:.2?})", if ok { "PASS" } else { "FAIL" }, elapsed);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
