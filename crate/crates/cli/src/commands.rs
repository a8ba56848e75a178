use std::path::PathBuf;

use multiquad::analytic::{main_term_constant, volume_polynomial};
use multiquad::basis::normalize_generators;
use multiquad::param::{enumerate_fields, tuple_from_radicands, FieldRecord, DEFAULT_NODE_BUDGET};
use multiquad::report::{
    comparison_csv, decimal_cell, density_csv, euler_csv, fields_csv, rational_matrix_csv, write_atomic, DensityRow,
};
use multiquad::sieve::{local_count_bruteforce, local_count_formula, local_density};
use multiquad::verify::{run_suite, Fault, VerifyConfig};
use multiquad::{
    classify_case, compare_asymptotic, discriminant, euler_product, gram_full, gram_projected, integral_basis,
    radicand_lattice, shape_params, shape_volume_f, shape_volume_f_displayed, shape_volume_f_quadrature,
    GeneratingSet, RadicandVector, RamificationCase, ShapeWindow,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::{DensityArgs, ExperimentArgs, FieldsArgs, GramArgs, VerifyArgs, VolumeArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Check(String),
}

impl From<multiquad::Error> for CliError {
    fn from(e: multiquad::Error) -> Self {
        match e {
            multiquad::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(write_atomic(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field_from_gens(s: &str) -> Result<RadicandVector> {
    let gens: GeneratingSet = s.parse()?;
    let rad = radicand_lattice(&gens)?;
    if gens.gens().iter().any(|&a| a <= 1) || !rad.is_nondegenerate() {
        return Err(CliError::Invalid(format!("{s} does not generate a field of degree 2^{}", gens.n())));
    }
    Ok(rad)
}

fn window_for(s: &Option<String>, ell: usize) -> Result<ShapeWindow> {
    let w = match s {
        Some(s) => s.parse::<ShapeWindow>()?,
        None => ShapeWindow::vacuous(ell),
    };
    if w.ell() != ell {
        return Err(CliError::Invalid(format!("window needs {} bounds", ell - 1)));
    }
    Ok(w)
}

pub fn fields(a: FieldsArgs) -> Result<()> {
    if let Some(g) = &a.gens {
        let rad = field_from_gens(g)?;
        let case = classify_case(&rad);
        let record = FieldRecord {
            tuple: tuple_from_radicands(&rad)?,
            discriminant: discriminant(&rad, case),
            shape: shape_params(&rad)?,
            case,
            radicands: rad,
        };
        let n = record.radicands.n();
        return emit(&a.out, &fields_csv(n, &[record])?);
    }
    let n = a.n.ok_or_else(|| CliError::Invalid("--n or --gens is required".into()))?;
    let max_disc = a.max_disc.ok_or_else(|| CliError::Invalid("--max-disc is required".into()))?;
    if n < 2 {
        return Err(CliError::Invalid("n must be at least 2".into()));
    }
    let case = a.case.map(RamificationCase::from_label).transpose()?;
    let window = window_for(&a.window, (1usize << n) - 1)?;
    let records = enumerate_fields(n, max_disc, case, &window, a.budget.unwrap_or(DEFAULT_NODE_BUDGET))?;
    emit(&a.out, &fields_csv(n, &records)?)
}

pub fn density(a: DensityArgs) -> Result<()> {
    if a.euler {
        let e = euler_product(a.ell, a.pmax.unwrap_or(1000))?;
        return emit(&a.out, &euler_csv(&[e])?);
    }
    let primes: Vec<u64> = match (a.p, a.pmax) {
        (Some(p), _) => vec![p],
        (None, Some(pmax)) => multiquad::arith::primes_up_to(pmax).into_iter().filter(|&p| p > 2).collect(),
        (None, None) => return Err(CliError::Invalid("give --p or --pmax".into())),
    };
    let mut rows = Vec::with_capacity(primes.len());
    let mut mismatches = Vec::new();
    for p in primes {
        let d = local_density(p, a.ell)?;
        let (formula, brute) = if p == 2 {
            // per class modulo 4; the exhaustive count covers all classes
            (d.count.to_string(), None)
        } else {
            let f = local_count_formula(p, a.ell)?;
            let b = if a.bruteforce { Some(local_count_bruteforce(p, a.ell)?) } else { None };
            if b.is_some_and(|b| BigInt::from(b) != f) {
                mismatches.push(p);
            }
            (f.to_string(), b)
        };
        rows.push(DensityRow { p, ell: a.ell, count_formula: formula, count_bruteforce: brute, mu: d.density });
    }
    if !mismatches.is_empty() {
        return Err(CliError::Check(format!("formula and exhaustive counts differ at p = {mismatches:?}")));
    }
    emit(&a.out, &density_csv(&rows, a.bruteforce)?)
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let fault = match a.fault.as_deref() {
        None => None,
        Some("flip-sign") => Some(Fault::FlipSignEntry),
        Some(other) => return Err(CliError::Invalid(format!("unknown fault {other:?}"))),
    };
    let cfg = VerifyConfig { max_n: a.n, seed: a.seed, fields_per_case: a.fields_per_case, fault };
    let results = run_suite(&cfg);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} invariant(s) failed")));
    }
    Ok(())
}

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig::resolve(&a)?;
    let max_x = *cfg.checkpoints.last().expect("nonempty");
    let records = enumerate_fields(cfg.n, max_x, None, &cfg.window, cfg.budget)?;
    let mut discs: Vec<BigInt> =
        records.into_iter().filter(|r| cfg.cases.contains(&r.case)).map(|r| r.discriminant).collect();
    discs.sort();
    let series: Vec<(f64, u64)> = cfg
        .checkpoints
        .iter()
        .map(|&x| {
            let bound = BigInt::from(x);
            (x as f64, discs.partition_point(|d| *d <= bound) as u64)
        })
        .collect();
    let f = shape_volume_f(&cfg.window).value;
    if !f.is_finite() {
        return Err(CliError::Invalid("predictions need a bounded window (finite R_l)".into()));
    }
    let c = main_term_constant(cfg.n, cfg.pmax)?;
    if f == 0.0 {
        // empty region: nothing to compare, every prediction is zero
        let mut text = String::from("X,Y,empirical,predicted,ratio,normalized_residual\n");
        for (x, count) in &series {
            let y = x.powf(1.0 / (1u64 << (cfg.n - 1)) as f64);
            text.push_str(&format!("{},{},{count},0,,\n", decimal_cell(*x), decimal_cell(y)));
        }
        return emit(&cfg.out, &text);
    }
    let report = compare_asymptotic(cfg.n, &series, |x| c.predict(x, f))?;
    eprintln!(
        "C = {} in [{}, {}], F = {}, slope vs 1/log X = {}",
        decimal_cell(c.value),
        decimal_cell(c.lower),
        decimal_cell(c.upper),
        decimal_cell(f),
        report.slope_vs_inverse_log.map(decimal_cell).unwrap_or_else(|| "n/a".into())
    );
    emit(&cfg.out, &comparison_csv(&report)?)
}

pub fn volume(a: VolumeArgs) -> Result<()> {
    let w: ShapeWindow = a.window.parse()?;
    let mut text = String::from("quantity,value\n");
    text.push_str(&format!("F,{}\n", decimal_cell(shape_volume_f(&w).value)));
    text.push_str(&format!("F_displayed,{}\n", decimal_cell(shape_volume_f_displayed(&w).value)));
    if let Some(tol) = a.quadrature {
        text.push_str(&format!("F_quadrature,{}\n", decimal_cell(shape_volume_f_quadrature(&w, tol)?.value)));
    }
    if a.symbolic {
        text.push_str(&format!("F_polynomial,{}\n", volume_polynomial(w.ell(), false)));
        text.push_str(&format!("F_displayed_polynomial,{}\n", volume_polynomial(w.ell(), true)));
    }
    print!("{text}");
    Ok(())
}

pub fn gram(a: GramArgs) -> Result<()> {
    let rad = normalize_generators(&field_from_gens(&a.gens)?)?;
    let case = classify_case(&rad);
    let basis = integral_basis(&rad, case)?;
    let m = if a.projected { gram_projected(&basis)? } else { gram_full(&basis)? };
    if !a.projected {
        let det = m.det();
        eprintln!("case {case}, det = {} ({})", det, decimal_cell(det.to_f64().unwrap_or(f64::NAN)));
    }
    emit(&a.out, &rational_matrix_csv(&m))
}
