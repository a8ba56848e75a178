//! CSV serialization: header row, comma separated, exact rationals as "p/q",
//! decimals to 15 significant digits.

use crate::analytic::ComparisonReport;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::param::FieldRecord;
use crate::sieve::EulerProduct;
use crate::Rational;

pub fn rational_cell(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// 15 significant digits; plain notation for moderate magnitudes.
pub fn decimal_cell(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    }
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header).map_err(io)?;
        Ok(Table { w })
    }

    fn row(&mut self, cells: &[String]) -> Result<()> {
        self.w.write_record(cells).map_err(io)
    }

    fn finish(self) -> Result<String> {
        let bytes = self.w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn fields_csv(n: u32, records: &[FieldRecord]) -> Result<String> {
    let mut t = Table::new(&["n", "g", "D", "case", "r", "discriminant", "lambda_exact", "lambda_decimal"])?;
    for r in records {
        let lambdas: Vec<String> = r.shape.lambdas().iter().map(rational_cell).collect();
        let decimals: Vec<String> = r.shape.decimals().into_iter().map(decimal_cell).collect();
        t.row(&[
            n.to_string(),
            joined(r.tuple.g()),
            joined(r.radicands.nontrivial()),
            r.case.to_string(),
            r.case.r().to_string(),
            r.discriminant.to_string(),
            lambdas.join(";"),
            decimals.join(";"),
        ])?;
    }
    t.finish()
}

pub struct DensityRow {
    pub p: u64,
    pub ell: u32,
    pub count_formula: String,
    pub count_bruteforce: Option<u64>,
    pub mu: Rational,
}

pub fn density_csv(rows: &[DensityRow], with_bruteforce: bool) -> Result<String> {
    let mut header = vec!["p", "ell", "count_formula"];
    if with_bruteforce {
        header.push("count_bruteforce");
    }
    header.extend(["mu_p_exact", "mu_p_decimal"]);
    let mut t = Table::new(&header)?;
    for r in rows {
        let mut cells = vec![r.p.to_string(), r.ell.to_string(), r.count_formula.clone()];
        if with_bruteforce {
            cells.push(r.count_bruteforce.map(|c| c.to_string()).unwrap_or_default());
        }
        cells.push(rational_cell(&r.mu));
        cells.push(decimal_cell(num_traits::ToPrimitive::to_f64(&r.mu).unwrap_or(f64::NAN)));
        t.row(&cells)?;
    }
    t.finish()
}

pub fn euler_csv(products: &[EulerProduct]) -> Result<String> {
    let mut t = Table::new(&["ell", "pmax", "primes", "value", "value_digits", "tail_bound", "limit_lower", "limit_upper"])?;
    for e in products {
        let (lo, hi) = e.limit_bounds();
        t.row(&[
            e.ell.to_string(),
            e.pmax.to_string(),
            e.primes.to_string(),
            decimal_cell(e.value()),
            e.decimal(30),
            decimal_cell(e.tail),
            decimal_cell(lo),
            decimal_cell(hi),
        ])?;
    }
    t.finish()
}

pub fn comparison_csv(report: &ComparisonReport) -> Result<String> {
    let mut t = Table::new(&["X", "Y", "empirical", "predicted", "ratio", "normalized_residual"])?;
    for r in &report.rows {
        t.row(&[
            decimal_cell(r.x),
            decimal_cell(r.y),
            r.empirical.to_string(),
            decimal_cell(r.predicted),
            decimal_cell(r.ratio),
            decimal_cell(r.normalized_residual),
        ])?;
    }
    t.finish()
}

/// Rows of p/q cells, no header.
pub fn rational_matrix_csv(m: &Matrix<Rational>) -> String {
    m.row_vecs()
        .iter()
        .map(|row| row.iter().map(rational_cell).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// Rows of signed integers, no header.
pub fn int_matrix_csv(m: &Matrix<i64>) -> String {
    m.row_vecs()
        .iter()
        .map(|row| row.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// Writes via a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    #[test]
    fn decimals() {
        assert_eq!(decimal_cell(0.5), "0.5");
        assert_eq!(decimal_cell(1.0 / 3.0), "0.333333333333333");
        assert_eq!(decimal_cell(17.0 / 5.0), "3.4");
        assert_eq!(decimal_cell(100000.0), "100000");
        assert_eq!(decimal_cell(1e20), "1.00000000000000e20");
        assert_eq!(decimal_cell(f64::INFINITY), "inf");
    }

    #[test]
    fn rationals() {
        assert_eq!(rational_cell(&rational(17, 13)), "17/13");
        assert_eq!(rational_cell(&rational(4, 2)), "2/1");
    }

    #[test]
    fn empty_fields_csv_has_header() {
        assert_eq!(fields_csv(2, &[]).unwrap(), "n,g,D,case,r,discriminant,lambda_exact,lambda_decimal\n");
    }
}
