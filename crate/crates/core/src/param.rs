//! The dictionary between radicands D_j and carefree tuples g_i, the
//! GL_n(F_2) action on tuples, and enumeration of lattice points in the
//! counting region.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arith::{gcd, integer_root, is_squarefree, SquarefreeTable, DEFAULT_FACTOR_BOUND};
use crate::basis::{shape_params, Bound, ShapeParams, ShapeWindow};
use crate::error::{Error, Result};
use crate::f2::{apply_transpose, dot, ordered_bases, Permutation};
use crate::field::{classify_case, discriminant, RadicandVector, RamificationCase};

pub const DEFAULT_NODE_BUDGET: u128 = 1_000_000_000;

/// Largest table of squarefree flags built for an enumeration.
const SQUAREFREE_TABLE_CAP: u64 = 50_000_000;

/// Relative slack on floating-point pruning bounds, so pruning never cuts a
/// point that the exact leaf test would accept.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CarefreeTuple {
    g: Vec<u64>,
}

fn n_for_len(len: usize) -> Result<u32> {
    let size = len + 1;
    if len == 0 || !size.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: size.next_power_of_two() - 1, actual: len });
    }
    Ok(size.trailing_zeros())
}

impl CarefreeTuple {
    /// Any positive tuple of length 2^n − 1; the predicates are separate.
    pub fn new(g: Vec<u64>) -> Result<Self> {
        n_for_len(g.len())?;
        if g.contains(&0) {
            return Err(Error::DegenerateTuple);
        }
        Ok(CarefreeTuple { g })
    }

    pub fn g(&self) -> &[u64] {
        &self.g
    }

    pub fn n(&self) -> u32 {
        (self.g.len() + 1).trailing_zeros()
    }

    pub fn ell(&self) -> usize {
        self.g.len()
    }

    pub fn product(&self) -> BigInt {
        self.g.iter().map(|&x| BigInt::from(x)).product()
    }
}

impl fmt::Display for CarefreeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.g.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Squarefree entries, pairwise coprime.
pub fn is_strongly_carefree(t: &CarefreeTuple) -> bool {
    let g = t.g();
    g.iter().all(|&x| is_squarefree(x, DEFAULT_FACTOR_BOUND).unwrap_or(false))
        && (0..g.len()).all(|i| (i + 1..g.len()).all(|j| gcd(g[i], g[j]) == 1))
}

/// Strongly carefree with every entry above one.
pub fn is_nondegenerate(t: &CarefreeTuple) -> bool {
    t.g().iter().all(|&x| x > 1) && is_strongly_carefree(t)
}

/// D_j = ∏_{i : v_i·v_j = 1} g_i for j = 0..=ℓ, without checks.
pub fn radicands_of(g: &[u64]) -> Option<Vec<u64>> {
    let size = g.len() + 1;
    let mut d = vec![1u64; size];
    for (j, dj) in d.iter_mut().enumerate().skip(1) {
        for (i, &gi) in g.iter().enumerate() {
            if dot(i + 1, j) {
                *dj = dj.checked_mul(gi)?;
            }
        }
    }
    Some(d)
}

pub fn radicands_from_tuple(t: &CarefreeTuple) -> Result<RadicandVector> {
    if !is_strongly_carefree(t) {
        return Err(Error::NotCarefree);
    }
    let d = radicands_of(t.g()).ok_or(Error::Overflow("radicands"))?;
    Ok(RadicandVector::from_trusted(d))
}

/// g_i = gcd{D_j : v_i·v_j = 1}, checked by recomputing the radicands.
pub fn tuple_from_radicands(rad: &RadicandVector) -> Result<CarefreeTuple> {
    let d = rad.radicands();
    let g: Vec<u64> = (1..d.len())
        .map(|i| (1..d.len()).filter(|&j| dot(i, j)).fold(0, |acc, j| gcd(acc, d[j])))
        .collect();
    let t = CarefreeTuple::new(g).map_err(|_| Error::InconsistentRadicands("zero radicand".into()))?;
    if !is_strongly_carefree(&t) || radicands_of(t.g()).as_deref() != Some(d) {
        return Err(Error::InconsistentRadicands(format!("gcd reconstruction {t} does not round-trip")));
    }
    Ok(t)
}

/// The tuple of the same field written in the generating set M·(a_1..a_n):
/// g'[Mᵀ v_i] = g[v_i].
pub fn act(g: &[u64], cols: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; g.len()];
    for (i, &gi) in g.iter().enumerate() {
        out[apply_transpose(cols, i + 1) - 1] = gi;
    }
    out
}

fn check_nondegenerate(t: &CarefreeTuple) -> Result<()> {
    if !is_strongly_carefree(t) {
        return Err(Error::NotCarefree);
    }
    if t.g().contains(&1) {
        return Err(Error::DegenerateTuple);
    }
    Ok(())
}

pub fn orbit(t: &CarefreeTuple) -> Result<BTreeSet<CarefreeTuple>> {
    check_nondegenerate(t)?;
    Ok(ordered_bases(t.n()).iter().map(|cols| CarefreeTuple { g: act(t.g(), cols) }).collect())
}

/// Lexicographically least member of the orbit.
pub fn canonical_form(t: &CarefreeTuple) -> Result<CarefreeTuple> {
    check_nondegenerate(t)?;
    Ok(canonical_unchecked(t.g(), &ordered_bases(t.n())))
}

fn canonical_unchecked(g: &[u64], bases: &[Vec<usize>]) -> CarefreeTuple {
    let g = bases.iter().map(|cols| act(g, cols)).min().expect("GL_n is nonempty");
    CarefreeTuple { g }
}

/// Which tuples an enumeration keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TupleFilter {
    pub carefree: bool,
    pub nondegenerate: bool,
}

impl TupleFilter {
    pub const ALL: TupleFilter = TupleFilter { carefree: false, nondegenerate: false };
    pub const CAREFREE: TupleFilter = TupleFilter { carefree: true, nondegenerate: false };
    pub const NONDEGENERATE: TupleFilter = TupleFilter { carefree: true, nondegenerate: true };
}

/// Integer points g ≥ 1 with ∏ g_i < Y whose radicands lie in the window.
#[derive(Clone, Debug)]
pub struct LatticeQuery {
    pub n: u32,
    pub y: u64,
    pub window: ShapeWindow,
    pub sigma: Option<Permutation>,
    pub filter: TupleFilter,
    pub node_budget: u128,
}

impl LatticeQuery {
    pub fn new(n: u32, y: u64, window: ShapeWindow) -> Result<Self> {
        let q = LatticeQuery { n, y, window, sigma: None, filter: TupleFilter::ALL, node_budget: DEFAULT_NODE_BUDGET };
        q.validate()?;
        Ok(q)
    }

    pub fn with_filter(mut self, filter: TupleFilter) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_sigma(mut self, sigma: Permutation) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn ell(&self) -> usize {
        (1usize << self.n) - 1
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::DimensionTooSmall { n: 0, min: 1 });
        }
        if self.y == 0 {
            return Err(Error::InvalidWindow("Y must be at least 1".into()));
        }
        if self.window.ell() != self.ell() {
            return Err(Error::DimensionMismatch { expected: self.ell() - 1, actual: self.window.bounds().len() });
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.ell() {
                return Err(Error::InvalidPermutation(format!("{s} has the wrong length")));
            }
        }
        Ok(())
    }

    /// Every counted point has max g / min g ≤ R_ℓ^{ℓ/2^{n−1}}, because
    /// log g_i = −2^{1−n} Σ_j χ_i(v_j) log D_j and the D_j lie within a
    /// factor R_ℓ of each other.
    pub fn ratio_bound(&self) -> Option<f64> {
        match self.window.upper() {
            Bound::Infinite => None,
            b => Some(b.to_f64().powf(self.ell() as f64 / (1u64 << (self.n - 1)) as f64)),
        }
    }

    /// Largest value any coordinate can take.
    pub fn coordinate_bound(&self) -> u64 {
        let y = self.y.saturating_sub(1).max(1);
        match self.ratio_bound() {
            None => y,
            Some(rho) => {
                let root = (y as f64).powf(1.0 / self.ell() as f64);
                let b = (rho * root * (1.0 + PRUNE_SLACK)).floor() as u64 + 1;
                b.min(y)
            }
        }
    }

    /// Σ_k min(B^k, Y·H^{k−1}/(k−1)!) with H = Σ_{g ≤ B} 1/g: a generous
    /// estimate of search-tree nodes.
    pub fn estimated_nodes(&self) -> u128 {
        let b = self.coordinate_bound() as f64;
        let h = b.ln() + 1.0;
        let y = self.y as f64;
        let mut total = 0.0f64;
        let mut fact = 1.0;
        for k in 1..=self.ell() {
            if k > 1 {
                fact *= (k - 1) as f64;
            }
            let by_product = y * h.powi(k as i32 - 1) / fact;
            total += b.powi(k as i32).min(by_product);
        }
        if total >= u128::MAX as f64 {
            u128::MAX
        } else {
            total.ceil() as u128
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountReport {
    /// Points of the region satisfying the query's filter.
    pub total: u64,
    /// Points per ordering σ; a point with tied radicands counts once for
    /// every consistent σ.
    pub per_sigma: BTreeMap<Permutation, u64>,
    pub carefree_total: u64,
    pub nondegenerate_total: u64,
    /// Nondegenerate carefree points that are the canonical member of their
    /// GL_n(F_2) orbit, i.e. distinct fields.
    pub dedup_field_total: u64,
    pub wall_time: f64,
}

#[derive(Default)]
struct Acc {
    total: u64,
    per_sigma: BTreeMap<u64, u64>,
    carefree: u64,
    nondegenerate: u64,
    dedup: u64,
    points: Vec<Vec<u64>>,
}

impl Acc {
    fn merge(&mut self, other: Acc) {
        self.total += other.total;
        for (k, v) in other.per_sigma {
            *self.per_sigma.entry(k).or_default() += v;
        }
        self.carefree += other.carefree;
        self.nondegenerate += other.nondegenerate;
        self.dedup += other.dedup;
        self.points.extend(other.points);
    }
}

fn encode_sigma(images: &[usize]) -> u64 {
    images.iter().fold(0u64, |acc, &x| (acc << 4) | x as u64)
}

fn decode_sigma(mut key: u64, ell: usize) -> Permutation {
    let mut images = vec![0; ell];
    for slot in images.iter_mut().rev() {
        *slot = (key & 0xf) as usize;
        key >>= 4;
    }
    Permutation::new(images).expect("encoded permutation")
}

/// All σ with D_{σ(1)} ≤ … ≤ D_{σ(ℓ)}, given one sorting order of 0-based
/// indices; permutes within runs of ties.
fn consistent_sigmas(d: &[u64], order: &[usize], out: &mut Vec<u64>) {
    out.clear();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    for i in 1..=order.len() {
        if i == order.len() || d[order[i]] != d[order[s]] {
            runs.push((s, i));
            s = i;
        }
    }
    let mut images: Vec<usize> = order.iter().map(|&j| j + 1).collect();
    fn rec(runs: &[(usize, usize)], r: usize, images: &mut Vec<usize>, out: &mut Vec<u64>) {
        if r == runs.len() {
            out.push(encode_sigma(images));
            return;
        }
        let (a, b) = runs[r];
        if b - a == 1 {
            rec(runs, r + 1, images, out);
            return;
        }
        let mut slice: Vec<usize> = images[a..b].to_vec();
        slice.sort_unstable();
        for p in Permutation::all(b - a) {
            for (k, &pi) in p.images().iter().enumerate() {
                images[a + k] = slice[pi - 1];
            }
            rec(runs, r + 1, images, out);
        }
    }
    rec(&runs, 0, &mut images, out);
}

struct Search<'a> {
    q: &'a LatticeQuery,
    ell: usize,
    rho: Option<f64>,
    bound: u64,
    sqf: Option<SquarefreeTable>,
    bases: Vec<Vec<usize>>,
    collect: bool,
    extra: Option<&'a LeafPredicate<'a>>,
}

/// Extra condition applied to each point after the window test.
pub type LeafPredicate<'p> = dyn Fn(&[u64]) -> bool + Sync + 'p;

impl<'a> Search<'a> {
    fn new(q: &'a LatticeQuery, collect: bool, extra: Option<&'a LeafPredicate<'a>>) -> Result<Self> {
        q.validate()?;
        let estimate = q.estimated_nodes();
        if estimate > q.node_budget {
            return Err(Error::BudgetExceeded { estimate, budget: q.node_budget });
        }
        let bound = q.coordinate_bound();
        let sqf = (bound <= SQUAREFREE_TABLE_CAP).then(|| SquarefreeTable::new(bound));
        let bases = if q.n <= 3 { ordered_bases(q.n) } else { Vec::new() };
        Ok(Search { q, ell: q.ell(), rho: q.ratio_bound(), bound, sqf, bases, collect, extra })
    }

    fn squarefree(&self, x: u64) -> bool {
        match &self.sqf {
            Some(t) => t.is_squarefree(x),
            None => is_squarefree(x, u64::MAX).unwrap_or(false),
        }
    }

    fn run(&self) -> Acc {
        let first_max = self.first_coordinate_max();
        let shards: Vec<Acc> = (1..=first_max)
            .into_par_iter()
            .map(|g1| {
                let mut acc = Acc::default();
                let mut g = Vec::with_capacity(self.ell);
                let mut scratch = Scratch::new(self.ell);
                if self.admit(&g, g1) {
                    g.push(g1);
                    self.dfs(&mut g, g1 as u128, g1, g1, &mut acc, &mut scratch);
                }
                acc
            })
            .collect();
        let mut total = Acc::default();
        for s in shards {
            total.merge(s);
        }
        total
    }

    fn first_coordinate_max(&self) -> u64 {
        let y = self.q.y as u128;
        let mut hi = self.bound.min(self.q.y.saturating_sub(1));
        // g_1 · lb^{ℓ−1} < Y with lb ≥ g_1/ρ
        if let Some(rho) = self.rho {
            while hi > 0 {
                let lb = lower_from(hi, rho, self.min_value()) as u128;
                let rest = lb.checked_pow(self.ell as u32 - 1).unwrap_or(u128::MAX);
                if (hi as u128).saturating_mul(rest) < y {
                    break;
                }
                hi -= 1;
            }
        }
        hi
    }

    fn min_value(&self) -> u64 {
        if self.q.filter.nondegenerate {
            2
        } else {
            1
        }
    }

    /// Incremental filter: squarefree and coprime to earlier entries.
    fn admit(&self, g: &[u64], x: u64) -> bool {
        if !self.q.filter.carefree {
            return !(self.q.filter.nondegenerate && x == 1);
        }
        if self.q.filter.nondegenerate && x == 1 {
            return false;
        }
        self.squarefree(x) && g.iter().all(|&p| gcd(p, x) == 1)
    }

    fn dfs(&self, g: &mut Vec<u64>, prod: u128, lo: u64, hi: u64, acc: &mut Acc, scratch: &mut Scratch) {
        if g.len() == self.ell {
            self.leaf(g, acc, scratch);
            return;
        }
        let remaining_after = (self.ell - g.len() - 1) as u32;
        let y = self.q.y as u128;
        let (mut from, mut to) = (self.min_value(), self.bound);
        if let Some(rho) = self.rho {
            from = from.max(lower_from(hi, rho, 1));
            to = to.min(((lo as f64) * rho * (1.0 + PRUNE_SLACK)).floor() as u64);
        }
        let mut x = from;
        while x <= to {
            let new_hi = hi.max(x);
            let lb = match self.rho {
                Some(rho) => lower_from(new_hi, rho, self.min_value()),
                None => self.min_value(),
            } as u128;
            let rest = lb.checked_pow(remaining_after).unwrap_or(u128::MAX);
            let p = prod * x as u128;
            // both factors grow with x
            if p.saturating_mul(rest) >= y {
                break;
            }
            if self.admit(g, x) {
                g.push(x);
                self.dfs(g, p, lo.min(x), new_hi, acc, scratch);
                g.pop();
            }
            x += 1;
        }
    }

    fn leaf(&self, g: &[u64], acc: &mut Acc, s: &mut Scratch) {
        let ell = self.ell;
        for j in 1..=ell {
            let mut dj = 1u64;
            for (i, &gi) in g.iter().enumerate() {
                if dot(i + 1, j) {
                    dj *= gi;
                }
            }
            s.d[j - 1] = dj;
        }
        s.order.clear();
        s.order.extend(0..ell);
        s.order.sort_by_key(|&j| s.d[j]);
        for (k, &j) in s.order.iter().enumerate() {
            s.sorted[k] = s.d[j];
        }
        if !self.q.window.contains_sorted(&s.sorted) {
            return;
        }
        consistent_sigmas(&s.d, &s.order, &mut s.sigmas);
        if let Some(sigma) = &self.q.sigma {
            let want = encode_sigma(sigma.images());
            if !s.sigmas.contains(&want) {
                return;
            }
        }
        let carefree = self.q.filter.carefree || self.check_carefree(g);
        let nondegenerate = carefree && g.iter().all(|&x| x > 1);
        if (self.q.filter.carefree && !carefree) || (self.q.filter.nondegenerate && !nondegenerate) {
            return;
        }
        if self.extra.is_some_and(|f| !f(g)) {
            return;
        }
        acc.total += 1;
        for &key in &s.sigmas {
            if self.q.sigma.is_none() || Some(key) == self.q.sigma.as_ref().map(|p| encode_sigma(p.images())) {
                *acc.per_sigma.entry(key).or_default() += 1;
            }
        }
        if carefree {
            acc.carefree += 1;
        }
        if nondegenerate {
            acc.nondegenerate += 1;
            if !self.bases.is_empty() && canonical_unchecked(g, &self.bases).g() == g {
                acc.dedup += 1;
            }
        }
        if self.collect {
            acc.points.push(g.to_vec());
        }
    }

    fn check_carefree(&self, g: &[u64]) -> bool {
        g.iter().all(|&x| self.squarefree(x))
            && (0..g.len()).all(|i| (i + 1..g.len()).all(|j| gcd(g[i], g[j]) == 1))
    }
}

/// ⌈hi/ρ⌉ with slack, at least `floor`.
fn lower_from(hi: u64, rho: f64, floor: u64) -> u64 {
    let v = (hi as f64 / rho / (1.0 + PRUNE_SLACK)).ceil() as u64;
    v.max(floor)
}

struct Scratch {
    d: Vec<u64>,
    sorted: Vec<u64>,
    order: Vec<usize>,
    sigmas: Vec<u64>,
}

impl Scratch {
    fn new(ell: usize) -> Self {
        Scratch { d: vec![0; ell], sorted: vec![0; ell], order: Vec::new(), sigmas: Vec::new() }
    }
}

fn finish(acc: Acc, ell: usize, start: Instant) -> CountReport {
    CountReport {
        total: acc.total,
        per_sigma: acc.per_sigma.into_iter().map(|(k, v)| (decode_sigma(k, ell), v)).collect(),
        carefree_total: acc.carefree,
        nondegenerate_total: acc.nondegenerate,
        dedup_field_total: acc.dedup,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// All points of 𝒢_ℤ(Y; R) passing the filter, in lexicographic order.
pub fn enumerate_lattice_points(q: &LatticeQuery) -> Result<(Vec<CarefreeTuple>, CountReport)> {
    let start = Instant::now();
    let search = Search::new(q, true, None)?;
    let mut acc = search.run();
    let mut points = std::mem::take(&mut acc.points);
    points.sort_unstable();
    let tuples = points.into_iter().map(|g| CarefreeTuple { g }).collect();
    Ok((tuples, finish(acc, q.ell(), start)))
}

/// Like [`enumerate_lattice_points`] without materializing the points.
pub fn count_lattice_points(q: &LatticeQuery) -> Result<CountReport> {
    let start = Instant::now();
    let search = Search::new(q, false, None)?;
    let acc = search.run();
    Ok(finish(acc, q.ell(), start))
}

/// Counts only points that also satisfy `pred`.
pub fn count_lattice_points_where(q: &LatticeQuery, pred: &LeafPredicate<'_>) -> Result<CountReport> {
    let start = Instant::now();
    let search = Search::new(q, false, Some(pred))?;
    let acc = search.run();
    Ok(finish(acc, q.ell(), start))
}

#[derive(Clone, Debug)]
pub struct FieldRecord {
    pub tuple: CarefreeTuple,
    pub radicands: RadicandVector,
    pub case: RamificationCase,
    pub discriminant: BigInt,
    pub shape: ShapeParams,
}

/// One record per field with Δ ≤ X (nondegenerate, canonical tuple), with
/// optional case and window filters, sorted by (Δ, tuple).
pub fn enumerate_fields(
    n: u32,
    max_disc: u128,
    case_filter: Option<RamificationCase>,
    window: &ShapeWindow,
    node_budget: u128,
) -> Result<Vec<FieldRecord>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if n > 3 {
        return Err(Error::DimensionCap { n, cap: 3 });
    }
    // Δ ≥ (∏g)^{2^{n−1}} in every case
    let yroot = integer_root(max_disc, 1 << (n - 1));
    let y = u64::try_from(yroot).map_err(|_| Error::Overflow("product bound"))?.saturating_add(1);
    let q = LatticeQuery::new(n, y, window.clone())?.with_filter(TupleFilter::NONDEGENERATE).with_budget(node_budget);
    let (tuples, _) = enumerate_lattice_points(&q)?;
    let bases = ordered_bases(n);
    let limit = BigInt::from(max_disc);
    let mut out: Vec<FieldRecord> = tuples
        .into_par_iter()
        .filter(|t| canonical_unchecked(t.g(), &bases) == *t)
        .filter_map(|t| {
            let rad = RadicandVector::from_trusted(radicands_of(t.g())?);
            let case = classify_case(&rad);
            if case_filter.is_some_and(|c| c != case) {
                return None;
            }
            let disc = discriminant(&rad, case);
            if disc > limit {
                return None;
            }
            let shape = shape_params(&rad).ok()?;
            Some(FieldRecord { tuple: t, radicands: rad, case, discriminant: disc, shape })
        })
        .collect();
    out.sort_by(|a, b| (&a.discriminant, &a.tuple).cmp(&(&b.discriminant, &b.tuple)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;
    use crate::Rational;
    use proptest::prelude::*;

    fn t(g: &[u64]) -> CarefreeTuple {
        CarefreeTuple::new(g.to_vec()).unwrap()
    }

    #[test]
    fn radicand_examples() {
        assert_eq!(radicands_from_tuple(&t(&[5, 13, 1])).unwrap().radicands(), &[1, 5, 13, 65]);
        assert_eq!(radicands_from_tuple(&t(&[5, 13, 17])).unwrap().radicands(), &[1, 85, 221, 65]);
        assert_eq!(radicands_from_tuple(&t(&[1, 1, 1])).unwrap().radicands(), &[1, 1, 1, 1]);
        assert_eq!(radicands_from_tuple(&t(&[2, 3, 4])), Err(Error::NotCarefree));
    }

    #[test]
    fn tuple_examples() {
        let r = RadicandVector::new(vec![1, 85, 221, 65]).unwrap();
        assert_eq!(tuple_from_radicands(&r).unwrap(), t(&[5, 13, 17]));
        let r = RadicandVector::new(vec![1, 5, 13, 65]).unwrap();
        assert_eq!(tuple_from_radicands(&r).unwrap(), t(&[5, 13, 1]));
    }

    #[test]
    fn predicates() {
        assert!(is_strongly_carefree(&t(&[2, 3, 5])) && is_nondegenerate(&t(&[2, 3, 5])));
        assert!(!is_strongly_carefree(&t(&[2, 3, 4])));
        assert!(is_strongly_carefree(&t(&[2, 3, 1])) && !is_nondegenerate(&t(&[2, 3, 1])));
        assert!(!is_strongly_carefree(&t(&[2, 6, 5])));
        assert!(CarefreeTuple::new(vec![1, 2]).is_err());
    }

    #[test]
    fn n2_orbit_is_all_permutations() {
        let o = orbit(&t(&[2, 3, 5])).unwrap();
        let perms: BTreeSet<CarefreeTuple> = Permutation::all(3)
            .iter()
            .map(|p| t(&p.images().iter().map(|&i| [2, 3, 5][i - 1]).collect::<Vec<_>>()))
            .collect();
        assert_eq!(o, perms);
        assert_eq!(orbit(&t(&[2, 3, 1])), Err(Error::DegenerateTuple));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_form(&t(&[5, 2, 3])).unwrap(), t(&[2, 3, 5]));
        assert_eq!(canonical_form(&t(&[5, 13, 17])).unwrap(), canonical_form(&t(&[13, 17, 5])).unwrap());
        let c = canonical_form(&t(&[7, 2, 3, 5, 11, 13, 17])).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
    }

    #[test]
    fn action_formula_matches_relabelled_radicands() {
        let tuple = t(&[3, 5, 7, 11, 13, 17, 19]);
        let rad = radicands_from_tuple(&tuple).unwrap();
        for cols in ordered_bases(3) {
            let relabelled = tuple_from_radicands(&rad.relabel(&cols)).unwrap();
            assert_eq!(relabelled.g(), act(tuple.g(), &cols).as_slice());
        }
    }

    #[test]
    fn small_enumeration_examples() {
        let q = LatticeQuery::new(2, 30, ShapeWindow::vacuous(3)).unwrap().with_filter(TupleFilter::NONDEGENERATE);
        assert_eq!(enumerate_lattice_points(&q).unwrap().0.len(), 0);
        let q = LatticeQuery::new(2, 31, "1,3".parse().unwrap()).unwrap().with_filter(TupleFilter::NONDEGENERATE);
        let (pts, report) = enumerate_lattice_points(&q).unwrap();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|p| p.g().iter().product::<u64>() == 30));
        assert_eq!(report.dedup_field_total, 1);
        assert_eq!(report.per_sigma.values().sum::<u64>(), 6);
        let q = LatticeQuery::new(2, 31, "1,2".parse().unwrap()).unwrap().with_filter(TupleFilter::NONDEGENERATE);
        assert_eq!(count_lattice_points(&q).unwrap().total, 0);
    }

    #[test]
    fn sigma_restricted_counts_partition_the_total() {
        let q = LatticeQuery::new(2, 2000, "1,6".parse().unwrap()).unwrap().with_filter(TupleFilter::NONDEGENERATE);
        let all = count_lattice_points(&q).unwrap();
        let mut sum = 0;
        for sigma in Permutation::all(3) {
            let one = count_lattice_points(&q.clone().with_sigma(sigma.clone())).unwrap();
            assert_eq!(one.total, all.per_sigma.get(&sigma).copied().unwrap_or(0));
            sum += one.total;
        }
        // carefree nondegenerate tuples never tie, so the cells are disjoint
        assert_eq!(sum, all.total);
        assert_eq!(all.dedup_field_total * 6, all.nondegenerate_total);
    }

    #[test]
    fn budget_refusal() {
        let q = LatticeQuery::new(2, 1_000_000, ShapeWindow::vacuous(3)).unwrap().with_budget(1000);
        assert!(matches!(count_lattice_points(&q), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn tied_radicands_count_every_consistent_sigma() {
        let q = LatticeQuery::new(2, 2, "1,1".parse().unwrap()).unwrap();
        let report = count_lattice_points(&q).unwrap();
        // only (1,1,1), whose radicands all equal one
        assert_eq!(report.total, 1);
        assert_eq!(report.per_sigma.len(), 6);
        assert_eq!(report.dedup_field_total, 0);
    }

    #[test]
    fn known_field_is_enumerated() {
        let fields =
            enumerate_fields(2, 1_221_025, Some(RamificationCase::One), &ShapeWindow::vacuous(3), DEFAULT_NODE_BUDGET)
                .unwrap();
        let hit = fields.iter().find(|f| f.discriminant == BigInt::from(1_221_025u64)).unwrap();
        assert_eq!(hit.tuple, t(&[5, 13, 17]));
        assert_eq!(hit.shape.lambdas(), &[rational(17, 13), rational(17, 5)]);
        let tuples: BTreeSet<_> = fields.iter().map(|f| f.tuple.clone()).collect();
        assert_eq!(tuples.len(), fields.len());
        assert!(fields.iter().all(|f| f.discriminant <= BigInt::from(1_221_025u64)));
    }

    #[test]
    fn field_count_times_six_is_tuple_count() {
        let x = 10u128.pow(8);
        let w: ShapeWindow = "1,10".parse().unwrap();
        let fields = enumerate_fields(2, x, Some(RamificationCase::One), &w, DEFAULT_NODE_BUDGET).unwrap();
        let q = LatticeQuery::new(2, 10_001, w).unwrap().with_filter(TupleFilter::NONDEGENERATE);
        let (pts, _) = enumerate_lattice_points(&q).unwrap();
        let case1 = pts
            .iter()
            .filter(|p| classify_case(&radicands_from_tuple(p).unwrap()) == RamificationCase::One)
            .count();
        assert_eq!(fields.len() * 6, case1);
    }

    fn naive(y: u64, w: &ShapeWindow, filter: TupleFilter) -> Vec<CarefreeTuple> {
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
                    let l2 = Rational::new(d[1].into(), d[0].into());
                    let l3 = Rational::new(d[2].into(), d[0].into());
                    let ok = match (&w.bounds()[0], &w.bounds()[1]) {
                        (Bound::Finite(r2), Bound::Finite(r3)) => *r2 <= l2 && l3 <= *r3,
                        (Bound::Finite(r2), Bound::Infinite) => *r2 <= l2,
                        _ => false,
                    };
                    let tup = t(&[a, b, c]);
                    let keep = match (filter.carefree, filter.nondegenerate) {
                        (false, false) => true,
                        (true, false) => is_strongly_carefree(&tup),
                        _ => is_nondegenerate(&tup),
                    };
                    if ok && keep {
                        out.push(tup);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_oracle_for_small_y() {
        let windows = ["1,inf", "1,10", "2,3", "5/3,5/2", "1,1"];
        for w in windows {
            let w: ShapeWindow = w.parse().unwrap();
            for y in [1u64, 2, 31, 97, 300] {
                for filter in [TupleFilter::ALL, TupleFilter::NONDEGENERATE] {
                    let q = LatticeQuery::new(2, y, w.clone()).unwrap().with_filter(filter);
                    let (pts, report) = enumerate_lattice_points(&q).unwrap();
                    assert_eq!(pts, naive(y, &w, filter), "window {w} Y {y}");
                    assert_eq!(report.total as usize, pts.len());
                }
            }
        }
    }

    #[test]
    fn monotone_in_y_and_upper_bound() {
        let mut prev = 0;
        for y in (100..=1500).step_by(200) {
            let q = LatticeQuery::new(2, y, "1,4".parse().unwrap()).unwrap();
            let c = count_lattice_points(&q).unwrap().total;
            assert!(c >= prev);
            prev = c;
        }
        let mut prev = 0;
        for r in 1..=12u64 {
            let q = LatticeQuery::new(2, 1500, ShapeWindow::from_integers(&[1, r]).unwrap()).unwrap();
            let c = count_lattice_points(&q).unwrap().total;
            assert!(c >= prev);
            prev = c;
        }
    }

    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

    fn arb_carefree(ell: usize) -> impl Strategy<Value = CarefreeTuple> {
        // disjoint sets of primes, each entry squarefree
        prop::collection::vec(0..=ell, PRIMES.len()).prop_map(move |owner| {
            let mut g = vec![1u64; ell];
            for (p, &o) in PRIMES.iter().zip(&owner) {
                if o < ell {
                    g[o] *= p;
                }
            }
            CarefreeTuple::new(g).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(250))]

        #[test]
        fn round_trip_and_product_identity(tuple in prop_oneof![arb_carefree(3), arb_carefree(7)]) {
            let rad = radicands_from_tuple(&tuple).unwrap();
            prop_assert_eq!(tuple_from_radicands(&rad).unwrap(), tuple.clone());
            let power = 1u32 << (tuple.n() - 1);
            prop_assert_eq!(rad.product(), tuple.product().pow(power));
        }
    }
}
