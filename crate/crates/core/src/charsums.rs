//! Additive and quadratic character sums over point sets.
//!
//! Additive characters are `ψ_t(x) = exp(2πi Tr(t x) / p)`, indexed by
//! `t ∈ F_q`; `t = 0` is the principal character. Every complex sum is formed
//! by first bucketing integer multiplicities by the trace value in `F_p` and
//! then summing `count_j · ω^j` in index order, so results do not depend on
//! thread scheduling.
//!
//! Counts (`T`, `W`) are exact integers from enumeration. The character
//! identities are cross-checks on them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Elem, FieldInfo, FieldSpec, QRClass};
use crate::geometry::{delta_raw, inner_raw, point_from_index, set_is_acute, space_size, PointSet};

pub type Complex = Complex64;

/// Tolerance for single-character identities (orthogonality, Gauss sums).
pub const STRUCTURAL_TOL: f64 = 1e-9;
/// Tolerance for composite identities and inequalities.
pub const COMPOSITE_TOL: f64 = 1e-6;
/// Largest field order for which character tables are built.
pub const MAX_CHAR_ORDER: u64 = 1 << 20;
/// Default cap on `q^n · |Z|^4` for [`chi_rhs`].
pub const DEFAULT_QUAD_CAP: u128 = 1_000_000_000;

/// Index `t` of the additive character `ψ_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharIndex(pub Elem);

impl CharIndex {
    pub const PRINCIPAL: CharIndex = CharIndex(Elem::ZERO);

    pub fn is_principal(self) -> bool {
        self.0.is_zero()
    }
}

/// Additive characters of one field.
pub struct Characters {
    field: FieldSpec,
    roots: Vec<Complex>,
}

impl Characters {
    pub fn new(field: &FieldSpec) -> Result<Self> {
        if field.q() > MAX_CHAR_ORDER {
            return Err(Error::SpaceTooLarge {
                size: field.q() as u128,
                cap: MAX_CHAR_ORDER as u128,
            });
        }
        let p = field.p();
        let roots = (0..p)
            .map(|j| {
                let (s, c) = (2.0 * PI * j as f64 / p as f64).sin_cos();
                Complex::new(c, s)
            })
            .collect();
        Ok(Characters {
            field: field.clone(),
            roots,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Every character index in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = CharIndex> + '_ {
        self.field.elements().map(CharIndex)
    }

    pub fn psi(&self, t: CharIndex, x: Elem) -> Complex {
        self.roots[self.field.trace(self.field.mul(t.0, x)) as usize]
    }

    fn root_sum(&self, counts: &[u64]) -> Complex {
        counts
            .iter()
            .zip(&self.roots)
            .fold(Complex::new(0.0, 0.0), |acc, (&c, &r)| acc + r * c as f64)
    }

    /// `Σ_x mult[x] ψ_t(x)` for a multiplicity table indexed by element code.
    fn weighted_sum(&self, t: CharIndex, mult: &[u64]) -> Complex {
        let mut counts = vec![0u64; self.roots.len()];
        for (code, &m) in mult.iter().enumerate() {
            if m != 0 {
                let j = self
                    .field
                    .trace(self.field.mul(t.0, Elem::from_code(code as u64)));
                counts[j as usize] += m;
            }
        }
        self.root_sum(&counts)
    }

    /// `Σ_{ψ ∈ Ψ} ψ(z)`: `q` at zero and `0` elsewhere.
    pub fn orthogonality_check(&self, z: Elem) -> Complex {
        let mut counts = vec![0u64; self.roots.len()];
        for t in self.field.elements() {
            counts[self.field.trace(self.field.mul(t, z)) as usize] += 1;
        }
        self.root_sum(&counts)
    }

    /// `G_t(α) = Σ_z ψ_t(α z^2)`.
    pub fn gauss_sum(&self, t: CharIndex, alpha: Elem) -> Complex {
        let f = &self.field;
        let mut counts = vec![0u64; self.roots.len()];
        for z in f.elements() {
            let x = f.mul(alpha, f.square(z));
            counts[f.trace(f.mul(t.0, x)) as usize] += 1;
        }
        self.root_sum(&counts)
    }

    /// `S_t(Z) = Σ_{u,v,w ∈ Z} ψ_t(Δ(u, v, w))` over ordered triples.
    pub fn s_sum(&self, t: CharIndex, set: &PointSet) -> Complex {
        self.weighted_sum(t, &delta_histogram(set))
    }

    /// `S_t(Z)` for every `t`, indexed by the code of `t`.
    pub fn s_sums(&self, set: &PointSet) -> Vec<Complex> {
        let hist = delta_histogram(set);
        exec::map_collect(self.field.q() as usize, |t| {
            self.weighted_sum(CharIndex(Elem::from_code(t as u64)), &hist)
        })
    }

    /// `#Z · q^n · Σ_{v+w = x+y} ψ_t(2 (v·w - x·y))`, the bound on `|S_t(Z)|^2`
    /// for nonprincipal `t`.
    pub fn lemma1_rhs(&self, t: CharIndex, set: &PointSet) -> Result<f64> {
        if t.is_principal() {
            return Err(Error::PrincipalCharacter);
        }
        Ok(self.lemma1_rhs_with(t, set, &PairBuckets::new(set)))
    }

    fn lemma1_rhs_with(&self, t: CharIndex, set: &PointSet, buckets: &PairBuckets) -> f64 {
        let f = &self.field;
        // Within a bucket the quadruple sum factors as |Σ_{(v,w)} ψ_t(2 v·w)|^2.
        let per_bucket = exec::map_collect(buckets.dots.len(), |b| {
            let mut counts = vec![0u64; self.roots.len()];
            for &d in &buckets.dots[b] {
                let x = f.add(d, d);
                counts[f.trace(f.mul(t.0, x)) as usize] += 1;
            }
            let s = self.root_sum(&counts);
            s * s.conj()
        });
        let total = per_bucket
            .into_iter()
            .fold(Complex::new(0.0, 0.0), |acc, x| acc + x);
        debug_assert!(total.im.abs() <= STRUCTURAL_TOL * total.norm().max(1.0));
        set.len() as f64 * (f.q() as f64).powi(set.dim() as i32) * total.re
    }

    /// `(1/q) Σ_t G_t(-α) S_t(Z)`, which equals the solution count `T`.
    pub fn t_identity(&self, set: &PointSet, alpha: Elem) -> Result<f64> {
        check_alpha(&self.field, alpha)?;
        let s = self.s_sums(set);
        Ok(self.t_identity_with(&s, alpha))
    }

    fn t_identity_with(&self, s: &[Complex], alpha: Elem) -> f64 {
        let neg = self.field.neg(alpha);
        let gauss = exec::map_collect(s.len(), |t| {
            self.gauss_sum(CharIndex(Elem::from_code(t as u64)), neg)
        });
        let total = gauss
            .iter()
            .zip(s)
            .fold(Complex::new(0.0, 0.0), |acc, (g, s)| acc + g * s);
        total.re / self.field.q() as f64
    }

    /// `R = Σ_{t ≠ 0} |S_t(Z)|`.
    pub fn r_value(&self, set: &PointSet) -> f64 {
        r_from(&self.s_sums(set))
    }
}

fn r_from(s: &[Complex]) -> f64 {
    s.iter().skip(1).map(|z| z.norm()).sum()
}

fn check_alpha(field: &FieldSpec, alpha: Elem) -> Result<()> {
    if field.contains(alpha) && field.qr_class(alpha) == QRClass::NonResidue {
        Ok(())
    } else {
        Err(Error::AlphaNotNonResidue(alpha.code()))
    }
}

/// Multiplicity of each value of `Δ(u, v, w)` over ordered triples of `Z`.
fn delta_histogram(set: &PointSet) -> Vec<u64> {
    let f = set.field();
    let pts = set.points();
    let partial = exec::map_collect(pts.len(), |i| {
        let mut h = vec![0u64; f.q() as usize];
        for v in pts {
            for w in pts {
                h[delta_raw(f, pts[i].coords(), v.coords(), w.coords()).code() as usize] += 1;
            }
        }
        h
    });
    let mut hist = vec![0u64; f.q() as usize];
    for h in partial {
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
    }
    hist
}

/// Ordered pairs `(v, w)` of `Z` grouped by `v + w`, storing `v·w`.
struct PairBuckets {
    dots: Vec<Vec<Elem>>,
}

impl PairBuckets {
    fn new(set: &PointSet) -> Self {
        let f = set.field();
        let mut map: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
        for v in set.points() {
            for w in set.points() {
                let key: Vec<Elem> = v
                    .coords()
                    .iter()
                    .zip(w.coords())
                    .map(|(&a, &b)| f.add(a, b))
                    .collect();
                map.entry(key)
                    .or_default()
                    .push(inner_raw(f, v.coords(), w.coords()));
            }
        }
        PairBuckets {
            dots: map.into_values().collect(),
        }
    }

    fn w_count(&self) -> u64 {
        self.dots
            .iter()
            .map(|b| {
                let mut d = b.clone();
                d.sort_unstable();
                d.chunk_by(|a, b| a == b)
                    .map(|run| (run.len() as u64).pow(2))
                    .sum::<u64>()
            })
            .sum()
    }
}

/// Number of quadruples `(v, w, x, y) ∈ Z^4` with `v + w = x + y` and `v·w = x·y`.
pub fn w_count(set: &PointSet) -> u64 {
    PairBuckets::new(set).w_count()
}

/// Solutions of `Δ(u, v, w) = α z^2` split by the shape of the triple.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TCount {
    pub total: u64,
    /// triples with `u = v` or `u = w`
    pub degenerate: u64,
    /// triples with `v = w`, `u ≠ v`
    pub equal_vw: u64,
    /// pairwise distinct triples
    pub distinct: u64,
}

/// Exact count of `(u, v, w, z) ∈ Z^3 × F_q` with `Δ(u, v, w) = α z^2`.
pub fn t_count(set: &PointSet, alpha: Elem) -> Result<TCount> {
    let f = set.field();
    check_alpha(f, alpha)?;
    // solutions[d] = #{z : α z^2 = d}
    let mut solutions = vec![0u64; f.q() as usize];
    for z in f.elements() {
        solutions[f.mul(alpha, f.square(z)).code() as usize] += 1;
    }
    let pts = set.points();
    let m = pts.len();
    let partial = exec::map_collect(m, |i| {
        let mut c = TCount::default();
        for j in 0..m {
            for k in 0..m {
                let d = delta_raw(f, pts[i].coords(), pts[j].coords(), pts[k].coords());
                let s = solutions[d.code() as usize];
                if i == j || i == k {
                    c.degenerate += s;
                } else if j == k {
                    c.equal_vw += s;
                } else {
                    c.distinct += s;
                }
            }
        }
        c
    });
    let mut out = partial.into_iter().fold(TCount::default(), |a, c| TCount {
        total: 0,
        degenerate: a.degenerate + c.degenerate,
        equal_vw: a.equal_vw + c.equal_vw,
        distinct: a.distinct + c.distinct,
    });
    out.total = out.degenerate + out.equal_vw + out.distinct;
    Ok(out)
}

/// `T_χ(Z) = Σ_{u,v,w ∈ Z} χ(Δ(u, v, w))`.
pub fn chi_sum(set: &PointSet) -> i64 {
    let f = set.field();
    let pts = set.points();
    exec::map_collect(pts.len(), |i| {
        let mut acc = 0i64;
        for v in pts {
            for w in pts {
                acc += f.chi(delta_raw(f, pts[i].coords(), v.coords(), w.coords())) as i64;
            }
        }
        acc
    })
    .into_iter()
    .sum()
}

/// `#Z · Σ_{v,w,x,y ∈ Z} Σ_{u ∈ F_q^n} χ(Δ(u,v,w) Δ(u,x,y))`, an upper bound
/// for `T_χ(Z)^2`.
///
/// The character is multiplicative, so the quadruple sum for a fixed `u` is
/// the square of `Σ_{v,w} χ(Δ(u, v, w))`.
pub fn chi_rhs(set: &PointSet, quad_cap: u128) -> Result<i64> {
    let f = set.field();
    let n = set.dim();
    let space = space_size(f, n).unwrap_or(u128::MAX);
    let work = space.saturating_mul((set.len() as u128).pow(4));
    if work > quad_cap {
        return Err(Error::BudgetExceeded(format!(
            "q^n |Z|^4 = {work} exceeds the quadruple cap {quad_cap}"
        )));
    }
    let pts = set.points();
    let per_u = exec::map_collect(space as usize, |ui| {
        let u = point_from_index(f, n, ui as u64);
        let mut acc = 0i64;
        for v in pts {
            for w in pts {
                acc += f.chi(delta_raw(f, u.coords(), v.coords(), w.coords())) as i64;
            }
        }
        acc * acc
    });
    Ok(set.len() as i64 * per_u.into_iter().sum::<i64>())
}

/// One identity or inequality check, satisfied when `lhs <= rhs + tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub skipped: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn at_most(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            pass: lhs <= rhs + tolerance,
            skipped: false,
            lhs,
            rhs,
            tolerance,
        }
    }

    pub fn skipped(name: &str) -> Self {
        Check {
            name: name.to_string(),
            pass: true,
            skipped: true,
            lhs: 0.0,
            rhs: 0.0,
            tolerance: 0.0,
        }
    }

    pub fn failed(&self) -> bool {
        !self.skipped && !self.pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub t: u64,
    pub s_abs_sq: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct SumOptions {
    /// Defaults to the smallest nonresidue.
    pub alpha: Option<Elem>,
    pub quad_cap: u128,
    /// Flips the sign of the character-identity value of `T` so that the
    /// checker can be exercised end to end.
    pub inject_fault: bool,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            alpha: None,
            quad_cap: DEFAULT_QUAD_CAP,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub field: FieldInfo,
    pub n: usize,
    pub set_size: usize,
    pub set_hash: String,
    pub alpha: u64,
    pub acute: bool,
    /// `[re, im]` of `S_t(Z)`, indexed by the code of `t`.
    pub s_values: Vec<[f64; 2]>,
    pub lemma: Vec<LemmaRow>,
    pub r_value: f64,
    pub w_count: u64,
    pub t_count: TCount,
    pub t_identity: f64,
    pub chi_sum: i64,
    pub chi_rhs: Option<i64>,
    pub checks: Vec<Check>,
}

impl SumReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }
}

/// Evaluates every character-sum quantity for `Z` and checks the identities
/// and inequalities relating them.
pub fn sum_report(set: &PointSet, opts: &SumOptions) -> Result<SumReport> {
    let f = set.field();
    let chars = Characters::new(f)?;
    let q = f.q() as f64;
    let n = set.dim();
    let z = set.len() as f64;
    let alpha = opts.alpha.unwrap_or_else(|| f.smallest_nonresidue());
    check_alpha(f, alpha)?;

    let s = chars.s_sums(set);
    let buckets = PairBuckets::new(set);
    let nonprincipal: Vec<CharIndex> = chars.indices().skip(1).collect();
    let lemma: Vec<LemmaRow> = nonprincipal
        .iter()
        .map(|&t| LemmaRow {
            t: t.0.code(),
            s_abs_sq: s[t.0.code() as usize].norm_sqr(),
            rhs: chars.lemma1_rhs_with(t, set, &buckets),
        })
        .collect();
    let r = r_from(&s);
    let w = buckets.w_count();
    let tc = t_count(set, alpha)?;
    let mut t_id = chars.t_identity_with(&s, alpha);
    if opts.inject_fault {
        t_id = -t_id;
    }
    let chi = chi_sum(set);
    let chi_r = chi_rhs(set, opts.quad_cap).ok();
    let acute = set_is_acute(set).acute;

    let mut checks = Vec::new();
    let ortho = f
        .elements()
        .map(|x| {
            let expect = if x.is_zero() { q } else { 0.0 };
            (chars.orthogonality_check(x) - expect).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "orthogonality",
        ortho,
        0.0,
        STRUCTURAL_TOL * q,
    ));

    let neg_alpha = f.neg(alpha);
    let chi_neg_alpha = f.chi(neg_alpha) as f64;
    let (mut mag, mut fact) = (0.0f64, 0.0f64);
    for &t in &nonprincipal {
        let g = chars.gauss_sum(t, neg_alpha);
        mag = mag.max((g.norm_sqr() - q).abs());
        fact = fact.max((g - chars.gauss_sum(t, Elem::ONE) * chi_neg_alpha).norm());
    }
    checks.push(Check::at_most(
        "gauss_magnitude",
        mag,
        0.0,
        STRUCTURAL_TOL * q,
    ));
    checks.push(Check::at_most(
        "gauss_factorization",
        fact,
        0.0,
        STRUCTURAL_TOL * q.sqrt(),
    ));

    let lemma_excess = lemma
        .iter()
        .map(|row| row.s_abs_sq - row.rhs)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most(
        "lemma_s_bound",
        lemma_excess,
        0.0,
        COMPOSITE_TOL,
    ));

    let t = tc.total as f64;
    checks.push(Check::at_most(
        "t_identity",
        (t - t_id).abs(),
        0.0,
        COMPOSITE_TOL * t.max(1.0),
    ));
    checks.push(Check::at_most(
        "t_deviation_bound",
        (t - z.powi(3)).abs(),
        r / q.sqrt(),
        COMPOSITE_TOL,
    ));
    let chain_rhs = z * q.powi(n as i32 + 2) * w as f64;
    checks.push(Check::at_most(
        "r_w_chain",
        r * r,
        chain_rhs,
        COMPOSITE_TOL * chain_rhs.max(1.0),
    ));
    if n == 2 {
        checks.push(Check::at_most("w_bound", w as f64, 2.0 * z * z * q, 0.0));
    } else {
        checks.push(Check::skipped("w_bound"));
    }
    let max_s = s.iter().skip(1).map(|x| x.norm()).fold(0.0, f64::max);
    checks.push(Check::at_most(
        "coarse_s_bound",
        max_s,
        z * z * q.powf(n as f64 / 2.0),
        COMPOSITE_TOL,
    ));
    match chi_r {
        Some(rhs) => checks.push(Check::at_most(
            "chi_cauchy",
            (chi as f64).powi(2),
            rhs as f64,
            0.0,
        )),
        None => checks.push(Check::skipped("chi_cauchy")),
    }
    if acute {
        checks.push(Check::at_most(
            "acute_distinct_zero",
            tc.distinct as f64,
            0.0,
            0.0,
        ));
        checks.push(Check::at_most("t_relaxed_envelope", t, 4.0 * z * z, 0.0));
    } else {
        checks.push(Check::skipped("acute_distinct_zero"));
        checks.push(Check::skipped("t_relaxed_envelope"));
    }

    Ok(SumReport {
        field: f.info(),
        n,
        set_size: set.len(),
        set_hash: set.hash_hex(),
        alpha: alpha.code(),
        acute,
        s_values: s.iter().map(|c| [c.re, c.im]).collect(),
        lemma,
        r_value: r,
        w_count: w,
        t_count: tc,
        t_identity: t_id,
        chi_sum: chi,
        chi_rhs: chi_r,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{delta_sum, Point};
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(q: u64) -> FieldSpec {
        let (p, k) = crate::field::prime_power(q).unwrap();
        FieldSpec::new(p, k, None).unwrap()
    }

    fn random_set(f: &FieldSpec, n: usize, size: usize, rng: &mut ChaCha8Rng) -> PointSet {
        let total = f.q().pow(n as u32) as usize;
        let pts = sample(rng, total, size.min(total))
            .into_iter()
            .map(|i| point_from_index(f, n, i as u64))
            .collect();
        PointSet::new(f.clone(), n, pts).unwrap()
    }

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn psi_examples_and_laws() {
        let f5 = field(5);
        let ch = Characters::new(&f5).unwrap();
        let one = CharIndex(Elem::ONE);
        assert_eq!(ch.psi(one, Elem::ZERO), Complex::new(1.0, 0.0));
        let expect = Complex::from_polar(1.0, 2.0 * PI / 5.0);
        assert!(close(ch.psi(one, Elem::ONE), expect, 1e-12));
        let total = f5
            .elements()
            .fold(Complex::new(0.0, 0.0), |a, x| a + ch.psi(one, x));
        assert!(total.norm() < 1e-9);

        for q in [3u64, 5, 7, 9, 11, 13, 25] {
            let f = field(q);
            let ch = Characters::new(&f).unwrap();
            for t in ch.indices() {
                for x in f.elements() {
                    assert!((ch.psi(t, x).norm() - 1.0).abs() < 1e-12);
                    for y in f.elements() {
                        let lhs = ch.psi(t, f.add(x, y));
                        assert!(close(lhs, ch.psi(t, x) * ch.psi(t, y), 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        let f9 = field(9);
        let ch = Characters::new(&f9).unwrap();
        assert!(close(
            ch.orthogonality_check(Elem::ZERO),
            Complex::new(9.0, 0.0),
            9e-9
        ));
        assert!(ch.orthogonality_check(Elem::ONE).norm() < 9e-9);
        let f7 = field(7);
        let ch7 = Characters::new(&f7).unwrap();
        assert!(ch7.orthogonality_check(Elem::from_code(3)).norm() < 7e-9);
    }

    #[test]
    fn gauss_examples() {
        let f3 = field(3);
        let ch = Characters::new(&f3).unwrap();
        let omega = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        let g = ch.gauss_sum(CharIndex(Elem::ONE), Elem::ONE);
        assert!(close(g, Complex::new(1.0, 0.0) + omega * 2.0, 1e-12));
        assert!((g.norm() - 3f64.sqrt()).abs() < 1e-9);
        assert!(close(
            ch.gauss_sum(CharIndex::PRINCIPAL, Elem::from_code(2)),
            Complex::new(3.0, 0.0),
            1e-12
        ));
        assert!(close(
            ch.gauss_sum(CharIndex(Elem::ONE), Elem::ZERO),
            Complex::new(3.0, 0.0),
            1e-12
        ));
    }

    #[test]
    fn gauss_magnitude_and_factorization() {
        for q in [3u64, 5, 7, 9, 11, 13] {
            let f = field(q);
            let ch = Characters::new(&f).unwrap();
            let qf = q as f64;
            for t in ch.indices().skip(1) {
                let g1 = ch.gauss_sum(t, Elem::ONE);
                for a in f.elements().skip(1) {
                    let g = ch.gauss_sum(t, a);
                    assert!((g.norm_sqr() - qf).abs() <= 1e-9 * qf);
                    assert!(close(g, g1 * f.chi(a) as f64, 1e-9));
                }
            }
        }
    }

    fn naive_s(f: &FieldSpec, ch: &Characters, t: CharIndex, set: &PointSet) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        for u in set.points() {
            for v in set.points() {
                for w in set.points() {
                    acc += ch.psi(t, delta_sum(f, u, v, w).unwrap());
                }
            }
        }
        acc
    }

    #[test]
    fn s_sum_examples() {
        let f5 = field(5);
        let ch = Characters::new(&f5).unwrap();
        let single = PointSet::new(f5.clone(), 2, vec![Point::from_codes(&[2, 3])]).unwrap();
        assert!(close(
            ch.s_sum(CharIndex(Elem::ONE), &single),
            Complex::new(1.0, 0.0),
            1e-12
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let set = random_set(&f5, 2, 4, &mut rng);
            assert!(close(
                ch.s_sum(CharIndex::PRINCIPAL, &set),
                Complex::new(64.0, 0.0),
                1e-9
            ));
            let all = ch.s_sums(&set);
            for t in ch.indices() {
                let naive = naive_s(&f5, &ch, t, &set);
                assert!(close(ch.s_sum(t, &set), naive, 1e-9));
                assert!(close(all[t.0.code() as usize], naive, 1e-9));
            }
        }
    }

    fn naive_rhs(f: &FieldSpec, ch: &Characters, t: CharIndex, set: &PointSet) -> Complex {
        let pts = set.points();
        let mut acc = Complex::new(0.0, 0.0);
        for v in pts {
            for w in pts {
                for x in pts {
                    for y in pts {
                        let lhs: Vec<Elem> = v
                            .coords()
                            .iter()
                            .zip(w.coords())
                            .map(|(&a, &b)| f.add(a, b))
                            .collect();
                        let rhs: Vec<Elem> = x
                            .coords()
                            .iter()
                            .zip(y.coords())
                            .map(|(&a, &b)| f.add(a, b))
                            .collect();
                        if lhs == rhs {
                            let d = f.sub(
                                inner_raw(f, v.coords(), w.coords()),
                                inner_raw(f, x.coords(), y.coords()),
                            );
                            acc += ch.psi(t, f.add(d, d));
                        }
                    }
                }
            }
        }
        acc * (pts.len() as f64 * (f.q() as f64).powi(set.dim() as i32))
    }

    fn naive_w(f: &FieldSpec, set: &PointSet) -> u64 {
        let pts = set.points();
        let mut count = 0;
        for v in pts {
            for w in pts {
                for x in pts {
                    for y in pts {
                        let same_sum = (0..set.dim()).all(|i| {
                            f.add(v.coords()[i], w.coords()[i])
                                == f.add(x.coords()[i], y.coords()[i])
                        });
                        if same_sum
                            && inner_raw(f, v.coords(), w.coords())
                                == inner_raw(f, x.coords(), y.coords())
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn lemma_rhs_matches_quadruple_enumeration() {
        let f7 = field(7);
        let ch = Characters::new(&f7).unwrap();
        let single = PointSet::new(f7.clone(), 2, vec![Point::from_codes(&[1, 1])]).unwrap();
        assert!((ch.lemma1_rhs(CharIndex(Elem::ONE), &single).unwrap() - 49.0).abs() < 1e-9);
        assert_eq!(
            ch.lemma1_rhs(CharIndex::PRINCIPAL, &single),
            Err(Error::PrincipalCharacter)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let set = random_set(&f7, 2, 5, &mut rng);
            for t in ch.indices().skip(1) {
                let naive = naive_rhs(&f7, &ch, t, &set);
                assert!(naive.im.abs() <= 1e-9 * naive.norm().max(1.0));
                let rhs = ch.lemma1_rhs(t, &set).unwrap();
                assert!((rhs - naive.re).abs() < 1e-6);
                assert!(ch.s_sum(t, &set).norm_sqr() <= rhs + 1e-6);
            }
        }
    }

    #[test]
    fn w_count_examples() {
        let f7 = field(7);
        let single = PointSet::new(f7.clone(), 2, vec![Point::from_codes(&[4, 4])]).unwrap();
        assert_eq!(w_count(&single), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let set = random_set(&f7, 2, 6, &mut rng);
            let w = w_count(&set);
            assert_eq!(w, naive_w(&f7, &set));
            let z = set.len() as u64;
            assert!(w >= 2 * z * z - z);
            assert!(w <= 2 * z * z * 7);
        }
    }

    /// Counts `(u, v, w, z)` by looping over every `z`.
    fn naive_t(f: &FieldSpec, set: &PointSet, alpha: Elem) -> u64 {
        let mut count = 0;
        for u in set.points() {
            for v in set.points() {
                for w in set.points() {
                    let d = delta_sum(f, u, v, w).unwrap();
                    count += f
                        .elements()
                        .filter(|&z| f.mul(alpha, f.square(z)) == d)
                        .count() as u64;
                }
            }
        }
        count
    }

    #[test]
    fn t_count_and_identity_agree() {
        let f5 = field(5);
        let alpha = f5.smallest_nonresidue();
        assert_eq!(alpha.code(), 2);
        assert_eq!(
            t_count(&PointSet::empty(f5.clone(), 2).unwrap(), Elem::ONE),
            Err(Error::AlphaNotNonResidue(1))
        );
        let single = PointSet::new(f5.clone(), 2, vec![Point::from_codes(&[0, 1])]).unwrap();
        assert_eq!(t_count(&single, alpha).unwrap().total, 1);
        let ch5 = Characters::new(&f5).unwrap();
        assert!((ch5.t_identity(&single, alpha).unwrap() - 1.0).abs() < 1e-9);

        for (q, size, seed) in [(5u64, 4usize, 1u64), (7, 6, 2)] {
            let f = field(q);
            let ch = Characters::new(&f).unwrap();
            let alpha = f.smallest_nonresidue();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let set = random_set(&f, 2, size, &mut rng);
                let tc = t_count(&set, alpha).unwrap();
                assert_eq!(tc.total, naive_t(&f, &set, alpha));
                let id = ch.t_identity(&set, alpha).unwrap();
                assert!((tc.total as f64 - id).abs() <= 1e-6 * (tc.total as f64).max(1.0));
                // principal term of the identity alone is (#Z)^3
                let g0 = ch.gauss_sum(CharIndex::PRINCIPAL, f.neg(alpha));
                let s0 = ch.s_sum(CharIndex::PRINCIPAL, &set);
                assert!(((g0 * s0).re / q as f64 - (size as f64).powi(3)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn r_value_matches_per_character_recomputation() {
        let f5 = field(5);
        let ch = Characters::new(&f5).unwrap();
        assert_eq!(ch.r_value(&PointSet::empty(f5.clone(), 2).unwrap()), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let set = random_set(&f5, 2, 3, &mut rng);
            let naive: f64 = ch
                .indices()
                .skip(1)
                .map(|t| naive_s(&f5, &ch, t, &set).norm())
                .sum();
            assert!((ch.r_value(&set) - naive).abs() < 1e-9);
        }
    }

    #[test]
    fn chi_sums() {
        let f3 = field(3);
        let single = PointSet::new(f3.clone(), 2, vec![Point::from_codes(&[1, 2])]).unwrap();
        assert_eq!(chi_sum(&single), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let set = random_set(&f3, 2, 3, &mut rng);
            let pts = set.points();
            // literal five-fold sum over (u, v, w, x, y) with u over the whole plane
            let mut literal = 0i64;
            for ui in 0..9 {
                let u = point_from_index(&f3, 2, ui);
                for v in pts {
                    for w in pts {
                        for x in pts {
                            for y in pts {
                                let a = delta_raw(&f3, u.coords(), v.coords(), w.coords());
                                let b = delta_raw(&f3, u.coords(), x.coords(), y.coords());
                                literal += f3.chi(f3.mul(a, b)) as i64;
                            }
                        }
                    }
                }
            }
            literal *= pts.len() as i64;
            let rhs = chi_rhs(&set, DEFAULT_QUAD_CAP).unwrap();
            assert_eq!(rhs, literal);
            assert!(chi_sum(&set).pow(2) <= rhs);
        }
        assert!(matches!(chi_rhs(&single, 1), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn chi_sum_of_acute_set_counts_repeated_triples() {
        // {0, 1, 2} is acute in F_3: every distinct triple has χ = 1; triples
        // with u = v or u = w contribute 0; v = w ≠ u contribute χ(2 |u - v|^2).
        let f3 = field(3);
        let set = PointSet::new(
            f3.clone(),
            1,
            (0..3).map(|c| Point::from_codes(&[c])).collect(),
        )
        .unwrap();
        assert!(set_is_acute(&set).acute);
        let mut expected = 0i64;
        for u in 0..3i64 {
            for v in 0..3i64 {
                for w in 0..3i64 {
                    if u == v || u == w {
                        continue;
                    }
                    expected += if v == w {
                        f3.chi(f3.from_int(2 * (u - v) * (u - v))) as i64
                    } else {
                        1
                    };
                }
            }
        }
        assert_eq!(chi_sum(&set), expected);
    }

    #[test]
    fn report_checks_pass_and_fault_is_detected() {
        let f5 = field(5);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let set = random_set(&f5, 2, 4, &mut rng);
        let rep = sum_report(&set, &SumOptions::default()).unwrap();
        assert_eq!(rep.failed_checks().count(), 0, "{:?}", rep.checks);
        assert_eq!(rep.s_values.len(), 5);
        assert_eq!(rep.lemma.len(), 4);
        let bad = sum_report(
            &set,
            &SumOptions {
                inject_fault: true,
                ..Default::default()
            },
        )
        .unwrap();
        let failed: Vec<_> = bad.failed_checks().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"t_identity"));
    }
}
