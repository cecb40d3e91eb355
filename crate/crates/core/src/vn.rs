//! Multivariate polynomials, their functional calculus on commuting tuples,
//! certified torus suprema, and the von Neumann inequality
//! `‖p(S_1, …, S_d)‖ ≤ sup_{λ ∈ T^d} |p(λ)|`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Result};
use crate::interp::{ContractionTuple, PowerTable};
use crate::linalg::{cabs, op_norm, CMatrix, Tolerance, C64, ONE, ZERO};
use crate::math;

/// Default cap on the total degree of a [`MultiPolynomial`].
pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// Default cap on the number of torus lattice points `M^d`.
pub const DEFAULT_MAX_GRID_POINTS: usize = 1 << 25;

/// `Σ_α c_α X^α` in `d` commuting variables. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPolynomial {
    d: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl MultiPolynomial {
    /// Sums like terms and drops zeros. Rejects exponent vectors of the wrong
    /// length, non-finite coefficients and degrees above `degree_cap`.
    pub fn new<I>(d: usize, terms: I, degree_cap: u32) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        if d == 0 {
            return Err(input_err!("a polynomial needs d >= 1 variables"));
        }
        let mut map: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != d {
                return Err(input_err!("exponent {alpha:?} does not have d = {d} entries"));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(input_err!("coefficient of {alpha:?} is not finite"));
            }
            let deg: u64 = alpha.iter().map(|&a| a as u64).sum();
            if deg > degree_cap as u64 {
                return Err(input_err!("term {alpha:?} has degree {deg} above the cap {degree_cap}"));
            }
            *map.entry(alpha).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        Ok(MultiPolynomial { d, terms: map })
    }

    pub fn constant(d: usize, c: C64) -> Result<Self> {
        Self::new(d, [(vec![0; d], c)], DEFAULT_DEGREE_CAP)
    }

    /// `c · X_1^{α_1} ⋯ X_d^{α_d}`.
    pub fn monomial(alpha: Vec<u32>, c: C64) -> Result<Self> {
        Self::new(alpha.len(), [(alpha, c)], DEFAULT_DEGREE_CAP)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of each variable.
    pub fn axis_degrees(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.d];
        for alpha in self.terms.keys() {
            for (o, &a) in out.iter_mut().zip(alpha) {
                *o = (*o).max(a);
            }
        }
        out
    }

    pub fn add(&self, other: &MultiPolynomial) -> Result<MultiPolynomial> {
        if self.d != other.d {
            return Err(input_err!("cannot add polynomials in {} and {} variables", self.d, other.d));
        }
        let cap = self.degree().max(other.degree());
        let all = self.terms.iter().chain(&other.terms).map(|(a, c)| (a.clone(), *c));
        Self::new(self.d, all, cap)
    }

    pub fn eval_at(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.d, "point has the wrong number of coordinates");
        self.terms
            .iter()
            .map(|(alpha, &c)| alpha.iter().zip(z).fold(c, |acc, (&a, &zi)| acc * zi.powu(a)))
            .sum()
    }

    /// `Σ_j Σ_α |c_α| α_j`, a bound on `Σ_j sup |∂p/∂θ_j|` over the torus.
    pub fn angular_lipschitz_sum(&self) -> f64 {
        self.terms
            .iter()
            .map(|(alpha, &c)| cabs(c) * alpha.iter().map(|&a| a as f64).sum::<f64>())
            .sum()
    }
}

/// `Σ_α c_α ∏_i S_i^{α_i}`, factors in axis order.
pub fn eval_poly(s: &ContractionTuple, p: &MultiPolynomial) -> Result<CMatrix> {
    if p.d() != s.d() {
        return Err(input_err!("polynomial has {} variables, tuple has d = {}", p.d(), s.d()));
    }
    let max_exp = p.axis_degrees().into_iter().max().unwrap_or(0) as usize;
    let powers = PowerTable::new(s, max_exp);
    let mut acc = CMatrix::zeros(s.dim(), s.dim());
    let mut exps = vec![0usize; s.d()];
    for (alpha, &c) in p.terms() {
        for (e, &a) in exps.iter_mut().zip(alpha) {
            *e = a as usize;
        }
        acc = &acc + &powers.product(&exps).scale(c);
    }
    Ok(acc)
}

/// Lattice maximum of `|p|` on `T^d` with a Lipschitz pad that turns it
/// into a certified upper bound on the true supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSup {
    pub m: usize,
    pub grid_sup: f64,
    pub lipschitz_pad: f64,
    pub sup_upper: f64,
}

pub fn torus_sup(p: &MultiPolynomial, m: usize) -> Result<TorusSup> {
    torus_sup_capped(p, m, DEFAULT_MAX_GRID_POINTS)
}

/// Evaluates `p` at `λ_j = e^{2πi m_j/M}`, `0 ≤ m_j < M`. The pad is
/// `(π/M) Σ_j Σ_α |c_α| α_j`: every point of the torus is within `π/M` of
/// the lattice in each angle.
pub fn torus_sup_capped(p: &MultiPolynomial, m: usize, max_points: usize) -> Result<TorusSup> {
    if m < 2 {
        return Err(input_err!("torus grid needs M >= 2, got {m}"));
    }
    let d = p.d();
    let points = (m as u128).pow(d as u32);
    if points > max_points as u128 {
        let per_axis = libm::floor(libm::pow(max_points as f64, 1.0 / d as f64)) as usize;
        return Err(input_err!(
            "torus grid M^d = {m}^{d} = {points} exceeds the cap of {max_points} points; use M <= {per_axis}"
        ));
    }
    let lipschitz_pad = PI / m as f64 * p.angular_lipschitz_sum();
    if p.terms().len() <= 1 {
        // one term has constant modulus on the torus
        let g = p.terms().values().next().map_or(0.0, |&c| cabs(c));
        return Ok(TorusSup { m, grid_sup: g, lipschitz_pad, sup_upper: g + lipschitz_pad });
    }

    // roots[k] = e^{2πik/M}; powers of a lattice point are lattice points
    let roots: Vec<C64> = (0..m)
        .map(|k| {
            let (s, c) = math::sin_cos(2.0 * PI * k as f64 / m as f64);
            C64::new(c, s)
        })
        .collect();
    let terms: Vec<(&Vec<u32>, C64)> = p.terms().iter().map(|(a, &c)| (a, c)).collect();

    // partial[t] = c_t ∏_{j < axis} λ_j^{α_j} for the current prefix
    let mut grid_sup = 0.0f64;
    let mut idx = vec![0usize; d];
    let mut partial: Vec<Vec<C64>> = vec![vec![ZERO; terms.len()]; d + 1];
    for (t, &(_, c)) in terms.iter().enumerate() {
        partial[0][t] = c;
    }
    let mut depth = 0;
    loop {
        // refill prefixes from `depth` down to the last axis
        for axis in depth..d {
            let k = idx[axis];
            for (t, &(alpha, _)) in terms.iter().enumerate() {
                let r = roots[(k * alpha[axis] as usize) % m];
                partial[axis + 1][t] = partial[axis][t] * r;
            }
        }
        let value: C64 = partial[d].iter().copied().sum();
        grid_sup = grid_sup.max(cabs(value));

        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(TorusSup { m, grid_sup, lipschitz_pad, sup_upper: grid_sup + lipschitz_pad });
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < m {
                break;
            }
            idx[axis] = 0;
        }
        depth = axis;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "HOLDS",
            Verdict::Violated => "VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VnReport {
    /// `‖p(S)‖`
    pub lhs: f64,
    pub grid_sup: f64,
    pub lipschitz_pad: f64,
    pub sup_upper: f64,
    pub verdict: Verdict,
    pub m: usize,
}

/// HOLDS when `lhs ≤ grid_sup (1 + 1e-12) + tol`, VIOLATED when
/// `lhs > sup_upper + tol`, INCONCLUSIVE in between.
pub fn vn_check(s: &ContractionTuple, p: &MultiPolynomial, m: usize, tol: Tolerance) -> Result<VnReport> {
    let ps = eval_poly(s, p)?;
    let lhs = op_norm(&ps)?;
    let sup = torus_sup(p, m)?;
    let verdict = classify(lhs, &sup, tol);
    Ok(VnReport {
        lhs,
        grid_sup: sup.grid_sup,
        lipschitz_pad: sup.lipschitz_pad,
        sup_upper: sup.sup_upper,
        verdict,
        m,
    })
}

fn classify(lhs: f64, sup: &TorusSup, tol: Tolerance) -> Verdict {
    if lhs <= sup.grid_sup * (1.0 + 1e-12) + tol.eps() {
        Verdict::Holds
    } else if lhs > sup.sup_upper + tol.eps() {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// The degree-three example on `ℂ^8` violating the inequality for `d = 3`.
///
/// Basis order `e, f_1, f_2, f_3, g_1, g_2, g_3, h`. Each `T_i` raises the
/// level by one:
///
/// ```text
/// T_i e = f_i,  T_i f_i = −g_i,  T_i f_j = g_k ({i,j,k} = {1,2,3}),
/// T_i g_j = δ_ij h,  T_i h = 0.
/// ```
///
/// The `T_i` are commuting partial isometries. With
/// `p = z_1 z_2 z_3 − z_1³ − z_2³ − z_3³` one gets `p(T) = 4 h e^*`, so
/// `‖p(T)‖ = 4`, while `sup_{T³} |p| < 3.7`.
pub fn crabb_davie_fixture() -> (ContractionTuple, MultiPolynomial) {
    const E: usize = 0;
    const F: [usize; 3] = [1, 2, 3];
    const G: [usize; 3] = [4, 5, 6];
    const H: usize = 7;
    let mut mats = Vec::with_capacity(3);
    for i in 0..3 {
        let mut t = CMatrix::zeros(8, 8);
        t[(F[i], E)] = ONE;
        for j in 0..3 {
            if j == i {
                t[(G[i], F[i])] = -ONE;
            } else {
                let k = 3 - i - j;
                t[(G[k], F[j])] = ONE;
            }
        }
        t[(H, G[i])] = ONE;
        mats.push(t);
    }
    let tuple = ContractionTuple::new(mats, Tolerance::default()).expect("fixture is a commuting contraction tuple");
    let poly = MultiPolynomial::new(
        3,
        [
            (vec![1, 1, 1], ONE),
            (vec![3, 0, 0], -ONE),
            (vec![0, 3, 0], -ONE),
            (vec![0, 0, 3], -ONE),
        ],
        DEFAULT_DEGREE_CAP,
    )
    .expect("fixture polynomial is valid");
    (tuple, poly)
}

/// Parameters of [`vn_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub d: usize,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub m: usize,
    /// Degree cap of the random test polynomial `p`.
    pub poly_degree: u32,
    /// Degree cap of the polynomials `q_j` with `S_j = q_j(Z)/‖q_j(Z)‖`.
    pub generator_degree: u32,
    pub tol: Tolerance,
}

impl SearchConfig {
    pub fn new(d: usize, dim: usize, trials: usize, seed: u64, m: usize) -> Self {
        SearchConfig {
            d,
            dim,
            trials,
            seed,
            m,
            poly_degree: 3,
            generator_degree: 2,
            tol: Tolerance::default(),
        }
    }
}

/// One case from the search pool, kept when it is a violation so it can be
/// replayed.
#[derive(Debug, Clone)]
pub struct SearchCase {
    /// Trial index, or `trials + k` for the `k`-th extra fixture.
    pub index: usize,
    pub tuple: ContractionTuple,
    pub poly: MultiPolynomial,
    pub report: VnReport,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub cases_run: usize,
    /// Largest `lhs / grid_sup` seen, and the case index attaining it.
    pub max_ratio: f64,
    pub max_ratio_index: usize,
    pub inconclusive: usize,
    pub violations: Vec<SearchCase>,
}

fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn normalised(m: CMatrix) -> Result<CMatrix> {
    let norm = op_norm(&m)?;
    Ok(if norm > 0.0 { m.scale_real(1.0 / norm) } else { m })
}

/// `S_j = q_j(Z) / ‖q_j(Z)‖` for a random contraction `Z` and random
/// polynomials `q_j` without constant term, so the tuple commutes by
/// construction.
fn random_tuple<R: Rng>(rng: &mut R, cfg: &SearchConfig) -> Result<ContractionTuple> {
    let n = cfg.dim;
    let z = CMatrix::new(n, n, (0..n * n).map(|_| random_complex(rng)).collect())?;
    let z = normalised(z)?;
    let mut zp = vec![CMatrix::identity(n)];
    for k in 1..=cfg.generator_degree.max(1) as usize {
        let next = &zp[k - 1] * &z;
        zp.push(next);
    }
    let mut mats = Vec::with_capacity(cfg.d);
    for _ in 0..cfg.d {
        let deg = rng.gen_range(1..=cfg.generator_degree.max(1) as usize);
        let mut q = CMatrix::zeros(n, n);
        for zk in &zp[1..=deg] {
            q = &q + &zk.scale(random_complex(rng));
        }
        if q.is_zero() {
            q = z.clone();
        }
        mats.push(normalised(q)?);
    }
    // commutators are at rounding level; validate loosely, S_j are exact contractions up to rounding
    ContractionTuple::new(mats, Tolerance::new(cfg.tol.eps().max(1e-10))?)
}

fn random_poly<R: Rng>(rng: &mut R, d: usize, max_degree: u32) -> Result<MultiPolynomial> {
    let count = rng.gen_range(2..=5);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let total = rng.gen_range(0..=max_degree);
        let mut alpha = vec![0u32; d];
        for _ in 0..total {
            alpha[rng.gen_range(0..d)] += 1;
        }
        terms.push((alpha, random_complex(rng)));
    }
    let p = MultiPolynomial::new(d, terms, max_degree)?;
    if p.is_zero() {
        MultiPolynomial::constant(d, ONE)
    } else {
        Ok(p)
    }
}

/// Random search for violations of the von Neumann inequality. Trial `i`
/// draws from its own generator seeded with `seed + i`; `extra` cases are
/// checked after the random ones, in order.
pub fn vn_search(cfg: &SearchConfig, extra: &[(ContractionTuple, MultiPolynomial)]) -> Result<SearchReport> {
    if cfg.d == 0 || cfg.dim == 0 {
        return Err(input_err!("search needs d >= 1 and dim >= 1"));
    }
    let mut report = SearchReport {
        config: *cfg,
        cases_run: 0,
        max_ratio: 0.0,
        max_ratio_index: 0,
        inconclusive: 0,
        violations: Vec::new(),
    };
    let mut record = |index: usize, tuple: ContractionTuple, poly: MultiPolynomial| -> Result<()> {
        let r = vn_check(&tuple, &poly, cfg.m, cfg.tol)?;
        let ratio = if r.grid_sup > 0.0 { r.lhs / r.grid_sup } else if r.lhs > 0.0 { f64::INFINITY } else { 0.0 };
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.max_ratio_index = index;
        }
        report.cases_run += 1;
        match r.verdict {
            Verdict::Violated => report.violations.push(SearchCase { index, tuple, poly, report: r }),
            Verdict::Inconclusive => report.inconclusive += 1,
            Verdict::Holds => {}
        }
        Ok(())
    };
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial as u64));
        let tuple = random_tuple(&mut rng, cfg)?;
        let poly = random_poly(&mut rng, cfg.d, cfg.poly_degree)?;
        record(trial, tuple, poly)?;
    }
    for (k, (tuple, poly)) in extra.iter().enumerate() {
        if tuple.d() != cfg.d {
            return Err(input_err!("extra case {k} has d = {}, search uses d = {}", tuple.d(), cfg.d));
        }
        record(cfg.trials + k, tuple.clone(), poly.clone())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nilpotent() -> ContractionTuple {
        ContractionTuple::new(vec![CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()], Tolerance::default())
            .unwrap()
    }

    #[test]
    fn polynomial_invariants() {
        let p = MultiPolynomial::new(2, [(vec![1, 0], ONE), (vec![1, 0], -ONE), (vec![0, 2], ONE)], 16).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.degree(), 2);
        assert!(MultiPolynomial::new(2, [(vec![1], ONE)], 16).is_err());
        assert!(MultiPolynomial::new(1, [(vec![17], ONE)], 16).is_err());
        assert!(MultiPolynomial::new(1, [(vec![1], c(f64::NAN, 0.0))], 16).is_err());
    }

    #[test]
    fn eval_poly_examples() {
        let s = nilpotent();
        let one = MultiPolynomial::constant(1, ONE).unwrap();
        assert_eq!(eval_poly(&s, &one).unwrap(), CMatrix::identity(2));
        let x = MultiPolynomial::monomial(vec![1], ONE).unwrap();
        assert_eq!(eval_poly(&s, &x).unwrap(), s.mats()[0]);
        let x2 = MultiPolynomial::monomial(vec![2], ONE).unwrap();
        assert!(eval_poly(&s, &x2).unwrap().is_zero());
        let wrong = MultiPolynomial::monomial(vec![1, 1], ONE).unwrap();
        assert!(eval_poly(&s, &wrong).is_err());
    }

    #[test]
    fn torus_sup_examples() {
        let k = MultiPolynomial::constant(2, c(3.0, 4.0)).unwrap();
        let r = torus_sup(&k, 8).unwrap();
        assert_eq!((r.grid_sup, r.lipschitz_pad, r.sup_upper), (5.0, 0.0, 5.0));
        let x = MultiPolynomial::monomial(vec![1], ONE).unwrap();
        assert_eq!(torus_sup(&x, 8).unwrap().grid_sup, 1.0);
        let zz = MultiPolynomial::new(1, [(vec![1], ONE), (vec![2], ONE)], 16).unwrap();
        let r = torus_sup(&zz, 64).unwrap();
        assert_eq!(r.grid_sup, 2.0);
        assert!((r.lipschitz_pad - 3.0 * PI / 64.0).abs() < 1e-15);
        assert!(torus_sup(&zz, 1).is_err());
        let big = MultiPolynomial::new(3, [(vec![1, 0, 0], ONE), (vec![0, 0, 1], ONE)], 16).unwrap();
        assert!(torus_sup_capped(&big, 64, 1000).is_err());
    }

    #[test]
    fn torus_sup_matches_direct_evaluation() {
        let p = MultiPolynomial::new(
            2,
            [(vec![1, 2], c(0.5, -1.0)), (vec![0, 1], c(0.3, 0.2)), (vec![3, 0], c(-0.7, 0.0)), (vec![0, 0], c(0.1, 0.1))],
            16,
        )
        .unwrap();
        let m = 24;
        let mut best = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let angle = |k: usize| {
                    let th = 2.0 * PI * k as f64 / m as f64;
                    c(th.cos(), th.sin())
                };
                best = best.max(cabs(p.eval_at(&[angle(a), angle(b)])));
            }
        }
        let r = torus_sup(&p, m).unwrap();
        assert!((r.grid_sup - best).abs() < 1e-13);
    }

    #[test]
    fn powers_of_a_contraction_hold() {
        let s = nilpotent();
        for k in 0..4 {
            let p = MultiPolynomial::monomial(vec![k], ONE).unwrap();
            let r = vn_check(&s, &p, 16, Tolerance::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Holds);
            assert!(r.lhs <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn diagonal_unitaries_hold_with_exact_lhs() {
        let ph = |k: f64| c((2.0 * PI * k).cos(), (2.0 * PI * k).sin());
        let s1 = CMatrix::diag(&[ph(0.1), ph(0.35), ph(0.8)]);
        let s2 = CMatrix::diag(&[ph(0.5), ph(0.05), ph(0.6)]);
        let tuple = ContractionTuple::new(vec![s1.clone(), s2.clone()], Tolerance::default()).unwrap();
        let p = MultiPolynomial::new(2, [(vec![1, 1], ONE), (vec![2, 0], c(0.0, 1.0)), (vec![0, 0], c(0.5, 0.0))], 16)
            .unwrap();
        let exact = (0..3).map(|j| cabs(p.eval_at(&[s1[(j, j)], s2[(j, j)]]))).fold(0.0, f64::max);
        let r = vn_check(&tuple, &p, 256, Tolerance::default()).unwrap();
        assert!((r.lhs - exact).abs() < 1e-12);
        assert_ne!(r.verdict, Verdict::Violated);
        assert!(r.lhs <= r.sup_upper);
    }

    #[test]
    fn crabb_davie_is_violated() {
        let (tuple, p) = crabb_davie_fixture();
        let pt = eval_poly(&tuple, &p).unwrap();
        let mut expect = CMatrix::zeros(8, 8);
        expect[(7, 0)] = c(4.0, 0.0);
        assert_eq!(pt, expect);
        let r = vn_check(&tuple, &p, 256, Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!((r.lhs - 4.0).abs() < 1e-14);
        assert!(r.lhs - r.sup_upper > 1e-3);
        assert!((r.lipschitz_pad - 12.0 * PI / 256.0).abs() < 1e-15);
    }

    #[test]
    fn search_single_variable_never_violates() {
        let cfg = SearchConfig::new(1, 3, 60, 7, 64);
        let r = vn_search(&cfg, &[]).unwrap();
        assert_eq!(r.cases_run, 60);
        assert!(r.violations.is_empty());
        assert!(r.max_ratio <= 1.0 + 1e-9, "{}", r.max_ratio);
    }

    #[test]
    fn search_is_deterministic_and_finds_the_fixture() {
        let cfg = SearchConfig::new(3, 2, 10, 42, 32);
        let a = vn_search(&cfg, &[]).unwrap();
        let b = vn_search(&cfg, &[]).unwrap();
        assert_eq!(a.max_ratio, b.max_ratio);
        assert_eq!(a.max_ratio_index, b.max_ratio_index);
        let wide = SearchConfig { d: 3, dim: 8, trials: 3, seed: 1, m: 256, ..cfg };
        let r = vn_search(&wide, &[crabb_davie_fixture()]).unwrap();
        assert!(r.violations.iter().any(|v| v.index == 3));
        assert!(vn_search(&SearchConfig::new(2, 2, 1, 0, 8), &[crabb_davie_fixture()]).is_err());
    }

    fn small_poly(d: usize) -> impl Strategy<Value = MultiPolynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, d), -1.0f64..1.0, -1.0f64..1.0), 1..5)
            .prop_map(move |ts| MultiPolynomial::new(d, ts.into_iter().map(|(a, re, im)| (a, c(re, im))), 16).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn sup_upper_shrinks_under_dyadic_refinement(p in small_poly(2)) {
            let deg = p.degree().max(1) as usize;
            let m = 16 * deg;
            let a = torus_sup(&p, m).unwrap();
            let b = torus_sup(&p, 2 * m).unwrap();
            let c4 = torus_sup(&p, 4 * m).unwrap();
            prop_assert!(a.grid_sup <= b.grid_sup + 1e-12 && b.grid_sup <= c4.grid_sup + 1e-12);
            prop_assert!(b.sup_upper <= a.sup_upper + 1e-12);
            prop_assert!(c4.sup_upper <= b.sup_upper + 1e-12);
        }

        #[test]
        fn eval_poly_is_linear(p in small_poly(2), q in small_poly(2)) {
            let (tuple, _) = crabb_davie_fixture();
            let s = ContractionTuple::new(tuple.mats()[..2].to_vec(), Tolerance::default()).unwrap();
            let sum = eval_poly(&s, &p.add(&q).unwrap()).unwrap();
            let parts = &eval_poly(&s, &p).unwrap() + &eval_poly(&s, &q).unwrap();
            prop_assert!((&sum - &parts).max_abs() <= 1e-14);
        }

        #[test]
        fn eval_poly_factorises(a in 0u32..4, b in 0u32..4) {
            let (tuple, _) = crabb_davie_fixture();
            let s = ContractionTuple::new(tuple.mats()[..2].to_vec(), Tolerance::default()).unwrap();
            let whole = eval_poly(&s, &MultiPolynomial::monomial(vec![a, b], ONE).unwrap()).unwrap();
            let split = &eval_poly(&s, &MultiPolynomial::monomial(vec![a, 0], ONE).unwrap()).unwrap()
                * &eval_poly(&s, &MultiPolynomial::monomial(vec![0, b], ONE).unwrap()).unwrap();
            prop_assert!((&whole - &split).max_abs() <= 1e-10);
        }
    }
}
