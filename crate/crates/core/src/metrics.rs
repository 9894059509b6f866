//! Kantorovich and Prokhorov distances between distributions on a finite
//! metric space, computed exactly.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::finprob::Distribution;
use crate::lp::{solve, Constraint, LinearProgram, LpOutcome, Relation};
use crate::rational::{fmt_rational, int, ratio, Rational};
use crate::report::Verdict;
use crate::value::{canonical_set, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    points: Vec<Value>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    /// Points in any order; `dist[i][j]` refers to that order.
    pub fn new(points: Vec<Value>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::domain("distance matrix has the wrong shape"));
        }
        let sorted = canonical_set(points.iter().cloned());
        if sorted.len() != n {
            return Err(Error::domain("repeated point"));
        }
        let pos: Vec<usize> = sorted.iter().map(|x| points.iter().position(|y| y == x).unwrap()).collect();
        let dist: Vec<Vec<Rational>> = pos.iter().map(|&i| pos.iter().map(|&j| dist[i][j].clone()).collect()).collect();
        let m = FiniteMetricSpace { points: sorted, dist };
        let problems = m.violations();
        if let Some(p) = problems.first() {
            return Err(Error::validation(p.clone()));
        }
        Ok(m)
    }

    pub fn from_fn(points: Vec<Value>, d: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        let n = points.len();
        let dist = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
        Self::new(points, dist)
    }

    /// Points of the real line with `|x − y|`, named by their coordinates.
    pub fn real_line(coords: &[Rational]) -> Result<Self> {
        let points = coords.iter().map(|c| Value::atom(fmt_rational(c))).collect();
        Self::from_fn(points, |i, j| (&coords[i] - &coords[j]).abs())
    }

    fn violations(&self) -> Vec<String> {
        let n = self.points.len();
        let mut out = Vec::new();
        for i in 0..n {
            if !self.dist[i][i].is_zero() {
                out.push(format!("d({0},{0}) ≠ 0", self.points[i]));
            }
            for j in 0..n {
                if self.dist[i][j] != self.dist[j][i] {
                    out.push(format!("d is not symmetric at ({},{})", self.points[i], self.points[j]));
                }
                if i != j && !self.dist[i][j].is_positive() {
                    out.push(format!("d({},{}) is not positive", self.points[i], self.points[j]));
                }
                for k in 0..n {
                    if self.dist[i][k] > &self.dist[i][j] + &self.dist[j][k] {
                        out.push(format!("triangle inequality fails at ({},{},{})", self.points[i], self.points[j], self.points[k]));
                    }
                }
            }
        }
        out
    }

    pub fn points(&self) -> &[Value] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().flatten().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_json(&self) -> Json {
        let mut d = serde_json::Map::new();
        for (i, x) in self.points.iter().enumerate() {
            for (j, y) in self.points.iter().enumerate() {
                if i < j {
                    d.insert(format!("({x},{y})"), Json::String(fmt_rational(&self.dist[i][j])));
                }
            }
        }
        json!({"points": self.points.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "dist": d})
    }
}

fn masses(p: &Distribution, m: &FiniteMetricSpace) -> Result<Vec<Rational>> {
    if p.carrier() != m.points() {
        return Err(Error::domain("distribution carrier differs from the metric space's points"));
    }
    Ok(m.points.iter().map(|x| p.weight(x)).collect())
}

/// `max Σ h(x)c(x)` over `|h(x) − h(y)| ≤ d(x,y)`, `0 ≤ h ≤ 1`.
fn potential_lp(c: &[Rational], m: &FiniteMetricSpace) -> (Rational, Vec<Rational>) {
    let n = m.len();
    let mut constraints = Vec::new();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        constraints.push(Constraint { coeffs: e, rel: Relation::Le, rhs: Rational::one() });
        for j in 0..n {
            if i != j {
                let mut e = vec![Rational::zero(); n];
                e[i] = Rational::one();
                e[j] = -Rational::one();
                constraints.push(Constraint { coeffs: e, rel: Relation::Le, rhs: m.dist[i][j].clone() });
            }
        }
    }
    match solve(&LinearProgram { objective: c.to_vec(), constraints, maximize: true }) {
        LpOutcome::Optimal { value, x } => (value, x),
        o => unreachable!("bounded feasible program reported {o:?}"),
    }
}

/// `sup |∫h dp − ∫h dq|` over non-expansive `h: X → [0,1]`, with an
/// optimal potential.
pub fn kantorovich_dual_potential(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace) -> Result<(Rational, Vec<Rational>)> {
    let (pm, qm) = (masses(p, m)?, masses(q, m)?);
    let c: Vec<Rational> = pm.iter().zip(&qm).map(|(a, b)| a - b).collect();
    let neg: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    let (a, ha) = potential_lp(&c, m);
    let (b, hb) = potential_lp(&neg, m);
    Ok(if a >= b { (a, ha) } else { (b, hb) })
}

pub fn kantorovich_dual(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace) -> Result<Rational> {
    kantorovich_dual_potential(p, q, m).map(|r| r.0)
}

pub const VERTEX_ENUMERATION_MAX: usize = 5;

/// The dual optimum by enumerating every vertex of the potential polytope.
pub fn kantorovich_vertex_enumeration(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace) -> Result<Rational> {
    let n = m.len();
    if n > VERTEX_ENUMERATION_MAX {
        return Err(Error::resource("vertex enumeration points", n, VERTEX_ENUMERATION_MAX));
    }
    let (pm, qm) = (masses(p, m)?, masses(q, m)?);
    let c: Vec<Rational> = pm.iter().zip(&qm).map(|(a, b)| a - b).collect();
    // rows a·h ≤ b
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        rows.push((e.clone(), Rational::one()));
        e[i] = -Rational::one();
        rows.push((e, Rational::zero()));
        for j in 0..n {
            if i != j {
                let mut e = vec![Rational::zero(); n];
                e[i] = Rational::one();
                e[j] = -Rational::one();
                rows.push((e, m.dist[i][j].clone()));
            }
        }
    }
    let mut best: Option<Rational> = None;
    let mut choice: Vec<usize> = (0..n).collect();
    loop {
        if let Some(h) = solve_square(&choice.iter().map(|&r| rows[r].clone()).collect::<Vec<_>>()) {
            let feasible = rows.iter().all(|(a, b)| a.iter().zip(&h).map(|(x, y)| x * y).sum::<Rational>() <= *b);
            if feasible {
                let v: Rational = c.iter().zip(&h).map(|(x, y)| x * y).sum();
                let v = v.abs();
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
        // next n-combination of rows
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best.unwrap_or_else(Rational::zero));
            }
            i -= 1;
            if choice[i] < rows.len() - n + i {
                choice[i] += 1;
                for k in i + 1..n {
                    choice[k] = choice[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unique solution of a square system, if it has one.
fn solve_square(rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// `min Σ d(x,y)π(x,y)` over couplings of `p` and `q`.
pub fn wasserstein_primal(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace) -> Result<Rational> {
    let (pm, qm) = (masses(p, m)?, masses(q, m)?);
    let n = m.len();
    let objective: Vec<Rational> = (0..n * n).map(|k| m.dist[k / n][k % n].clone()).collect();
    let mut constraints = Vec::new();
    for i in 0..n {
        let row = (0..n * n).map(|k| if k / n == i { Rational::one() } else { Rational::zero() }).collect();
        constraints.push(Constraint { coeffs: row, rel: Relation::Eq, rhs: pm[i].clone() });
        let col = (0..n * n).map(|k| if k % n == i { Rational::one() } else { Rational::zero() }).collect();
        constraints.push(Constraint { coeffs: col, rel: Relation::Eq, rhs: qm[i].clone() });
    }
    match solve(&LinearProgram { objective, constraints, maximize: false }) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        o => Err(Error::validation(format!("transport program reported {o:?}"))),
    }
}

pub const PROKHOROV_MAX_POINTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProkhorovResult {
    pub value: Rational,
    /// Whether some `α > 0` equal to the infimum is itself feasible.
    pub attained: bool,
    /// A subset whose constraint determines the value.
    pub binding: Vec<Value>,
}

/// `inf{α > 0 : ∀A p(A) ≤ q(A_α) + α}` with closed fattenings.
pub fn prokhorov(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace) -> Result<Rational> {
    prokhorov_detailed(p, q, m, PROKHOROV_MAX_POINTS).map(|r| r.value)
}

pub fn prokhorov_detailed(p: &Distribution, q: &Distribution, m: &FiniteMetricSpace, max_points: usize) -> Result<ProkhorovResult> {
    let n = m.len();
    if n > max_points {
        return Err(Error::resource("Prokhorov subsets of points", n, max_points));
    }
    let (pm, qm) = (masses(p, m)?, masses(q, m)?);
    let mut best = Rational::zero();
    let mut binding = 0u64;
    for mask in 1u64..(1u64 << n) {
        let pa: Rational = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| &pm[i]).sum();
        // distance of each point to A; the fattening at α holds the points within α
        let mut near: Vec<(Rational, usize)> = (0..n)
            .map(|x| {
                let d = (0..n).filter(|&a| mask >> a & 1 == 1).map(|a| m.dist[a][x].clone()).min().unwrap();
                (d, x)
            })
            .collect();
        near.sort();
        let mut q_in = Rational::zero();
        let mut k = 0;
        let alpha = loop {
            let level = near[k].0.clone();
            while k < n && near[k].0 == level {
                q_in += &qm[near[k].1];
                k += 1;
            }
            let need = &pa - &q_in;
            let candidate = if need > level { need } else { level };
            if k == n || candidate < near[k].0 {
                break candidate;
            }
        };
        if alpha > best {
            best = alpha;
            binding = mask;
        }
    }
    let attained = best.is_positive();
    Ok(ProkhorovResult {
        value: best,
        attained,
        binding: (0..n).filter(|&i| binding >> i & 1 == 1).map(|i| m.points[i].clone()).collect(),
    })
}

/// The three-point space and pair of distributions separating the two metrics.
pub fn paper_example() -> (FiniteMetricSpace, Distribution, Distribution) {
    let m = FiniteMetricSpace::real_line(&[int(0), ratio(1, 2), int(1)]).expect("valid space");
    let pt = |s: &str| Value::atom(s);
    let p = Distribution::new(m.points().to_vec(), vec![(pt("0"), ratio(3, 5)), (pt("1"), ratio(2, 5))]).unwrap();
    let q = Distribution::new(m.points().to_vec(), vec![(pt("1/2"), ratio(3, 5)), (pt("1"), ratio(2, 5))]).unwrap();
    (m, p, q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricConfig {
    pub seed: u64,
    pub draws: usize,
    pub max_points: usize,
    pub grid: u32,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { seed: 0, draws: 500, max_points: 6, grid: 6 }
    }
}

fn random_space(rng: &mut ChaCha8Rng, n: usize, grid: u32, line: bool) -> FiniteMetricSpace {
    let g = grid.max(1) as i64;
    if line {
        let mut coords: Vec<i64> = (0..=g).collect();
        coords.shuffle(rng);
        let cs: Vec<Rational> = coords.into_iter().take(n).map(|c| ratio(c, g)).collect();
        return FiniteMetricSpace::real_line(&cs).expect("line metric");
    }
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = ratio(rng.random_range(1..=2 * g), g);
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let points = (0..n).map(|i| Value::atom(format!("p{i}"))).collect();
    FiniteMetricSpace::new(points, d).expect("shortest-path metric")
}

fn random_distribution(rng: &mut ChaCha8Rng, m: &FiniteMetricSpace, grid: u32) -> Distribution {
    let g = grid.max(1) as usize;
    let mut counts = vec![0i64; m.len()];
    for _ in 0..g {
        counts[rng.random_range(0..m.len())] += 1;
    }
    let entries = m.points().iter().cloned().zip(counts).map(|(x, c)| (x, ratio(c, g as i64))).collect();
    Distribution::new(m.points().to_vec(), entries).expect("grid distribution")
}

pub const METRIC_CHECKS: [&str; 6] = [
    "metrics.paper_example",
    "metrics.huber",
    "metrics.duality",
    "metrics.symmetry",
    "metrics.triangle",
    "metrics.identity",
];

/// The Huber inequality, duality, symmetry, triangle inequality and
/// identity of indiscernibles on seeded random instances, plus the fixed
/// example where the Prokhorov distance exceeds the Kantorovich one.
pub fn metric_inequality_suite(cfg: &MetricConfig) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let (m, p, q) = paper_example();
    let (dk, dp, w) = (kantorovich_dual(&p, &q, &m)?, prokhorov(&p, &q, &m)?, wasserstein_primal(&p, &q, &m)?);
    let ok = dk == ratio(3, 10) && dp == ratio(1, 2) && w == dk && &dp * &dp <= dk;
    let detail = format!(
        "d_K = {}, d_P = {}, d_P² = {} ≤ d_K; d_P > d_K on this instance",
        fmt_rational(&dk),
        fmt_rational(&dp),
        fmt_rational(&(&dp * &dp))
    );
    let v = if ok {
        Verdict::pass(METRIC_CHECKS[0], 1).with_detail(detail)
    } else {
        Verdict::fail(METRIC_CHECKS[0], 1, detail, Some(json!({"space": m.to_json(), "p": p.to_json(), "q": q.to_json()})))
    };
    out.push(v);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fails: Vec<Option<(String, Json)>> = vec![None; 5];
    let mut counts = [0u64; 5];
    for draw in 0..cfg.draws {
        let n = rng.random_range(2..=cfg.max_points.max(2));
        let m = random_space(&mut rng, n.min(cfg.grid as usize + 1), cfg.grid, draw % 2 == 0);
        let p = random_distribution(&mut rng, &m, cfg.grid);
        let q = random_distribution(&mut rng, &m, cfg.grid);
        let r = random_distribution(&mut rng, &m, cfg.grid);
        let inst = || json!({"draw": draw, "seed": cfg.seed, "space": m.to_json(), "p": p.to_json(), "q": q.to_json(), "r": r.to_json()});
        let k = |a: &Distribution, b: &Distribution| kantorovich_dual(a, b, &m);
        let pr = |a: &Distribution, b: &Distribution| prokhorov(a, b, &m);
        let (kpq, kqp, kqr, kpr) = (k(&p, &q)?, k(&q, &p)?, k(&q, &r)?, k(&p, &r)?);
        let (ppq, pqp, pqr, ppr) = (pr(&p, &q)?, pr(&q, &p)?, pr(&q, &r)?, pr(&p, &r)?);
        let mut note = |slot: usize, bad: bool, msg: String| {
            counts[slot] += 1;
            if bad && fails[slot].is_none() {
                fails[slot] = Some((format!("draw {draw}: {msg}"), inst()));
            }
        };
        note(0, &ppq * &ppq > kpq, format!("d_P² = {} > d_K = {}", fmt_rational(&(&ppq * &ppq)), fmt_rational(&kpq)));
        if m.diameter() <= Rational::one() {
            let w = wasserstein_primal(&p, &q, &m)?;
            note(1, w != kpq, format!("dual {} ≠ primal {}", fmt_rational(&kpq), fmt_rational(&w)));
        }
        note(2, kpq != kqp || ppq != pqp, "a metric is not symmetric".into());
        note(3, kpr > &kpq + &kqr || ppr > &ppq + &pqr, "triangle inequality fails".into());
        let same = p == q;
        note(4, same != kpq.is_zero() || same != ppq.is_zero() || !k(&p, &p)?.is_zero() || !pr(&p, &p)?.is_zero(), "distance zero iff equal fails".into());
    }
    for (i, f) in fails.into_iter().enumerate() {
        out.push(Verdict::from_outcome(METRIC_CHECKS[i + 1], counts[i], f));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirac_on(m: &FiniteMetricSpace, i: usize) -> Distribution {
        Distribution::new(m.points().to_vec(), vec![(m.points()[i].clone(), int(1))]).unwrap()
    }

    #[test]
    fn example_values() {
        let (m, p, q) = paper_example();
        assert_eq!(kantorovich_dual(&p, &q, &m).unwrap(), ratio(3, 10));
        assert_eq!(wasserstein_primal(&p, &q, &m).unwrap(), ratio(3, 10));
        assert_eq!(kantorovich_vertex_enumeration(&p, &q, &m).unwrap(), ratio(3, 10));
        let r = prokhorov_detailed(&p, &q, &m, 16).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        assert!(r.attained);
        assert_eq!(r.binding, vec![Value::atom("0")]);
    }

    #[test]
    fn identical_and_dirac() {
        let m = FiniteMetricSpace::real_line(&[int(0), ratio(1, 3), ratio(3, 4)]).unwrap();
        let p = Distribution::uniform(m.points().to_vec()).unwrap();
        assert!(kantorovich_dual(&p, &p, &m).unwrap().is_zero());
        assert!(wasserstein_primal(&p, &p, &m).unwrap().is_zero());
        assert!(prokhorov(&p, &p, &m).unwrap().is_zero());
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = (dirac_on(&m, i), dirac_on(&m, j));
                let d = m.d(i, j).clone();
                assert_eq!(kantorovich_dual(&a, &b, &m).unwrap(), d);
                assert_eq!(wasserstein_primal(&a, &b, &m).unwrap(), d);
                assert_eq!(prokhorov(&a, &b, &m).unwrap(), d);
            }
        }
    }

    #[test]
    fn bounded_potential_binds_beyond_diameter_one() {
        let m = FiniteMetricSpace::real_line(&[int(0), int(3)]).unwrap();
        let (a, b) = (dirac_on(&m, 0), dirac_on(&m, 1));
        assert_eq!(kantorovich_dual(&a, &b, &m).unwrap(), int(1));
        assert_eq!(wasserstein_primal(&a, &b, &m).unwrap(), int(3));
        assert_eq!(prokhorov(&a, &b, &m).unwrap(), int(1));
    }

    #[test]
    fn invalid_spaces() {
        let pts = vec![Value::atom("a"), Value::atom("b"), Value::atom("c")];
        let bad = FiniteMetricSpace::from_fn(pts.clone(), |i, j| if i == j { int(0) } else if i + j == 2 { int(5) } else { int(1) });
        assert!(bad.is_err());
        assert!(FiniteMetricSpace::from_fn(pts, |_, _| int(0)).is_err());
    }

    #[test]
    fn carrier_mismatch() {
        let (m, p, _) = paper_example();
        let other = Distribution::uniform(vec![Value::atom("z")]).unwrap();
        assert!(kantorovich_dual(&p, &other, &m).is_err());
        assert!(prokhorov(&other, &p, &m).is_err());
    }

    #[test]
    fn prokhorov_bound() {
        let pts: Vec<Rational> = (0..17).map(|i| ratio(i, 16)).collect();
        let m = FiniteMetricSpace::real_line(&pts).unwrap();
        let p = Distribution::uniform(m.points().to_vec()).unwrap();
        assert!(prokhorov(&p, &p, &m).unwrap_err().is_resource());
    }

    #[test]
    fn vertex_enumeration_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..12 {
            let m = random_space(&mut rng, 2 + i % 3, 4, i % 2 == 0);
            let p = random_distribution(&mut rng, &m, 4);
            let q = random_distribution(&mut rng, &m, 4);
            assert_eq!(kantorovich_vertex_enumeration(&p, &q, &m).unwrap(), kantorovich_dual(&p, &q, &m).unwrap());
        }
    }

    #[test]
    fn suite_small() {
        let v = metric_inequality_suite(&MetricConfig { draws: 40, seed: 5, ..MetricConfig::default() }).unwrap();
        for x in &v {
            assert!(x.passed, "{x:?}");
        }
    }
}
