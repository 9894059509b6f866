//! Finite k-polymeasures: set functions of k subset arguments, additive in
//! each slot separately. On finite carriers such a function is determined
//! by its values on singleton tuples, which is how it is stored.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::finprob::{Distribution, FinMap};
use crate::rational::{fmt_rational, Rational};
use crate::value::{canonical_set, index_tuples, lnest, product_set, unnest, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polymeasure {
    carriers: Vec<Vec<Value>>,
    density: BTreeMap<Vec<Value>, Rational>,
}

impl Polymeasure {
    /// Build from singleton-tuple densities; they must be non-negative and
    /// sum to 1.
    pub fn from_density(carriers: Vec<Vec<Value>>, entries: Vec<(Vec<Value>, Rational)>) -> Result<Self> {
        let p = Self::raw(carriers, entries)?;
        let m = p.mass();
        if !m.is_one() {
            return Err(Error::validation(format!("densities sum to {}, not 1", fmt_rational(&m))));
        }
        Ok(p)
    }

    /// Like [`Polymeasure::from_density`] without the normalization check.
    pub fn raw(carriers: Vec<Vec<Value>>, entries: Vec<(Vec<Value>, Rational)>) -> Result<Self> {
        let mut cs = Vec::with_capacity(carriers.len());
        for c in carriers {
            let n = c.len();
            let c = canonical_set(c);
            if c.len() != n {
                return Err(Error::domain("carrier has repeated elements"));
            }
            cs.push(c);
        }
        let mut density = BTreeMap::new();
        for (t, w) in entries {
            if t.len() != cs.len() || t.iter().zip(&cs).any(|(x, c)| c.binary_search(x).is_err()) {
                return Err(Error::domain(format!("density tuple ({}) is outside the carriers", join(&t))));
            }
            if w.is_negative() {
                return Err(Error::domain(format!("negative density {w}")));
            }
            if density.contains_key(&t) {
                return Err(Error::domain(format!("density for ({}) given twice", join(&t))));
            }
            if !w.is_zero() {
                density.insert(t, w);
            }
        }
        Ok(Polymeasure { carriers: cs, density })
    }

    /// Assemble from canonical carriers and a density already known to lie
    /// inside them.
    pub(crate) fn from_parts(carriers: Vec<Vec<Value>>, mut density: BTreeMap<Vec<Value>, Rational>) -> Self {
        density.retain(|_, w| !w.is_zero());
        Polymeasure { carriers, density }
    }

    /// The arity-0 polymeasure with value 1.
    pub fn unit() -> Self {
        Polymeasure { carriers: Vec::new(), density: BTreeMap::from([(Vec::new(), Rational::one())]) }
    }

    /// The arity-1 polymeasure of a distribution.
    pub fn from_distribution(d: &Distribution) -> Self {
        Polymeasure {
            carriers: vec![d.carrier().to_vec()],
            density: d.weights().iter().map(|(x, w)| (vec![x.clone()], w.clone())).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.carriers.len()
    }

    pub fn carriers(&self) -> &[Vec<Value>] {
        &self.carriers
    }

    pub fn density(&self) -> &BTreeMap<Vec<Value>, Rational> {
        &self.density
    }

    pub fn density_at(&self, t: &[Value]) -> Rational {
        self.density.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        self.density.values().fold(Rational::zero(), |a, w| a + w)
    }

    /// `γ(A₁, …, A_k)`, each `A_i` given by a membership test.
    pub fn eval_with(&self, member: impl Fn(usize, &Value) -> bool) -> Rational {
        self.density
            .iter()
            .filter(|(t, _)| t.iter().enumerate().all(|(i, x)| member(i, x)))
            .fold(Rational::zero(), |a, (_, w)| a + w)
    }

    /// `γ(A₁, …, A_k)` for explicit subsets.
    pub fn eval(&self, sets: &[Vec<Value>]) -> Result<Rational> {
        if sets.len() != self.arity() {
            return Err(Error::domain("wrong number of subset arguments"));
        }
        Ok(self.eval_with(|i, x| sets[i].contains(x)))
    }

    /// `γ` on subsets given as bitmasks over carrier positions.
    pub fn eval_masks(&self, masks: &[u64]) -> Rational {
        self.eval_with(|i, x| {
            let j = self.carriers[i].binary_search(x).unwrap();
            masks[i] >> j & 1 == 1
        })
    }

    pub fn into_value(self) -> Value {
        Value::Poly(Arc::new(self))
    }

    /// The full table on all tuples of subsets.
    pub fn full_table(&self) -> RawPolyTable {
        let shape: Vec<usize> = self.carriers.iter().map(|c| 1usize << c.len()).collect();
        let values = index_tuples(&shape)
            .into_iter()
            .map(|ix| {
                let masks: Vec<u64> = ix.iter().map(|&m| m as u64).collect();
                let v = self.eval_masks(&masks);
                (masks, v)
            })
            .collect();
        RawPolyTable { carriers: self.carriers.clone(), values }
    }

    pub fn to_json(&self) -> Json {
        let d: serde_json::Map<String, Json> = self
            .density
            .iter()
            .map(|(t, w)| (format!("({})", join(t)), Json::String(fmt_rational(w))))
            .collect();
        json!({
            "carriers": self.carriers.iter().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "density": d,
        })
    }

    /// Permute slots: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.arity()];
        if perm.len() != self.arity() || perm.iter().any(|&j| j >= seen.len() || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::domain("not a permutation of the slots"));
        }
        Ok(Polymeasure {
            carriers: perm.iter().map(|&j| self.carriers[j].clone()).collect(),
            density: self
                .density
                .iter()
                .map(|(t, w)| (perm.iter().map(|&j| t[j].clone()).collect(), w.clone()))
                .collect(),
        })
    }

    /// The one-slot marginal.
    pub fn marginal(&self, slot: usize) -> Result<Distribution> {
        if slot >= self.arity() {
            return Err(Error::domain("slot out of range"));
        }
        let mut w: BTreeMap<Value, Rational> = BTreeMap::new();
        for (t, v) in &self.density {
            *w.entry(t[slot].clone()).or_insert_with(Rational::zero) += v;
        }
        Distribution::new(self.carriers[slot].clone(), w.into_iter().collect())
    }
}

fn join(t: &[Value]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Polymeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Value::Poly(Arc::new(self.clone())))
    }
}

/// A set function given on every tuple of subsets (subsets as bitmasks
/// over carrier positions), as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPolyTable {
    pub carriers: Vec<Vec<Value>>,
    pub values: BTreeMap<Vec<u64>, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyViolation {
    Missing { masks: Vec<u64> },
    OutOfRange { masks: Vec<u64>, value: Rational },
    Normalization { value: Rational },
    Additivity { slot: usize, a: u64, b: u64, rest: Vec<u64>, union: Rational, sum: Rational },
}

impl fmt::Display for PolyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyViolation::Missing { masks } => write!(f, "no value for subset tuple {masks:?}"),
            PolyViolation::OutOfRange { masks, value } => write!(f, "value {value} at {masks:?} is outside [0,1]"),
            PolyViolation::Normalization { value } => write!(f, "value on the full carriers is {value}, not 1"),
            PolyViolation::Additivity { slot, a, b, rest, union, sum } => write!(
                f,
                "slot {slot}: disjoint sets {a:#b} and {b:#b} (other slots {rest:?}) give {union} on the union but {sum} summed"
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolyValidation {
    pub violations: Vec<PolyViolation>,
    pub canonical: Option<Polymeasure>,
}

impl PolyValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check slotwise additivity on all disjoint pairs, range and normalization;
/// on success return the singleton-density form.
pub fn validate_polymeasure(raw: &RawPolyTable) -> PolyValidation {
    let k = raw.carriers.len();
    let sizes: Vec<usize> = raw.carriers.iter().map(|c| c.len()).collect();
    let mut violations = Vec::new();
    let all = index_tuples(&sizes.iter().map(|&n| 1usize << n).collect::<Vec<_>>());
    for ix in &all {
        let masks: Vec<u64> = ix.iter().map(|&m| m as u64).collect();
        match raw.values.get(&masks) {
            None => violations.push(PolyViolation::Missing { masks }),
            Some(v) if v.is_negative() || v > &Rational::one() => violations.push(PolyViolation::OutOfRange { masks, value: v.clone() }),
            _ => {}
        }
    }
    if !violations.is_empty() {
        return PolyValidation { violations, canonical: None };
    }
    let full: Vec<u64> = sizes.iter().map(|&n| (1u64 << n) - 1).collect();
    let top = &raw.values[&full];
    if !top.is_one() {
        violations.push(PolyViolation::Normalization { value: top.clone() });
    }
    for slot in 0..k {
        let n = sizes[slot];
        let mut other_shape: Vec<usize> = sizes.iter().map(|&m| 1usize << m).collect();
        other_shape[slot] = 1;
        for rest in index_tuples(&other_shape) {
            let mut masks: Vec<u64> = rest.iter().map(|&m| m as u64).collect();
            for a in 0..(1u64 << n) {
                // b ranges over subsets of the complement of a, with a ≤ b to skip mirrored pairs
                let comp = ((1u64 << n) - 1) & !a;
                let mut b = comp;
                loop {
                    if a <= b {
                        masks[slot] = a | b;
                        let union = raw.values[&masks].clone();
                        masks[slot] = a;
                        let va = raw.values[&masks].clone();
                        masks[slot] = b;
                        let sum = va + &raw.values[&masks];
                        if union != sum {
                            let mut rest_masks = masks.clone();
                            rest_masks[slot] = 0;
                            violations.push(PolyViolation::Additivity { slot, a, b, rest: rest_masks, union, sum });
                        }
                    }
                    if b == 0 {
                        break;
                    }
                    b = (b - 1) & comp;
                }
            }
        }
    }
    if !violations.is_empty() {
        return PolyValidation { violations, canonical: None };
    }
    let entries = index_tuples(&sizes)
        .into_iter()
        .map(|ix| {
            let masks: Vec<u64> = ix.iter().map(|&j| 1u64 << j).collect();
            let t = ix.iter().enumerate().map(|(i, &j)| raw.carriers[i][j].clone()).collect();
            (t, raw.values[&masks].clone())
        })
        .collect();
    let canonical = Polymeasure::from_density(raw.carriers.clone(), entries).expect("normalized and additive");
    PolyValidation { violations, canonical: Some(canonical) }
}

/// `∫(f₁,…,f_k) dγ = Σ ∏ f_i(x_i) · γ({x₁},…,{x_k})`; `fs[i]` lists values
/// in carrier order.
pub fn integrate(fs: &[Vec<Rational>], gamma: &Polymeasure) -> Result<Rational> {
    if fs.len() != gamma.arity() || fs.iter().zip(&gamma.carriers).any(|(f, c)| f.len() != c.len()) {
        return Err(Error::domain("integrand does not match the carriers"));
    }
    let mut acc = Rational::zero();
    for (t, w) in &gamma.density {
        let mut term = w.clone();
        for (i, x) in t.iter().enumerate() {
            let j = gamma.carriers[i].binary_search(x).unwrap();
            term *= &fs[i][j];
        }
        acc += term;
    }
    Ok(acc)
}

pub fn product_polymeasure(parts: &[&Polymeasure]) -> Polymeasure {
    let mut carriers = Vec::new();
    let mut density = BTreeMap::from([(Vec::new(), Rational::one())]);
    for p in parts {
        carriers.extend(p.carriers.iter().cloned());
        let mut next = BTreeMap::new();
        for (t, w) in &density {
            for (u, v) in &p.density {
                let mut tu: Vec<Value> = t.clone();
                tu.extend(u.iter().cloned());
                next.insert(tu, w * v);
            }
        }
        density = next;
    }
    Polymeasure { carriers, density }
}

/// The distribution on the (left-nested) product carrier with
/// `p(x₁,…,x_k) = γ({x₁},…,{x_k})`, checked against `γ` on every rectangle
/// when there are at most 4096 of them.
pub fn extend_to_measure(gamma: &Polymeasure) -> Result<Distribution> {
    let carrier = product_set(&gamma.carriers);
    let entries = gamma.density.iter().map(|(t, w)| (lnest(t), w.clone())).collect();
    let p = Distribution::new(carrier, entries)?;
    let bits: usize = gamma.carriers.iter().map(|c| c.len()).sum();
    if bits <= 12 {
        let k = gamma.arity();
        for (masks, v) in gamma.full_table().values {
            let pm = p.mass_of(|x| {
                let parts = unnest(x, k).expect("product element");
                parts.iter().enumerate().all(|(i, xi)| {
                    let j = gamma.carriers[i].binary_search(xi).unwrap();
                    masks[i] >> j & 1 == 1
                })
            });
            if pm != v {
                return Err(Error::validation(format!("extension disagrees with γ on rectangle {masks:?}")));
            }
        }
    }
    Ok(p)
}

/// Restrict a distribution on a left-nested product to rectangles.
pub fn restrict_to_rectangles(p: &Distribution, carriers: &[Vec<Value>]) -> Result<Polymeasure> {
    let k = carriers.len();
    let entries = p
        .weights()
        .iter()
        .map(|(x, w)| {
            unnest(x, k)
                .map(|t| (t, w.clone()))
                .ok_or_else(|| Error::domain(format!("{x} is not a {k}-fold product element")))
        })
        .collect::<Result<Vec<_>>>()?;
    Polymeasure::from_density(carriers.to_vec(), entries)
}

/// `γ(f₁⁻¹(A₁), …, f_k⁻¹(A_k))`.
pub fn push_polymeasure(fs: &[FinMap], gamma: &Polymeasure) -> Result<Polymeasure> {
    if fs.len() != gamma.arity() {
        return Err(Error::domain("one function per slot is required"));
    }
    for (f, c) in fs.iter().zip(&gamma.carriers) {
        for x in c {
            f.apply(x)?;
        }
    }
    let mut density: BTreeMap<Vec<Value>, Rational> = BTreeMap::new();
    for (t, w) in &gamma.density {
        let img: Vec<Value> = t.iter().zip(fs).map(|(x, f)| f.apply(x).unwrap().clone()).collect();
        *density.entry(img).or_insert_with(Rational::zero) += w;
    }
    Ok(Polymeasure { carriers: fs.iter().map(|f| f.codomain().to_vec()).collect(), density })
}

/// A Markov polykernel `X → [Y₁, …, Y_k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyKernel {
    source: Vec<Value>,
    codomain: Vec<Vec<Value>>,
    rows: BTreeMap<Value, Polymeasure>,
}

impl PolyKernel {
    pub fn new(source: Vec<Value>, codomain: Vec<Vec<Value>>, rows: BTreeMap<Value, Polymeasure>) -> Result<Self> {
        let source = canonical_set(source);
        let codomain: Vec<Vec<Value>> = codomain.into_iter().map(canonical_set).collect();
        if rows.len() != source.len() {
            return Err(Error::domain("polykernel rows do not match its source"));
        }
        for x in &source {
            match rows.get(x) {
                None => return Err(Error::domain(format!("polykernel has no row for {x}"))),
                Some(r) if r.carriers != codomain => return Err(Error::domain(format!("row {x} has the wrong carriers"))),
                Some(r) if !r.mass().is_one() => return Err(Error::validation(format!("row {x} has mass {}", r.mass()))),
                _ => {}
            }
        }
        Ok(PolyKernel { source, codomain, rows })
    }

    pub fn source(&self) -> &[Value] {
        &self.source
    }

    pub fn codomain(&self) -> &[Vec<Value>] {
        &self.codomain
    }

    pub fn row(&self, x: &Value) -> Option<&Polymeasure> {
        self.rows.get(x)
    }

    pub fn rows(&self) -> &BTreeMap<Value, Polymeasure> {
        &self.rows
    }

    pub fn to_json(&self) -> Json {
        let rows: serde_json::Map<String, Json> = self
            .rows
            .iter()
            .map(|(x, p)| (x.to_string(), p.to_json()["density"].clone()))
            .collect();
        json!({
            "source": self.source.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "carriers": self.codomain.iter().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "rows": rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::value::atoms;

    fn uniform_product(n: usize, m: usize) -> Polymeasure {
        let (x, y) = (atoms("x", n), atoms("y", m));
        let w = ratio(1, (n * m) as i64);
        let entries = x.iter().flat_map(|a| y.iter().map(|b| (vec![a.clone(), b.clone()], w.clone()))).collect();
        Polymeasure::from_density(vec![x.clone(), y.clone()], entries).unwrap()
    }

    #[test]
    fn product_of_uniforms_is_valid() {
        let raw = RawPolyTable {
            carriers: vec![atoms("x", 2), atoms("y", 2)],
            values: index_tuples(&[4, 4])
                .into_iter()
                .map(|ix| {
                    let (a, b) = (ix[0] as u64, ix[1] as u64);
                    (vec![a, b], ratio((a.count_ones() * b.count_ones()) as i64, 4))
                })
                .collect(),
        };
        let v = validate_polymeasure(&raw);
        assert!(v.is_valid(), "{:?}", v.violations);
        assert_eq!(v.canonical.unwrap(), uniform_product(2, 2));
    }

    #[test]
    fn normalization_failure() {
        let mut raw = uniform_product(2, 2).full_table();
        for v in raw.values.values_mut() {
            *v = v.clone() / ratio(2, 1);
        }
        let v = validate_polymeasure(&raw);
        assert!(v.violations.contains(&PolyViolation::Normalization { value: ratio(1, 2) }));
    }

    #[test]
    fn additivity_failure_names_slot() {
        let mut raw = uniform_product(2, 2).full_table();
        // γ({x0}, Y) changed so γ({x0},Y) + γ({x1},Y) ≠ γ(X,Y)
        raw.values.insert(vec![0b01, 0b11], ratio(1, 3));
        let v = validate_polymeasure(&raw);
        assert!(v.violations.iter().any(|x| matches!(x, PolyViolation::Additivity { slot: 0, a: 0b01, b: 0b10, .. })));
        assert!(v.canonical.is_none());
    }

    #[test]
    fn integrate_cases() {
        let g = uniform_product(2, 2);
        assert_eq!(integrate(&[vec![ratio(1, 1); 2], vec![ratio(1, 1); 2]], &g).unwrap(), ratio(1, 1));
        let f1 = vec![ratio(1, 1), ratio(0, 1)];
        let f2 = vec![ratio(0, 1), ratio(1, 2)];
        assert_eq!(integrate(&[f1, f2], &g).unwrap(), ratio(1, 8));
        assert!(integrate(&[vec![ratio(1, 1)]], &g).is_err());
    }

    #[test]
    fn product_and_extension() {
        let x = atoms("x", 2);
        let y = atoms("y", 3);
        let p = Distribution::uniform(x.clone()).unwrap();
        let q = Distribution::new(y.clone(), vec![(y[0].clone(), ratio(1, 2)), (y[2].clone(), ratio(1, 2))]).unwrap();
        let g = product_polymeasure(&[&Polymeasure::from_distribution(&p), &Polymeasure::from_distribution(&q)]);
        let a = vec![x[0].clone()];
        let b = vec![y[0].clone(), y[1].clone()];
        assert_eq!(g.eval(&[a, b]).unwrap(), ratio(1, 4));
        let e = extend_to_measure(&g).unwrap();
        assert_eq!(e, crate::finprob::tensor_strength(&p, &q));
        assert_eq!(restrict_to_rectangles(&e, g.carriers()).unwrap(), g);
        assert_eq!(g.marginal(0).unwrap(), p);
        assert_eq!(g.marginal(1).unwrap(), q);
        assert_eq!(product_polymeasure(&[]), Polymeasure::unit());
        assert_eq!(extend_to_measure(&Polymeasure::from_distribution(&p)).unwrap(), p);
    }

    #[test]
    fn push_cases() {
        let g = uniform_product(2, 2);
        let ids: Vec<FinMap> = g.carriers().iter().map(|c| FinMap::identity(c)).collect();
        assert_eq!(push_polymeasure(&ids, &g).unwrap(), g);
        let konst = FinMap::tabulate(&g.carriers()[0], |_| Value::atom("c"));
        let pushed = push_polymeasure(&[konst, ids[1].clone()], &g).unwrap();
        assert_eq!(pushed.marginal(0).unwrap().weight(&Value::atom("c")), ratio(1, 1));
    }

    #[test]
    fn permutation_round_trip() {
        let g = uniform_product(2, 3);
        let s = g.permute(&[1, 0]).unwrap();
        assert_eq!(s.carriers()[0].len(), 3);
        assert_eq!(s.permute(&[1, 0]).unwrap(), g);
        assert!(g.permute(&[0, 0]).is_err());
    }
}
