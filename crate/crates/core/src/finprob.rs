//! The distribution monad on finite sets with exact rational weights,
//! subdistributions, Markov kernels, and executable monad law suites.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, ratio, Rational};
use crate::report::Verdict;
use crate::value::{atoms, canonical_set, product_set, Value};

fn build_weights(carrier: Vec<Value>, entries: Vec<(Value, Rational)>) -> Result<(Vec<Value>, BTreeMap<Value, Rational>)> {
    let n = carrier.len();
    let carrier = canonical_set(carrier);
    if carrier.len() != n {
        return Err(Error::domain("carrier has repeated elements"));
    }
    let mut weights = BTreeMap::new();
    for (x, w) in entries {
        if carrier.binary_search(&x).is_err() {
            return Err(Error::domain(format!("weight given for {x}, which is not in the carrier")));
        }
        if w.is_negative() {
            return Err(Error::domain(format!("negative weight {w} at {x}")));
        }
        if weights.contains_key(&x) {
            return Err(Error::domain(format!("weight for {x} given twice")));
        }
        if !w.is_zero() {
            weights.insert(x, w);
        }
    }
    Ok((carrier, weights))
}

fn total(weights: &BTreeMap<Value, Rational>) -> Rational {
    weights.values().fold(Rational::zero(), |a, w| a + w)
}

/// Carriers are shared between the many measures enumerated on one set.
type Carrier = Arc<Vec<Value>>;

macro_rules! ord_by_identity {
    ($t:ty) => {
        impl Ord for $t {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                if std::ptr::eq(self, other) {
                    return std::cmp::Ordering::Equal;
                }
                (&self.carrier, &self.weights).cmp(&(&other.carrier, &other.weights))
            }
        }

        impl PartialOrd for $t {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
    };
}

ord_by_identity!(Distribution);
ord_by_identity!(SubDistribution);

/// A probability distribution on a finite carrier. Only nonzero weights are
/// stored; the carrier is kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    carrier: Carrier,
    weights: BTreeMap<Value, Rational>,
}

impl Distribution {
    pub fn new(carrier: Vec<Value>, entries: Vec<(Value, Rational)>) -> Result<Self> {
        let (carrier, weights) = build_weights(carrier, entries)?;
        let s = total(&weights);
        if !s.is_one() {
            return Err(Error::validation(format!("weights sum to {}, not 1", fmt_rational(&s))));
        }
        Ok(Distribution { carrier: Arc::new(carrier), weights })
    }

    fn from_map(carrier: impl Into<Carrier>, weights: BTreeMap<Value, Rational>) -> Self {
        Distribution { carrier: carrier.into(), weights }
    }

    pub fn carrier(&self) -> &[Value] {
        &self.carrier
    }

    pub fn weights(&self) -> &BTreeMap<Value, Rational> {
        &self.weights
    }

    pub fn weight(&self, x: &Value) -> Rational {
        self.weights.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Value> {
        self.weights.keys()
    }

    pub fn mass_of(&self, pred: impl Fn(&Value) -> bool) -> Rational {
        self.weights.iter().filter(|(x, _)| pred(x)).fold(Rational::zero(), |a, (_, w)| a + w)
    }

    pub fn uniform(carrier: Vec<Value>) -> Result<Self> {
        if carrier.is_empty() {
            return Err(Error::domain("no distribution on the empty set"));
        }
        let w = ratio(1, carrier.len() as i64);
        let entries = carrier.iter().map(|x| (x.clone(), w.clone())).collect();
        Self::new(carrier, entries)
    }

    pub fn into_value(self) -> Value {
        Value::Dist(Arc::new(self))
    }

    /// Loadable JSON form.
    pub fn to_json(&self) -> Json {
        measure_json(&self.carrier, &self.weights)
    }
}

fn measure_json(carrier: &[Value], weights: &BTreeMap<Value, Rational>) -> Json {
    let w: serde_json::Map<String, Json> = weights
        .iter()
        .map(|(k, v)| (k.to_string(), Json::String(fmt_rational(v))))
        .collect();
    json!({
        "carrier": carrier.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "weights": w,
    })
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Value::Dist(Arc::new(self.clone())))
    }
}

/// A finite measure of total mass at most 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubDistribution {
    carrier: Carrier,
    weights: BTreeMap<Value, Rational>,
}

impl SubDistribution {
    pub fn new(carrier: Vec<Value>, entries: Vec<(Value, Rational)>) -> Result<Self> {
        let (carrier, weights) = build_weights(carrier, entries)?;
        let s = total(&weights);
        if s > Rational::one() {
            return Err(Error::validation(format!("weights sum to {}, more than 1", fmt_rational(&s))));
        }
        Ok(SubDistribution { carrier: Arc::new(carrier), weights })
    }

    pub fn zero(carrier: Vec<Value>) -> Result<Self> {
        Self::new(carrier, Vec::new())
    }

    pub fn carrier(&self) -> &[Value] {
        &self.carrier
    }

    pub fn weights(&self) -> &BTreeMap<Value, Rational> {
        &self.weights
    }

    pub fn weight(&self, x: &Value) -> Rational {
        self.weights.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        total(&self.weights)
    }

    pub fn into_value(self) -> Value {
        Value::SubDist(Arc::new(self))
    }

    pub fn to_json(&self) -> Json {
        measure_json(&self.carrier, &self.weights)
    }
}

impl From<&Distribution> for SubDistribution {
    fn from(d: &Distribution) -> Self {
        SubDistribution { carrier: d.carrier.clone(), weights: d.weights.clone() }
    }
}

/// A total function between finite sets, with an explicit codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMap {
    table: BTreeMap<Value, Value>,
    codomain: Carrier,
}

impl FinMap {
    pub fn new(pairs: impl IntoIterator<Item = (Value, Value)>, codomain: Vec<Value>) -> Result<Self> {
        Self::with_codomain(pairs, Arc::new(canonical_set(codomain)))
    }

    fn with_codomain(pairs: impl IntoIterator<Item = (Value, Value)>, codomain: Carrier) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (x, y) in pairs {
            if codomain.binary_search(&y).is_err() {
                return Err(Error::domain(format!("image {y} of {x} is outside the codomain")));
            }
            table.insert(x, y);
        }
        Ok(FinMap { table, codomain })
    }

    /// Tabulate `f` on `domain`; the codomain is the image.
    pub fn tabulate(domain: &[Value], f: impl Fn(&Value) -> Value) -> Self {
        let table: BTreeMap<Value, Value> = domain.iter().map(|x| (x.clone(), f(x))).collect();
        let codomain = canonical_set(table.values().cloned());
        FinMap { table, codomain: Arc::new(codomain) }
    }

    pub fn tabulate_into(domain: &[Value], codomain: Vec<Value>, f: impl Fn(&Value) -> Value) -> Result<Self> {
        Self::new(domain.iter().map(|x| (x.clone(), f(x))), codomain)
    }

    pub fn identity(carrier: &[Value]) -> Self {
        Self::tabulate(carrier, |x| x.clone())
    }

    pub fn apply(&self, x: &Value) -> Result<&Value> {
        self.table
            .get(x)
            .ok_or_else(|| Error::domain(format!("function is undefined at {x}")))
    }

    fn check_defined(&self, carrier: &[Value]) -> Result<()> {
        if self.table.keys().eq(carrier.iter()) {
            return Ok(());
        }
        carrier.iter().try_for_each(|x| self.apply(x).map(|_| ()))
    }

    pub fn codomain(&self) -> &[Value] {
        &self.codomain
    }

    pub fn domain(&self) -> impl Iterator<Item = &Value> {
        self.table.keys()
    }

    /// `g∘self`.
    pub fn then(&self, g: &FinMap) -> Result<FinMap> {
        let pairs = self
            .table
            .iter()
            .map(|(x, y)| Ok((x.clone(), g.apply(y)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        FinMap::with_codomain(pairs, g.codomain.clone())
    }

    /// Every function `domain → codomain`, in lexicographic order of images.
    pub fn all(domain: &[Value], codomain: &[Value]) -> Vec<FinMap> {
        let sorted: Carrier = Arc::new(canonical_set(codomain.iter().cloned()));
        crate::value::index_tuples(&vec![codomain.len(); domain.len()])
            .into_iter()
            .map(|ix| FinMap {
                table: domain.iter().cloned().zip(ix.iter().map(|&i| codomain[i].clone())).collect(),
                codomain: sorted.clone(),
            })
            .collect()
    }
}

pub fn dirac(x: &Value, carrier: &[Value]) -> Result<Distribution> {
    if !carrier.contains(x) {
        return Err(Error::domain(format!("{x} is not in the carrier")));
    }
    Distribution::new(carrier.to_vec(), vec![(x.clone(), Rational::one())])
}

fn push_weights<'a>(f: &FinMap, weights: impl Iterator<Item = (&'a Value, &'a Rational)>) -> Result<BTreeMap<Value, Rational>> {
    let mut out: BTreeMap<Value, Rational> = BTreeMap::new();
    for (x, w) in weights {
        let y = f.apply(x)?;
        *out.entry(y.clone()).or_insert_with(Rational::zero) += w;
    }
    Ok(out)
}

pub fn pushforward(f: &FinMap, p: &Distribution) -> Result<Distribution> {
    f.check_defined(&p.carrier)?;
    Ok(Distribution::from_map(f.codomain.clone(), push_weights(f, p.weights.iter())?))
}

pub fn pushforward_sub(f: &FinMap, p: &SubDistribution) -> Result<SubDistribution> {
    f.check_defined(&p.carrier)?;
    Ok(SubDistribution { carrier: f.codomain.clone(), weights: push_weights(f, p.weights.iter())? })
}

fn inner_carrier<'a>(carriers: impl Iterator<Item = &'a [Value]>) -> Result<Option<&'a [Value]>> {
    let mut found: Option<&[Value]> = None;
    for c in carriers {
        match found {
            None => found = Some(c),
            Some(prev) if prev != c => return Err(Error::domain("inner measures have different carriers")),
            _ => {}
        }
    }
    Ok(found)
}

/// Weighted sum of the inner distributions.
pub fn flatten(pp: &Distribution) -> Result<Distribution> {
    let inner = pp
        .carrier
        .iter()
        .map(|v| v.as_dist().ok_or_else(|| Error::domain(format!("{v} is not a distribution"))))
        .collect::<Result<Vec<_>>>()?;
    let x = inner_carrier(inner.iter().map(|d| d.carrier()))?.unwrap_or(&[]).to_vec();
    let mut out: BTreeMap<Value, Rational> = BTreeMap::new();
    for (v, w) in &pp.weights {
        let d = v.as_dist().unwrap();
        for (x, wx) in &d.weights {
            *out.entry(x.clone()).or_insert_with(Rational::zero) += w * wx;
        }
    }
    Ok(Distribution::from_map(x, out))
}

/// Flatten a subdistribution of subdistributions over `carrier` (needed when
/// the outer measure is zero and has no inner carrier to read off).
pub fn flatten_sub(pp: &SubDistribution, carrier: &[Value]) -> Result<SubDistribution> {
    let carrier = canonical_set(carrier.iter().cloned());
    let mut out: BTreeMap<Value, Rational> = BTreeMap::new();
    for v in pp.carrier.iter() {
        let d = v.as_subdist().ok_or_else(|| Error::domain(format!("{v} is not a subdistribution")))?;
        if d.carrier() != carrier.as_slice() {
            return Err(Error::domain("inner measures have different carriers"));
        }
    }
    for (v, w) in &pp.weights {
        for (x, wx) in &v.as_subdist().unwrap().weights {
            *out.entry(x.clone()).or_insert_with(Rational::zero) += w * wx;
        }
    }
    Ok(SubDistribution { carrier: Arc::new(carrier), weights: out })
}

/// `χ(p, q)(x, y) = p(x)·q(y)` on the product carrier of pairs.
pub fn tensor_strength(p: &Distribution, q: &Distribution) -> Distribution {
    let carrier = product_set(&[p.carrier.to_vec(), q.carrier.to_vec()]);
    let mut w = BTreeMap::new();
    for (x, a) in &p.weights {
        for (y, b) in &q.weights {
            w.insert(Value::pair(x.clone(), y.clone()), a * b);
        }
    }
    Distribution::from_map(canonical_set(carrier), w)
}

pub fn tensor_sub(p: &SubDistribution, q: &SubDistribution) -> SubDistribution {
    let carrier = product_set(&[p.carrier.to_vec(), q.carrier.to_vec()]);
    let mut w = BTreeMap::new();
    for (x, a) in &p.weights {
        for (y, b) in &q.weights {
            w.insert(Value::pair(x.clone(), y.clone()), a * b);
        }
    }
    SubDistribution { carrier: Arc::new(canonical_set(carrier)), weights: w }
}

/// A stochastic matrix between finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    source: Vec<Value>,
    target: Vec<Value>,
    rows: BTreeMap<Value, Distribution>,
}

impl Kernel {
    pub fn new(source: Vec<Value>, target: Vec<Value>, rows: BTreeMap<Value, Distribution>) -> Result<Self> {
        let source = canonical_set(source);
        let target = canonical_set(target);
        for x in &source {
            match rows.get(x) {
                None => return Err(Error::domain(format!("kernel has no row for {x}"))),
                Some(d) if d.carrier() != target.as_slice() => {
                    return Err(Error::domain(format!("row {x} is not a distribution on the target")))
                }
                _ => {}
            }
        }
        if rows.len() != source.len() {
            return Err(Error::domain("kernel has rows outside its source"));
        }
        Ok(Kernel { source, target, rows })
    }

    /// Rows given as weight vectors in carrier order.
    pub fn from_matrix(source: Vec<Value>, target: Vec<Value>, matrix: &[Vec<Rational>]) -> Result<Self> {
        if matrix.len() != source.len() || matrix.iter().any(|r| r.len() != target.len()) {
            return Err(Error::domain("matrix shape does not match the carriers"));
        }
        let rows = source
            .iter()
            .zip(matrix)
            .map(|(x, r)| {
                let entries = target.iter().cloned().zip(r.iter().cloned()).collect();
                Ok((x.clone(), Distribution::new(target.clone(), entries)?))
            })
            .collect::<Result<_>>()?;
        Self::new(source, target, rows)
    }

    pub fn identity(carrier: &[Value]) -> Self {
        let rows = carrier.iter().map(|x| (x.clone(), dirac(x, carrier).unwrap())).collect();
        Self::new(carrier.to_vec(), carrier.to_vec(), rows).unwrap()
    }

    pub fn source(&self) -> &[Value] {
        &self.source
    }

    pub fn target(&self) -> &[Value] {
        &self.target
    }

    pub fn row(&self, x: &Value) -> Option<&Distribution> {
        self.rows.get(x)
    }

    pub fn rows(&self) -> &BTreeMap<Value, Distribution> {
        &self.rows
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.source
            .iter()
            .map(|x| self.target.iter().map(|y| self.rows[x].weight(y)).collect())
            .collect()
    }

    pub fn to_json(&self) -> Json {
        let rows: serde_json::Map<String, Json> = self
            .rows
            .iter()
            .map(|(x, d)| {
                let w: serde_json::Map<String, Json> = d.weights.iter().map(|(k, v)| (k.to_string(), Json::String(fmt_rational(v)))).collect();
                (x.to_string(), Json::Object(w))
            })
            .collect();
        json!({
            "source": self.source.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "target": self.target.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "rows": rows,
        })
    }
}

/// `g∙f`: `p(c|a) = Σ_b g(c|b)·f(b|a)`.
pub fn kleisli_compose(g: &Kernel, f: &Kernel) -> Result<Kernel> {
    if f.target != g.source {
        return Err(Error::domain("kernel target and source differ"));
    }
    let rows = f
        .rows
        .iter()
        .map(|(a, fa)| {
            let mut w: BTreeMap<Value, Rational> = BTreeMap::new();
            for (b, pb) in &fa.weights {
                for (c, pc) in &g.rows[b].weights {
                    *w.entry(c.clone()).or_insert_with(Rational::zero) += pb * pc;
                }
            }
            (a.clone(), Distribution::from_map(g.target.clone(), w))
        })
        .collect();
    Kernel::new(f.source.clone(), g.target.clone(), rows)
}

/// Weight vectors `k/g` summing to 1 (or at most 1), optionally with
/// bounded support, in lexicographic order.
fn grid_vectors(n: usize, g: u32, exact: bool, max_support: Option<usize>) -> Vec<Vec<u32>> {
    fn go(i: usize, n: usize, left: u32, exact: bool, support_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            if !exact || left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left {
            if k > 0 && support_left == 0 {
                break;
            }
            cur.push(k);
            go(i + 1, n, left - k, exact, support_left - usize::from(k > 0), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, g, exact, max_support.unwrap_or(n), &mut Vec::with_capacity(n), &mut out);
    out
}

/// All distributions on `carrier` with weights in `(1/g)ℤ`.
pub fn grid_distributions(carrier: &[Value], g: u32, max_support: Option<usize>) -> Vec<Distribution> {
    let carrier: Carrier = Arc::new(canonical_set(carrier.iter().cloned()));
    grid_vectors(carrier.len(), g, true, max_support)
        .into_iter()
        .map(|v| {
            let w = carrier
                .iter()
                .zip(&v)
                .filter(|(_, &k)| k > 0)
                .map(|(x, &k)| (x.clone(), ratio(k as i64, g as i64)))
                .collect();
            Distribution::from_map(carrier.clone(), w)
        })
        .collect()
}

pub fn grid_subdistributions(carrier: &[Value], g: u32, max_support: Option<usize>) -> Vec<SubDistribution> {
    let carrier: Carrier = Arc::new(canonical_set(carrier.iter().cloned()));
    grid_vectors(carrier.len(), g, false, max_support)
        .into_iter()
        .map(|v| {
            let w = carrier
                .iter()
                .zip(&v)
                .filter(|(_, &k)| k > 0)
                .map(|(x, &k)| (x.clone(), ratio(k as i64, g as i64)))
                .collect();
            SubDistribution { carrier: carrier.clone(), weights: w }
        })
        .collect()
}

type UnitFn = dyn Fn(&Value, &[Value]) -> Result<Value> + Send + Sync;
type MultFn = dyn Fn(&Value, &[Value]) -> Result<Value> + Send + Sync;
type MapFn = dyn Fn(&FinMap, &Value) -> Result<Value> + Send + Sync;
type GridFn = dyn Fn(&[Value], u32, Option<usize>) -> Vec<Value> + Send + Sync;
type ChiFn = dyn Fn(&Value, &Value, &[Value], &[Value]) -> Result<Value> + Send + Sync;
type LambdaFn = dyn Fn(&Value, &[Value]) -> Result<Value> + Send + Sync;

/// A monad on finite sets given by executable data:
/// `unit(x, X)`, `mult(P, X)` for `P ∈ TTX`, `map(f, t)`, a grid enumerator
/// for `TX`, and optionally a monoidal map `chi(p, q, A, B)`.
#[derive(Clone)]
pub struct MonadSpec {
    pub name: String,
    pub unit: Arc<UnitFn>,
    pub mult: Arc<MultFn>,
    pub map: Arc<MapFn>,
    pub grid: Arc<GridFn>,
    pub chi: Option<Arc<ChiFn>>,
}

impl fmt::Debug for MonadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonadSpec").field("name", &self.name).finish_non_exhaustive()
    }
}

fn expect_dist(v: &Value) -> Result<&Distribution> {
    v.as_dist().ok_or_else(|| Error::domain(format!("{v} is not a distribution")))
}

fn expect_sub(v: &Value) -> Result<&SubDistribution> {
    v.as_subdist().ok_or_else(|| Error::domain(format!("{v} is not a subdistribution")))
}

impl MonadSpec {
    pub fn distribution() -> Self {
        MonadSpec {
            name: "distribution".into(),
            unit: Arc::new(|x, c| Ok(dirac(x, c)?.into_value())),
            mult: Arc::new(|p, c| {
                let pp = expect_dist(p)?;
                let out = flatten(pp)?;
                if out.carrier() != c && out.carrier() != canonical_set(c.iter().cloned()).as_slice() {
                    return Err(Error::domain("inner carrier differs from the requested carrier"));
                }
                Ok(out.into_value())
            }),
            map: Arc::new(|f, t| Ok(pushforward(f, expect_dist(t)?)?.into_value())),
            grid: Arc::new(|c, g, s| grid_distributions(c, g, s).into_iter().map(Distribution::into_value).collect()),
            chi: Some(Arc::new(|p, q, _, _| Ok(tensor_strength(expect_dist(p)?, expect_dist(q)?).into_value()))),
        }
    }

    pub fn subdistribution() -> Self {
        MonadSpec {
            name: "subdistribution".into(),
            unit: Arc::new(|x, c| Ok(SubDistribution::from(&dirac(x, c)?).into_value())),
            mult: Arc::new(|p, c| Ok(flatten_sub(expect_sub(p)?, c)?.into_value())),
            map: Arc::new(|f, t| Ok(pushforward_sub(f, expect_sub(t)?)?.into_value())),
            grid: Arc::new(|c, g, s| grid_subdistributions(c, g, s).into_iter().map(SubDistribution::into_value).collect()),
            chi: Some(Arc::new(|p, q, _, _| Ok(tensor_sub(expect_sub(p)?, expect_sub(q)?).into_value()))),
        }
    }

    /// The distribution monad with a flatten that averages the inner
    /// distributions uniformly, ignoring the outer weights.
    pub fn broken_mult() -> Self {
        MonadSpec {
            name: "broken-mult".into(),
            mult: Arc::new(|p, c| {
                let pp = expect_dist(p)?;
                let n = pp.weights.len() as i64;
                let mut out: BTreeMap<Value, Rational> = BTreeMap::new();
                for v in pp.weights.keys() {
                    for (x, w) in &expect_dist(v)?.weights {
                        *out.entry(x.clone()).or_insert_with(Rational::zero) += w * ratio(1, n);
                    }
                }
                Ok(Distribution::from_map(canonical_set(c.iter().cloned()), out).into_value())
            }),
            ..Self::distribution()
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "distribution" => Ok(Self::distribution()),
            "subdistribution" => Ok(Self::subdistribution()),
            "broken-mult" => Ok(Self::broken_mult()),
            _ => Err(Error::domain(format!("unknown monad {name:?}"))),
        }
    }

    pub fn eta(&self, x: &Value, carrier: &[Value]) -> Result<Value> {
        (self.unit)(x, carrier)
    }

    pub fn mu(&self, p: &Value, carrier: &[Value]) -> Result<Value> {
        (self.mult)(p, carrier)
    }

    pub fn fmap(&self, f: &FinMap, t: &Value) -> Result<Value> {
        (self.map)(f, t)
    }

    pub fn grid_of(&self, carrier: &[Value], g: u32, max_support: Option<usize>) -> Vec<Value> {
        (self.grid)(carrier, g, max_support)
    }

    /// Left strength built from the functor action: `θ(a, q) = T(b ↦ (a,b))(q)`.
    pub fn left_strength(&self, a: &Value, q: &Value, b_carrier: &[Value], a_carrier: &[Value]) -> Result<Value> {
        let cod = product_set(&[a_carrier.to_vec(), b_carrier.to_vec()]);
        let f = FinMap::tabulate_into(b_carrier, cod, |b| Value::pair(a.clone(), b.clone()))?;
        self.fmap(&f, q)
    }

    /// Right strength built from the functor action: `ϑ(p, b) = T(a ↦ (a,b))(p)`.
    pub fn right_strength(&self, p: &Value, b: &Value, a_carrier: &[Value], b_carrier: &[Value]) -> Result<Value> {
        let cod = product_set(&[a_carrier.to_vec(), b_carrier.to_vec()]);
        let f = FinMap::tabulate_into(a_carrier, cod, |a| Value::pair(a.clone(), b.clone()))?;
        self.fmap(&f, p)
    }

    /// The two double strengths `TA × TB → T(A×B)`.
    pub fn double_strengths(&self, p: &Value, q: &Value, a: &[Value], b: &[Value]) -> Result<(Value, Value)> {
        let ab = product_set(&[a.to_vec(), b.to_vec()]);
        // μ ∘ Tθ ∘ ϑ_{A,TB}
        let q_set = vec![q.clone()];
        let first = self.right_strength(p, q, a, &q_set)?;
        let theta = FinMap::tabulate(&product_set(&[a.to_vec(), q_set.clone()]), |pair| {
            let parts = crate::value::unnest(pair, 2).unwrap();
            self.left_strength(&parts[0], &parts[1], b, a).unwrap_or_else(|_| Value::unit())
        });
        let lhs = self.mu(&self.fmap(&theta, &first)?, &ab)?;
        // μ ∘ Tϑ ∘ θ_{TA,B}
        let p_set = vec![p.clone()];
        let second = self.left_strength(p, q, b, &p_set)?;
        let vartheta = FinMap::tabulate(&product_set(&[p_set.clone(), b.to_vec()]), |pair| {
            let parts = crate::value::unnest(pair, 2).unwrap();
            self.right_strength(&parts[0], &parts[1], a, b).unwrap_or_else(|_| Value::unit())
        });
        let rhs = self.mu(&self.fmap(&vartheta, &second)?, &ab)?;
        Ok((lhs, rhs))
    }
}

/// A candidate Kleisli law `λ: T ⇒ S` (with `H` the identity), `λ(t, X)`.
#[derive(Clone)]
pub struct KleisliLaw {
    pub name: String,
    pub target: MonadSpec,
    pub lambda: Arc<LambdaFn>,
}

impl KleisliLaw {
    /// The inclusion of distributions into subdistributions.
    pub fn inclusion() -> Self {
        KleisliLaw {
            name: "inclusion".into(),
            target: MonadSpec::subdistribution(),
            lambda: Arc::new(|t, _| Ok(SubDistribution::from(expect_dist(t)?).into_value())),
        }
    }

    /// Inclusion followed by scaling every weight by 1/2.
    pub fn halving() -> Self {
        KleisliLaw {
            name: "halving".into(),
            target: MonadSpec::subdistribution(),
            lambda: Arc::new(|t, _| {
                let d = expect_dist(t)?;
                let w = d.weights.iter().map(|(x, w)| (x.clone(), w * ratio(1, 2))).collect();
                Ok(SubDistribution { carrier: d.carrier.clone(), weights: w }.into_value())
            }),
        }
    }
}

/// Strengths and the reconstructed monoidal map of a monad with `χ`.
pub struct DerivedStrengths<'m> {
    m: &'m MonadSpec,
    chi: &'m ChiFn,
}

/// Derive `θ(a,q) = χ(ηa, q)`, `ϑ(p,b) = χ(p, ηb)` and
/// `χ′ = μ∘Tθ∘ϑ_{A,TB}` after checking `χ(ηa, ηb) = η(a,b)` on each pair of
/// the given carriers.
pub fn derive_strengths<'m>(m: &'m MonadSpec, carriers: &[Vec<Value>]) -> Result<DerivedStrengths<'m>> {
    let chi = m
        .chi
        .as_deref()
        .ok_or_else(|| Error::precondition(format!("monad {} has no monoidal map", m.name)))?;
    for a in carriers {
        for b in carriers {
            let ab = product_set(&[a.clone(), b.clone()]);
            for x in a {
                for y in b {
                    let lhs = chi(&m.eta(x, a)?, &m.eta(y, b)?, a, b)?;
                    let rhs = m.eta(&Value::pair(x.clone(), y.clone()), &ab)?;
                    if lhs != rhs {
                        return Err(Error::precondition(format!(
                            "unit coherence fails: χ(η{x}, η{y}) = {lhs} but η({x},{y}) = {rhs}"
                        )));
                    }
                }
            }
        }
    }
    Ok(DerivedStrengths { m, chi })
}

impl DerivedStrengths<'_> {
    pub fn theta(&self, a: &Value, q: &Value, a_set: &[Value], b_set: &[Value]) -> Result<Value> {
        (self.chi)(&self.m.eta(a, a_set)?, q, a_set, b_set)
    }

    pub fn vartheta(&self, p: &Value, b: &Value, a_set: &[Value], b_set: &[Value]) -> Result<Value> {
        (self.chi)(p, &self.m.eta(b, b_set)?, a_set, b_set)
    }

    pub fn chi_prime(&self, p: &Value, q: &Value, a_set: &[Value], b_set: &[Value]) -> Result<Value> {
        let q_set = vec![q.clone()];
        let outer = self.vartheta(p, q, a_set, &q_set)?;
        let pairs = product_set(&[a_set.to_vec(), q_set]);
        let mut images = Vec::with_capacity(pairs.len());
        for pair in &pairs {
            let parts = crate::value::unnest(pair, 2).expect("pair");
            images.push((pair.clone(), self.theta(&parts[0], &parts[1], a_set, b_set)?));
        }
        let codomain = images.iter().map(|(_, v)| v.clone()).collect();
        let t_theta = FinMap::new(images, codomain)?;
        self.m.mu(&self.m.fmap(&t_theta, &outer)?, &product_set(&[a_set.to_vec(), b_set.to_vec()]))
    }
}

/// Law-suite configuration: carriers `x0..x{n-1}` for `n ≤ max_carrier`,
/// weights in `(1/grid)ℤ`; nested levels `TTX`, `TTTX` use weights in
/// `(1/nested_grid)ℤ` and outer supports of size at most `nested_support`.
#[derive(Clone, Debug)]
pub struct LawConfig {
    pub max_carrier: usize,
    pub grid: u32,
    pub nested_grid: u32,
    pub nested_support: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig { max_carrier: 3, grid: 4, nested_grid: 4, nested_support: 2 }
    }
}

fn text(v: &Value) -> Json {
    Json::String(v.to_string())
}

fn witness(carrier: &[Value], input: &Value, lhs: &Value, rhs: &Value) -> Json {
    let mut w = json!({
        "carrier": carrier.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "input": text(input),
        "lhs": text(lhs),
        "rhs": text(rhs),
    });
    if let Some(d) = input.as_dist() {
        w["instance"] = d.to_json();
    } else if let Some(d) = input.as_subdist() {
        w["instance"] = d.to_json();
    }
    w
}

type Failure = Option<(String, Json)>;

/// Evaluate `check` on every item; the first failure in item order wins.
fn first_failure<T: Sync>(items: &[T], check: impl Fn(&T) -> Failure + Sync + Send) -> (u64, Failure) {
    let f = items.par_iter().map(check).find_map_first(|x| x);
    (items.len() as u64, f)
}

fn compare(label: &str, carrier: &[Value], input: &Value, lhs: Result<Value>, rhs: Result<Value>) -> Failure {
    match (lhs, rhs) {
        (Ok(l), Ok(r)) if l == r => None,
        (Ok(l), Ok(r)) => Some((format!("{label} fails at {}", abbreviate(input)), witness(carrier, input, &l, &r))),
        (Err(e), _) | (_, Err(e)) => Some((
            format!("{label} is ill-typed at {}: {e}", abbreviate(input)),
            json!({"carrier": carrier.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "input": text(input), "error": e.to_string()}),
        )),
    }
}

/// Display form cut to a readable length; the witness keeps the full value.
fn abbreviate(v: &Value) -> String {
    const MAX: usize = 160;
    let s = v.to_string();
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}…", &s[..i]),
        None => s,
    }
}

fn carriers(cfg: &LawConfig) -> Vec<Vec<Value>> {
    (1..=cfg.max_carrier).map(|n| atoms("x", n)).collect()
}

fn merge(id: String, parts: Vec<(u64, Failure)>) -> Verdict {
    let n = parts.iter().map(|p| p.0).sum();
    Verdict::from_outcome(id, n, parts.into_iter().find_map(|p| p.1))
}

fn eta_map(m: &MonadSpec, x: &[Value]) -> Result<FinMap> {
    let pairs = x.iter().map(|v| Ok((v.clone(), m.eta(v, x)?))).collect::<Result<Vec<_>>>()?;
    let cod = pairs.iter().map(|(_, t)| t.clone()).collect();
    FinMap::new(pairs, cod)
}

fn mu_map(m: &MonadSpec, dom: &[Value], x: &[Value]) -> Result<FinMap> {
    let pairs = dom.iter().map(|v| Ok((v.clone(), m.mu(v, x)?))).collect::<Result<Vec<_>>>()?;
    let cod = pairs.iter().map(|(_, t)| t.clone()).collect();
    FinMap::new(pairs, cod)
}

fn fmap_map(m: &MonadSpec, f: &FinMap, dom: &[Value]) -> Result<FinMap> {
    let pairs = dom.iter().map(|v| Ok((v.clone(), m.fmap(f, v)?))).collect::<Result<Vec<_>>>()?;
    let cod = pairs.iter().map(|(_, t)| t.clone()).collect();
    FinMap::new(pairs, cod)
}

/// The grid levels `TX`, `TTX` and `TTTX` of a carrier.
pub struct Levels {
    pub one: Vec<Value>,
    pub two: Vec<Value>,
    pub three: Vec<Value>,
}

pub fn levels(m: &MonadSpec, x: &[Value], cfg: &LawConfig, with_three: bool) -> Levels {
    let one = m.grid_of(x, cfg.grid, None);
    let two = m.grid_of(&one, cfg.nested_grid, Some(cfg.nested_support));
    let three = if with_three { m.grid_of(&two, cfg.nested_grid, Some(cfg.nested_support)) } else { Vec::new() };
    Levels { one, two, three }
}

/// Run the monad law suite; with `kleisli`, also the two Kleisli-law
/// equations against the law's target monad.
pub fn law_suite(m: &MonadSpec, cfg: &LawConfig, kleisli: Option<&KleisliLaw>) -> Vec<Verdict> {
    let cs = carriers(cfg);
    let name = &m.name;
    let lv: Vec<Levels> = cs.iter().map(|x| levels(m, x, cfg, true)).collect();
    let mut out = Vec::new();

    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut assoc = Vec::new();
    for (x, l) in cs.iter().zip(&lv) {
        left.push(first_failure(&l.one, |t| {
            let lhs = m.eta(t, &l.one).and_then(|e| m.mu(&e, x));
            compare("left unit μ∘ηT = id", x, t, lhs, Ok(t.clone()))
        }));
        let eta = eta_map(m, x);
        right.push(first_failure(&l.one, |t| {
            let lhs = eta.as_ref().map_err(Clone::clone).and_then(|e| m.fmap(e, t)).and_then(|tt| m.mu(&tt, x));
            compare("right unit μ∘Tη = id", x, t, lhs, Ok(t.clone()))
        }));
        let mu_x = mu_map(m, &l.two, x);
        assoc.push(first_failure(&l.three, |ttt| {
            let lhs = m.mu(ttt, &l.one).and_then(|tt| m.mu(&tt, x));
            let rhs = mu_x.as_ref().map_err(Clone::clone).and_then(|f| m.fmap(f, ttt)).and_then(|tt| m.mu(&tt, x));
            compare("associativity μ∘μT = μ∘Tμ", x, ttt, lhs, rhs)
        }));
    }
    out.push(merge(format!("{name}.left_unit"), left));
    out.push(merge(format!("{name}.right_unit"), right));
    out.push(merge(format!("{name}.associativity"), assoc));

    let mut nat_unit = Vec::new();
    let mut nat_mult = Vec::new();
    for (x, lx) in cs.iter().zip(&lv) {
        for y in &cs {
            for f in FinMap::all(x, y) {
                nat_unit.push(first_failure(x, |v| {
                    let lhs = m.eta(v, x).and_then(|e| m.fmap(&f, &e));
                    let rhs = f.apply(v).and_then(|fv| m.eta(fv, y));
                    compare("unit naturality Tf∘η = η∘f", x, v, lhs, rhs)
                }));
                let tf = fmap_map(m, &f, &lx.one);
                nat_mult.push(first_failure(&lx.two, |tt| {
                    let lhs = m.mu(tt, x).and_then(|t| m.fmap(&f, &t));
                    let rhs = tf.as_ref().map_err(Clone::clone).and_then(|g| m.fmap(g, tt)).and_then(|t| m.mu(&t, y));
                    compare("multiplication naturality Tf∘μ = μ∘TTf", x, tt, lhs, rhs)
                }));
            }
        }
    }
    out.push(merge(format!("{name}.naturality_unit"), nat_unit));
    out.push(merge(format!("{name}.naturality_mult"), nat_mult));

    let mut comm = Vec::new();
    for (a, la) in cs.iter().zip(&lv) {
        for (b, lb) in cs.iter().zip(&lv) {
            let pairs: Vec<(&Value, &Value)> = la.one.iter().flat_map(|p| lb.one.iter().map(move |q| (p, q))).collect();
            comm.push(first_failure(&pairs, |(p, q)| {
                let input = Value::pair((*p).clone(), (*q).clone());
                match m.double_strengths(p, q, a, b) {
                    Ok((l, r)) => compare("commutativity of the double strengths", &product_set(&[a.clone(), b.clone()]), &input, Ok(l), Ok(r)),
                    Err(e) => compare("commutativity of the double strengths", a, &input, Err(e), Ok(Value::unit())),
                }
            }));
        }
    }
    out.push(merge(format!("{name}.commutativity"), comm));

    let one = atoms("*", 1);
    let t1 = m.grid_of(&one, cfg.grid, None);
    let unit_point = m.eta(&one[0], &one);
    let affine = match &unit_point {
        Ok(e) => match t1.iter().find(|t| *t != e) {
            None if t1.len() == 1 => None,
            None => Some(("η₁ misses T1".to_string(), json!({"carrier": ["*"]}))),
            Some(t) => Some((
                format!("T1 has the point {t} besides η(*)"),
                witness(&one, t, t, e),
            )),
        },
        Err(e) => Some((format!("η₁ is undefined: {e}"), json!({"carrier": ["*"]}))),
    };
    out.push(Verdict::from_outcome(format!("{name}.affine"), t1.len() as u64, affine));

    if let Some(k) = kleisli {
        let s = &k.target;
        let lam = &k.lambda;
        let id = format!("{name}.kleisli[{}].", k.name);
        let mut unit_eq = Vec::new();
        let mut mult_eq = Vec::new();
        for (x, l) in cs.iter().zip(&lv) {
            unit_eq.push(first_failure(x, |v| {
                let lhs = s.eta(v, x);
                let rhs = m.eta(v, x).and_then(|t| lam(&t, x));
                compare("η^S = λ∘η^T", x, v, lhs, rhs)
            }));
            let lam_x = {
                let pairs: Result<Vec<_>> = l.one.iter().map(|t| Ok((t.clone(), lam(t, x)?))).collect();
                pairs.and_then(|p| {
                    let cod = p.iter().map(|(_, v)| v.clone()).collect();
                    FinMap::new(p, cod)
                })
            };
            mult_eq.push(first_failure(&l.two, |tt| {
                let lhs = lam(tt, &l.one)
                    .and_then(|st| lam_x.as_ref().map_err(Clone::clone).and_then(|f| s.fmap(f, &st)))
                    .and_then(|ss| s.mu(&ss, x));
                let rhs = m.mu(tt, x).and_then(|t| lam(&t, x));
                compare("μ^S∘Sλ∘λ_T = λ∘μ^T", x, tt, lhs, rhs)
            }));
        }
        out.push(merge(format!("{id}unit"), unit_eq));
        out.push(merge(format!("{id}mult"), mult_eq));
    }
    out
}

/// Check that `χ′` from [`derive_strengths`] equals `χ` on the whole grid.
pub fn strength_suite(m: &MonadSpec, cfg: &LawConfig) -> Vec<Verdict> {
    let cs = carriers(cfg);
    let id = format!("{}.derived_strength", m.name);
    let ds = match derive_strengths(m, &cs) {
        Ok(d) => d,
        Err(e) => return vec![Verdict::fail(id, 0, e.to_string(), None)],
    };
    let chi = m.chi.as_deref().unwrap();
    let mut parts = Vec::new();
    for a in &cs {
        for b in &cs {
            let ga = m.grid_of(a, cfg.grid, None);
            let gb = m.grid_of(b, cfg.grid, None);
            let pairs: Vec<(&Value, &Value)> = ga.iter().flat_map(|p| gb.iter().map(move |q| (p, q))).collect();
            parts.push(first_failure(&pairs, |(p, q)| {
                let input = Value::pair((*p).clone(), (*q).clone());
                compare("χ′ = χ", &product_set(&[a.clone(), b.clone()]), &input, ds.chi_prime(p, q, a, b), chi(p, q, a, b))
            }));
        }
    }
    vec![merge(id, parts)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::atoms_from;

    fn d(c: &[&str], w: &[(&str, (i64, i64))]) -> Distribution {
        Distribution::new(atoms_from(c), w.iter().map(|(x, (a, b))| (Value::atom(*x), ratio(*a, *b))).collect()).unwrap()
    }

    #[test]
    fn dirac_cases() {
        let c = atoms_from(&["a", "b"]);
        let p = dirac(&Value::atom("a"), &c).unwrap();
        assert_eq!(p.weight(&Value::atom("a")), ratio(1, 1));
        assert_eq!(p.weight(&Value::atom("b")), ratio(0, 1));
        assert!(dirac(&Value::atom("0"), &atoms_from(&["0"])).is_ok());
        assert!(dirac(&Value::atom("c"), &c).is_err());
    }

    #[test]
    fn pushforward_cases() {
        let p = d(&["a", "b", "c"], &[("a", (1, 3)), ("b", (1, 3)), ("c", (1, 3))]);
        let f = FinMap::new(
            vec![
                (Value::atom("a"), Value::atom("x")),
                (Value::atom("b"), Value::atom("x")),
                (Value::atom("c"), Value::atom("y")),
            ],
            atoms_from(&["x", "y"]),
        )
        .unwrap();
        assert_eq!(pushforward(&f, &p).unwrap(), d(&["x", "y"], &[("x", (2, 3)), ("y", (1, 3))]));
        assert_eq!(pushforward(&FinMap::identity(p.carrier()), &p).unwrap(), p);
        let partial = FinMap::new(vec![(Value::atom("a"), Value::atom("x"))], atoms_from(&["x"])).unwrap();
        assert!(pushforward(&partial, &p).is_err());
    }

    #[test]
    fn flatten_cases() {
        let c = ["a", "b"];
        let p = d(&c, &[("a", (1, 1))]);
        let q = d(&c, &[("a", (1, 3)), ("b", (2, 3))]);
        let pp = Distribution::new(vec![p.clone().into_value(), q.clone().into_value()], vec![(p.clone().into_value(), ratio(1, 4)), (q.into_value(), ratio(3, 4))]).unwrap();
        assert_eq!(flatten(&pp).unwrap(), d(&c, &[("a", (1, 2)), ("b", (1, 2))]));
        let single = Distribution::new(vec![p.clone().into_value()], vec![(p.clone().into_value(), ratio(1, 1))]).unwrap();
        assert_eq!(flatten(&single).unwrap(), p);
        let other = d(&["a", "z"], &[("z", (1, 1))]);
        let bad = Distribution::new(vec![p.clone().into_value(), other.clone().into_value()], vec![(p.into_value(), ratio(1, 2)), (other.into_value(), ratio(1, 2))]).unwrap();
        assert!(flatten(&bad).is_err());
    }

    #[test]
    fn kleisli_compose_matches_matrix_product() {
        let x = atoms("x", 2);
        let f = Kernel::from_matrix(x.clone(), x.clone(), &[vec![ratio(1, 2), ratio(1, 2)], vec![ratio(0, 1), ratio(1, 1)]]).unwrap();
        let g = Kernel::from_matrix(x.clone(), x.clone(), &[vec![ratio(1, 1), ratio(0, 1)], vec![ratio(1, 2), ratio(1, 2)]]).unwrap();
        let gf = kleisli_compose(&g, &f).unwrap();
        assert_eq!(gf.matrix(), vec![vec![ratio(3, 4), ratio(1, 4)], vec![ratio(1, 2), ratio(1, 2)]]);
        assert_eq!(kleisli_compose(&Kernel::identity(&x), &f).unwrap(), f);
        assert_eq!(kleisli_compose(&g, &Kernel::identity(&x)).unwrap(), g);
    }

    #[test]
    fn tensor_strength_values() {
        let p = d(&["a", "b"], &[("a", (1, 2)), ("b", (1, 2))]);
        let q = d(&["x", "y"], &[("x", (1, 3)), ("y", (2, 3))]);
        let pq = tensor_strength(&p, &q);
        let pair = |a: &str, b: &str| Value::pair(Value::atom(a), Value::atom(b));
        assert_eq!(pq.weight(&pair("a", "x")), ratio(1, 6));
        assert_eq!(pq.weight(&pair("a", "y")), ratio(1, 3));
        assert_eq!(pq.weight(&pair("b", "x")), ratio(1, 6));
        assert_eq!(pq.weight(&pair("b", "y")), ratio(1, 3));
        let dy = dirac(&Value::atom("y"), q.carrier()).unwrap();
        let first = FinMap::tabulate(&product_set(&[p.carrier().to_vec(), q.carrier().to_vec()]), |v| match v {
            Value::Tuple(t) => t[0].clone(),
            _ => unreachable!(),
        });
        assert_eq!(pushforward(&first, &tensor_strength(&p, &dy)).unwrap(), p);
    }

    #[test]
    fn grid_counts() {
        let x = atoms("x", 3);
        assert_eq!(grid_distributions(&x, 4, None).len(), 15);
        assert_eq!(grid_subdistributions(&x, 4, None).len(), 35);
        assert_eq!(grid_distributions(&x, 4, Some(1)).len(), 3);
    }

    #[test]
    fn derived_strength_reconstructs_chi() {
        let m = MonadSpec::distribution();
        let a = atoms_from(&["a", "b"]);
        let b = atoms_from(&["x", "y"]);
        let ds = derive_strengths(&m, &[a.clone(), b.clone()]).unwrap();
        let p = d(&["a", "b"], &[("a", (1, 2)), ("b", (1, 2))]).into_value();
        let q = d(&["x", "y"], &[("x", (1, 3)), ("y", (2, 3))]).into_value();
        let expected = tensor_strength(p.as_dist().unwrap(), q.as_dist().unwrap()).into_value();
        assert_eq!(ds.chi_prime(&p, &q, &a, &b).unwrap(), expected);
        let th = ds.theta(&Value::atom("a"), &q, &a, &b).unwrap();
        let chi = m.chi.as_ref().unwrap();
        assert_eq!(th, chi(&m.eta(&Value::atom("a"), &a).unwrap(), &q, &a, &b).unwrap());
        let one = atoms("u", 1);
        let ds1 = derive_strengths(&m, &[one.clone()]).unwrap();
        let u = m.eta(&one[0], &one).unwrap();
        let uu = m.eta(&Value::pair(one[0].clone(), one[0].clone()), &product_set(&[one.clone(), one.clone()])).unwrap();
        assert_eq!(ds1.chi_prime(&u, &u, &one, &one).unwrap(), uu);
    }

    fn small() -> LawConfig {
        LawConfig { max_carrier: 2, grid: 2, nested_grid: 2, nested_support: 2 }
    }

    #[test]
    fn distribution_laws_hold_small() {
        let v = law_suite(&MonadSpec::distribution(), &small(), Some(&KleisliLaw::inclusion()));
        assert!(v.iter().all(|x| x.passed), "{v:#?}");
    }

    #[test]
    fn broken_mult_fails_associativity() {
        let v = law_suite(&MonadSpec::broken_mult(), &small(), None);
        let assoc = v.iter().find(|x| x.check.ends_with("associativity")).unwrap();
        assert!(!assoc.passed);
        assert!(assoc.witness.is_some());
        assert!(v.iter().find(|x| x.check.ends_with("left_unit")).unwrap().passed);
    }

    #[test]
    fn subdistribution_is_not_affine() {
        let v = law_suite(&MonadSpec::subdistribution(), &small(), None);
        for x in &v {
            assert_eq!(x.passed, !x.check.ends_with("affine"), "{x:?}");
        }
        let w = v.iter().find(|x| x.check.ends_with("affine")).unwrap().witness.clone().unwrap();
        assert_eq!(w["input"], "S{*0|}");
    }

    #[test]
    fn halving_law_fails() {
        let v = law_suite(&MonadSpec::distribution(), &small(), Some(&KleisliLaw::halving()));
        let unit = v.iter().find(|x| x.check.ends_with("kleisli[halving].unit")).unwrap();
        assert!(!unit.passed);
    }
}
