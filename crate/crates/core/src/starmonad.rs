//! The discrete Giry *-monad on lists of finite sets: unit, multiplication
//! of finitely supported outer polymeasures, the strength `κ` and weakening
//! `ν`, and the Kleisli op-multicategory of Markov polykernels.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::finprob::Distribution;
use crate::polymeasure::{extend_to_measure, product_polymeasure, PolyKernel, Polymeasure};
use crate::rational::{fmt_rational, ratio, Rational};
use crate::report::Verdict;
use crate::value::{canonical_set, index_tuples, lnest, product_set, unnest, Value};

/// A finite list of finite sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjList {
    entries: Vec<Vec<Value>>,
}

impl ObjList {
    pub fn new(entries: Vec<Vec<Value>>) -> Self {
        ObjList { entries: entries.into_iter().map(canonical_set).collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[Vec<Value>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn concat(&self, other: &ObjList) -> ObjList {
        ObjList { entries: self.entries.iter().chain(&other.entries).cloned().collect() }
    }

    pub fn flatten(lists: &[ObjList]) -> ObjList {
        ObjList { entries: lists.iter().flat_map(|l| l.entries.iter().cloned()).collect() }
    }

    /// The left-nested product `⊗X_i` (a singleton for the empty list).
    pub fn product(&self) -> Vec<Value> {
        canonical_set(product_set(&self.entries))
    }

    pub fn to_json(&self) -> Json {
        Json::Array(
            self.entries
                .iter()
                .map(|c| Json::Array(c.iter().map(|x| Json::String(x.to_string())).collect()))
                .collect(),
        )
    }
}

/// A finitely supported polymeasure on `[T𝐗₁, …, T𝐗ₙ]`: a density on
/// n-tuples of polymeasures, tuple entry `i` living on `inner_spaces[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscreteOuterPolymeasure {
    inner_spaces: Vec<ObjList>,
    density: BTreeMap<Vec<Polymeasure>, Rational>,
}

impl DiscreteOuterPolymeasure {
    pub fn new(inner_spaces: Vec<ObjList>, entries: Vec<(Vec<Polymeasure>, Rational)>) -> Result<Self> {
        let mut density = BTreeMap::new();
        let mut total = Rational::zero();
        for (t, w) in entries {
            if t.len() != inner_spaces.len() {
                return Err(Error::domain(format!("support tuple has {} entries, expected {}", t.len(), inner_spaces.len())));
            }
            if let Some(i) = t.iter().zip(&inner_spaces).position(|(g, s)| g.carriers() != s.entries()) {
                return Err(Error::domain(format!("support entry {i} does not live on its inner space")));
            }
            if w.is_negative() {
                return Err(Error::domain(format!("negative density {}", fmt_rational(&w))));
            }
            total += &w;
            if !w.is_zero() && density.insert(t, w).is_some() {
                return Err(Error::domain("support tuple given twice"));
            }
        }
        if !total.is_one() {
            return Err(Error::validation(format!("outer densities sum to {}, not 1", fmt_rational(&total))));
        }
        Ok(DiscreteOuterPolymeasure { inner_spaces, density })
    }

    /// The point mass at a tuple of polymeasures.
    pub fn point(gammas: Vec<Polymeasure>) -> Self {
        let inner_spaces = gammas.iter().map(|g| ObjList::new(g.carriers().to_vec())).collect();
        DiscreteOuterPolymeasure { inner_spaces, density: BTreeMap::from([(gammas, Rational::one())]) }
    }

    pub fn arity(&self) -> usize {
        self.inner_spaces.len()
    }

    pub fn inner_spaces(&self) -> &[ObjList] {
        &self.inner_spaces
    }

    pub fn density(&self) -> &BTreeMap<Vec<Polymeasure>, Rational> {
        &self.density
    }

    /// Product of outer polymeasures: concatenated slots, multiplied densities.
    pub fn product(parts: &[&DiscreteOuterPolymeasure]) -> DiscreteOuterPolymeasure {
        let mut density = BTreeMap::from([(Vec::new(), Rational::one())]);
        for p in parts {
            let mut next = BTreeMap::new();
            for (t, w) in &density {
                for (u, v) in &p.density {
                    let mut tu: Vec<Polymeasure> = t.clone();
                    tu.extend(u.iter().cloned());
                    next.insert(tu, w * v);
                }
            }
            density = next;
        }
        DiscreteOuterPolymeasure { inner_spaces: parts.iter().flat_map(|p| p.inner_spaces.iter().cloned()).collect(), density }
    }

    /// Slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.arity()];
        if perm.len() != self.arity() || perm.iter().any(|&j| j >= seen.len() || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::domain("not a permutation of the slots"));
        }
        Ok(DiscreteOuterPolymeasure {
            inner_spaces: perm.iter().map(|&j| self.inner_spaces[j].clone()).collect(),
            density: self.density.iter().map(|(t, w)| (perm.iter().map(|&j| t[j].clone()).collect(), w.clone())).collect(),
        })
    }

    pub fn to_json(&self) -> Json {
        json!({
            "inner_spaces": self.inner_spaces.iter().map(ObjList::to_json).collect::<Vec<_>>(),
            "support": self.density.iter().map(|(t, w)| json!({
                "tuple": t.iter().map(Polymeasure::to_json).collect::<Vec<_>>(),
                "weight": fmt_rational(w),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `η(x₁,…,x_k)(A₁,…,A_k) = ∏ 𝟙_{A_i}(x_i)`.
pub fn star_unit(xs: &[Value], carriers: &ObjList) -> Result<Polymeasure> {
    if xs.len() != carriers.len() {
        return Err(Error::domain(format!("{} elements for {} carriers", xs.len(), carriers.len())));
    }
    Polymeasure::from_density(carriers.entries.clone(), vec![(xs.to_vec(), Rational::one())])
}

/// Which multiplication to use; the second is a deliberately wrong one
/// that squares the outer densities and never renormalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultVariant {
    Exact,
    SquaredDensity,
}

/// `μ(Γ)(A⃗₁,…,A⃗ₙ) = Σ_γ⃗ Γ(γ⃗)·∏ γ_i(A⃗_i)` on the flattened list.
pub fn star_mult(gamma: &DiscreteOuterPolymeasure) -> Polymeasure {
    star_mult_with(gamma, MultVariant::Exact)
}

pub fn star_mult_with(gamma: &DiscreteOuterPolymeasure, variant: MultVariant) -> Polymeasure {
    let carriers = ObjList::flatten(&gamma.inner_spaces).entries;
    let mut density: BTreeMap<Vec<Value>, Rational> = BTreeMap::new();
    for (t, w) in &gamma.density {
        let w = match variant {
            MultVariant::Exact => w.clone(),
            MultVariant::SquaredDensity => w * w,
        };
        let parts: Vec<&Polymeasure> = t.iter().collect();
        for (x, v) in product_polymeasure(&parts).density() {
            *density.entry(x.clone()).or_insert_with(Rational::zero) += &w * v;
        }
    }
    Polymeasure::from_parts(carriers, density)
}

/// `κ = μ∘η_{T*}`, checked against the product polymeasure.
pub fn kappa_strength(gammas: &[Polymeasure]) -> Result<Polymeasure> {
    let via_mult = star_mult(&DiscreteOuterPolymeasure::point(gammas.to_vec()));
    let direct = product_polymeasure(&gammas.iter().collect::<Vec<_>>());
    if via_mult != direct {
        return Err(Error::validation("κ disagrees with the product polymeasure"));
    }
    Ok(via_mult)
}

/// `ν(γ)(A₁₁,…,A_{nk_n}) = γ(∏_j A_{1j}, …, ∏_j A_{nj})`, where carrier `i`
/// of `γ` is the left-nested product of `grouping[i]`; checked against
/// `μ∘Tη*`.
pub fn nu_weaken(gamma: &Polymeasure, grouping: &[ObjList]) -> Result<Polymeasure> {
    if grouping.len() != gamma.arity() {
        return Err(Error::domain(format!("{} groups for an arity-{} polymeasure", grouping.len(), gamma.arity())));
    }
    for (i, (g, c)) in grouping.iter().zip(gamma.carriers()).enumerate() {
        if &g.product() != c {
            return Err(Error::domain(format!("carrier {i} is not the product of its group")));
        }
    }
    let flat = ObjList::flatten(grouping);
    let mut direct: BTreeMap<Vec<Value>, Rational> = BTreeMap::new();
    let mut outer: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
    for (t, w) in gamma.density() {
        let mut parts = Vec::new();
        let mut units = Vec::new();
        for (x, g) in t.iter().zip(grouping) {
            let xs = unnest(x, g.len()).ok_or_else(|| Error::domain(format!("{x} is not a {}-fold product element", g.len())))?;
            units.push(star_unit(&xs, g)?);
            parts.extend(xs);
        }
        direct.insert(parts, w.clone());
        *outer.entry(units).or_insert_with(Rational::zero) += w;
    }
    let direct = Polymeasure::from_parts(flat.entries, direct);
    let gamma_outer = DiscreteOuterPolymeasure { inner_spaces: grouping.to_vec(), density: outer };
    if star_mult(&gamma_outer) != direct {
        return Err(Error::validation("ν disagrees with μ∘Tη*"));
    }
    Ok(direct)
}

pub type PolyKernelMorphism = PolyKernel;

fn kernel(source: Vec<Value>, codomain: &ObjList, rows: BTreeMap<Value, Polymeasure>) -> Result<PolyKernel> {
    PolyKernel::new(source, codomain.entries.clone(), rows)
}

fn codomain_of(k: &PolyKernel) -> ObjList {
    ObjList { entries: k.codomain().to_vec() }
}

/// `1_X = η_{[X]}: X → [X]`.
pub fn identity_polykernel(x: &[Value]) -> PolyKernel {
    let cod = ObjList::new(vec![x.to_vec()]);
    let rows = x.iter().map(|v| (v.clone(), star_unit(std::slice::from_ref(v), &cod).unwrap())).collect();
    kernel(x.to_vec(), &cod, rows).expect("identity polykernel")
}

/// The discard map `I → [ ]`.
pub fn discard() -> PolyKernel {
    kernel(vec![Value::unit()], &ObjList::empty(), BTreeMap::from([(Value::unit(), Polymeasure::unit())])).expect("discard map")
}

/// `𝐠f = μ∘T𝐠∘f`, with `g_i: Y_i → 𝐙_i`.
pub fn polykernel_compose(gs: &[PolyKernel], f: &PolyKernel) -> Result<PolyKernel> {
    if gs.len() != f.codomain().len() {
        return Err(Error::domain(format!("{} kernels composed after a kernel into {} sets", gs.len(), f.codomain().len())));
    }
    if let Some(i) = gs.iter().zip(f.codomain()).position(|(g, y)| g.source() != y.as_slice()) {
        return Err(Error::domain(format!("kernel {i} does not start at codomain entry {i}")));
    }
    let spaces: Vec<ObjList> = gs.iter().map(codomain_of).collect();
    let cod = ObjList::flatten(&spaces);
    let mut rows = BTreeMap::new();
    for (x, row) in f.rows() {
        let mut outer: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
        for (ys, w) in row.density() {
            let tuple: Vec<Polymeasure> = ys.iter().zip(gs).map(|(y, g)| g.row(y).expect("row exists").clone()).collect();
            *outer.entry(tuple).or_insert_with(Rational::zero) += w;
        }
        let gamma = DiscreteOuterPolymeasure { inner_spaces: spaces.clone(), density: outer };
        rows.insert(x.clone(), star_mult(&gamma));
    }
    kernel(f.source().to_vec(), &cod, rows)
}

/// `f ⊗ g = κ∘(f × g)` on the source of pairs.
pub fn polykernel_tensor(f: &PolyKernel, g: &PolyKernel) -> Result<PolyKernel> {
    let cod = codomain_of(f).concat(&codomain_of(g));
    let mut rows = BTreeMap::new();
    for (x, fx) in f.rows() {
        for (z, gz) in g.rows() {
            rows.insert(Value::pair(x.clone(), z.clone()), kappa_strength(&[fx.clone(), gz.clone()])?);
        }
    }
    kernel(product_set(&[f.source().to_vec(), g.source().to_vec()]), &cod, rows)
}

/// Left-nested tensor of a list of polykernels; the discard map when empty.
pub fn tensor_all(fs: &[PolyKernel]) -> Result<PolyKernel> {
    match fs {
        [] => Ok(discard()),
        [f] => Ok(f.clone()),
        [first, rest @ ..] => rest.iter().try_fold(first.clone(), |acc, f| polykernel_tensor(&acc, f)),
    }
}

/// `f^w = ν∘f` for `f: X → [∏_j Z_{1j}, …, ∏_j Z_{nj}]`.
pub fn weaken(f: &PolyKernel, grouping: &[ObjList]) -> Result<PolyKernel> {
    let cod = ObjList::flatten(grouping);
    let rows = f.rows().iter().map(|(x, r)| Ok((x.clone(), nu_weaken(r, grouping)?))).collect::<Result<_>>()?;
    kernel(f.source().to_vec(), &cod, rows)
}

/// A binary bracketing of list positions and unit symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracketing {
    Unit,
    Leaf(usize),
    Pair(Box<Bracketing>, Box<Bracketing>),
}

impl Bracketing {
    /// The left-associated bracketing of `n` letters with no unit symbols
    /// (`Unit` when `n = 0`).
    pub fn left_assoc(n: usize) -> Self {
        (1..n).fold(if n == 0 { Bracketing::Unit } else { Bracketing::Leaf(0) }, |acc, i| {
            Bracketing::Pair(Box::new(acc), Box::new(Bracketing::Leaf(i)))
        })
    }

    pub fn pair(a: Bracketing, b: Bracketing) -> Self {
        Bracketing::Pair(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Bracketing::Unit => Vec::new(),
            Bracketing::Leaf(i) => vec![*i],
            Bracketing::Pair(a, b) => {
                let mut l = a.leaves();
                l.extend(b.leaves());
                l
            }
        }
    }

    pub fn shifted(&self, by: usize) -> Self {
        match self {
            Bracketing::Unit => Bracketing::Unit,
            Bracketing::Leaf(i) => Bracketing::Leaf(i + by),
            Bracketing::Pair(a, b) => Bracketing::pair(a.shifted(by), b.shifted(by)),
        }
    }

    /// `α ⊗ α'` for brackettings of consecutive lists.
    pub fn tensor(&self, other: &Bracketing, left_len: usize) -> Self {
        Bracketing::pair(self.clone(), other.shifted(left_len))
    }

    /// Whether the leaves are exactly `0..n` in order.
    pub fn covers(&self, n: usize) -> bool {
        self.leaves() == (0..n).collect::<Vec<_>>()
    }

    /// `⊗^α 𝐗` as a set of nested pairs.
    pub fn object(&self, xs: &ObjList) -> Vec<Value> {
        match self {
            Bracketing::Unit => vec![Value::unit()],
            Bracketing::Leaf(i) => xs.entries[*i].clone(),
            Bracketing::Pair(a, b) => product_set(&[a.object(xs), b.object(xs)]),
        }
    }

    /// `γ_α`: read off the letters of an element of `⊗^α 𝐗`.
    fn letters(&self, v: &Value, out: &mut Vec<Value>) -> Option<()> {
        match self {
            Bracketing::Unit => (*v == Value::unit()).then_some(()),
            Bracketing::Leaf(_) => {
                out.push(v.clone());
                Some(())
            }
            Bracketing::Pair(a, b) => match v {
                Value::Tuple(t) if t.len() == 2 => {
                    a.letters(&t[0], out)?;
                    b.letters(&t[1], out)
                }
                _ => None,
            },
        }
    }

    /// `γ_α⁻¹`: rebuild an element of `⊗^α 𝐗` from its letters.
    fn rebuild(&self, letters: &mut std::slice::Iter<'_, Value>) -> Value {
        match self {
            Bracketing::Unit => Value::unit(),
            Bracketing::Leaf(_) => letters.next().expect("enough letters").clone(),
            Bracketing::Pair(a, b) => {
                let l = a.rebuild(letters);
                Value::pair(l, b.rebuild(letters))
            }
        }
    }

    pub fn to_canonical(&self, v: &Value) -> Option<Value> {
        let mut out = Vec::new();
        self.letters(v, &mut out)?;
        Some(lnest(&out))
    }

    pub fn from_canonical(&self, v: &Value) -> Option<Value> {
        let n = self.leaves().len();
        let letters = unnest(v, n)?;
        Some(self.rebuild(&mut letters.iter()))
    }
}

impl std::fmt::Display for Bracketing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bracketing::Unit => f.write_str("I"),
            Bracketing::Leaf(i) => write!(f, "x{i}"),
            Bracketing::Pair(a, b) => write!(f, "({a}⊗{b})"),
        }
    }
}

fn check_bracketing(alpha: &Bracketing, xs: &ObjList) -> Result<()> {
    if !alpha.covers(xs.len()) {
        return Err(Error::domain(format!("bracketing {alpha} does not cover {} letters in order", xs.len())));
    }
    Ok(())
}

/// `h^α = h∘γ_α⁻¹` for `h: ⊗^α 𝐗 → 𝐘`.
pub fn coherence(h: &PolyKernel, alpha: &Bracketing, xs: &ObjList) -> Result<PolyKernel> {
    check_bracketing(alpha, xs)?;
    let rows = xs
        .product()
        .into_iter()
        .map(|x| {
            let y = alpha.from_canonical(&x).ok_or_else(|| Error::domain(format!("{x} is not in ⊗𝐗")))?;
            let row = h.row(&y).ok_or_else(|| Error::domain(format!("{y} is not in the source of h")))?;
            Ok((x, row.clone()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    kernel(xs.product(), &codomain_of(h), rows)
}

/// `k^{α⁻¹} = k∘γ_α` for `k: ⊗𝐗 → 𝐘`.
pub fn inverse_coherence(k: &PolyKernel, alpha: &Bracketing, xs: &ObjList) -> Result<PolyKernel> {
    check_bracketing(alpha, xs)?;
    let src = canonical_set(alpha.object(xs));
    let rows = src
        .iter()
        .map(|y| {
            let x = alpha.to_canonical(y).ok_or_else(|| Error::domain(format!("{y} is not in ⊗^α𝐗")))?;
            let row = k.row(&x).ok_or_else(|| Error::domain(format!("{x} is not in the source of k")))?;
            Ok((y.clone(), row.clone()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    kernel(src, &codomain_of(k), rows)
}

/// `⊗^α 𝐟`, with the discard map at each unit symbol.
pub fn tensor_bracketed(fs: &[PolyKernel], alpha: &Bracketing) -> Result<PolyKernel> {
    match alpha {
        Bracketing::Unit => Ok(discard()),
        Bracketing::Leaf(i) => fs.get(*i).cloned().ok_or_else(|| Error::domain("bracketing letter out of range")),
        Bracketing::Pair(a, b) => polykernel_tensor(&tensor_bracketed(fs, a)?, &tensor_bracketed(fs, b)?),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarConfig {
    pub seed: u64,
    pub draws: usize,
    pub grid: u32,
    pub max_carrier: usize,
    pub max_arity: usize,
    /// Cap on the number of leaf sets in any nested instance.
    pub max_leaves: usize,
}

impl Default for StarConfig {
    fn default() -> Self {
        StarConfig { seed: 0, draws: 200, grid: 4, max_carrier: 3, max_arity: 3, max_leaves: 5 }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    grid: u32,
    max_carrier: usize,
    max_arity: usize,
    fresh: usize,
}

const MAX_SUPPORT: usize = 2;

impl Gen {
    fn carrier(&mut self) -> Vec<Value> {
        let n = self.rng.random_range(1..=self.max_carrier.max(1));
        let tag = self.fresh;
        self.fresh += 1;
        let prefix = char::from(b'a' + (tag % 26) as u8);
        (0..n).map(|i| Value::atom(format!("{prefix}{i}"))).collect()
    }

    fn list(&mut self, max_len: usize) -> ObjList {
        let n = self.rng.random_range(0..=max_len);
        ObjList::new((0..n).map(|_| self.carrier()).collect())
    }

    /// A random composition of the grid denominator into `parts` positive parts.
    fn weights(&mut self, parts: usize) -> Vec<Rational> {
        let g = self.grid.max(1) as usize;
        let parts = parts.clamp(1, g);
        let mut cuts: Vec<usize> = (1..g).collect();
        cuts.shuffle(&mut self.rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort();
        let mut prev = 0;
        let mut out = Vec::new();
        for c in cuts.into_iter().chain(std::iter::once(g)) {
            out.push(ratio((c - prev) as i64, g as i64));
            prev = c;
        }
        out
    }

    fn polymeasure(&mut self, xs: &ObjList) -> Polymeasure {
        let shape: Vec<usize> = xs.entries.iter().map(Vec::len).collect();
        let mut points = index_tuples(&shape);
        points.shuffle(&mut self.rng);
        let s = self.rng.random_range(1..=MAX_SUPPORT.min(points.len()));
        let ws = self.weights(s);
        let entries = points
            .into_iter()
            .zip(ws)
            .map(|(ix, w)| (ix.iter().enumerate().map(|(i, &j)| xs.entries[i][j].clone()).collect(), w))
            .collect();
        Polymeasure::from_density(xs.entries.clone(), entries).expect("generated polymeasure")
    }

    fn outer(&mut self, spaces: &[ObjList]) -> DiscreteOuterPolymeasure {
        let s = self.rng.random_range(1..=MAX_SUPPORT);
        let ws = self.weights(s);
        let mut density: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
        for w in ws {
            let t: Vec<Polymeasure> = spaces.iter().map(|sp| self.polymeasure(sp)).collect();
            *density.entry(t).or_insert_with(Rational::zero) += w;
        }
        DiscreteOuterPolymeasure { inner_spaces: spaces.to_vec(), density }
    }

    fn kernel(&mut self, source: &[Value], cod: &ObjList) -> PolyKernel {
        let rows = source.iter().map(|x| (x.clone(), self.polymeasure(cod))).collect();
        kernel(source.to_vec(), cod, rows).expect("generated kernel")
    }

    /// Lists of lists with at most `budget` leaf sets in total.
    fn nested(&mut self, budget: &mut usize) -> Vec<ObjList> {
        let n = self.rng.random_range(0..=self.max_arity);
        (0..n)
            .map(|_| {
                let k = self.rng.random_range(0..=self.max_arity.min(*budget));
                *budget -= k;
                ObjList::new((0..k).map(|_| self.carrier()).collect())
            })
            .collect()
    }

    fn bracketing(&mut self, n: usize) -> Bracketing {
        let mut items: Vec<Bracketing> = (0..n).map(Bracketing::Leaf).collect();
        let units = self.rng.random_range(0..=1usize);
        for _ in 0..units {
            let at = self.rng.random_range(0..=items.len());
            items.insert(at, Bracketing::Unit);
        }
        if items.is_empty() {
            return Bracketing::Unit;
        }
        while items.len() > 1 {
            let i = self.rng.random_range(0..items.len() - 1);
            let b = items.remove(i + 1);
            let a = items.remove(i);
            items.insert(i, Bracketing::pair(a, b));
        }
        items.pop().unwrap()
    }
}

fn poly_json(p: &Polymeasure) -> Json {
    p.to_json()
}

fn kernels_json(ks: &[PolyKernel]) -> Json {
    Json::Array(ks.iter().map(PolyKernel::to_json).collect())
}

type Outcome = std::result::Result<(), (String, Json)>;

fn expect_eq<T: PartialEq>(what: &str, lhs: Result<T>, rhs: Result<T>, instance: impl FnOnce() -> Json, show: impl Fn(&T) -> Json) -> Outcome {
    match (lhs, rhs) {
        (Ok(l), Ok(r)) if l == r => Ok(()),
        (Ok(l), Ok(r)) => Err((format!("{what}: the two sides differ"), json!({"instance": instance(), "lhs": show(&l), "rhs": show(&r)}))),
        (Err(e), _) | (_, Err(e)) => Err((format!("{what}: {e}"), json!({"instance": instance(), "error": e.to_string()}))),
    }
}

fn kernel_eq(what: &str, lhs: Result<PolyKernel>, rhs: Result<PolyKernel>, instance: impl FnOnce() -> Json) -> Outcome {
    expect_eq(what, lhs, rhs, instance, PolyKernel::to_json)
}

/// Every check of the suite, in report order.
pub const STAR_CHECKS: [&str; 12] = [
    "star.left_unit",
    "star.right_unit",
    "star.associativity",
    "star.kappa_product",
    "star.nu_weakening",
    "star.nu_extend_roundtrip",
    "star.symmetry",
    "opmulti.unit",
    "opmulti.associativity",
    "opmulti.interchange",
    "opmulti.coherence",
    "opmulti.weakening",
];

/// Seeded random instances of the *-monad laws and the op-multicategory
/// axioms. `variant` replaces the multiplication in the three *-monad laws.
pub fn star_law_suite(cfg: &StarConfig, variant: MultVariant) -> Vec<Verdict> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        grid: cfg.grid,
        max_carrier: cfg.max_carrier,
        max_arity: cfg.max_arity,
        fresh: 0,
    };
    let mut first_failure: Vec<Option<(String, Json)>> = vec![None; STAR_CHECKS.len()];
    for draw in 0..cfg.draws {
        g.fresh = 0;
        let outcomes = one_draw(&mut g, cfg, variant);
        for (slot, out) in first_failure.iter_mut().zip(outcomes) {
            if let (None, Err((msg, mut w))) = (slot.as_ref(), out) {
                w["draw"] = json!(draw);
                w["seed"] = json!(cfg.seed);
                *slot = Some((format!("draw {draw}: {msg}"), w));
            }
        }
    }
    STAR_CHECKS
        .iter()
        .zip(first_failure)
        .map(|(id, f)| Verdict::from_outcome(id.to_string(), cfg.draws as u64, f))
        .collect()
}

fn one_draw(g: &mut Gen, cfg: &StarConfig, variant: MultVariant) -> Vec<Outcome> {
    let mu = |gamma: &DiscreteOuterPolymeasure| star_mult_with(gamma, variant);
    let mut out = Vec::with_capacity(STAR_CHECKS.len());

    // left unit: μ(δ_(γ)) = γ
    let xs = g.list(cfg.max_arity);
    let gamma = g.polymeasure(&xs);
    out.push(expect_eq(
        "μ∘η_T ≠ id",
        Ok(mu(&DiscreteOuterPolymeasure::point(vec![gamma.clone()]))),
        Ok(gamma.clone()),
        || json!({"gamma": poly_json(&gamma)}),
        poly_json,
    ));

    // right unit: μ(Tη*(γ)) = γ
    let singles: Vec<ObjList> = xs.entries.iter().map(|c| ObjList::new(vec![c.clone()])).collect();
    let mut pushed: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
    for (t, w) in gamma.density() {
        let diracs = t.iter().zip(&singles).map(|(x, s)| star_unit(std::slice::from_ref(x), s).unwrap()).collect();
        *pushed.entry(diracs).or_insert_with(Rational::zero) += w;
    }
    let right = DiscreteOuterPolymeasure { inner_spaces: singles, density: pushed };
    out.push(expect_eq("μ∘Tη* ≠ id", Ok(mu(&right)), Ok(gamma.clone()), || json!({"gamma": poly_json(&gamma)}), poly_json));

    // associativity on doubly nested data
    let mut budget = cfg.max_leaves;
    let n = g.rng.random_range(0..=cfg.max_arity);
    let shapes: Vec<Vec<ObjList>> = (0..n).map(|_| g.nested(&mut budget)).collect();
    let s = g.rng.random_range(1..=MAX_SUPPORT);
    let ws = g.weights(s);
    let mut top: BTreeMap<Vec<DiscreteOuterPolymeasure>, Rational> = BTreeMap::new();
    for w in ws {
        let t: Vec<DiscreteOuterPolymeasure> = shapes.iter().map(|sh| g.outer(sh)).collect();
        *top.entry(t).or_insert_with(Rational::zero) += w;
    }
    out.push(associativity(&top, &shapes, variant));

    // κ against the product
    let gammas: Vec<Polymeasure> = (0..g.rng.random_range(0..=cfg.max_arity)).map(|_| {
        let l = g.list(2);
        g.polymeasure(&l)
    }).collect();
    out.push(match kappa_strength(&gammas) {
        Ok(_) => Ok(()),
        Err(e) => Err((e.to_string(), json!({"gammas": gammas.iter().map(poly_json).collect::<Vec<_>>()}))),
    });

    // ν against μ∘Tη*, on a random grouping
    let mut budget = cfg.max_leaves;
    let grouping = g.nested(&mut budget);
    let prods = ObjList::new(grouping.iter().map(ObjList::product).collect());
    let gp = g.polymeasure(&prods);
    out.push(match nu_weaken(&gp, &grouping) {
        Ok(_) => Ok(()),
        Err(e) => Err((e.to_string(), json!({"gamma": poly_json(&gp)}))),
    });

    // ν then extension is the identity on binary products
    let (x, y) = (g.carrier(), g.carrier());
    let pair = ObjList::new(vec![x.clone(), y.clone()]);
    let joint = g.polymeasure(&ObjList::new(vec![pair.product()]));
    let as_dist = joint.marginal(0);
    out.push(expect_eq(
        "extend∘ν ≠ id",
        nu_weaken(&joint, std::slice::from_ref(&pair)).and_then(|b| extend_to_measure(&b)),
        as_dist,
        || json!({"joint": poly_json(&joint)}),
        Distribution::to_json,
    ));

    // permutation equivariance of μ
    let mut budget = cfg.max_leaves;
    let spaces = g.nested(&mut budget);
    let gamma_s = g.outer(&spaces);
    let mut perm: Vec<usize> = (0..spaces.len()).collect();
    perm.shuffle(&mut g.rng);
    let offsets: Vec<usize> = spaces.iter().scan(0, |acc, s| {
        let o = *acc;
        *acc += s.len();
        Some(o)
    }).collect();
    let block: Vec<usize> = perm.iter().flat_map(|&j| offsets[j]..offsets[j] + spaces[j].len()).collect();
    out.push(expect_eq(
        "μ is not equivariant",
        gamma_s.permute(&perm).map(|p| star_mult(&p)),
        star_mult(&gamma_s).permute(&block),
        || json!({"gamma": gamma_s.to_json(), "perm": perm}),
        poly_json,
    ));

    // (d) unit and associativity of composition
    let src = g.carrier();
    let ys = g.list(cfg.max_arity);
    let f = g.kernel(&src, &ys);
    let ids: Vec<PolyKernel> = ys.entries.iter().map(|y| identity_polykernel(y)).collect();
    let unit_l = kernel_eq("[1,…,1]f ≠ f", polykernel_compose(&ids, &f), Ok(f.clone()), || json!({"f": f.to_json()}));
    let unit_r = kernel_eq("[f]1_X ≠ f", polykernel_compose(std::slice::from_ref(&f), &identity_polykernel(&src)), Ok(f.clone()), || json!({"f": f.to_json()}));
    out.push(unit_l.and(unit_r));

    let mut budget = cfg.max_leaves;
    let zs: Vec<ObjList> = ys.entries.iter().map(|_| {
        let k = g.rng.random_range(0..=cfg.max_arity.min(budget));
        budget -= k;
        ObjList::new((0..k).map(|_| g.carrier()).collect())
    }).collect();
    let gs: Vec<PolyKernel> = ys.entries.iter().zip(&zs).map(|(y, z)| g.kernel(y, z)).collect();
    let hs: Vec<Vec<PolyKernel>> = zs.iter().map(|z| z.entries.iter().map(|zij| {
        let w = g.list(1);
        g.kernel(zij, &w)
    }).collect()).collect();
    let flat_h: Vec<PolyKernel> = hs.iter().flatten().cloned().collect();
    out.push(kernel_eq(
        "𝐡♭(𝐠f) ≠ [𝐡ᵢgᵢ]f",
        polykernel_compose(&gs, &f).and_then(|gf| polykernel_compose(&flat_h, &gf)),
        hs.iter().zip(&gs).map(|(h, gi)| polykernel_compose(h, gi)).collect::<Result<Vec<_>>>().and_then(|hg| polykernel_compose(&hg, &f)),
        || json!({"f": f.to_json(), "g": kernels_json(&gs), "h": hs.iter().map(|h| kernels_json(h)).collect::<Vec<_>>()}),
    ));

    // (f) interchange of composition and tensor
    let src2 = g.carrier();
    let ws2 = g.list(2);
    let f2 = g.kernel(&src2, &ws2);
    let ks: Vec<PolyKernel> = ws2.entries.iter().map(|w| {
        let c = g.list(1);
        g.kernel(w, &c)
    }).collect();
    let hs1: Vec<PolyKernel> = ys.entries.iter().map(|y| {
        let c = g.list(1);
        g.kernel(y, &c)
    }).collect();
    let all: Vec<PolyKernel> = hs1.iter().chain(&ks).cloned().collect();
    out.push(kernel_eq(
        "𝐡f ⊗ 𝐤g ≠ (𝐡⊗𝐤)(f⊗g)",
        polykernel_compose(&hs1, &f).and_then(|hf| polykernel_tensor(&hf, &polykernel_compose(&ks, &f2)?)),
        polykernel_tensor(&f, &f2).and_then(|fg| polykernel_compose(&all, &fg)),
        || json!({"f": f.to_json(), "g": f2.to_json(), "h": kernels_json(&hs1), "k": kernels_json(&ks)}),
    ));

    // (g) coherence maps
    out.push(coherence_draw(g, cfg));

    // (h) weakening
    out.push(weakening_draw(g, cfg));
    out
}

fn associativity(top: &BTreeMap<Vec<DiscreteOuterPolymeasure>, Rational>, shapes: &[Vec<ObjList>], variant: MultVariant) -> Outcome {
    let sq = |w: &Rational| match variant {
        MultVariant::Exact => w.clone(),
        MultVariant::SquaredDensity => w * w,
    };
    // μ_{T**}: multiply the outer layer away first
    let flat_spaces: Vec<ObjList> = shapes.iter().flatten().cloned().collect();
    let mut merged: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
    for (t, w) in top {
        let refs: Vec<&DiscreteOuterPolymeasure> = t.iter().collect();
        for (u, v) in DiscreteOuterPolymeasure::product(&refs).density {
            *merged.entry(u).or_insert_with(Rational::zero) += sq(w) * v;
        }
    }
    let lhs = star_mult_with(&DiscreteOuterPolymeasure { inner_spaces: flat_spaces, density: merged }, variant);
    // Tμ*: multiply each slot first
    let slot_spaces: Vec<ObjList> = shapes.iter().map(|s| ObjList::flatten(s)).collect();
    let mut pushed: BTreeMap<Vec<Polymeasure>, Rational> = BTreeMap::new();
    for (t, w) in top {
        let inner: Vec<Polymeasure> = t.iter().map(|gi| star_mult_with(gi, variant)).collect();
        *pushed.entry(inner).or_insert_with(Rational::zero) += w;
    }
    let rhs = star_mult_with(&DiscreteOuterPolymeasure { inner_spaces: slot_spaces, density: pushed }, variant);
    expect_eq(
        "μ∘μ_{T**} ≠ μ∘Tμ*",
        Ok(lhs),
        Ok(rhs),
        || {
            json!({
                "outer": top.iter().map(|(t, w)| json!({
                    "tuple": t.iter().map(DiscreteOuterPolymeasure::to_json).collect::<Vec<_>>(),
                    "weight": fmt_rational(w),
                })).collect::<Vec<_>>()
            })
        },
        poly_json,
    )
}

fn coherence_draw(g: &mut Gen, cfg: &StarConfig) -> Outcome {
    let xs = g.list(cfg.max_arity);
    let alpha = g.bracketing(xs.len());
    let ys = g.list(2);
    let h = g.kernel(&canonical_set(alpha.object(&xs)), &ys);
    let inst = |extra: Json| json!({"xs": xs.to_json(), "alpha": alpha.to_string(), "h": h.to_json(), "extra": extra});
    // (𝐠h)^α = 𝐠h^α
    let gs: Vec<PolyKernel> = ys.entries.iter().map(|y| {
        let c = g.list(1);
        g.kernel(y, &c)
    }).collect();
    kernel_eq(
        "(𝐠h)^α ≠ 𝐠h^α",
        polykernel_compose(&gs, &h).and_then(|gh| coherence(&gh, &alpha, &xs)),
        coherence(&h, &alpha, &xs).and_then(|ha| polykernel_compose(&gs, &ha)),
        || inst(kernels_json(&gs)),
    )?;
    // (h^α ⊗ h'^α')^{α_𝐗 ⊗ α_𝐗'} = (h ⊗ h')^{α⊗α'}
    let xs2 = g.list(2);
    let alpha2 = g.bracketing(xs2.len());
    let ys2 = g.list(1);
    let h2 = g.kernel(&canonical_set(alpha2.object(&xs2)), &ys2);
    let both = xs.concat(&xs2);
    let canon = Bracketing::left_assoc(xs.len()).tensor(&Bracketing::left_assoc(xs2.len()), xs.len());
    kernel_eq(
        "(h^α ⊗ h'^α')^(α_X⊗α_X') ≠ (h⊗h')^(α⊗α')",
        coherence(&h, &alpha, &xs)
            .and_then(|a| polykernel_tensor(&a, &coherence(&h2, &alpha2, &xs2)?))
            .and_then(|t| coherence(&t, &canon, &both)),
        polykernel_tensor(&h, &h2).and_then(|t| coherence(&t, &alpha.tensor(&alpha2, xs.len()), &both)),
        || inst(json!({"xs2": xs2.to_json(), "alpha2": alpha2.to_string(), "h2": h2.to_json()})),
    )?;
    // (⊗^α 𝐟)^α = ⊗ f_i
    let fs: Vec<PolyKernel> = xs.entries.iter().map(|x| {
        let c = g.list(1);
        g.kernel(x, &c)
    }).collect();
    kernel_eq(
        "(⊗^α 𝐟)^α ≠ ⊗𝐟",
        tensor_bracketed(&fs, &alpha).and_then(|t| coherence(&t, &alpha, &xs)),
        tensor_all(&fs),
        || inst(kernels_json(&fs)),
    )?;
    // inverse round trips
    kernel_eq(
        "(h^α)^(α⁻¹) ≠ h",
        coherence(&h, &alpha, &xs).and_then(|ha| inverse_coherence(&ha, &alpha, &xs)),
        Ok(h.clone()),
        || inst(Json::Null),
    )?;
    let k = g.kernel(&xs.product(), &ys);
    kernel_eq(
        "(k^(α⁻¹))^α ≠ k",
        inverse_coherence(&k, &alpha, &xs).and_then(|ki| coherence(&ki, &alpha, &xs)),
        Ok(k.clone()),
        || inst(k.to_json()),
    )
}

fn weakening_draw(g: &mut Gen, cfg: &StarConfig) -> Outcome {
    // 1^w_{⊗X_i} = ⊗ 1_{X_i}
    let xs = g.list(cfg.max_arity);
    let p = xs.product();
    kernel_eq(
        "1^w ≠ ⊗1",
        weaken(&identity_polykernel(&p), std::slice::from_ref(&xs)),
        tensor_all(&xs.entries.iter().map(|x| identity_polykernel(x)).collect::<Vec<_>>()),
        || json!({"xs": xs.to_json()}),
    )?;
    // 𝐠♭ f^w = [⊗_j g_{1j}, …, ⊗_j g_{mj}] f
    let mut budget = cfg.max_leaves;
    let groups = g.nested(&mut budget);
    let src = g.carrier();
    let prods = ObjList::new(groups.iter().map(ObjList::product).collect());
    let f = g.kernel(&src, &prods);
    let gss: Vec<Vec<PolyKernel>> = groups.iter().map(|grp| grp.entries.iter().map(|z| {
        let c = g.list(1);
        g.kernel(z, &c)
    }).collect()).collect();
    let flat: Vec<PolyKernel> = gss.iter().flatten().cloned().collect();
    kernel_eq(
        "𝐠♭ f^w ≠ [⊗g₁ⱼ, …]f",
        weaken(&f, &groups).and_then(|fw| polykernel_compose(&flat, &fw)),
        gss.iter().map(|gi| tensor_all(gi)).collect::<Result<Vec<_>>>().and_then(|t| polykernel_compose(&t, &f)),
        || json!({"f": f.to_json(), "g": gss.iter().map(|gi| kernels_json(gi)).collect::<Vec<_>>()}),
    )
}

pub const EXTENSION_CHECKS: [&str; 4] = ["extension.bijection", "extension.nu_roundtrip", "extension.rectangles", "extension.valid"];

/// On each product shape, every grid-bounded polymeasure passes the
/// full-table validator, extends to a measure agreeing on rectangles,
/// restricts back to itself and weakens back along `ν`; the extension map
/// hits every grid distribution on the product exactly once.
pub fn extension_suite(shapes: &[Vec<usize>], grid: u32) -> Vec<Verdict> {
    let mut fails: Vec<Option<(String, Json)>> = vec![None; 4];
    let mut counts = [0u64; 4];
    let mut note = |slot: usize, counts: &mut [u64; 4], failure: Option<(String, Json)>| {
        counts[slot] += 1;
        if fails[slot].is_none() {
            fails[slot] = failure;
        }
    };
    for shape in shapes {
        let carriers: Vec<Vec<Value>> = shape.iter().enumerate().map(|(i, &n)| crate::value::atoms(&format!("{}", (b'x' + i as u8) as char), n)).collect();
        let product = product_set(&carriers);
        let grouping = [ObjList::new(carriers.clone())];
        let mut seen: BTreeMap<Distribution, Polymeasure> = BTreeMap::new();
        for d in crate::finprob::grid_distributions(&product, grid, None) {
            let gamma = match crate::polymeasure::restrict_to_rectangles(&d, &carriers) {
                Ok(g) => g,
                Err(e) => {
                    note(0, &mut counts, Some((format!("{e}"), d.to_json())));
                    continue;
                }
            };
            let w = || json!({"shape": shape, "polymeasure": gamma.to_json()});
            let v = crate::polymeasure::validate_polymeasure(&gamma.full_table());
            let ok = v.is_valid() && v.canonical.as_ref() == Some(&gamma);
            note(3, &mut counts, (!ok).then(|| ("full table rejected".to_string(), w())));
            let ext = match extend_to_measure(&gamma) {
                Ok(p) => p,
                Err(e) => {
                    note(2, &mut counts, Some((format!("{e}"), w())));
                    continue;
                }
            };
            note(2, &mut counts, None);
            let back = crate::polymeasure::restrict_to_rectangles(&ext, &carriers);
            let bad = ext != d || back.as_ref() != Ok(&gamma) || seen.insert(ext.clone(), gamma.clone()).is_some();
            note(0, &mut counts, bad.then(|| ("extension is not inverse to restriction".to_string(), w())));
            let nu = nu_weaken(&Polymeasure::from_distribution(&ext), &grouping);
            note(1, &mut counts, (nu.as_ref() != Ok(&gamma)).then(|| ("ν of the extension differs".to_string(), w())));
        }
        let expected = crate::finprob::grid_distributions(&product, grid, None).len();
        if seen.len() != expected {
            note(0, &mut counts, Some((format!("{} images for {expected} grid distributions", seen.len()), json!({"shape": shape}))));
        }
    }
    fails.into_iter().zip(EXTENSION_CHECKS).zip(counts).map(|((f, c), n)| Verdict::from_outcome(c, n, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::value::atoms;

    fn two(p: &str) -> Vec<Value> {
        atoms(p, 2)
    }

    fn uniform2(p: &str) -> Polymeasure {
        let c = two(p);
        Polymeasure::from_density(vec![c.clone()], c.iter().map(|x| (vec![x.clone()], ratio(1, 2))).collect()).unwrap()
    }

    #[test]
    fn units() {
        let xs = ObjList::new(vec![two("a")]);
        let d = star_unit(&[Value::atom("a1")], &xs).unwrap();
        assert_eq!(d.density_at(&[Value::atom("a1")]), int(1));
        assert_eq!(star_unit(&[], &ObjList::empty()).unwrap(), Polymeasure::unit());
        let xy = ObjList::new(vec![two("a"), two("b")]);
        let d2 = star_unit(&[Value::atom("a0"), Value::atom("b1")], &xy).unwrap();
        assert_eq!(d2.density().len(), 1);
        assert!(star_unit(&[Value::atom("zz")], &xs).is_err());
    }

    #[test]
    fn mult_examples() {
        let g1 = uniform2("a");
        let g2 = star_unit(&[Value::atom("b0")], &ObjList::new(vec![two("b")])).unwrap();
        let point = DiscreteOuterPolymeasure::point(vec![g1.clone(), g2.clone()]);
        assert_eq!(star_mult(&point), product_polymeasure(&[&g1, &g2]));

        let sp = ObjList::new(vec![two("a")]);
        let da = star_unit(&[Value::atom("a0")], &sp).unwrap();
        let db = star_unit(&[Value::atom("a1")], &sp).unwrap();
        let mix = DiscreteOuterPolymeasure::new(vec![sp], vec![(vec![da], ratio(1, 2)), (vec![db], ratio(1, 2))]).unwrap();
        assert_eq!(star_mult(&mix), uniform2("a"));

        let empty = DiscreteOuterPolymeasure::new(vec![], vec![(vec![], int(1))]).unwrap();
        assert_eq!(star_mult(&empty), Polymeasure::unit());
    }

    #[test]
    fn outer_shape_errors() {
        let sp = ObjList::new(vec![two("a")]);
        let other = ObjList::new(vec![two("b")]);
        let da = star_unit(&[Value::atom("a0")], &sp).unwrap();
        assert!(DiscreteOuterPolymeasure::new(vec![other], vec![(vec![da.clone()], int(1))]).is_err());
        assert!(DiscreteOuterPolymeasure::new(vec![sp.clone(), sp], vec![(vec![da], int(1))]).is_err());
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_strength(&[uniform2("a"), uniform2("b")]).unwrap();
        assert_eq!(k.density().len(), 4);
        assert!(k.density().values().all(|w| *w == ratio(1, 4)));
        assert_eq!(kappa_strength(&[uniform2("a")]).unwrap(), uniform2("a"));
        let sa = ObjList::new(vec![two("a")]);
        let sb = ObjList::new(vec![two("b")]);
        let dx = star_unit(&[Value::atom("a0")], &sa).unwrap();
        let dy = star_unit(&[Value::atom("b1")], &sb).unwrap();
        assert_eq!(
            kappa_strength(&[dx, dy]).unwrap(),
            star_unit(&[Value::atom("a0"), Value::atom("b1")], &sa.concat(&sb)).unwrap()
        );
    }

    #[test]
    fn nu_examples() {
        let pair = ObjList::new(vec![two("a"), two("b")]);
        let prod = pair.product();
        let p = Polymeasure::from_density(
            vec![prod.clone()],
            vec![(vec![prod[0].clone()], ratio(1, 4)), (vec![prod[3].clone()], ratio(3, 4))],
        )
        .unwrap();
        let b = nu_weaken(&p, std::slice::from_ref(&pair)).unwrap();
        assert_eq!(b.arity(), 2);
        assert_eq!(b.eval(&[vec![Value::atom("a1")], two("b")]).unwrap(), ratio(3, 4));
        let back = extend_to_measure(&b).unwrap();
        assert_eq!(back, p.marginal(0).unwrap());
        assert!(nu_weaken(&p, &[pair.clone(), pair]).is_err());
    }

    fn k2(src: &str, cod: &str, rows: [[i64; 2]; 2], den: i64) -> PolyKernel {
        let s = two(src);
        let c = two(cod);
        let cl = ObjList::new(vec![c.clone()]);
        let rows = s
            .iter()
            .zip(rows)
            .map(|(x, r)| {
                let e = c.iter().zip(r).map(|(y, n)| (vec![y.clone()], ratio(n, den))).collect();
                (x.clone(), Polymeasure::from_density(cl.entries.clone(), e).unwrap())
            })
            .collect();
        kernel(s, &cl, rows).unwrap()
    }

    #[test]
    fn compose_chain_matches_double_sum() {
        let f = k2("x", "y", [[1, 1], [2, 0]], 2);
        let g = k2("y", "z", [[0, 2], [1, 1]], 2);
        let gf = polykernel_compose(std::slice::from_ref(&g), &f).unwrap();
        // row x0: 1/2·(0,1) + 1/2·(1/2,1/2) = (1/4, 3/4); row x1: (0,1)
        let r0 = gf.row(&Value::atom("x0")).unwrap();
        assert_eq!(r0.density_at(&[Value::atom("z0")]), ratio(1, 4));
        assert_eq!(r0.density_at(&[Value::atom("z1")]), ratio(3, 4));
        let r1 = gf.row(&Value::atom("x1")).unwrap();
        assert_eq!(r1.density_at(&[Value::atom("z1")]), int(1));
        assert_eq!(polykernel_compose(&[identity_polykernel(&two("y"))], &f).unwrap(), f);
    }

    #[test]
    fn tensor_examples() {
        let f = k2("x", "y", [[1, 1], [2, 0]], 2);
        let t = polykernel_tensor(&f, &discard()).unwrap();
        assert_eq!(t.codomain(), f.codomain());
        let g = k2("u", "v", [[1, 1], [0, 2]], 2);
        let fg = polykernel_tensor(&f, &g).unwrap();
        let row = fg.row(&Value::pair(Value::atom("x0"), Value::atom("u1"))).unwrap();
        assert_eq!(row.density_at(&[Value::atom("y0"), Value::atom("v1")]), ratio(1, 2));
        let dx = identity_polykernel(&two("x"));
        let du = identity_polykernel(&two("u"));
        let d = polykernel_tensor(&dx, &du).unwrap();
        assert!(d.rows().values().all(|r| r.density().len() == 1));
    }

    #[test]
    fn bracketing_round_trip() {
        let xs = ObjList::new(vec![two("a"), two("b"), two("c")]);
        let alpha = Bracketing::pair(
            Bracketing::Leaf(0),
            Bracketing::pair(Bracketing::Unit, Bracketing::pair(Bracketing::Leaf(1), Bracketing::Leaf(2))),
        );
        for y in alpha.object(&xs) {
            let c = alpha.to_canonical(&y).unwrap();
            assert_eq!(alpha.from_canonical(&c).unwrap(), y);
        }
        assert_eq!(Bracketing::left_assoc(3).object(&xs), xs.product());
    }

    #[test]
    fn extension_bijection_small_shapes() {
        let v = extension_suite(&[vec![2, 2], vec![1, 3]], 2);
        assert_eq!(v.len(), 4);
        for x in &v {
            assert!(x.passed && x.instances > 0, "{x:?}");
        }
    }

    #[test]
    fn suite_passes() {
        let cfg = StarConfig { draws: 30, seed: 7, ..StarConfig::default() };
        let v = star_law_suite(&cfg, MultVariant::Exact);
        assert_eq!(v.len(), STAR_CHECKS.len());
        for x in &v {
            assert!(x.passed, "{x:?}");
        }
    }

    #[test]
    fn squared_mult_breaks_associativity() {
        let cfg = StarConfig { draws: 30, seed: 7, ..StarConfig::default() };
        let v = star_law_suite(&cfg, MultVariant::SquaredDensity);
        let a = v.iter().find(|x| x.check == "star.associativity").unwrap();
        assert!(!a.passed);
        assert!(a.witness.is_some());
        assert!(v.iter().find(|x| x.check == "star.left_unit").unwrap().passed);
    }

    #[test]
    fn degenerate_draws_pass() {
        let cfg = StarConfig { draws: 20, seed: 3, max_arity: 0, max_carrier: 1, ..StarConfig::default() };
        assert!(star_law_suite(&cfg, MultVariant::Exact).iter().all(|x| x.passed));
    }
}
