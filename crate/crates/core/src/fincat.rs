//! Finite categories presented by explicit tables, set-valued functors,
//! comma categories `(A ↓ K)`, limits of finite set-valued diagrams and
//! natural-transformation sets.
//!
//! Limits are found by depth-first assignment with arc-consistency
//! propagation along the diagram's arrows; the full product of the
//! object-values is never materialised.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::value::Value;

/// Default cap on limit-search work (propagation revisions plus search nodes).
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<Option<usize>>,
    compose: HashMap<(usize, usize), usize>,
    object_index: HashMap<String, usize>,
    morphism_index: HashMap<String, usize>,
}

impl PartialEq for FiniteCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.compose == other.compose
    }
}

impl FiniteCategory {
    /// Build from index-based tables. `compose[(g, f)] = g∘f`.
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<Option<usize>>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let object_index = index_unique(&objects, "object")?;
        let morphism_index = index_unique(&morphisms.iter().map(|m| m.id.clone()).collect::<Vec<_>>(), "morphism")?;
        if identities.len() != objects.len() {
            return Err(Error::domain("one identity slot per object is required"));
        }
        for m in &morphisms {
            if m.src >= objects.len() || m.dst >= objects.len() {
                return Err(Error::domain(format!("morphism {} has an unknown endpoint", m.id)));
            }
        }
        let nm = morphisms.len();
        if identities.iter().flatten().any(|&i| i >= nm)
            || compose.iter().any(|(&(g, f), &gf)| g >= nm || f >= nm || gf >= nm)
        {
            return Err(Error::domain("table refers to an unknown morphism"));
        }
        Ok(FiniteCategory {
            objects,
            morphisms,
            identities,
            compose,
            object_index,
            morphism_index,
        })
    }

    /// Build from identifier tables, as found in category files.
    /// Unknown identifiers are errors; axiom violations are left to
    /// [`validate_category`].
    pub fn from_tables(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        compose: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
    ) -> Result<Self> {
        let oi = index_unique(&objects, "object")?;
        let lookup_o = |s: &str| oi.get(s).copied().ok_or_else(|| Error::domain(format!("unknown object {s:?}")));
        let mut mors = Vec::with_capacity(morphisms.len());
        for (id, s, d) in morphisms {
            let src = lookup_o(&s)?;
            let dst = lookup_o(&d)?;
            mors.push(Morphism { id, src, dst });
        }
        let mi = index_unique(&mors.iter().map(|m| m.id.clone()).collect::<Vec<_>>(), "morphism")?;
        let lookup_m = |s: &str| mi.get(s).copied().ok_or_else(|| Error::domain(format!("unknown morphism {s:?}")));
        let mut ids = vec![None; objects.len()];
        for (o, m) in identities {
            ids[lookup_o(&o)?] = Some(lookup_m(&m)?);
        }
        let mut table = HashMap::new();
        for (g, f, gf) in compose {
            let key = (lookup_m(&g)?, lookup_m(&f)?);
            if table.insert(key, lookup_m(&gf)?).is_some() {
                return Err(Error::domain(format!("composite {g}∘{f} given twice")));
            }
        }
        Self::from_parts(objects, mors, ids, table)
    }

    /// Identities only.
    pub fn discrete(objects: &[&str]) -> Self {
        let objs: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let mors: Vec<Morphism> = objs
            .iter()
            .enumerate()
            .map(|(i, o)| Morphism { id: format!("id_{o}"), src: i, dst: i })
            .collect();
        let compose = (0..objs.len()).map(|i| ((i, i), i)).collect();
        let ids = (0..objs.len()).map(Some).collect();
        Self::from_parts(objs, mors, ids, compose).expect("discrete category")
    }

    /// One-object category from a monoid given by its multiplication table
    /// (`table[g][f] = g∘f`) and the index of its unit.
    pub fn monoid(object: &str, elements: &[String], table: &[Vec<usize>], unit: usize) -> Result<Self> {
        let mors = elements
            .iter()
            .map(|e| Morphism { id: e.clone(), src: 0, dst: 0 })
            .collect();
        let mut compose = HashMap::new();
        for (g, row) in table.iter().enumerate() {
            for (f, &gf) in row.iter().enumerate() {
                compose.insert((g, f), gf);
            }
        }
        Self::from_parts(vec![object.to_string()], mors, vec![Some(unit)], compose)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object(&self, id: &str) -> Option<usize> {
        self.object_index.get(id).copied()
    }

    pub fn morphism(&self, id: &str) -> Option<usize> {
        self.morphism_index.get(id).copied()
    }

    pub fn identity(&self, obj: usize) -> Option<usize> {
        self.identities[obj]
    }

    pub fn identities(&self) -> &[Option<usize>] {
        &self.identities
    }

    pub fn is_identity(&self, m: usize) -> bool {
        let mor = &self.morphisms[m];
        mor.src == mor.dst && self.identities[mor.src] == Some(m)
    }

    /// `g∘f`, when the table defines it.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn compose_table(&self) -> &HashMap<(usize, usize), usize> {
        &self.compose
    }

    pub fn hom(&self, src: usize, dst: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&m| self.morphisms[m].src == src && self.morphisms[m].dst == dst)
            .collect()
    }

    pub fn out_arrows(&self, src: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&m| self.morphisms[m].src == src).collect()
    }

    /// Same category with object and morphism identifiers rewritten.
    pub fn renamed(&self, obj: impl Fn(&str) -> String, mor: impl Fn(&str) -> String) -> Self {
        let objects = self.objects.iter().map(|o| obj(o)).collect();
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| Morphism { id: mor(&m.id), src: m.src, dst: m.dst })
            .collect();
        Self::from_parts(objects, morphisms, self.identities.clone(), self.compose.clone()).expect("renaming keeps tables")
    }
}

fn index_unique(ids: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.clone(), i).is_some() {
            return Err(Error::domain(format!("duplicate {what} identifier {id:?}")));
        }
    }
    Ok(map)
}

/// A violated category axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    MissingIdentity { object: String },
    BadIdentity { object: String, morphism: String },
    MissingComposite { g: String, f: String },
    CompositeWrongType { g: String, f: String, gf: String },
    NotComposable { g: String, f: String },
    NotUnital { morphism: String },
    NotAssociative { h: String, g: String, f: String },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CategoryViolation::*;
        match self {
            MissingIdentity { object } => write!(f, "object {object} has no identity"),
            BadIdentity { object, morphism } => write!(f, "identity {morphism} of {object} is not an endomorphism of it"),
            MissingComposite { g, f: ff } => write!(f, "composite {g}∘{ff} is missing"),
            CompositeWrongType { g, f: ff, gf } => write!(f, "composite {g}∘{ff} = {gf} has the wrong source or target"),
            NotComposable { g, f: ff } => write!(f, "table composes non-composable pair {g}∘{ff}"),
            NotUnital { morphism } => write!(f, "identity law fails at {morphism}"),
            NotAssociative { h, g, f: ff } => write!(f, "({h}∘{g})∘{ff} ≠ {h}∘({g}∘{ff})"),
        }
    }
}

/// Every violated axiom; empty means the tables form a category.
pub fn validate_category(c: &FiniteCategory) -> Vec<CategoryViolation> {
    use CategoryViolation::*;
    let name = |m: usize| c.morphisms[m].id.clone();
    let mut out = Vec::new();
    for (o, id) in c.identities.iter().enumerate() {
        match id {
            None => out.push(MissingIdentity { object: c.objects[o].clone() }),
            Some(m) if c.morphisms[*m].src != o || c.morphisms[*m].dst != o => out.push(BadIdentity {
                object: c.objects[o].clone(),
                morphism: name(*m),
            }),
            _ => {}
        }
    }
    let mut keys: Vec<_> = c.compose.keys().copied().collect();
    keys.sort();
    for (g, f) in keys {
        if c.morphisms[f].dst != c.morphisms[g].src {
            out.push(NotComposable { g: name(g), f: name(f) });
        }
    }
    let n = c.morphisms.len();
    for f in 0..n {
        for g in 0..n {
            if c.morphisms[f].dst != c.morphisms[g].src {
                continue;
            }
            match c.compose(g, f) {
                None => out.push(MissingComposite { g: name(g), f: name(f) }),
                Some(gf) => {
                    if c.morphisms[gf].src != c.morphisms[f].src || c.morphisms[gf].dst != c.morphisms[g].dst {
                        out.push(CompositeWrongType { g: name(g), f: name(f), gf: name(gf) });
                    }
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for f in 0..n {
        let (s, t) = (c.morphisms[f].src, c.morphisms[f].dst);
        let ids = (c.identities[s].unwrap(), c.identities[t].unwrap());
        if c.compose(f, ids.0) != Some(f) || c.compose(ids.1, f) != Some(f) {
            out.push(NotUnital { morphism: name(f) });
        }
    }
    for f in 0..n {
        for g in 0..n {
            if c.morphisms[f].dst != c.morphisms[g].src {
                continue;
            }
            let gf = c.compose(g, f).unwrap();
            for h in 0..n {
                if c.morphisms[g].dst != c.morphisms[h].src {
                    continue;
                }
                let hg = c.compose(h, g).unwrap();
                if c.compose(h, gf) != c.compose(hg, f) {
                    out.push(NotAssociative { h: name(h), g: name(g), f: name(f) });
                }
            }
        }
    }
    out
}

/// Cartesian product of two categories.
pub fn product_category(a: &FiniteCategory, b: &FiniteCategory) -> FiniteCategory {
    let nb_o = b.num_objects();
    let nb_m = b.num_morphisms();
    let mut objects = Vec::new();
    for x in &a.objects {
        for y in &b.objects {
            objects.push(format!("({x},{y})"));
        }
    }
    let mut morphisms = Vec::new();
    for f in &a.morphisms {
        for g in &b.morphisms {
            morphisms.push(Morphism {
                id: format!("({},{})", f.id, g.id),
                src: f.src * nb_o + g.src,
                dst: f.dst * nb_o + g.dst,
            });
        }
    }
    let mut identities = Vec::new();
    for x in 0..a.num_objects() {
        for y in 0..nb_o {
            identities.push(match (a.identities[x], b.identities[y]) {
                (Some(i), Some(j)) => Some(i * nb_m + j),
                _ => None,
            });
        }
    }
    let mut compose = HashMap::new();
    for (&(g1, f1), &gf1) in &a.compose {
        for (&(g2, f2), &gf2) in &b.compose {
            compose.insert((g1 * nb_m + g2, f1 * nb_m + f2), gf1 * nb_m + gf2);
        }
    }
    FiniteCategory::from_parts(objects, morphisms, identities, compose).expect("product of valid tables")
}

/// A functor into finite sets: a labelled set per object and an index map per
/// morphism (`maps[m][i]` is the image of element `i` of the source set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctor {
    sets: Vec<Vec<Value>>,
    maps: Vec<Vec<usize>>,
}

impl SetFunctor {
    pub fn new(sets: Vec<Vec<Value>>, maps: Vec<Vec<usize>>) -> Self {
        SetFunctor { sets, maps }
    }

    /// Constant functor at a set, every morphism acting as the identity.
    pub fn constant(c: &FiniteCategory, set: Vec<Value>) -> Self {
        let n = set.len();
        SetFunctor {
            sets: vec![set; c.num_objects()],
            maps: vec![(0..n).collect(); c.num_morphisms()],
        }
    }

    /// The representable `c(x, –)`.
    pub fn representable(c: &FiniteCategory, x: usize) -> Self {
        let homs: Vec<Vec<usize>> = (0..c.num_objects()).map(|y| c.hom(x, y)).collect();
        let sets = homs
            .iter()
            .map(|h| h.iter().map(|&m| Value::atom(c.morphisms()[m].id.clone())).collect())
            .collect();
        let maps = (0..c.num_morphisms())
            .map(|g| {
                let (s, t) = (c.morphisms()[g].src, c.morphisms()[g].dst);
                homs[s]
                    .iter()
                    .map(|&f| {
                        let gf = c.compose(g, f).expect("composable pair");
                        homs[t].iter().position(|&m| m == gf).expect("composite in hom-set")
                    })
                    .collect()
            })
            .collect();
        SetFunctor { sets, maps }
    }

    pub fn set(&self, obj: usize) -> &[Value] {
        &self.sets[obj]
    }

    pub fn size(&self, obj: usize) -> usize {
        self.sets[obj].len()
    }

    pub fn sets(&self) -> &[Vec<Value>] {
        &self.sets
    }

    pub fn map(&self, m: usize) -> &[usize] {
        &self.maps[m]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn apply(&self, m: usize, i: usize) -> usize {
        self.maps[m][i]
    }

    /// Index of an element in the set at `obj`.
    pub fn position(&self, obj: usize, v: &Value) -> Option<usize> {
        self.sets[obj].iter().position(|x| x == v)
    }
}

/// Every way the functor tables fail to define a functor.
pub fn validate_functor(c: &FiniteCategory, f: &SetFunctor) -> Vec<String> {
    let mut out = Vec::new();
    if f.sets.len() != c.num_objects() || f.maps.len() != c.num_morphisms() {
        out.push(format!(
            "functor has {} sets and {} maps for a category with {} objects and {} morphisms",
            f.sets.len(),
            f.maps.len(),
            c.num_objects(),
            c.num_morphisms()
        ));
        return out;
    }
    for (m, mor) in c.morphisms().iter().enumerate() {
        let map = &f.maps[m];
        if map.len() != f.size(mor.src) || map.iter().any(|&j| j >= f.size(mor.dst)) {
            out.push(format!("image of {} is not a total function F({}) → F({})", mor.id, c.objects()[mor.src], c.objects()[mor.dst]));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (o, id) in c.identities().iter().enumerate() {
        if let Some(id) = id {
            if f.maps[*id].iter().enumerate().any(|(i, &j)| i != j) {
                out.push(format!("identity of {} is not sent to an identity", c.objects()[o]));
            }
        }
    }
    let mut pairs: Vec<_> = c.compose_table().iter().map(|(&k, &v)| (k, v)).collect();
    pairs.sort();
    for ((g, ff), gf) in pairs {
        let composed: Vec<usize> = f.maps[ff].iter().map(|&i| f.maps[g][i]).collect();
        if composed != f.maps[gf] {
            out.push(format!("F({}∘{}) ≠ F({})∘F({})", c.morphisms()[g].id, c.morphisms()[ff].id, c.morphisms()[g].id, c.morphisms()[ff].id));
        }
    }
    out
}

/// Shape category together with a set-valued functor on it.
#[derive(Clone, Debug)]
pub struct FiniteDiagram {
    pub shape: FiniteCategory,
    pub value: SetFunctor,
}

impl FiniteDiagram {
    pub fn validate(&self) -> Vec<String> {
        let mut out: Vec<String> = validate_category(&self.shape).iter().map(|v| v.to_string()).collect();
        out.extend(validate_functor(&self.shape, &self.value));
        out
    }

    pub fn arrows(&self) -> ArrowDiagram<'_> {
        let sizes = (0..self.shape.num_objects()).map(|o| self.value.size(o)).collect();
        let arrows = (0..self.shape.num_morphisms())
            .filter(|&m| !self.shape.is_identity(m))
            .map(|m| {
                let mor = &self.shape.morphisms()[m];
                Arrow { src: mor.src, dst: mor.dst, map: self.value.map(m) }
            })
            .collect();
        ArrowDiagram { sizes, arrows }
    }
}

/// One diagram arrow: a total function between two node-sets.
#[derive(Clone, Copy, Debug)]
pub struct Arrow<'a> {
    pub src: usize,
    pub dst: usize,
    pub map: &'a [usize],
}

/// The data the limit solver actually needs: node cardinalities and
/// non-identity arrows. Composites add no constraints and may be omitted.
#[derive(Clone, Debug)]
pub struct ArrowDiagram<'a> {
    pub sizes: Vec<usize>,
    pub arrows: Vec<Arrow<'a>>,
}

/// A finite limit: compatible families, one coordinate per diagram node.
/// The projection to node `i` is coordinate `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limit {
    pub families: Vec<Vec<usize>>,
}

impl Limit {
    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn project(&self, element: usize, node: usize) -> usize {
        self.families[element][node]
    }

    pub fn index_of(&self, family: &[usize]) -> Option<usize> {
        self.families.binary_search_by(|f| f.as_slice().cmp(family)).ok()
    }
}

pub fn limit_of_diagram(d: &FiniteDiagram) -> Result<Limit> {
    solve_limit(&d.arrows(), DEFAULT_STEP_BUDGET)
}

#[derive(Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if n % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        BitSet { words }
    }

    fn empty_like(&self) -> Self {
        BitSet { words: vec![0; self.words.len()] }
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    fn intersect_with(&mut self, other: &BitSet) -> bool {
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let n = *a & *b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }
}

struct Solver<'d, 'a> {
    d: &'d ArrowDiagram<'a>,
    incident: Vec<Vec<usize>>,
    domains: Vec<BitSet>,
    trail: Vec<(usize, BitSet)>,
    steps: u64,
    budget: u64,
    out: Vec<Vec<usize>>,
}

impl Solver<'_, '_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::resource("limit search steps", format!("more than {}", self.budget), self.budget));
        }
        Ok(())
    }

    fn narrow(&mut self, node: usize, to: &BitSet) -> Option<bool> {
        let mut next = self.domains[node].clone();
        if !next.intersect_with(to) {
            return Some(false);
        }
        let prev = std::mem::replace(&mut self.domains[node], next);
        self.trail.push((node, prev));
        if self.domains[node].count() == 0 {
            None
        } else {
            Some(true)
        }
    }

    /// Arc consistency from the queued nodes. `Ok(false)` on a wipe-out.
    fn propagate(&mut self, mut queue: Vec<usize>) -> Result<bool> {
        let mut queued = vec![false; self.d.sizes.len()];
        for &q in &queue {
            queued[q] = true;
        }
        while let Some(node) = queue.pop() {
            queued[node] = false;
            for k in 0..self.incident[node].len() {
                let a = self.d.arrows[self.incident[node][k]];
                self.tick()?;
                let mut image = self.domains[a.dst].empty_like();
                for x in self.domains[a.src].iter() {
                    image.insert(a.map[x]);
                }
                let mut pre = self.domains[a.src].empty_like();
                for x in self.domains[a.src].iter() {
                    if self.domains[a.dst].contains(a.map[x]) {
                        pre.insert(x);
                    }
                }
                for (n, set) in [(a.dst, image), (a.src, pre)] {
                    match self.narrow(n, &set) {
                        None => return Ok(false),
                        Some(true) => {
                            if !queued[n] {
                                queued[n] = true;
                                queue.push(n);
                            }
                        }
                        Some(false) => {}
                    }
                }
            }
        }
        Ok(true)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (n, prev) = self.trail.pop().unwrap();
            self.domains[n] = prev;
        }
    }

    fn search(&mut self) -> Result<()> {
        self.tick()?;
        let branch = (0..self.domains.len())
            .map(|n| (self.domains[n].count(), n))
            .filter(|&(c, _)| c > 1)
            .min();
        let Some((_, node)) = branch else {
            self.out.push(self.domains.iter().map(|b| b.first().unwrap()).collect());
            return Ok(());
        };
        let values: Vec<usize> = self.domains[node].iter().collect();
        for v in values {
            let mark = self.trail.len();
            let mut single = self.domains[node].empty_like();
            single.insert(v);
            self.narrow(node, &single);
            if self.propagate(vec![node])? {
                self.search()?;
            }
            self.undo_to(mark);
        }
        Ok(())
    }
}

/// Enumerate the limit of an arrow diagram, families sorted lexicographically.
pub fn solve_limit(d: &ArrowDiagram<'_>, budget: u64) -> Result<Limit> {
    let n = d.sizes.len();
    let mut incident = vec![Vec::new(); n];
    for (i, a) in d.arrows.iter().enumerate() {
        incident[a.src].push(i);
        if a.dst != a.src {
            incident[a.dst].push(i);
        }
    }
    if d.sizes.iter().any(|&s| s == 0) {
        return Ok(Limit { families: Vec::new() });
    }
    let mut solver = Solver {
        d,
        incident,
        domains: d.sizes.iter().map(|&s| BitSet::full(s)).collect(),
        trail: Vec::new(),
        steps: 0,
        budget,
        out: Vec::new(),
    };
    if solver.propagate((0..n).collect())? {
        solver.search()?;
    }
    let mut families = solver.out;
    families.sort();
    Ok(Limit { families })
}

/// The comma category `(A ↓ K)` for a finite set `A` of size `a` and a
/// functor `K` on `base`.
///
/// Objects are pairs `(X, h)` with `h: A → K(X)`, numbered object by object
/// with `h` read as a base-`|K(X)|` numeral (`h[0]` least significant). A
/// morphism is `f: X → X'` out of `(X, h)`, landing at `(X', K(f)∘h)`.
#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub a: usize,
    offsets: Vec<usize>,
    objects: Vec<(usize, Vec<usize>)>,
    /// `(source object, base morphism, target object)`.
    arrows: Vec<(usize, usize, usize)>,
}

/// Default cap on comma-category size.
pub const DEFAULT_COMMA_BUDGET: usize = 50_000;

pub fn comma_category(a: usize, base: &FiniteCategory, k: &SetFunctor) -> Result<CommaCategory> {
    comma_category_with_budget(a, base, k, DEFAULT_COMMA_BUDGET)
}

pub fn comma_category_with_budget(a: usize, base: &FiniteCategory, k: &SetFunctor, budget: usize) -> Result<CommaCategory> {
    let mut offsets = Vec::with_capacity(base.num_objects() + 1);
    let mut total: u128 = 0;
    for x in 0..base.num_objects() {
        offsets.push(total as usize);
        let count = (k.size(x) as u128).checked_pow(a as u32).unwrap_or(u128::MAX);
        total = total.saturating_add(count);
        if total > budget as u128 {
            return Err(Error::resource(
                format!("comma category over a {a}-element set"),
                if total == u128::MAX { "overflow".to_string() } else { format!("at least {total} objects") },
                format!("{budget} objects"),
            ));
        }
    }
    offsets.push(total as usize);
    let mut objects = Vec::with_capacity(total as usize);
    for x in 0..base.num_objects() {
        let s = k.size(x);
        let count = offsets[x + 1] - offsets[x];
        for code in 0..count {
            let mut h = Vec::with_capacity(a);
            let mut c = code;
            for _ in 0..a {
                h.push(c % s);
                c /= s;
            }
            objects.push((x, h));
        }
    }
    let mut comma = CommaCategory { a, offsets, objects, arrows: Vec::new() };
    let mut arrows = Vec::new();
    let outs: Vec<Vec<usize>> = (0..base.num_objects()).map(|x| base.out_arrows(x)).collect();
    for (o, (x, h)) in comma.objects.iter().enumerate() {
        for &f in &outs[*x] {
            let y = base.morphisms()[f].dst;
            let h2: Vec<usize> = h.iter().map(|&i| k.apply(f, i)).collect();
            arrows.push((o, f, comma.index_of(y, &h2)));
        }
    }
    comma.arrows = arrows;
    Ok(comma)
}

impl CommaCategory {
    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object(&self, o: usize) -> (usize, &[usize]) {
        (self.objects[o].0, &self.objects[o].1)
    }

    pub fn objects(&self) -> &[(usize, Vec<usize>)] {
        &self.objects
    }

    /// Projection `(X, h) ↦ X`.
    pub fn projection(&self, o: usize) -> usize {
        self.objects[o].0
    }

    /// Index of the object `(x, h)`.
    pub fn index_of(&self, x: usize, h: &[usize]) -> usize {
        let s = if self.offsets[x + 1] > self.offsets[x] {
            // |K(x)|^a objects; recover the radix from the count
            radix(self.offsets[x + 1] - self.offsets[x], self.a)
        } else {
            0
        };
        let mut code = 0usize;
        for &i in h.iter().rev() {
            code = code * s + i;
        }
        self.offsets[x] + code
    }

    /// `(source, base morphism, target)` for every morphism, identities included.
    pub fn arrows(&self) -> &[(usize, usize, usize)] {
        &self.arrows
    }

    /// The diagram `K∘U` over this comma category.
    pub fn diagram<'k>(&self, base: &FiniteCategory, k: &'k SetFunctor) -> ArrowDiagram<'k> {
        ArrowDiagram {
            sizes: self.objects.iter().map(|(x, _)| k.size(*x)).collect(),
            arrows: self
                .arrows
                .iter()
                .filter(|(_, f, _)| !base.is_identity(*f))
                .map(|&(s, f, t)| Arrow { src: s, dst: t, map: k.map(f) })
                .collect(),
        }
    }

    /// Materialise as a [`FiniteCategory`] with its composition table.
    pub fn to_category(&self, base: &FiniteCategory) -> FiniteCategory {
        let objects = self
            .objects
            .iter()
            .map(|(x, h)| format!("({},{:?})", base.objects()[*x], h))
            .collect();
        let morphisms: Vec<Morphism> = self
            .arrows
            .iter()
            .map(|&(s, f, t)| Morphism { id: format!("{}@{}", base.morphisms()[f].id, s), src: s, dst: t })
            .collect();
        let mut by_key = HashMap::new();
        for (i, &(s, f, _)) in self.arrows.iter().enumerate() {
            by_key.insert((s, f), i);
        }
        let identities = (0..self.objects.len())
            .map(|o| base.identity(self.objects[o].0).and_then(|id| by_key.get(&(o, id)).copied()))
            .collect();
        let mut compose = HashMap::new();
        for (i, &(s, f, t)) in self.arrows.iter().enumerate() {
            for (j, &(s2, g, _)) in self.arrows.iter().enumerate() {
                if s2 != t {
                    continue;
                }
                if let Some(gf) = base.compose(g, f) {
                    if let Some(&k) = by_key.get(&(s, gf)) {
                        compose.insert((j, i), k);
                    }
                }
            }
        }
        FiniteCategory::from_parts(objects, morphisms, identities, compose).expect("comma tables")
    }
}

fn radix(count: usize, a: usize) -> usize {
    if a == 0 {
        // every K(x) contributes exactly one object; the radix is irrelevant
        return 1;
    }
    let mut s = (count as f64).powf(1.0 / a as f64).round() as usize;
    while s.pow(a as u32) > count {
        s -= 1;
    }
    while (s + 1).pow(a as u32) <= count {
        s += 1;
    }
    s
}

/// A natural transformation `F ⇒ G` as one index map per object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NatTrans {
    pub components: Vec<Vec<usize>>,
}

/// All natural transformations `f ⇒ g`, computed as the limit of `g` over
/// the category of elements of `f`.
pub fn nat_set(c: &FiniteCategory, f: &SetFunctor, g: &SetFunctor) -> Result<Vec<NatTrans>> {
    nat_set_with_budget(c, f, g, DEFAULT_STEP_BUDGET)
}

pub fn nat_set_with_budget(c: &FiniteCategory, f: &SetFunctor, g: &SetFunctor, budget: u64) -> Result<Vec<NatTrans>> {
    let mut offsets = Vec::with_capacity(c.num_objects());
    let mut sizes = Vec::new();
    for x in 0..c.num_objects() {
        offsets.push(sizes.len());
        sizes.extend(std::iter::repeat_n(g.size(x), f.size(x)));
    }
    let mut arrows = Vec::new();
    for (m, mor) in c.morphisms().iter().enumerate() {
        if c.is_identity(m) {
            continue;
        }
        for i in 0..f.size(mor.src) {
            arrows.push(Arrow {
                src: offsets[mor.src] + i,
                dst: offsets[mor.dst] + f.apply(m, i),
                map: g.map(m),
            });
        }
    }
    let lim = solve_limit(&ArrowDiagram { sizes, arrows }, budget)?;
    Ok(lim
        .families
        .into_iter()
        .map(|fam| NatTrans {
            components: (0..c.num_objects())
                .map(|x| fam[offsets[x]..offsets[x] + f.size(x)].to_vec())
                .collect(),
        })
        .collect())
}

/// Whether index maps form a natural transformation `f ⇒ g`.
pub fn is_natural(c: &FiniteCategory, f: &SetFunctor, g: &SetFunctor, alpha: &NatTrans) -> bool {
    c.morphisms().iter().enumerate().all(|(m, mor)| {
        (0..f.size(mor.src)).all(|i| g.apply(m, alpha.components[mor.src][i]) == alpha.components[mor.dst][f.apply(m, i)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::value::atoms;

    fn brute_force_limit(d: &FiniteDiagram) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = (0..d.shape.num_objects()).map(|o| d.value.size(o)).collect();
        let mut out: Vec<Vec<usize>> = crate::value::index_tuples(&sizes)
            .into_iter()
            .filter(|fam| {
                d.shape
                    .morphisms()
                    .iter()
                    .enumerate()
                    .all(|(m, mor)| d.value.apply(m, fam[mor.src]) == fam[mor.dst])
            })
            .collect();
        if sizes.is_empty() {
            out = vec![Vec::new()];
        }
        out.sort();
        out
    }

    #[test]
    fn end2_is_a_category() {
        let (c, _) = presets::end2();
        assert!(validate_category(&c).is_empty());
        assert_eq!(c.num_morphisms(), 4);
    }

    #[test]
    fn discrete_is_a_category() {
        assert!(validate_category(&FiniteCategory::discrete(&["a", "b", "c"])).is_empty());
    }

    #[test]
    fn broken_composite_is_named() {
        // a --f--> b --g--> c with g∘f wrongly set to g
        let c = FiniteCategory::from_tables(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("ida".into(), "a".into(), "a".into()),
                ("idb".into(), "b".into(), "b".into()),
                ("idc".into(), "c".into(), "c".into()),
                ("f".into(), "a".into(), "b".into()),
                ("g".into(), "b".into(), "c".into()),
            ],
            vec![
                ("ida".into(), "ida".into(), "ida".into()),
                ("idb".into(), "idb".into(), "idb".into()),
                ("idc".into(), "idc".into(), "idc".into()),
                ("f".into(), "ida".into(), "f".into()),
                ("idb".into(), "f".into(), "f".into()),
                ("g".into(), "idb".into(), "g".into()),
                ("idc".into(), "g".into(), "g".into()),
                ("g".into(), "f".into(), "g".into()),
            ],
            vec![("a".into(), "ida".into()), ("b".into(), "idb".into()), ("c".into(), "idc".into())],
        )
        .unwrap();
        let report = validate_category(&c);
        assert!(report.contains(&CategoryViolation::CompositeWrongType { g: "g".into(), f: "f".into(), gf: "g".into() }));
    }

    #[test]
    fn missing_identity_is_reported() {
        let c = FiniteCategory::from_parts(
            vec!["x".into()],
            vec![Morphism { id: "m".into(), src: 0, dst: 0 }],
            vec![None],
            HashMap::from([((0, 0), 0)]),
        )
        .unwrap();
        assert_eq!(validate_category(&c), vec![CategoryViolation::MissingIdentity { object: "x".into() }]);
    }

    #[test]
    fn comma_over_end2() {
        let (c, k) = presets::end2();
        let comma = comma_category(2, &c, &k).unwrap();
        assert_eq!(comma.num_objects(), 4);
        // each object has one out-arrow per endomap
        assert_eq!(comma.arrows().len(), 16);
        let cat = comma.to_category(&c);
        assert!(validate_category(&cat).is_empty());
        for (o, (x, h)) in comma.objects().iter().enumerate() {
            assert_eq!(comma.index_of(*x, h), o);
        }
    }

    #[test]
    fn comma_over_empty_set() {
        let c = FiniteCategory::discrete(&["p", "q", "r"]);
        let k = SetFunctor::new(vec![atoms("a", 2), atoms("b", 3), atoms("c", 1)], vec![vec![0, 1], vec![0, 1, 2], vec![0]]);
        let comma = comma_category(0, &c, &k).unwrap();
        assert_eq!(comma.num_objects(), 3);
    }

    #[test]
    fn comma_discrete_singleton() {
        let c = FiniteCategory::discrete(&["*"]);
        let k = SetFunctor::new(vec![atoms("k", 2)], vec![vec![0, 1]]);
        let comma = comma_category(1, &c, &k).unwrap();
        assert_eq!(comma.num_objects(), 2);
        let cat = comma.to_category(&c);
        assert!((0..cat.num_morphisms()).all(|m| cat.is_identity(m)));
    }

    #[test]
    fn limit_of_discrete_is_product() {
        let shape = FiniteCategory::discrete(&["a", "b"]);
        let value = SetFunctor::new(vec![atoms("x", 2), atoms("y", 3)], vec![vec![0, 1], vec![0, 1, 2]]);
        let lim = limit_of_diagram(&FiniteDiagram { shape, value }).unwrap();
        assert_eq!(lim.len(), 6);
    }

    #[test]
    fn equalizer() {
        // f, g: {a,b} -> {x,y}; f = (a↦x, b↦y), g = (a↦x, b↦x)
        let shape = FiniteCategory::from_tables(
            vec!["s".into(), "t".into()],
            vec![
                ("ids".into(), "s".into(), "s".into()),
                ("idt".into(), "t".into(), "t".into()),
                ("f".into(), "s".into(), "t".into()),
                ("g".into(), "s".into(), "t".into()),
            ],
            vec![
                ("ids".into(), "ids".into(), "ids".into()),
                ("idt".into(), "idt".into(), "idt".into()),
                ("f".into(), "ids".into(), "f".into()),
                ("g".into(), "ids".into(), "g".into()),
                ("idt".into(), "f".into(), "f".into()),
                ("idt".into(), "g".into(), "g".into()),
            ],
            vec![("s".into(), "ids".into()), ("t".into(), "idt".into())],
        )
        .unwrap();
        let value = SetFunctor::new(
            vec![atoms_named(&["a", "b"]), atoms_named(&["x", "y"])],
            vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 0]],
        );
        let d = FiniteDiagram { shape, value };
        assert!(d.validate().is_empty());
        let lim = limit_of_diagram(&d).unwrap();
        assert_eq!(lim.families, vec![vec![0, 0]]);
    }

    fn atoms_named(names: &[&str]) -> Vec<Value> {
        crate::value::atoms_from(names)
    }

    #[test]
    fn empty_shape_has_singleton_limit() {
        let shape = FiniteCategory::discrete(&[]);
        let value = SetFunctor::new(vec![], vec![]);
        let lim = limit_of_diagram(&FiniteDiagram { shape, value }).unwrap();
        assert_eq!(lim.families, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn limit_matches_brute_force_on_presets() {
        for (c, k) in [presets::end2(), presets::fin_upto(2), presets::sizes_one_two()] {
            for a in 0..=2 {
                let comma = comma_category(a, &c, &k).unwrap();
                let cat = comma.to_category(&c);
                let value = SetFunctor::new(
                    comma.objects().iter().map(|(x, _)| k.set(*x).to_vec()).collect(),
                    comma.arrows().iter().map(|&(_, f, _)| k.map(f).to_vec()).collect(),
                );
                let d = FiniteDiagram { shape: cat, value };
                let sizes: usize = (0..d.shape.num_objects()).map(|o| d.value.size(o)).product();
                if sizes > 1_000_000 {
                    continue;
                }
                assert_eq!(limit_of_diagram(&d).unwrap().families, brute_force_limit(&d), "a = {a}");
            }
        }
    }

    #[test]
    fn yoneda_count() {
        let (c, k) = presets::fin_upto(2);
        for x in 0..c.num_objects() {
            let y = SetFunctor::representable(&c, x);
            assert!(validate_functor(&c, &y).is_empty());
            for g in [&k, &y] {
                let nats = nat_set(&c, &y, g).unwrap();
                assert_eq!(nats.len(), g.size(x));
                assert!(nats.iter().all(|n| is_natural(&c, &y, g, n)));
            }
        }
    }

    #[test]
    fn nat_set_on_trivial_domain() {
        let c = FiniteCategory::discrete(&["*"]);
        let one = SetFunctor::constant(&c, atoms("u", 1));
        let two = SetFunctor::constant(&c, atoms("t", 2));
        assert_eq!(nat_set(&c, &one, &two).unwrap().len(), 2);
        assert_eq!(nat_set(&c, &two, &one).unwrap().len(), 1);
        assert_eq!(nat_set(&c, &two, &two).unwrap().len(), 4);
    }

    #[test]
    fn step_budget_is_enforced() {
        let shape = FiniteCategory::discrete(&["a", "b", "c", "d"]);
        let value = SetFunctor::constant(&shape, atoms("v", 10));
        let d = FiniteDiagram { shape, value };
        let err = solve_limit(&d.arrows(), 100).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn product_category_is_valid() {
        let (c, _) = presets::end2();
        let p = product_category(&c, &FiniteCategory::discrete(&["u", "v"]));
        assert!(validate_category(&p).is_empty());
        assert_eq!(p.num_morphisms(), 8);
    }
}
