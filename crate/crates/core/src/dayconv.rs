//! Day convolution of set-valued functors on a finite strict monoidal
//! category, the comparison maps `ξ^(k)` built from a lax monoidal functor,
//! and the degree-k exactness check for its codensity monad.

use std::collections::HashMap;

use crate::codensity::CodensityInstance;
use crate::error::{Error, Result};
use crate::fincat::{
    is_natural, nat_set, product_category, solve_limit, Arrow, ArrowDiagram, FiniteCategory, NatTrans, SetFunctor,
};
use crate::value::{index_tuples, Value};

/// Strict monoidal structure on a finite category: `tensor_obj[x][y]`,
/// `tensor_mor[f][g]` and the unit object.
#[derive(Clone, Debug)]
pub struct StrictMonoidal {
    pub underlying: FiniteCategory,
    pub tensor_obj: Vec<Vec<usize>>,
    pub tensor_mor: Vec<Vec<usize>>,
    pub unit: usize,
}

impl StrictMonoidal {
    pub fn new(underlying: FiniteCategory, tensor_obj: Vec<Vec<usize>>, tensor_mor: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let m = StrictMonoidal { underlying, tensor_obj, tensor_mor, unit };
        let problems = m.validate();
        if problems.is_empty() {
            Ok(m)
        } else {
            Err(Error::validation(problems.join("; ")))
        }
    }

    /// Every failure of strict associativity, unitality, typing or interchange.
    pub fn validate(&self) -> Vec<String> {
        let c = &self.underlying;
        let (no, nm) = (c.num_objects(), c.num_morphisms());
        let mut out = Vec::new();
        if self.tensor_obj.len() != no || self.tensor_obj.iter().any(|r| r.len() != no || r.iter().any(|&z| z >= no)) {
            return vec!["object tensor table has the wrong shape".into()];
        }
        if self.tensor_mor.len() != nm || self.tensor_mor.iter().any(|r| r.len() != nm || r.iter().any(|&z| z >= nm)) {
            return vec!["morphism tensor table has the wrong shape".into()];
        }
        if self.unit >= no {
            return vec!["unit object is unknown".into()];
        }
        let ms = c.morphisms();
        let name = |f: usize| ms[f].id.as_str();
        for f in 0..nm {
            for g in 0..nm {
                let fg = &ms[self.tensor_mor[f][g]];
                if fg.src != self.tensor_obj[ms[f].src][ms[g].src] || fg.dst != self.tensor_obj[ms[f].dst][ms[g].dst] {
                    out.push(format!("{}⊗{} has the wrong type", name(f), name(g)));
                }
            }
        }
        for x in 0..no {
            if self.tensor_obj[self.unit][x] != x || self.tensor_obj[x][self.unit] != x {
                out.push(format!("unit law fails at object {}", c.objects()[x]));
            }
            for y in 0..no {
                for z in 0..no {
                    if self.tensor_obj[self.tensor_obj[x][y]][z] != self.tensor_obj[x][self.tensor_obj[y][z]] {
                        out.push("tensor of objects is not associative".into());
                    }
                }
            }
            if let (Some(ix), Some(iy)) = (c.identity(x), c.identity(self.tensor_obj[x][x])) {
                if self.tensor_mor[ix][ix] != iy {
                    out.push(format!("id⊗id is not an identity at {}", c.objects()[x]));
                }
            }
        }
        if let Some(iu) = c.identity(self.unit) {
            for f in 0..nm {
                if self.tensor_mor[iu][f] != f || self.tensor_mor[f][iu] != f {
                    out.push(format!("unit law fails at morphism {}", name(f)));
                }
            }
        }
        for f in 0..nm {
            for g in 0..nm {
                for h in 0..nm {
                    if self.tensor_mor[self.tensor_mor[f][g]][h] != self.tensor_mor[f][self.tensor_mor[g][h]] {
                        out.push(format!("({}⊗{})⊗{} ≠ {}⊗({}⊗{})", name(f), name(g), name(h), name(f), name(g), name(h)));
                    }
                }
            }
        }
        for (&(g1, f1), &gf1) in c.compose_table() {
            for (&(g2, f2), &gf2) in c.compose_table() {
                let lhs = self.tensor_mor[gf1][gf2];
                let rhs = c.compose(self.tensor_mor[g1][g2], self.tensor_mor[f1][f2]);
                if rhs != Some(lhs) {
                    out.push(format!("interchange fails for ({}∘{})⊗({}∘{})", name(g1), name(f1), name(g2), name(f2)));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Left-bracketed k-fold tensor of objects; the unit for `k = 0`.
    pub fn tensor_objects(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.unit, |acc, &x| self.tensor_obj[acc][x])
    }

    /// Left-bracketed k-fold tensor of morphisms; `id_I` for `k = 0`.
    pub fn tensor_morphisms(&self, fs: &[usize]) -> Option<usize> {
        let iu = self.underlying.identity(self.unit)?;
        Some(fs.iter().fold(iu, |acc, &f| self.tensor_mor[acc][f]))
    }
}

pub type StrictMonoidalCategory = StrictMonoidal;

/// Lax monoidal `K` into finite sets: `kappa[(x,y)][i·|Ky| + j] ∈ K(x⊗y)`
/// and a point `iota ∈ K(I)`.
#[derive(Clone, Debug)]
pub struct LaxMonoidal {
    pub k: SetFunctor,
    pub kappa: HashMap<(usize, usize), Vec<usize>>,
    pub iota: usize,
}

impl LaxMonoidal {
    pub fn new(d: &StrictMonoidal, k: SetFunctor, kappa: HashMap<(usize, usize), Vec<usize>>, iota: usize) -> Result<Self> {
        let l = LaxMonoidal { k, kappa, iota };
        let problems = l.validate(d);
        if problems.is_empty() {
            Ok(l)
        } else {
            Err(Error::validation(problems.join("; ")))
        }
    }

    pub fn kappa_at(&self, x: usize, y: usize, i: usize, j: usize) -> usize {
        self.kappa[&(x, y)][i * self.k.size(y) + j]
    }

    /// Left-bracketed `ζ(y₁, …, y_k) ∈ K(⊗X_i)`; `ι` for `k = 0`.
    pub fn zeta(&self, d: &StrictMonoidal, xs: &[usize], ys: &[usize]) -> usize {
        let mut obj = d.unit;
        let mut acc = self.iota;
        for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
            if i == 0 {
                obj = x;
                acc = y;
            } else {
                acc = self.kappa_at(obj, x, acc, y);
                obj = d.tensor_obj[obj][x];
            }
        }
        acc
    }

    pub fn validate(&self, d: &StrictMonoidal) -> Vec<String> {
        let c = &d.underlying;
        let k = &self.k;
        let mut out = Vec::new();
        let no = c.num_objects();
        if self.iota >= k.size(d.unit) {
            return vec!["ι is not an element of K(I)".into()];
        }
        for x in 0..no {
            for y in 0..no {
                match self.kappa.get(&(x, y)) {
                    Some(t) if t.len() == k.size(x) * k.size(y) && t.iter().all(|&z| z < k.size(d.tensor_obj[x][y])) => {}
                    _ => out.push(format!("κ at ({}, {}) is missing or ill-typed", c.objects()[x], c.objects()[y])),
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (f, mf) in c.morphisms().iter().enumerate() {
            for (g, mg) in c.morphisms().iter().enumerate() {
                let fg = d.tensor_mor[f][g];
                for i in 0..k.size(mf.src) {
                    for j in 0..k.size(mg.src) {
                        let lhs = k.apply(fg, self.kappa_at(mf.src, mg.src, i, j));
                        let rhs = self.kappa_at(mf.dst, mg.dst, k.apply(f, i), k.apply(g, j));
                        if lhs != rhs {
                            out.push(format!("κ is not natural at ({}, {})", mf.id, mg.id));
                        }
                    }
                }
            }
        }
        for x in 0..no {
            for i in 0..k.size(x) {
                if self.kappa_at(d.unit, x, self.iota, i) != i || self.kappa_at(x, d.unit, i, self.iota) != i {
                    out.push(format!("unit coherence fails at {}", c.objects()[x]));
                }
                for y in 0..no {
                    for z in 0..no {
                        let xy = d.tensor_obj[x][y];
                        let yz = d.tensor_obj[y][z];
                        for j in 0..k.size(y) {
                            for l in 0..k.size(z) {
                                let lhs = self.kappa_at(xy, z, self.kappa_at(x, y, i, j), l);
                                let rhs = self.kappa_at(x, yz, i, self.kappa_at(y, z, j, l));
                                if lhs != rhs {
                                    out.push("associativity coherence of κ fails".into());
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

pub type LaxMonoidalFunctorData = LaxMonoidal;

/// A generator `(a, b, m)` with `a ∈ F(x1)`, `b ∈ G(x2)`, `m: x1⊗x2 → X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DayTriple {
    pub x1: usize,
    pub x2: usize,
    pub a: usize,
    pub b: usize,
    pub m: usize,
}

/// `F ⊗_Day G` with the generators of each equivalence class.
#[derive(Clone, Debug)]
pub struct DayConvolution {
    pub functor: SetFunctor,
    /// `members[X][c]`: generators in class `c` at `X`, the first one smallest.
    pub members: Vec<Vec<Vec<DayTriple>>>,
    class_of: Vec<HashMap<DayTriple, usize>>,
}

impl DayConvolution {
    pub fn class(&self, x: usize, t: &DayTriple) -> Option<usize> {
        self.class_of[x].get(t).copied()
    }

    pub fn rep(&self, x: usize, c: usize) -> DayTriple {
        self.members[x][c][0]
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

pub fn day_convolve(f: &SetFunctor, g: &SetFunctor, d: &StrictMonoidal) -> DayConvolution {
    let c = &d.underlying;
    let no = c.num_objects();
    let homs: Vec<Vec<Vec<usize>>> = (0..no).map(|s| (0..no).map(|t| c.hom(s, t)).collect()).collect();
    let mut members = Vec::with_capacity(no);
    let mut class_of = Vec::with_capacity(no);
    for x in 0..no {
        let mut gens = Vec::new();
        for x1 in 0..no {
            for x2 in 0..no {
                for &m in &homs[d.tensor_obj[x1][x2]][x] {
                    for a in 0..f.size(x1) {
                        for b in 0..g.size(x2) {
                            gens.push(DayTriple { x1, x2, a, b, m });
                        }
                    }
                }
            }
        }
        let index: HashMap<DayTriple, usize> = gens.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let mut uf = UnionFind((0..gens.len()).collect());
        for (fi, mf) in c.morphisms().iter().enumerate() {
            for (gi, mg) in c.morphisms().iter().enumerate() {
                let fg = d.tensor_mor[fi][gi];
                for &m in &homs[d.tensor_obj[mf.dst][mg.dst]][x] {
                    let mfg = c.compose(m, fg).expect("composable");
                    for a in 0..f.size(mf.src) {
                        for b in 0..g.size(mg.src) {
                            let lhs = index[&DayTriple { x1: mf.src, x2: mg.src, a, b, m: mfg }];
                            let rhs = index[&DayTriple { x1: mf.dst, x2: mg.dst, a: f.apply(fi, a), b: g.apply(gi, b), m }];
                            uf.union(lhs, rhs);
                        }
                    }
                }
            }
        }
        let mut classes: Vec<Vec<DayTriple>> = Vec::new();
        let mut root_class = HashMap::new();
        let mut cls = HashMap::new();
        for (i, t) in gens.iter().enumerate() {
            let r = uf.find(i);
            let ci = *root_class.entry(r).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[ci].push(*t);
            cls.insert(*t, ci);
        }
        members.push(classes);
        class_of.push(cls);
    }
    let label = |t: &DayTriple, with_objects: bool| {
        let a = f.set(t.x1)[t.a].clone();
        let b = g.set(t.x2)[t.b].clone();
        let m = Value::atom(c.morphisms()[t.m].id.clone());
        if with_objects {
            Value::Tuple(vec![Value::atom(c.objects()[t.x1].clone()), a, Value::atom(c.objects()[t.x2].clone()), b, m])
        } else {
            Value::Tuple(vec![a, b, m])
        }
    };
    let sets: Vec<Vec<Value>> = members
        .iter()
        .map(|classes| {
            let plain: Vec<Value> = classes.iter().map(|cl| label(&cl[0], false)).collect();
            let mut check = plain.clone();
            check.sort();
            check.dedup();
            if check.len() == plain.len() {
                plain
            } else {
                classes.iter().map(|cl| label(&cl[0], true)).collect()
            }
        })
        .collect();
    let maps: Vec<Vec<usize>> = c
        .morphisms()
        .iter()
        .enumerate()
        .map(|(u, mu)| {
            members[mu.src]
                .iter()
                .map(|cl| {
                    let t = cl[0];
                    let um = c.compose(u, t.m).expect("composable");
                    class_of[mu.dst][&DayTriple { m: um, ..t }]
                })
                .collect()
        })
        .collect();
    DayConvolution { functor: SetFunctor::new(sets, maps), members, class_of }
}

/// The representable `D(I, –)`.
pub fn day_unit(d: &StrictMonoidal) -> SetFunctor {
    SetFunctor::representable(&d.underlying, d.unit)
}

/// A natural isomorphism exhibited between two functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCheck {
    pub well_defined: bool,
    pub bijective: bool,
    pub natural: bool,
    pub components: Vec<Vec<usize>>,
}

impl IsoCheck {
    pub fn holds(&self) -> bool {
        self.well_defined && self.bijective && self.natural
    }
}

/// Check a map given on generators of a Day convolution: it must be constant
/// on classes, bijective and natural.
fn check_on_generators(
    c: &FiniteCategory,
    conv: &DayConvolution,
    target: &SetFunctor,
    image: impl Fn(usize, &DayTriple) -> Option<usize>,
) -> IsoCheck {
    let mut well_defined = true;
    let mut components = Vec::new();
    for x in 0..c.num_objects() {
        let mut comp = Vec::new();
        for cl in &conv.members[x] {
            let first = image(x, &cl[0]);
            if cl.iter().any(|t| image(x, t) != first) {
                well_defined = false;
            }
            comp.push(first.unwrap_or(usize::MAX));
        }
        components.push(comp);
    }
    finish_iso(c, &conv.functor, target, components, well_defined)
}

fn finish_iso(c: &FiniteCategory, source: &SetFunctor, target: &SetFunctor, components: Vec<Vec<usize>>, well_defined: bool) -> IsoCheck {
    let typed = components
        .iter()
        .enumerate()
        .all(|(x, comp)| comp.iter().all(|&v| v < target.size(x)));
    let bijective = typed
        && components.iter().enumerate().all(|(x, comp)| {
            let mut s = comp.clone();
            s.sort();
            s.dedup();
            s.len() == comp.len() && comp.len() == target.size(x)
        });
    let natural = typed && is_natural(c, source, target, &NatTrans { components: components.clone() });
    IsoCheck { well_defined, bijective, natural, components }
}

/// `y(A) ⊗ y(B) ≅ y(A⊗B)` via `[x₁, x₂, m] ↦ m∘(x₁⊗x₂)`.
pub fn representable_iso(d: &StrictMonoidal, a: usize, b: usize) -> IsoCheck {
    let c = &d.underlying;
    let ya = SetFunctor::representable(c, a);
    let yb = SetFunctor::representable(c, b);
    let yab = SetFunctor::representable(c, d.tensor_obj[a][b]);
    let conv = day_convolve(&ya, &yb, d);
    let homs: Vec<Vec<usize>> = (0..c.num_objects()).map(|x| c.hom(a, x)).collect();
    let homs_b: Vec<Vec<usize>> = (0..c.num_objects()).map(|x| c.hom(b, x)).collect();
    let homs_ab: Vec<Vec<usize>> = (0..c.num_objects()).map(|x| c.hom(d.tensor_obj[a][b], x)).collect();
    check_on_generators(c, &conv, &yab, |x, t| {
        let x1 = homs[t.x1][t.a];
        let x2 = homs_b[t.x2][t.b];
        let m = c.compose(t.m, d.tensor_mor[x1][x2])?;
        homs_ab[x].iter().position(|&h| h == m)
    })
}

/// `F ⊗ y(I) ≅ F` via `[x, u, m] ↦ F(m∘(1⊗u))(x)`.
pub fn right_unit_iso(d: &StrictMonoidal, f: &SetFunctor) -> IsoCheck {
    let c = &d.underlying;
    let yi = day_unit(d);
    let conv = day_convolve(f, &yi, d);
    let homs: Vec<Vec<usize>> = (0..c.num_objects()).map(|x| c.hom(d.unit, x)).collect();
    check_on_generators(c, &conv, f, |_, t| {
        let u = homs[t.x2][t.b];
        let one = c.identity(t.x1)?;
        let m = c.compose(t.m, d.tensor_mor[one][u])?;
        Some(f.apply(m, t.a))
    })
}

/// `y(I) ⊗ F ≅ F` via `[u, x, m] ↦ F(m∘(u⊗1))(x)`.
pub fn left_unit_iso(d: &StrictMonoidal, f: &SetFunctor) -> IsoCheck {
    let c = &d.underlying;
    let yi = day_unit(d);
    let conv = day_convolve(&yi, f, d);
    let homs: Vec<Vec<usize>> = (0..c.num_objects()).map(|x| c.hom(d.unit, x)).collect();
    check_on_generators(c, &conv, f, |_, t| {
        let u = homs[t.x1][t.a];
        let one = c.identity(t.x2)?;
        let m = c.compose(t.m, d.tensor_mor[u][one])?;
        Some(f.apply(m, t.b))
    })
}

/// `(F⊗G)⊗H ≅ F⊗(G⊗H)` via `[[x,y,n],z,m] ↦ [x,[y,z,id],m∘(n⊗id)]`.
pub fn associator_iso(d: &StrictMonoidal, f: &SetFunctor, g: &SetFunctor, h: &SetFunctor) -> IsoCheck {
    let c = &d.underlying;
    let fg = day_convolve(f, g, d);
    let left = day_convolve(&fg.functor, h, d);
    let gh = day_convolve(g, h, d);
    let right = day_convolve(f, &gh.functor, d);
    let mut well_defined = true;
    let mut components = Vec::new();
    for x in 0..c.num_objects() {
        let mut comp = Vec::new();
        for cl in &left.members[x] {
            let mut images = cl.iter().flat_map(|outer| {
                fg.members[outer.x1][outer.a].iter().map(move |inner| (inner, outer))
            });
            let image = |(inner, outer): (&DayTriple, &DayTriple)| -> Option<usize> {
                let yz = d.tensor_obj[inner.x2][outer.x2];
                let id_yz = c.identity(yz)?;
                let gh_class = gh.class(yz, &DayTriple { x1: inner.x2, x2: outer.x2, a: inner.b, b: outer.b, m: id_yz })?;
                let id3 = c.identity(outer.x2)?;
                let m = c.compose(outer.m, d.tensor_mor[inner.m][id3])?;
                right.class(x, &DayTriple { x1: inner.x1, x2: yz, a: inner.a, b: gh_class, m })
            };
            let first = images.next().and_then(image);
            if images.any(|p| image(p) != first) {
                well_defined = false;
            }
            comp.push(first.unwrap_or(usize::MAX));
        }
        components.push(comp);
    }
    finish_iso(c, &left.functor, &right.functor, components, well_defined)
}

/// `Nat(F, K)`, the value at `F` of the right Kan extension of `K` along Yoneda.
pub fn ran_eval(c: &FiniteCategory, f: &SetFunctor, k: &SetFunctor) -> Result<Vec<NatTrans>> {
    nat_set(c, f, k)
}

/// Counts on both sides of `Nat(F⊗G, H) ≅ Nat(F×G, H(–⊗–))`, with the
/// bijection `α ↦ ᾱ`, `ᾱ_X[x₁,x₂,m] = H(m)(α(x₁,x₂))`, checked injective
/// and natural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionCount {
    pub day_side: usize,
    pub binatural_side: usize,
    pub transfer_ok: bool,
}

pub fn hom_tensor_adjunction(d: &StrictMonoidal, f: &SetFunctor, g: &SetFunctor, h: &SetFunctor) -> Result<AdjunctionCount> {
    let c = &d.underlying;
    let conv = day_convolve(f, g, d);
    let day_side = nat_set(c, &conv.functor, h)?;
    let cc = product_category(c, c);
    let no = c.num_objects();
    let nm = c.num_morphisms();
    let mut sets = Vec::new();
    let mut hsets = Vec::new();
    for x1 in 0..no {
        for x2 in 0..no {
            sets.push(
                index_tuples(&[f.size(x1), g.size(x2)])
                    .into_iter()
                    .map(|ix| Value::pair(f.set(x1)[ix[0]].clone(), g.set(x2)[ix[1]].clone()))
                    .collect::<Vec<_>>(),
            );
            hsets.push(h.set(d.tensor_obj[x1][x2]).to_vec());
        }
    }
    let mut maps = Vec::new();
    let mut hmaps = Vec::new();
    for fi in 0..nm {
        for gi in 0..nm {
            let (mf, mg) = (&c.morphisms()[fi], &c.morphisms()[gi]);
            let gy = g.size(mg.dst);
            maps.push(
                index_tuples(&[f.size(mf.src), g.size(mg.src)])
                    .into_iter()
                    .map(|ix| f.apply(fi, ix[0]) * gy + g.apply(gi, ix[1]))
                    .collect::<Vec<_>>(),
            );
            hmaps.push(h.map(d.tensor_mor[fi][gi]).to_vec());
        }
    }
    let fxg = SetFunctor::new(sets, maps);
    let hot = SetFunctor::new(hsets, hmaps);
    let binatural = nat_set(&cc, &fxg, &hot)?;
    let mut transfer_ok = true;
    let mut images = Vec::new();
    for alpha in &binatural {
        let comps: Vec<Vec<usize>> = (0..no)
            .map(|x| {
                conv.members[x]
                    .iter()
                    .map(|cl| {
                        let vals: Vec<usize> = cl
                            .iter()
                            .map(|t| h.apply(t.m, alpha.components[t.x1 * no + t.x2][t.a * g.size(t.x2) + t.b]))
                            .collect();
                        if vals.iter().any(|&v| v != vals[0]) {
                            transfer_ok = false;
                        }
                        vals[0]
                    })
                    .collect()
            })
            .collect();
        let bar = NatTrans { components: comps };
        if !is_natural(c, &conv.functor, h, &bar) {
            transfer_ok = false;
        }
        images.push(bar);
    }
    images.sort();
    images.dedup();
    if images.len() != binatural.len() {
        transfer_ok = false;
    }
    Ok(AdjunctionCount { day_side: day_side.len(), binatural_side: binatural.len(), transfer_ok })
}

/// Cap on the size of any set `K(X)^N` that `ξ^(k)` materialises.
pub const HOM_FUNCTOR_BUDGET: usize = 50_000;

/// `C(A, K–)` for `|A| = n`: functions as base-`|K(X)|` numerals, `h[0]`
/// least significant.
pub fn hom_functor(c: &FiniteCategory, k: &SetFunctor, n: usize) -> Result<SetFunctor> {
    let mut sets: Vec<Vec<Value>> = Vec::new();
    for x in 0..c.num_objects() {
        let count = (k.size(x) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if count > HOM_FUNCTOR_BUDGET as u128 {
            return Err(Error::resource(format!("hom-set C({n}, K{})", c.objects()[x]), count, HOM_FUNCTOR_BUDGET));
        }
        let s = k.size(x);
        sets.push(
            (0..count as usize)
                .map(|code| Value::Tuple(decode(code, s, n).into_iter().map(|i| k.set(x)[i].clone()).collect()))
                .collect(),
        );
    }
    let maps = c
        .morphisms()
        .iter()
        .enumerate()
        .map(|(f, m)| {
            let (s, t) = (k.size(m.src), k.size(m.dst));
            (0..sets[m.src].len())
                .map(|code| encode(&decode(code, s, n).into_iter().map(|i| k.apply(f, i)).collect::<Vec<_>>(), t))
                .collect()
        })
        .collect();
    Ok(SetFunctor::new(sets, maps))
}

fn decode(mut code: usize, radix: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(code % radix.max(1));
        code /= radix.max(1);
    }
    out
}

fn encode(digits: &[usize], radix: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * radix + d)
}

/// `ξ^(k)`: from the k-fold Day convolution of the `C(A_i, K–)` to
/// `C(∏A_i, K–)`.
#[derive(Clone, Debug)]
pub struct XiMap {
    pub source: SetFunctor,
    pub target: SetFunctor,
    pub components: Vec<Vec<usize>>,
    pub natural: bool,
}

/// Build `ξ^(k)` for carriers of the given sizes (`carriers.len() = k`).
/// Products of carriers are indexed lexicographically, the first factor
/// slowest; `ξ⁰_X(x) = Kx(ι)` and
/// `ξ^k[u, h_k, m] = K(m)∘κ∘(ξ^(k−1)(u) × h_k)`.
pub fn xi_map(d: &StrictMonoidal, lax: &LaxMonoidal, carriers: &[usize]) -> Result<XiMap> {
    let c = &d.underlying;
    let k = &lax.k;
    if carriers.is_empty() {
        let source = day_unit(d);
        let target = hom_functor(c, k, 1)?;
        let components: Vec<Vec<usize>> = (0..c.num_objects())
            .map(|x| c.hom(d.unit, x).into_iter().map(|m| k.apply(m, lax.iota)).collect())
            .collect();
        let natural = is_natural(c, &source, &target, &NatTrans { components: components.clone() });
        return Ok(XiMap { source, target, components, natural });
    }
    let first = hom_functor(c, k, carriers[0])?;
    let mut cur = XiMap {
        source: first.clone(),
        target: first.clone(),
        components: (0..c.num_objects()).map(|x| (0..first.size(x)).collect()).collect(),
        natural: true,
    };
    let mut n = carriers[0];
    for &ak in &carriers[1..] {
        let hk = hom_functor(c, k, ak)?;
        let conv = day_convolve(&cur.source, &hk, d);
        let n2 = n * ak;
        let target = hom_functor(c, k, n2)?;
        let mut well_defined = true;
        let components: Vec<Vec<usize>> = (0..c.num_objects())
            .map(|x| {
                conv.members[x]
                    .iter()
                    .map(|cl| {
                        let img = |t: &DayTriple| {
                            let u = decode(cur.components[t.x1][t.a], k.size(t.x1), n);
                            let h = decode(t.b, k.size(t.x2), ak);
                            let mut fun = Vec::with_capacity(n2);
                            for &ut in &u {
                                for &ha in &h {
                                    fun.push(k.apply(t.m, lax.kappa_at(t.x1, t.x2, ut, ha)));
                                }
                            }
                            encode(&fun, k.size(x))
                        };
                        let first = img(&cl[0]);
                        if cl.iter().any(|t| img(t) != first) {
                            well_defined = false;
                        }
                        first
                    })
                    .collect()
            })
            .collect();
        if !well_defined {
            return Err(Error::validation("ξ is not constant on Day-convolution classes"));
        }
        let natural = cur.natural && is_natural(c, &conv.functor, &target, &NatTrans { components: components.clone() });
        cur = XiMap { source: conv.functor, target, components, natural };
        n = n2;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub degree: usize,
    /// `|T(∏A_i)|` (or `|T(1)|` in degree 0).
    pub left: usize,
    /// Size of the product-comma limit (or `|K(I)|` in degree 0).
    pub right: usize,
    /// `|Nat(Day^k, K)|`, which must equal `right`.
    pub ran_eval: usize,
    pub injective: bool,
    pub surjective: bool,
    pub witness: Option<String>,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Compare `T(∏A_i)` with `lim_{∏(A_i↓K)} K(⊗X_i)` along
/// `t ↦ (ev_{(⊗X_i, ζ∘∏h_i)}(t))`; in degree 0 compare `T(1)` with `K(I)`
/// along `ev_ι`.
pub fn exactness_in_degree(inst: &CodensityInstance, d: &StrictMonoidal, lax: &LaxMonoidal, carriers: &[usize]) -> Result<ExactnessReport> {
    let c = &d.underlying;
    let k = &lax.k;
    let degree = carriers.len();
    let xi = xi_map(d, lax, carriers)?;
    let ran = ran_eval(c, &xi.source, k)?.len();
    if degree == 0 {
        let t1 = inst.codensity_object(1)?;
        let o = t1.comma.index_of(d.unit, &[lax.iota]);
        let image: Vec<usize> = (0..t1.len()).map(|t| t1.ev(o, t)).collect();
        return Ok(compare_images(0, t1.len(), k.size(d.unit), ran, &image, |i| format!("element {} of K(I)", k.set(d.unit)[i])));
    }
    let n: usize = carriers.iter().product();
    let t = inst.codensity_object(n)?;
    let commas = carriers.iter().map(|&a| inst.comma(a)).collect::<Result<Vec<_>>>()?;
    let shape: Vec<usize> = commas.iter().map(|cm| cm.num_objects()).collect();
    let nodes = index_tuples(&shape);
    let node_count: usize = shape.iter().product();
    if node_count > inst.comma_budget {
        return Err(Error::resource("product of comma categories", node_count, inst.comma_budget));
    }
    let node_obj = |tuple: &[usize]| -> usize {
        let xs: Vec<usize> = tuple.iter().zip(&commas).map(|(&o, cm)| cm.projection(o)).collect();
        d.tensor_objects(&xs)
    };
    let strides: Vec<usize> = (0..shape.len()).map(|i| shape[i + 1..].iter().product()).collect();
    let flat = |tuple: &[usize]| tuple.iter().zip(&strides).map(|(a, b)| a * b).sum::<usize>();
    let mut arrows_spec = Vec::new();
    for tuple in &nodes {
        for (i, cm) in commas.iter().enumerate() {
            for &(s, f, dst) in cm.arrows() {
                if s != tuple[i] || c.is_identity(f) {
                    continue;
                }
                let fs: Vec<usize> = tuple
                    .iter()
                    .zip(&commas)
                    .enumerate()
                    .map(|(j, (&o, cmj))| if j == i { f } else { c.identity(cmj.projection(o)).unwrap() })
                    .collect();
                let tf = d.tensor_morphisms(&fs).ok_or_else(|| Error::domain("unit has no identity"))?;
                let mut to = tuple.clone();
                to[i] = dst;
                arrows_spec.push((flat(tuple), flat(&to), tf));
            }
        }
    }
    let diagram = ArrowDiagram {
        sizes: nodes.iter().map(|tp| k.size(node_obj(tp))).collect(),
        arrows: arrows_spec.iter().map(|&(s, t, f)| Arrow { src: s, dst: t, map: k.map(f) }).collect(),
    };
    let lim = solve_limit(&diagram, inst.step_budget)?;
    // node ↦ comma object of (∏A ↓ K) at (⊗X_i, ζ∘∏h_i)
    let a_tuples = index_tuples(carriers);
    let node_to_t: Vec<usize> = nodes
        .iter()
        .map(|tuple| {
            let xs: Vec<usize> = tuple.iter().zip(&commas).map(|(&o, cm)| cm.projection(o)).collect();
            let h: Vec<usize> = a_tuples
                .iter()
                .map(|avec| {
                    let ys: Vec<usize> = tuple.iter().zip(&commas).zip(avec).map(|((&o, cm), &a)| cm.object(o).1[a]).collect();
                    lax.zeta(d, &xs, &ys)
                })
                .collect();
            t.comma.index_of(d.tensor_objects(&xs), &h)
        })
        .collect();
    let mut image = Vec::with_capacity(t.len());
    for s in 0..t.len() {
        let fam: Vec<usize> = node_to_t.iter().map(|&o| t.ev(o, s)).collect();
        image.push(lim.index_of(&fam).ok_or_else(|| Error::validation("comparison map leaves the product-comma limit"))?);
    }
    Ok(compare_images(degree, t.len(), lim.len(), ran, &image, |i| format!("family {:?} of the product-comma limit", lim.families[i])))
}

fn compare_images(degree: usize, left: usize, right: usize, ran: usize, image: &[usize], describe: impl Fn(usize) -> String) -> ExactnessReport {
    let mut hit = vec![0usize; right];
    for &i in image {
        hit[i] += 1;
    }
    let injective = hit.iter().all(|&h| h <= 1);
    let surjective = hit.iter().all(|&h| h >= 1);
    let witness = if let Some(i) = hit.iter().position(|&h| h == 0) {
        Some(format!("no preimage for {}", describe(i)))
    } else {
        hit.iter().position(|&h| h > 1).map(|i| format!("{} has {} preimages", describe(i), hit[i]))
    };
    ExactnessReport { degree, left, right, ran_eval: ran, injective, surjective, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::value::atoms;

    fn monoidal(name: &str) -> StrictMonoidal {
        presets::by_name(name).unwrap().monoidal.unwrap()
    }

    #[test]
    fn trivial_monoid_gives_products() {
        let d = monoidal("and2");
        let f = SetFunctor::constant(&d.underlying, atoms("a", 2));
        let g = SetFunctor::constant(&d.underlying, atoms("b", 3));
        assert_eq!(day_convolve(&f, &g, &d).functor.size(0), 6);
    }

    #[test]
    fn representables_convolve_to_representables() {
        for name in ["z2", "z3"] {
            let d = monoidal(name);
            let iso = representable_iso(&d, 0, 0);
            assert!(iso.holds(), "{name}: {iso:?}");
            let y = SetFunctor::representable(&d.underlying, 0);
            assert_eq!(day_convolve(&y, &y, &d).functor.size(0), y.size(0));
        }
    }

    #[test]
    fn day_unit_sizes() {
        assert_eq!(day_unit(&monoidal("and2")).size(0), 1);
        assert_eq!(day_unit(&monoidal("z2")).size(0), 2);
        assert_eq!(day_unit(&monoidal("z3")).size(0), 3);
    }

    #[test]
    fn unit_and_associativity_isos() {
        for name in ["z2", "z3", "and2"] {
            let p = presets::by_name(name).unwrap();
            let d = p.monoidal.unwrap();
            let y = SetFunctor::representable(&d.underlying, 0);
            for f in [&p.k, &y] {
                assert!(right_unit_iso(&d, f).holds(), "{name}");
                assert!(left_unit_iso(&d, f).holds(), "{name}");
            }
            assert!(associator_iso(&d, &p.k, &y, &p.k).holds(), "{name}");
        }
    }

    #[test]
    fn adjunction_counts_match() {
        for name in ["z2", "z3"] {
            let p = presets::by_name(name).unwrap();
            let d = p.monoidal.unwrap();
            let y = SetFunctor::representable(&d.underlying, 0);
            let r = hom_tensor_adjunction(&d, &p.k, &y, &p.k).unwrap();
            assert_eq!(r.day_side, r.binatural_side);
            assert!(r.transfer_ok);
        }
    }

    #[test]
    fn ran_eval_cases() {
        let d = monoidal("z2");
        let c = &d.underlying;
        let y = SetFunctor::representable(c, 0);
        assert_eq!(ran_eval(c, &y, &y).unwrap().len(), 2);
        let empty = SetFunctor::new(vec![vec![]], vec![vec![]; c.num_morphisms()]);
        assert_eq!(ran_eval(c, &empty, &y).unwrap().len(), 1);
        let t = FiniteCategory::discrete(&["*"]);
        let two = SetFunctor::constant(&t, atoms("t", 2));
        assert_eq!(ran_eval(&t, &two, &two).unwrap().len(), 4);
    }

    #[test]
    fn and_preset_exactness() {
        let p = presets::and2();
        let inst = CodensityInstance::from_preset(&p);
        let (d, lax) = (p.monoidal.unwrap(), p.lax.unwrap());
        let r2 = exactness_in_degree(&inst, &d, &lax, &[1, 1]).unwrap();
        assert_eq!((r2.left, r2.right, r2.exact()), (4, 16, false));
        assert_eq!(r2.ran_eval, 16);
        assert!(r2.witness.is_some());
        let r0 = exactness_in_degree(&inst, &d, &lax, &[]).unwrap();
        assert_eq!((r0.left, r0.right, r0.exact()), (4, 2, false));
        let r1 = exactness_in_degree(&inst, &d, &lax, &[2]).unwrap();
        assert!(r1.exact());
    }

    #[test]
    fn one_preset_is_exact() {
        let p = presets::one();
        let inst = CodensityInstance::from_preset(&p);
        let (d, lax) = (p.monoidal.unwrap(), p.lax.unwrap());
        for carriers in [vec![], vec![1], vec![2, 1], vec![1, 2, 1]] {
            let r = exactness_in_degree(&inst, &d, &lax, &carriers).unwrap();
            assert!(r.exact(), "{r:?}");
            assert_eq!(r.right, r.ran_eval);
        }
    }

    #[test]
    fn xi_cases() {
        let p = presets::and2();
        let (d, lax) = (p.monoidal.unwrap(), p.lax.unwrap());
        let x0 = xi_map(&d, &lax, &[]).unwrap();
        assert!(x0.natural);
        assert_eq!(x0.components[0], vec![1]);
        let x1 = xi_map(&d, &lax, &[2]).unwrap();
        assert_eq!(x1.components[0], (0..4).collect::<Vec<_>>());
        let x2 = xi_map(&d, &lax, &[1, 1]).unwrap();
        assert!(x2.natural);
        // [h, k] ↦ h AND k
        assert_eq!(x2.source.size(0), 4);
        let mut got = x2.components[0].clone();
        got.sort();
        assert_eq!(got, vec![0, 0, 0, 1]);
    }
}
