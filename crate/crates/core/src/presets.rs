//! Named instances used by the CLI, the tests and the shipped preset files.
//!
//! Concrete categories are built from sets and functions: composition is
//! function composition and each composite is looked up among the listed
//! morphisms, so the listed maps must be closed under composition.

use std::collections::HashMap;

use crate::codensity::CoproductWith1;
use crate::dayconv::{LaxMonoidal, StrictMonoidal};
use crate::error::{Error, Result};
use crate::fincat::{FiniteCategory, Morphism, SetFunctor};
use crate::value::{atoms, Value};

/// A base category with a functor into finite sets and optional designations.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub base: FiniteCategory,
    pub k: SetFunctor,
    pub terminal: Option<usize>,
    pub coproducts: Vec<CoproductWith1>,
    pub monoidal: Option<StrictMonoidal>,
    pub lax: Option<LaxMonoidal>,
}

impl Preset {
    fn plain(name: &str, (base, k): (FiniteCategory, SetFunctor)) -> Self {
        Preset { name: name.into(), base, k, terminal: None, coproducts: Vec::new(), monoidal: None, lax: None }
    }
}

pub const NAMES: &[&str] = &["end2", "discrete", "trivial", "fin-upto-2", "fin-upto-3", "sizes-1-2", "z2", "z3", "and2", "one"];

pub fn by_name(name: &str) -> Result<Preset> {
    Ok(match name {
        "end2" => Preset::plain(name, end2()),
        "discrete" => Preset::plain(name, discrete_base(2)),
        "trivial" => {
            // one object, one morphism: the object is terminal and is its own 1 + X
            let mut p = Preset::plain(name, discrete_base(1));
            p.terminal = Some(0);
            p.coproducts = vec![CoproductWith1 { x: 0, one_plus_x: 0, iota1: 0, iota2: 0 }];
            p
        }
        "fin-upto-2" | "fin-upto-3" => {
            let n = if name.ends_with('2') { 2 } else { 3 };
            let (base, k) = fin_upto(n);
            let coproducts = pointed_coproducts(&base, &k);
            Preset { terminal: base.object("1"), coproducts, ..Preset::plain(name, (base, k)) }
        }
        "sizes-1-2" => pointed_sizes_one_two(),
        "z2" => monoid_preset(name, cyclic(2)),
        "z3" => monoid_preset(name, cyclic(3)),
        "and2" => and2(),
        "one" => one(),
        _ => return Err(Error::domain(format!("unknown preset {name:?}; known: {}", NAMES.join(", ")))),
    })
}

/// Build a category of finite sets and functions from explicit data.
/// Every object needs an identity among `morphisms`.
pub fn concrete(objects: &[(&str, Vec<Value>)], morphisms: &[(String, usize, usize, Vec<usize>)]) -> Result<(FiniteCategory, SetFunctor)> {
    let mut by_map: HashMap<(usize, usize, &[usize]), usize> = HashMap::new();
    for (i, (id, s, d, map)) in morphisms.iter().enumerate() {
        if map.len() != objects[*s].1.len() || map.iter().any(|&j| j >= objects[*d].1.len()) {
            return Err(Error::domain(format!("{id} is not a function between its endpoints")));
        }
        if by_map.insert((*s, *d, map.as_slice()), i).is_some() {
            return Err(Error::domain(format!("{id} duplicates another morphism")));
        }
    }
    let identities = (0..objects.len())
        .map(|o| {
            let id: Vec<usize> = (0..objects[o].1.len()).collect();
            by_map.get(&(o, o, id.as_slice())).copied()
        })
        .collect();
    let mut compose = HashMap::new();
    for (fi, (_, fs, fd, fm)) in morphisms.iter().enumerate() {
        for (gi, (gid, gs, gd, gm)) in morphisms.iter().enumerate() {
            if gs != fd {
                continue;
            }
            let gf: Vec<usize> = fm.iter().map(|&i| gm[i]).collect();
            let k = by_map
                .get(&(*fs, *gd, gf.as_slice()))
                .ok_or_else(|| Error::domain(format!("composite {gid}∘{} is not listed", morphisms[fi].0)))?;
            compose.insert((gi, fi), *k);
        }
    }
    let cat = FiniteCategory::from_parts(
        objects.iter().map(|(n, _)| n.to_string()).collect(),
        morphisms.iter().map(|(id, s, d, _)| Morphism { id: id.clone(), src: *s, dst: *d }).collect(),
        identities,
        compose,
    )?;
    let k = SetFunctor::new(objects.iter().map(|(_, s)| s.clone()).collect(), morphisms.iter().map(|m| m.3.clone()).collect());
    Ok((cat, k))
}

fn digits(map: &[usize]) -> String {
    map.iter().map(|d| d.to_string()).collect()
}

fn elements(n: usize) -> Vec<Value> {
    (0..n).map(|i| Value::atom(i.to_string())).collect()
}

/// One object `2` with its four endofunctions, `K` the inclusion.
pub fn end2() -> (FiniteCategory, SetFunctor) {
    let maps = [("id", vec![0, 1]), ("c0", vec![0, 0]), ("c1", vec![1, 1]), ("neg", vec![1, 0])];
    let mors: Vec<_> = maps.iter().map(|(n, m)| (n.to_string(), 0, 0, m.clone())).collect();
    concrete(&[("2", elements(2))], &mors).expect("End(2)")
}

/// One object with identity only, `K(*)` of size `n`.
pub fn discrete_base(n: usize) -> (FiniteCategory, SetFunctor) {
    let c = FiniteCategory::discrete(&["*"]);
    let k = SetFunctor::constant(&c, elements(n));
    (c, k)
}

/// Full subcategory of finite sets on the given sizes, `K` the inclusion.
/// Objects are named by their size, morphisms `"{m}>{n}:{images}"`.
pub fn fin_sizes(sizes: &[usize]) -> (FiniteCategory, SetFunctor) {
    let names: Vec<String> = sizes.iter().map(|n| n.to_string()).collect();
    let objects: Vec<(&str, Vec<Value>)> = sizes.iter().zip(&names).map(|(&n, name)| (name.as_str(), elements(n))).collect();
    let mut mors = Vec::new();
    for (i, &m) in sizes.iter().enumerate() {
        for (j, &n) in sizes.iter().enumerate() {
            for map in crate::value::index_tuples(&vec![n; m]) {
                mors.push((format!("{m}>{n}:{}", digits(&map)), i, j, map));
            }
        }
    }
    concrete(&objects, &mors).expect("full subcategory of finite sets")
}

pub fn fin_upto(n: usize) -> (FiniteCategory, SetFunctor) {
    fin_sizes(&(1..=n).collect::<Vec<_>>())
}

pub fn sizes_one_two() -> (FiniteCategory, SetFunctor) {
    fin_sizes(&[1, 2])
}

/// `1 + X` designations inside a `fin_sizes` category: `1 + m` is the
/// object of size `m + 1`, `ι₁` picks `0`, `ι₂` is `x ↦ x + 1`.
pub fn pointed_coproducts(base: &FiniteCategory, k: &SetFunctor) -> Vec<CoproductWith1> {
    let mut out = Vec::new();
    for x in 0..base.num_objects() {
        let m = k.size(x);
        let Some(y) = base.object(&(m + 1).to_string()) else { continue };
        let iota1 = base.morphism(&format!("1>{}:0", m + 1)).expect("point 0");
        let shift: Vec<usize> = (1..=m).collect();
        let iota2 = base.morphism(&format!("{m}>{}:{}", m + 1, digits(&shift))).expect("shift map");
        out.push(CoproductWith1 { x, one_plus_x: y, iota1, iota2 });
    }
    out
}

pub fn pointed_sizes_one_two() -> Preset {
    let (base, k) = sizes_one_two();
    let coproducts = pointed_coproducts(&base, &k);
    Preset { terminal: base.object("1"), coproducts, ..Preset::plain("sizes-1-2", (base, k)) }
}

/// Cyclic group `ℤ/n` as a one-object category, morphisms `g0..g{n-1}`.
pub fn cyclic(n: usize) -> (String, Vec<String>, Vec<Vec<usize>>) {
    let elements = (0..n).map(|i| format!("g{i}")).collect();
    let table = (0..n).map(|g| (0..n).map(|f| (g + f) % n).collect()).collect();
    (format!("Z{n}"), elements, table)
}

/// A one-object strict monoidal category from a commutative monoid: the
/// tensor of morphisms is the monoid product. `K` is the regular action.
fn monoid_preset(name: &str, (obj, elements, table): (String, Vec<String>, Vec<Vec<usize>>)) -> Preset {
    let base = FiniteCategory::monoid(&obj, &elements, &table, 0).expect("monoid");
    let n = elements.len();
    let k = SetFunctor::new(vec![elements.iter().map(Value::atom).collect()], table.clone());
    let monoidal = StrictMonoidal::new(base.clone(), vec![vec![0]], table, 0).expect("commutative monoid is strict monoidal");
    debug_assert_eq!(k.size(0), n);
    Preset { monoidal: Some(monoidal), ..Preset::plain(name, (base, k)) }
}

fn trivial_monoidal() -> (FiniteCategory, StrictMonoidal) {
    let base = FiniteCategory::discrete(&["*"]);
    let m = StrictMonoidal::new(base.clone(), vec![vec![0]], vec![vec![0]], 0).expect("trivial monoidal");
    (base, m)
}

/// Trivial base, `K(*) = {0,1}`, `κ = AND`, `ι = 1`.
pub fn and2() -> Preset {
    let (base, monoidal) = trivial_monoidal();
    let k = SetFunctor::constant(&base, elements(2));
    let lax = LaxMonoidal::new(&monoidal, k.clone(), HashMap::from([((0, 0), vec![0, 0, 0, 1])]), 1).expect("AND is lax monoidal");
    Preset { monoidal: Some(monoidal), lax: Some(lax), terminal: Some(0), ..Preset::plain("and2", (base, k)) }
}

/// Trivial base with `K(*)` a single point.
pub fn one() -> Preset {
    let (base, monoidal) = trivial_monoidal();
    let k = SetFunctor::constant(&base, atoms("pt", 1));
    let lax = LaxMonoidal::new(&monoidal, k.clone(), HashMap::from([((0, 0), vec![0])]), 0).expect("terminal lax monoidal");
    Preset { monoidal: Some(monoidal), lax: Some(lax), terminal: Some(0), ..Preset::plain("one", (base, k)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{validate_category, validate_functor};

    #[test]
    fn all_presets_are_valid() {
        for name in NAMES {
            let p = by_name(name).unwrap();
            assert!(validate_category(&p.base).is_empty(), "{name}");
            assert!(validate_functor(&p.base, &p.k).is_empty(), "{name}");
        }
    }

    #[test]
    fn fin_upto_three_counts() {
        let (c, _) = fin_upto(3);
        assert_eq!(c.num_objects(), 3);
        assert_eq!(c.num_morphisms(), 56);
        let p = by_name("fin-upto-3").unwrap();
        assert_eq!(p.coproducts.len(), 2);
    }

    #[test]
    fn unknown_preset() {
        assert!(by_name("nope").is_err());
    }
}
