//! JSON file formats: loading with validation, and canonical writing.
//!
//! Rationals are `"num/den"` strings and set elements are the canonical
//! text form of [`Value`]. Tuples of elements used as map keys are written
//! `"(x,y)"`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value as Json};

use crate::codensity::CoproductWith1;
use crate::dayconv::{LaxMonoidal, StrictMonoidal};
use crate::error::{Error, Result};
use crate::fincat::{validate_category, validate_functor, FiniteCategory, SetFunctor};
use crate::finprob::{Distribution, Kernel};
use crate::metrics::FiniteMetricSpace;
use crate::polymeasure::{PolyKernel, Polymeasure, RawPolyTable};
use crate::presets::Preset;
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::value::Value;

/// A loaded file.
#[derive(Clone, Debug)]
pub enum Spec {
    Category(FiniteCategory),
    Functor { category: FiniteCategory, functor: SetFunctor },
    Preset(Box<Preset>),
    Distribution(Distribution),
    Kernel(Kernel),
    Polymeasure(Polymeasure),
    PolyTable(RawTableSpec),
    PolyKernel(PolyKernel),
    MetricSpace(FiniteMetricSpace),
    /// A JSON object whose fields are loaded individually (report witnesses).
    Bundle(Vec<(String, Spec)>),
    List(Vec<Spec>),
    Element(Value),
    Raw(Json),
}

/// A full subset-tuple table, before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTableSpec {
    pub carriers: Vec<Vec<Value>>,
    pub entries: Vec<(Vec<Vec<Value>>, Rational)>,
}

impl RawTableSpec {
    /// Entries naming elements outside a carrier are errors.
    pub fn to_table(&self) -> Result<RawPolyTable> {
        let mut values = BTreeMap::new();
        for (sets, v) in &self.entries {
            if sets.len() != self.carriers.len() {
                return Err(Error::domain(format!("entry with {} sets for {} carriers", sets.len(), self.carriers.len())));
            }
            let mut masks = Vec::with_capacity(sets.len());
            for (s, c) in sets.iter().zip(&self.carriers) {
                let mut m = 0u64;
                for x in s {
                    let j = c.iter().position(|y| y == x).ok_or_else(|| Error::domain(format!("{x} is not in its carrier")))?;
                    m |= 1 << j;
                }
                masks.push(m);
            }
            if values.insert(masks, v.clone()).is_some() {
                return Err(Error::domain("subset tuple listed twice"));
            }
        }
        Ok(RawPolyTable { carriers: self.carriers.clone(), values })
    }
}

impl Spec {
    pub fn kind(&self) -> &'static str {
        match self {
            Spec::Category(_) => "category",
            Spec::Functor { .. } => "functor",
            Spec::Preset(_) => "preset",
            Spec::Distribution(_) => "distribution",
            Spec::Kernel(_) => "kernel",
            Spec::Polymeasure(_) => "polymeasure",
            Spec::PolyTable(_) => "polymeasure-table",
            Spec::PolyKernel(_) => "polykernel",
            Spec::MetricSpace(_) => "metric-space",
            Spec::Bundle(_) => "bundle",
            Spec::List(_) => "list",
            Spec::Element(_) => "element",
            Spec::Raw(_) => "raw",
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Spec::Category(c) => category_to_json(c),
            Spec::Functor { category, functor } => {
                json!({"category": category_to_json(category), "on_objects": on_objects(category, functor), "on_morphisms": on_morphisms(category, functor)})
            }
            Spec::Preset(p) => preset_to_json(p),
            Spec::Distribution(d) => d.to_json(),
            Spec::Kernel(k) => k.to_json(),
            Spec::Polymeasure(p) => p.to_json(),
            Spec::PolyTable(t) => json!({
                "carriers": t.carriers.iter().map(|c| strings(c)).collect::<Vec<_>>(),
                "table": t.entries.iter().map(|(s, v)| json!({"sets": s.iter().map(|c| strings(c)).collect::<Vec<_>>(), "value": fmt_rational(v)})).collect::<Vec<_>>(),
            }),
            Spec::PolyKernel(k) => k.to_json(),
            Spec::MetricSpace(m) => m.to_json(),
            Spec::Bundle(fields) => Json::Object(fields.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()),
            Spec::List(items) => Json::Array(items.iter().map(Spec::to_json).collect()),
            Spec::Element(v) => Json::String(v.to_string()),
            Spec::Raw(j) => j.clone(),
        }
    }
}

fn strings(xs: &[Value]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn read_json(path: &Path) -> Result<Json> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
}

/// Load and validate any supported file, recognized by its fields.
pub fn load_spec(path: &Path) -> Result<Spec> {
    let j = read_json(path)?;
    let dir = path.parent().map(Path::to_path_buf);
    parse_spec(&j, dir.as_deref()).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    let p = path.display();
    match e {
        Error::Parse(m) if !m.starts_with(&p.to_string()) => Error::Parse(format!("{p}: {m}")),
        Error::Validation(m) => Error::Validation(format!("{p}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{p}: {m}")),
        e => e,
    }
}

fn has(o: &Map<String, Json>, keys: &[&str]) -> bool {
    keys.iter().all(|k| o.contains_key(*k))
}

/// Parse JSON already in memory; relative file references resolve against
/// `dir`. Objects that match no format load field by field.
pub fn parse_spec(j: &Json, dir: Option<&Path>) -> Result<Spec> {
    match typed(j, dir) {
        Some(r) => r,
        None => Ok(generic(j, dir)),
    }
}

fn typed(j: &Json, dir: Option<&Path>) -> Option<Result<Spec>> {
    let o = j.as_object()?;
    Some(if has(o, &["points", "dist"]) {
        parse_metric_space(j).map(Spec::MetricSpace)
    } else if has(o, &["source", "carriers", "rows"]) {
        parse_polykernel(j).map(Spec::PolyKernel)
    } else if has(o, &["carriers", "density"]) {
        parse_polymeasure(j).map(Spec::Polymeasure)
    } else if has(o, &["carriers", "table"]) {
        parse_raw_table(j).map(Spec::PolyTable)
    } else if has(o, &["source", "target", "rows"]) {
        parse_kernel(j).map(Spec::Kernel)
    } else if has(o, &["carrier", "weights"]) {
        parse_distribution(j).map(Spec::Distribution)
    } else if has(o, &["objects", "morphisms"]) {
        let preset_keys = ["functor", "terminal", "coproduct_with_1", "tensor_obj", "lax"];
        if preset_keys.iter().any(|k| o.contains_key(*k)) {
            parse_preset(j).map(|p| Spec::Preset(Box::new(p)))
        } else {
            parse_category(j).map(Spec::Category)
        }
    } else if has(o, &["category", "on_objects"]) {
        parse_functor_file(j, dir).map(|(category, functor)| Spec::Functor { category, functor })
    } else {
        return None;
    })
}

fn generic(j: &Json, dir: Option<&Path>) -> Spec {
    match j {
        Json::Object(o) => Spec::Bundle(
            o.iter()
                .map(|(k, v)| {
                    let s = match typed(v, dir) {
                        Some(Ok(s)) => s,
                        _ => generic(v, dir),
                    };
                    (k.clone(), s)
                })
                .collect(),
        ),
        Json::Array(a) => Spec::List(a.iter().map(|v| generic(v, dir)).collect()),
        Json::String(s) => match Value::parse(s) {
            Ok(v) if v.to_string() == *s => Spec::Element(v),
            _ => Spec::Raw(j.clone()),
        },
        _ => Spec::Raw(j.clone()),
    }
}

fn field<'a>(j: &'a Json, key: &str) -> Result<&'a Json> {
    j.get(key).ok_or_else(|| Error::parse(format!("missing field {key:?}")))
}

fn str_of<'a>(j: &'a Json, what: &str) -> Result<&'a str> {
    j.as_str().ok_or_else(|| Error::parse(format!("{what}: expected a string")))
}

fn arr_of<'a>(j: &'a Json, what: &str) -> Result<&'a Vec<Json>> {
    j.as_array().ok_or_else(|| Error::parse(format!("{what}: expected an array")))
}

fn obj_of<'a>(j: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    j.as_object().ok_or_else(|| Error::parse(format!("{what}: expected an object")))
}

fn element(s: &str, what: &str) -> Result<Value> {
    Value::parse(s).map_err(|e| Error::parse(format!("{what}: {e}")))
}

fn elements(j: &Json, what: &str) -> Result<Vec<Value>> {
    arr_of(j, what)?.iter().map(|x| element(str_of(x, what)?, what)).collect()
}

fn rational(j: &Json, what: &str) -> Result<Rational> {
    match j {
        Json::String(s) => parse_rational(s).map_err(|e| Error::parse(format!("{what}: {e}"))),
        Json::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(Error::parse(format!("{what}: expected a rational string \"num/den\""))),
    }
}

/// A `"(x,y,…)"` key with exactly `k` components.
fn tuple_key(s: &str, k: usize, what: &str) -> Result<Vec<Value>> {
    match element(s, what)? {
        Value::Tuple(t) if t.len() == k => Ok(t),
        _ => Err(Error::parse(format!("{what}: key {s:?} is not a {k}-tuple"))),
    }
}

fn weight_map(j: &Json, what: &str) -> Result<Vec<(Value, Rational)>> {
    obj_of(j, what)?
        .iter()
        .map(|(k, v)| Ok((element(k, what)?, rational(v, &format!("{what}[{k}]"))?)))
        .collect()
}

pub fn parse_distribution(j: &Json) -> Result<Distribution> {
    let carrier = elements(field(j, "carrier")?, "carrier")?;
    let weights = weight_map(field(j, "weights")?, "weights")?;
    Distribution::new(carrier, weights)
}

pub fn parse_kernel(j: &Json) -> Result<Kernel> {
    let source = elements(field(j, "source")?, "source")?;
    let target = elements(field(j, "target")?, "target")?;
    let mut rows = BTreeMap::new();
    for (k, v) in obj_of(field(j, "rows")?, "rows")? {
        let d = Distribution::new(target.clone(), weight_map(v, &format!("rows[{k}]"))?)?;
        rows.insert(element(k, "rows")?, d);
    }
    Kernel::new(source, target, rows)
}

fn carriers_of(j: &Json) -> Result<Vec<Vec<Value>>> {
    arr_of(field(j, "carriers")?, "carriers")?.iter().map(|c| elements(c, "carriers")).collect()
}

fn density_of(j: &Json, carriers: &[Vec<Value>], what: &str) -> Result<Polymeasure> {
    let entries = obj_of(j, what)?
        .iter()
        .map(|(k, v)| Ok((tuple_key(k, carriers.len(), what)?, rational(v, &format!("{what}[{k}]"))?)))
        .collect::<Result<Vec<_>>>()?;
    Polymeasure::from_density(carriers.to_vec(), entries)
}

pub fn parse_polymeasure(j: &Json) -> Result<Polymeasure> {
    let carriers = carriers_of(j)?;
    density_of(field(j, "density")?, &carriers, "density")
}

pub fn parse_raw_table(j: &Json) -> Result<RawTableSpec> {
    let carriers = carriers_of(j)?;
    let mut entries = Vec::new();
    for (i, e) in arr_of(field(j, "table")?, "table")?.iter().enumerate() {
        let what = format!("table[{i}]");
        let sets = arr_of(field(e, "sets")?, &what)?.iter().map(|s| elements(s, &what)).collect::<Result<Vec<_>>>()?;
        entries.push((sets, rational(field(e, "value")?, &what)?));
    }
    Ok(RawTableSpec { carriers, entries })
}

pub fn parse_polykernel(j: &Json) -> Result<PolyKernel> {
    let source = elements(field(j, "source")?, "source")?;
    let carriers = carriers_of(j)?;
    let mut rows = BTreeMap::new();
    for (k, v) in obj_of(field(j, "rows")?, "rows")? {
        rows.insert(element(k, "rows")?, density_of(v, &carriers, &format!("rows[{k}]"))?);
    }
    PolyKernel::new(source, carriers, rows)
}

pub fn parse_metric_space(j: &Json) -> Result<FiniteMetricSpace> {
    let points = elements(field(j, "points")?, "points")?;
    let n = points.len();
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Rational::from_integer(0.into()));
    }
    for (k, v) in obj_of(field(j, "dist")?, "dist")? {
        let t = tuple_key(k, 2, "dist")?;
        let idx = |x: &Value| points.iter().position(|p| p == x).ok_or_else(|| Error::domain(format!("dist[{k}]: {x} is not a point")));
        let (a, b) = (idx(&t[0])?, idx(&t[1])?);
        let r = rational(v, &format!("dist[{k}]"))?;
        for (x, y) in [(a, b), (b, a)] {
            match &d[x][y] {
                Some(old) if *old != r => return Err(Error::validation(format!("dist[{k}] = {r} conflicts with {old}"))),
                _ => d[x][y] = Some(r.clone()),
            }
        }
    }
    let mut dist = Vec::with_capacity(n);
    for (i, row) in d.into_iter().enumerate() {
        let row = row
            .into_iter()
            .enumerate()
            .map(|(j, v)| v.ok_or_else(|| Error::parse(format!("dist: no entry for ({},{})", points[i], points[j]))))
            .collect::<Result<Vec<_>>>()?;
        dist.push(row);
    }
    FiniteMetricSpace::new(points, dist)
}

pub fn parse_category(j: &Json) -> Result<FiniteCategory> {
    let objects = arr_of(field(j, "objects")?, "objects")?.iter().map(|o| str_of(o, "objects").map(String::from)).collect::<Result<Vec<_>>>()?;
    let mut morphisms = Vec::new();
    for (i, m) in arr_of(field(j, "morphisms")?, "morphisms")?.iter().enumerate() {
        let what = format!("morphisms[{i}]");
        let get = |k: &str| field(m, k).and_then(|v| str_of(v, &what)).map(String::from);
        morphisms.push((get("id")?, get("src")?, get("dst")?));
    }
    let mut compose = Vec::new();
    if let Some(c) = j.get("compose") {
        for (i, t) in arr_of(c, "compose")?.iter().enumerate() {
            let what = format!("compose[{i}]");
            let t = arr_of(t, &what)?;
            if t.len() != 3 {
                return Err(Error::parse(format!("{what}: expected [g, f, g∘f]")));
            }
            compose.push((str_of(&t[0], &what)?.into(), str_of(&t[1], &what)?.into(), str_of(&t[2], &what)?.into()));
        }
    }
    let identities = match j.get("identities") {
        Some(ids) => obj_of(ids, "identities")?
            .iter()
            .map(|(o, m)| Ok((o.clone(), str_of(m, "identities")?.to_string())))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let c = FiniteCategory::from_tables(objects, morphisms, compose, identities)?;
    match validate_category(&c).first() {
        Some(v) => Err(Error::validation(format!("not a category: {v}"))),
        None => Ok(c),
    }
}

/// `on_objects: {X: [elements]}`, `on_morphisms: {f: {x: f(x)}}`.
pub fn parse_functor(c: &FiniteCategory, j: &Json) -> Result<SetFunctor> {
    let on_obj = obj_of(field(j, "on_objects")?, "on_objects")?;
    let sets = c
        .objects()
        .iter()
        .map(|o| elements(on_obj.get(o).ok_or_else(|| Error::parse(format!("on_objects: no set for {o}")))?, &format!("on_objects[{o}]")))
        .collect::<Result<Vec<_>>>()?;
    let on_mor = match j.get("on_morphisms") {
        Some(m) => obj_of(m, "on_morphisms")?.clone(),
        None => Map::new(),
    };
    let mut maps = Vec::with_capacity(c.num_morphisms());
    for (mi, m) in c.morphisms().iter().enumerate() {
        let (src, dst) = (&sets[m.src], &sets[m.dst]);
        let what = format!("on_morphisms[{}]", m.id);
        let map = match on_mor.get(&m.id) {
            Some(t) => {
                let t = obj_of(t, &what)?;
                src.iter()
                    .map(|x| {
                        let y = t.get(&x.to_string()).ok_or_else(|| Error::parse(format!("{what}: no image for {x}")))?;
                        let y = element(str_of(y, &what)?, &what)?;
                        dst.iter().position(|z| *z == y).ok_or_else(|| Error::validation(format!("{what}: {y} is not in the target set")))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None if c.is_identity(mi) => (0..src.len()).collect(),
            None => return Err(Error::parse(format!("{what}: missing"))),
        };
        maps.push(map);
    }
    let f = SetFunctor::new(sets, maps);
    match validate_functor(c, &f).first() {
        Some(v) => Err(Error::validation(format!("not a functor: {v}"))),
        None => Ok(f),
    }
}

fn parse_functor_file(j: &Json, dir: Option<&Path>) -> Result<(FiniteCategory, SetFunctor)> {
    let c = match field(j, "category")? {
        Json::String(p) => {
            let path: PathBuf = match dir {
                Some(d) => d.join(p),
                None => PathBuf::from(p),
            };
            match load_spec(&path)? {
                Spec::Category(c) => c,
                Spec::Preset(p) => p.base,
                s => return Err(Error::parse(format!("category: {} is a {}", path.display(), s.kind()))),
            }
        }
        inline => parse_category(inline)?,
    };
    let f = parse_functor(&c, j)?;
    Ok((c, f))
}

fn object_of(c: &FiniteCategory, j: &Json, what: &str) -> Result<usize> {
    let s = str_of(j, what)?;
    c.object(s).ok_or_else(|| Error::domain(format!("{what}: unknown object {s:?}")))
}

fn morphism_of(c: &FiniteCategory, j: &Json, what: &str) -> Result<usize> {
    let s = str_of(j, what)?;
    c.morphism(s).ok_or_else(|| Error::domain(format!("{what}: unknown morphism {s:?}")))
}

/// A binary table `[[a, b, a⊗b], …]` over objects or morphisms.
fn binary_table(j: &Json, n: usize, what: &str, lookup: impl Fn(&Json) -> Result<usize>) -> Result<Vec<Vec<usize>>> {
    let mut t = vec![vec![usize::MAX; n]; n];
    for (i, e) in arr_of(j, what)?.iter().enumerate() {
        let e = arr_of(e, what)?;
        if e.len() != 3 {
            return Err(Error::parse(format!("{what}[{i}]: expected [a, b, a⊗b]")));
        }
        t[lookup(&e[0])?][lookup(&e[1])?] = lookup(&e[2])?;
    }
    if t.iter().flatten().any(|&v| v == usize::MAX) {
        return Err(Error::validation(format!("{what}: the table is not total")));
    }
    Ok(t)
}

pub fn parse_preset(j: &Json) -> Result<Preset> {
    let base = parse_category(j)?;
    let k = parse_functor(&base, field(j, "functor")?)?;
    let name = j.get("name").and_then(Json::as_str).unwrap_or("file").to_string();
    let terminal = j.get("terminal").map(|t| object_of(&base, t, "terminal")).transpose()?;
    let mut coproducts = Vec::new();
    if let Some(cs) = j.get("coproduct_with_1") {
        for (i, c) in arr_of(cs, "coproduct_with_1")?.iter().enumerate() {
            let what = format!("coproduct_with_1[{i}]");
            coproducts.push(CoproductWith1 {
                x: object_of(&base, field(c, "x")?, &what)?,
                one_plus_x: object_of(&base, field(c, "one_plus_x")?, &what)?,
                iota1: morphism_of(&base, field(c, "iota1")?, &what)?,
                iota2: morphism_of(&base, field(c, "iota2")?, &what)?,
            });
        }
    }
    let monoidal = match j.get("tensor_obj") {
        None => None,
        Some(to) => {
            let tensor_obj = binary_table(to, base.num_objects(), "tensor_obj", |v| object_of(&base, v, "tensor_obj"))?;
            let tensor_mor = binary_table(field(j, "tensor_mor")?, base.num_morphisms(), "tensor_mor", |v| morphism_of(&base, v, "tensor_mor"))?;
            let unit = object_of(&base, field(j, "unit")?, "unit")?;
            Some(StrictMonoidal::new(base.clone(), tensor_obj, tensor_mor, unit)?)
        }
    };
    let lax = match (j.get("lax"), &monoidal) {
        (None, _) => None,
        (Some(_), None) => return Err(Error::parse("lax: requires tensor_obj, tensor_mor and unit")),
        (Some(l), Some(d)) => {
            let mut kappa = HashMap::new();
            for (i, e) in arr_of(field(l, "kappa")?, "lax.kappa")?.iter().enumerate() {
                let what = format!("lax.kappa[{i}]");
                let x = object_of(&base, field(e, "x")?, &what)?;
                let y = object_of(&base, field(e, "y")?, &what)?;
                let xy = d.tensor_obj[x][y];
                let map = obj_of(field(e, "map")?, &what)?;
                let mut table = Vec::with_capacity(k.size(x) * k.size(y));
                for a in k.set(x) {
                    for b in k.set(y) {
                        let key = Value::pair(a.clone(), b.clone()).to_string();
                        let c = map.get(&key).ok_or_else(|| Error::parse(format!("{what}: no value for {key}")))?;
                        let c = element(str_of(c, &what)?, &what)?;
                        table.push(k.position(xy, &c).ok_or_else(|| Error::validation(format!("{what}: {c} is not in K({})", base.objects()[xy])))?);
                    }
                }
                kappa.insert((x, y), table);
            }
            let iota = element(str_of(field(l, "iota")?, "lax.iota")?, "lax.iota")?;
            let iota = k.position(d.unit, &iota).ok_or_else(|| Error::validation("lax.iota is not in K(I)"))?;
            Some(LaxMonoidal::new(d, k.clone(), kappa, iota)?)
        }
    };
    Ok(Preset { name, base, k, terminal, coproducts, monoidal, lax })
}

pub fn category_to_json(c: &FiniteCategory) -> Json {
    let mors = c.morphisms();
    let mut compose: Vec<(&(usize, usize), &usize)> = c.compose_table().iter().collect();
    compose.sort();
    let identities: Map<String, Json> = c
        .identities()
        .iter()
        .enumerate()
        .filter_map(|(o, m)| m.map(|m| (c.objects()[o].clone(), Json::String(mors[m].id.clone()))))
        .collect();
    json!({
        "objects": c.objects(),
        "morphisms": mors.iter().map(|m| json!({"id": m.id, "src": c.objects()[m.src], "dst": c.objects()[m.dst]})).collect::<Vec<_>>(),
        "compose": compose.iter().map(|((g, f), gf)| json!([mors[*g].id, mors[*f].id, mors[**gf].id])).collect::<Vec<_>>(),
        "identities": identities,
    })
}

fn on_objects(c: &FiniteCategory, k: &SetFunctor) -> Json {
    Json::Object(c.objects().iter().enumerate().map(|(o, name)| (name.clone(), json!(strings(k.set(o))))).collect())
}

fn on_morphisms(c: &FiniteCategory, k: &SetFunctor) -> Json {
    Json::Object(
        c.morphisms()
            .iter()
            .enumerate()
            .map(|(mi, m)| {
                let t: Map<String, Json> = k.set(m.src).iter().zip(k.map(mi)).map(|(x, &y)| (x.to_string(), Json::String(k.set(m.dst)[y].to_string()))).collect();
                (m.id.clone(), Json::Object(t))
            })
            .collect(),
    )
}

pub fn preset_to_json(p: &Preset) -> Json {
    let c = &p.base;
    let mut j = category_to_json(c);
    let o = j.as_object_mut().expect("object");
    o.insert("name".into(), json!(p.name));
    o.insert("functor".into(), json!({"on_objects": on_objects(c, &p.k), "on_morphisms": on_morphisms(c, &p.k)}));
    if let Some(t) = p.terminal {
        o.insert("terminal".into(), json!(c.objects()[t]));
    }
    if !p.coproducts.is_empty() {
        let ms = c.morphisms();
        let cs: Vec<Json> = p
            .coproducts
            .iter()
            .map(|cp| json!({"x": c.objects()[cp.x], "one_plus_x": c.objects()[cp.one_plus_x], "iota1": ms[cp.iota1].id, "iota2": ms[cp.iota2].id}))
            .collect();
        o.insert("coproduct_with_1".into(), Json::Array(cs));
    }
    if let Some(d) = &p.monoidal {
        let table = |t: &[Vec<usize>], name: &dyn Fn(usize) -> String| -> Json {
            Json::Array(
                t.iter()
                    .enumerate()
                    .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &ab)| (a, b, ab)))
                    .map(|(a, b, ab)| json!([name(a), name(b), name(ab)]))
                    .collect(),
            )
        };
        o.insert("tensor_obj".into(), table(&d.tensor_obj, &|i| c.objects()[i].clone()));
        o.insert("tensor_mor".into(), table(&d.tensor_mor, &|i| c.morphisms()[i].id.clone()));
        o.insert("unit".into(), json!(c.objects()[d.unit]));
        if let Some(l) = &p.lax {
            let mut keys: Vec<&(usize, usize)> = l.kappa.keys().collect();
            keys.sort();
            let kappa: Vec<Json> = keys
                .into_iter()
                .map(|&(x, y)| {
                    let xy = d.tensor_obj[x][y];
                    let mut map = Map::new();
                    for (i, a) in p.k.set(x).iter().enumerate() {
                        for (jj, b) in p.k.set(y).iter().enumerate() {
                            let c_ = &p.k.set(xy)[l.kappa_at(x, y, i, jj)];
                            map.insert(Value::pair(a.clone(), b.clone()).to_string(), json!(c_.to_string()));
                        }
                    }
                    json!({"x": c.objects()[x], "y": c.objects()[y], "map": map})
                })
                .collect();
            o.insert("lax".into(), json!({"kappa": kappa, "iota": p.k.set(d.unit)[l.iota].to_string()}));
        }
    }
    j
}

/// Pretty JSON text with a trailing newline, as written to files.
pub fn to_file_text(j: &Json) -> String {
    let mut s = serde_json::to_string_pretty(j).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, j: &Json) -> Result<()> {
    std::fs::write(path, to_file_text(j)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

macro_rules! typed_loader {
    ($name:ident, $variant:ident, $ty:ty, $what:literal) => {
        pub fn $name(path: &Path) -> Result<$ty> {
            match load_spec(path)? {
                Spec::$variant(v) => Ok(v),
                s => Err(Error::parse(format!("{}: expected a {} file, found a {}", path.display(), $what, s.kind()))),
            }
        }
    };
}

typed_loader!(load_distribution, Distribution, Distribution, "distribution");
typed_loader!(load_metric_space, MetricSpace, FiniteMetricSpace, "metric-space");
typed_loader!(load_polymeasure, Polymeasure, Polymeasure, "polymeasure");
typed_loader!(load_polykernel, PolyKernel, PolyKernel, "polykernel");
typed_loader!(load_kernel, Kernel, Kernel, "kernel");

pub fn load_preset(path: &Path) -> Result<Preset> {
    match load_spec(path)? {
        Spec::Preset(p) => Ok(*p),
        s => Err(Error::parse(format!("{}: expected a preset file, found a {}", path.display(), s.kind()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rational::ratio;

    fn roundtrip(j: &Json) -> Json {
        parse_spec(j, None).unwrap().to_json()
    }

    #[test]
    fn distribution_file() {
        let j = json!({"carrier": ["a", "b", "c"], "weights": {"a": "1/3", "b": "2/3"}});
        let d = parse_distribution(&j).unwrap();
        assert_eq!(d.weight(&Value::atom("b")), ratio(2, 3));
        assert_eq!(roundtrip(&j), j);
    }

    #[test]
    fn distribution_errors() {
        let short = json!({"carrier": ["a", "b"], "weights": {"a": "1/3", "b": "1/3"}});
        let e = parse_spec(&short, None).unwrap_err().to_string();
        assert!(e.contains("2/3"), "{e}");
        let bad = json!({"carrier": ["a"], "weights": {"a": "1/0"}});
        assert!(matches!(parse_spec(&bad, None), Err(Error::Parse(_))));
    }

    #[test]
    fn metric_space_file() {
        let j = json!({"points": ["0", "1/2", "1"], "dist": {"(0,1)": "1", "(0,1/2)": "1/2", "(1,1/2)": "1/2"}});
        let m = parse_metric_space(&j).unwrap();
        assert_eq!(m.diameter(), ratio(1, 1));
        let again = parse_metric_space(&m.to_json()).unwrap();
        assert_eq!(again, m);
        let missing = json!({"points": ["a", "b", "c"], "dist": {"(a,b)": "1"}});
        assert!(parse_metric_space(&missing).is_err());
    }

    #[test]
    fn polymeasure_and_table_files() {
        let j = json!({"carriers": [["x0", "x1"], ["y0"]], "density": {"(x0,y0)": "1/4", "(x1,y0)": "3/4"}});
        let p = parse_polymeasure(&j).unwrap();
        assert_eq!(roundtrip(&j), p.to_json());
        let t = RawTableSpec {
            carriers: p.carriers().to_vec(),
            entries: vec![(vec![vec![], vec![]], ratio(0, 1))],
        };
        let spec = Spec::PolyTable(t.clone());
        match parse_spec(&spec.to_json(), None).unwrap() {
            Spec::PolyTable(u) => assert_eq!(u, t),
            s => panic!("{}", s.kind()),
        }
    }

    #[test]
    fn polykernel_file() {
        let j = json!({"source": ["a"], "carriers": [["x"], ["y0", "y1"]], "rows": {"a": {"(x,y0)": "1/2", "(x,y1)": "1/2"}}});
        let k = parse_polykernel(&j).unwrap();
        assert_eq!(k.to_json(), j);
    }

    #[test]
    fn presets_round_trip() {
        for name in presets::NAMES {
            let p = presets::by_name(name).unwrap();
            let j = preset_to_json(&p);
            let q = parse_preset(&j).unwrap();
            assert_eq!(preset_to_json(&q), j, "{name}");
            assert_eq!(q.base, p.base);
        }
    }

    #[test]
    fn shipped_presets_match() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/presets");
        for name in presets::NAMES {
            let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
            assert_eq!(text, to_file_text(&preset_to_json(&presets::by_name(name).unwrap())), "{name}");
        }
    }

    #[test]
    fn category_validation() {
        let j = json!({"objects": ["A"], "morphisms": [{"id": "f", "src": "A", "dst": "A"}], "compose": [], "identities": {}});
        assert!(matches!(parse_spec(&j, None), Err(Error::Validation(_))));
    }

    #[test]
    fn witness_bundles_round_trip() {
        let w = json!({"carrier": ["a", "b"], "input": "D{a,b|a:1/2,b:1/2}", "draw": 3, "error": "two sides differ"});
        assert_eq!(roundtrip(&w), w);
        match parse_spec(&w, None).unwrap() {
            Spec::Bundle(fields) => assert_eq!(fields[1].1.kind(), "element"),
            s => panic!("{}", s.kind()),
        }
    }
}
