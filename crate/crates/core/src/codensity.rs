//! Codensity monads of functors `K: D → FinSet`, computed pointwise as
//! `T(A) = lim_{(A↓K)} K∘U`.
//!
//! A carrier `A` is identified by its size; its elements are `0..|A|` and
//! an element of `T(A)` is an index into the sorted list of compatible
//! families. `ev_{(X,h)}` is projection onto the comma object `(X,h)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fincat::{
    comma_category_with_budget, solve_limit, CommaCategory, FiniteCategory, Limit, SetFunctor, DEFAULT_COMMA_BUDGET,
    DEFAULT_STEP_BUDGET,
};
use crate::presets::Preset;
use crate::report::Verdict;

/// A designated coproduct `1 + X` with its injections
/// `ι₁: 1 → 1+X` and `ι₂: X → 1+X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoproductWith1 {
    pub x: usize,
    pub one_plus_x: usize,
    pub iota1: usize,
    pub iota2: usize,
}

/// `T(A)` with its limit cone.
#[derive(Debug)]
pub struct CodensityObject {
    pub a: usize,
    pub comma: CommaCategory,
    pub limit: Limit,
}

impl CodensityObject {
    pub fn len(&self) -> usize {
        self.limit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.limit.is_empty()
    }

    /// `ev_{(X,h)}(t)` for the comma object with index `o`.
    pub fn ev(&self, o: usize, t: usize) -> usize {
        self.limit.families[t][o]
    }

    pub fn family(&self, t: usize) -> &[usize] {
        &self.limit.families[t]
    }

    pub fn index_of(&self, family: &[usize]) -> Option<usize> {
        self.limit.index_of(family)
    }
}

pub struct CodensityInstance {
    pub base: FiniteCategory,
    pub k: SetFunctor,
    pub terminal: Option<usize>,
    pub coproducts: Vec<CoproductWith1>,
    pub comma_budget: usize,
    pub step_budget: u64,
    cache: Mutex<HashMap<usize, Arc<CodensityObject>>>,
}

/// A cone over `K∘U: (A↓K) → Set`: one leg `apex → K(X)` per comma object.
#[derive(Clone, Debug)]
pub struct ConeData {
    pub apex: usize,
    pub legs: Vec<Vec<usize>>,
}

impl CodensityInstance {
    pub fn new(base: FiniteCategory, k: SetFunctor) -> Self {
        CodensityInstance {
            base,
            k,
            terminal: None,
            coproducts: Vec::new(),
            comma_budget: DEFAULT_COMMA_BUDGET,
            step_budget: DEFAULT_STEP_BUDGET,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_preset(p: &Preset) -> Self {
        CodensityInstance {
            terminal: p.terminal,
            coproducts: p.coproducts.clone(),
            ..Self::new(p.base.clone(), p.k.clone())
        }
    }

    pub fn with_budgets(mut self, comma: usize, steps: u64) -> Self {
        self.comma_budget = comma;
        self.step_budget = steps;
        self
    }

    pub fn comma(&self, a: usize) -> Result<CommaCategory> {
        comma_category_with_budget(a, &self.base, &self.k, self.comma_budget)
    }

    /// `T(A)` for `|A| = a`, memoized.
    pub fn codensity_object(&self, a: usize) -> Result<Arc<CodensityObject>> {
        if let Some(t) = self.cache.lock().unwrap().get(&a) {
            return Ok(t.clone());
        }
        let comma = self.comma(a)?;
        let limit = solve_limit(&comma.diagram(&self.base, &self.k), self.step_budget)?;
        let obj = Arc::new(CodensityObject { a, comma, limit });
        Ok(self.cache.lock().unwrap().entry(a).or_insert(obj).clone())
    }

    /// `η_A(x)` is the family `(X,h) ↦ h(x)`.
    pub fn unit(&self, a: usize) -> Result<Vec<usize>> {
        let t = self.codensity_object(a)?;
        (0..a)
            .map(|x| {
                let fam: Vec<usize> = t.comma.objects().iter().map(|(_, h)| h[x]).collect();
                t.index_of(&fam)
                    .ok_or_else(|| Error::validation(format!("η({x}) is not a compatible family")))
            })
            .collect()
    }

    /// `μ_A(τ)` is the family `(X,h) ↦ τ(X, ev_h)`.
    pub fn mult(&self, a: usize) -> Result<Vec<usize>> {
        let t = self.codensity_object(a)?;
        let tt = self.codensity_object(t.len())?;
        let ev_objects: Vec<usize> = t
            .comma
            .objects()
            .iter()
            .enumerate()
            .map(|(o, (x, _))| {
                let ev_h: Vec<usize> = (0..t.len()).map(|s| t.ev(o, s)).collect();
                tt.comma.index_of(*x, &ev_h)
            })
            .collect();
        let mut out = Vec::with_capacity(tt.len());
        for tau in 0..tt.len() {
            let fam: Vec<usize> = ev_objects.iter().map(|&o| tt.ev(o, tau)).collect();
            let m = t
                .index_of(&fam)
                .ok_or_else(|| Error::validation(format!("μ of element {tau} is not a compatible family")))?;
            out.push(m);
        }
        // ev_h∘μ = ev_{ev_h}
        for (o, &eo) in ev_objects.iter().enumerate() {
            for (tau, &m) in out.iter().enumerate() {
                if t.ev(o, m) != tt.ev(eo, tau) {
                    return Err(Error::validation("μ violates its defining equation"));
                }
            }
        }
        Ok(out)
    }

    /// `(η_A, μ_A)`, each checked against its defining equation.
    pub fn codensity_unit_mult(&self, a: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let eta = self.unit(a)?;
        let t = self.codensity_object(a)?;
        for (o, (_, h)) in t.comma.objects().iter().enumerate() {
            if (0..a).any(|x| t.ev(o, eta[x]) != h[x]) {
                return Err(Error::validation("η violates ev_h∘η = h"));
            }
        }
        Ok((eta, self.mult(a)?))
    }

    /// `T(f)` for `f: A → B`: the family `(Y,h) ↦ t(Y, h∘f)`.
    pub fn fmap(&self, f: &[usize], b: usize) -> Result<Vec<usize>> {
        let a = f.len();
        if f.iter().any(|&y| y >= b) {
            return Err(Error::domain("function leaves its codomain"));
        }
        let ta = self.codensity_object(a)?;
        let tb = self.codensity_object(b)?;
        let pulled: Vec<usize> = tb
            .comma
            .objects()
            .iter()
            .map(|(y, h)| {
                let hf: Vec<usize> = f.iter().map(|&i| h[i]).collect();
                ta.comma.index_of(*y, &hf)
            })
            .collect();
        (0..ta.len())
            .map(|t| {
                let fam: Vec<usize> = pulled.iter().map(|&o| ta.ev(o, t)).collect();
                tb.index_of(&fam).ok_or_else(|| Error::validation("T(f) leaves the limit"))
            })
            .collect()
    }

    /// The unique `u: apex → T(A)` with `ev_{(X,h)}∘u = leg_{(X,h)}`.
    pub fn factor_through_limit(&self, a: usize, cone: &ConeData) -> Result<Vec<usize>> {
        let t = self.codensity_object(a)?;
        let comma = &t.comma;
        if cone.legs.len() != comma.num_objects() {
            return Err(Error::domain("cone needs one leg per comma object"));
        }
        for (o, leg) in cone.legs.iter().enumerate() {
            let x = comma.projection(o);
            if leg.len() != cone.apex || leg.iter().any(|&v| v >= self.k.size(x)) {
                return Err(Error::domain(format!("leg at comma object {o} is not a function apex → K(X)")));
            }
        }
        for &(s, f, d) in comma.arrows() {
            let kf = self.k.map(f);
            if let Some(c) = (0..cone.apex).find(|&c| kf[cone.legs[s][c]] != cone.legs[d][c]) {
                let (x, h) = comma.object(s);
                let (y, h2) = comma.object(d);
                return Err(Error::precondition(format!(
                    "cone square fails for {}: ({}, {:?}) → ({}, {:?}) at apex element {c}",
                    self.base.morphisms()[f].id,
                    self.base.objects()[x],
                    h,
                    self.base.objects()[y],
                    h2
                )));
            }
        }
        (0..cone.apex)
            .map(|c| {
                let fam: Vec<usize> = cone.legs.iter().map(|leg| leg[c]).collect();
                let hits = t.limit.families.iter().filter(|f| **f == fam).count();
                match hits {
                    1 => Ok(t.index_of(&fam).unwrap()),
                    0 => Err(Error::validation("cone does not factor through the computed limit")),
                    _ => Err(Error::validation("limit contains a repeated family")),
                }
            })
            .collect()
    }

    /// The limit cone of `T(A)` as cone data.
    pub fn limit_cone(&self, a: usize) -> Result<ConeData> {
        let t = self.codensity_object(a)?;
        Ok(ConeData {
            apex: t.len(),
            legs: (0..t.comma.num_objects()).map(|o| (0..t.len()).map(|s| t.ev(o, s)).collect()).collect(),
        })
    }

    /// Unit laws and associativity at a carrier of size `a`; each law is
    /// skipped with a resource note if its carriers exceed the budget.
    pub fn monad_law_checks(&self, a: usize) -> Vec<Verdict> {
        let mut out = Vec::new();
        let id = |s: &str| format!("codensity.{s}[{a}]");
        let laws = (|| -> Result<(Vec<usize>, Vec<usize>, usize, usize)> {
            let (eta, mu) = self.codensity_unit_mult(a)?;
            let ta = self.codensity_object(a)?.len();
            Ok((eta, mu, ta, a))
        })();
        let (eta, mu, ta, _) = match laws {
            Ok(v) => v,
            Err(e) => {
                out.push(Verdict::fail(id("unit_mult"), 0, e.to_string(), None));
                return out;
            }
        };
        out.push(Verdict::pass(id("unit_mult"), (a + mu.len()) as u64));
        // μ∘η_T = id
        let eta_t = self.unit(ta);
        out.push(match eta_t {
            Ok(eta_t) => {
                let bad = (0..ta).find(|&t| mu[eta_t[t]] != t);
                Verdict::from_outcome(id("left_unit"), ta as u64, bad.map(|t| (format!("μ(η_T({t})) ≠ {t}"), serde_json::json!({"element": t}))))
            }
            Err(e) => Verdict::fail(id("left_unit"), 0, e.to_string(), None),
        });
        // μ∘Tη = id
        out.push(match self.fmap(&eta, ta) {
            Ok(t_eta) => {
                let bad = (0..ta).find(|&t| mu[t_eta[t]] != t);
                Verdict::from_outcome(id("right_unit"), ta as u64, bad.map(|t| (format!("μ(Tη({t})) ≠ {t}"), serde_json::json!({"element": t}))))
            }
            Err(e) => Verdict::fail(id("right_unit"), 0, e.to_string(), None),
        });
        // μ∘μ_T = μ∘Tμ on T³(A)
        let assoc = (|| -> Result<Verdict> {
            let mu_t = self.mult(ta)?;
            let t_mu = self.fmap(&mu, ta)?;
            let n = mu_t.len();
            let bad = (0..n).find(|&s| mu[mu_t[s]] != mu[t_mu[s]]);
            Ok(Verdict::from_outcome(id("associativity"), n as u64, bad.map(|s| (format!("associativity fails at element {s} of T³A"), serde_json::json!({"element": s})))))
        })();
        out.push(match assoc {
            Ok(v) => v,
            Err(e) if e.is_resource() => Verdict::pass(id("associativity"), 0).with_detail(format!("skipped: {e}")),
            Err(e) => Verdict::fail(id("associativity"), 0, e.to_string(), None),
        });
        out
    }

    fn require_terminal(&self) -> Result<usize> {
        let one = self
            .terminal
            .ok_or_else(|| Error::precondition("no terminal object is designated"))?;
        for x in 0..self.base.num_objects() {
            if self.base.hom(x, one).len() != 1 {
                return Err(Error::precondition(format!(
                    "designated object {} is not terminal: {} maps from {}",
                    self.base.objects()[one],
                    self.base.hom(x, one).len(),
                    self.base.objects()[x]
                )));
            }
        }
        Ok(one)
    }

    /// Check that `K1` is a singleton and that points `1 → X` correspond
    /// bijectively to elements of `KX`; if so, also that `η₁` is a bijection.
    pub fn affine_check(&self) -> Result<AffineReport> {
        let one = self.require_terminal()?;
        let terminal_singleton = self.k.size(one) == 1;
        let mut failing_object = None;
        for x in 0..self.base.num_objects() {
            let points = self.base.hom(one, x);
            let mut images: Vec<usize> = if self.k.size(one) == 0 {
                Vec::new()
            } else {
                points.iter().map(|&p| self.k.apply(p, 0)).collect()
            };
            images.sort();
            images.dedup();
            if images.len() != points.len() || images.len() != self.k.size(x) {
                failing_object = Some(format!(
                    "{}: {} points, {} elements of K({})",
                    self.base.objects()[x],
                    points.len(),
                    self.k.size(x),
                    self.base.objects()[x]
                ));
                break;
            }
        }
        let points_bijective = failing_object.is_none();
        let (t1_size, eta1_bijective) = if terminal_singleton && points_bijective {
            let t1 = self.codensity_object(1)?;
            let eta = self.unit(1)?;
            (Some(t1.len()), Some(t1.len() == 1 && eta == vec![0]))
        } else {
            (None, None)
        };
        Ok(AffineReport { terminal_singleton, points_bijective, failing_object, t1_size, eta1_bijective })
    }

    fn coproduct(&self, x: usize) -> Option<&CoproductWith1> {
        self.coproducts.iter().find(|c| c.x == x)
    }

    /// `1 + f: 1+X → 1+Y`, located among the base morphisms.
    fn plus_map(&self, f: usize) -> Result<usize> {
        let m = &self.base.morphisms()[f];
        let (cx, cy) = match (self.coproduct(m.src), self.coproduct(m.dst)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::precondition(format!("1 + – is not designated around {}", m.id))),
        };
        let i2f = self.base.compose(cy.iota2, f).ok_or_else(|| Error::domain("composite missing"))?;
        self.base
            .hom(cx.one_plus_x, cy.one_plus_x)
            .into_iter()
            .find(|&g| self.base.compose(g, cx.iota1) == Some(cy.iota1) && self.base.compose(g, cx.iota2) == Some(i2f))
            .ok_or_else(|| Error::precondition(format!("no morphism 1 + {} in the base", m.id)))
    }

    /// `[x, 1_Z]: 1+Z → Z` for a point `x: 1 → Z`.
    fn copair_with_identity(&self, c: &CoproductWith1, x: usize) -> Result<usize> {
        let id = self.base.identity(c.x).ok_or_else(|| Error::domain("missing identity"))?;
        self.base
            .hom(c.one_plus_x, c.x)
            .into_iter()
            .find(|&g| self.base.compose(g, c.iota1) == Some(x) && self.base.compose(g, c.iota2) == Some(id))
            .ok_or_else(|| Error::precondition(format!("no copairing [x, 1] out of {}", self.base.objects()[c.one_plus_x])))
    }

    /// Check that `T(1+A)` with legs `ev_{[Kι₁∘!⁻¹, Kι₂∘h]}` is the limit of
    /// `K(1+U–)` over the comma objects `(X,h)` whose `1+X` is designated,
    /// and that the cone built from any compatible family by
    /// `ν_{[y,h]} = K[x,1]∘τ_h` factors through it.
    pub fn subprob_lift_check(&self, a: usize) -> Result<LiftReport> {
        let aff = self.affine_check()?;
        if !aff.holds() {
            return Err(Error::precondition(format!("affine_check conditions fail: {aff:?}")));
        }
        let one = self.terminal.unwrap();
        let t = self.codensity_object(a)?;
        let t1a = self.codensity_object(a + 1)?;
        // J: comma objects of (A↓K) over X with a designated 1+X
        let j: Vec<usize> = (0..t.comma.num_objects())
            .filter(|&o| self.coproduct(t.comma.projection(o)).is_some())
            .collect();
        if j.is_empty() {
            return Err(Error::precondition("no object of the base has a designated 1 + X"));
        }
        let pos: HashMap<usize, usize> = j.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mut plus_maps = HashMap::new();
        let mut arrows = Vec::new();
        for &(s, f, d) in t.comma.arrows() {
            if let (Some(&ps), Some(&pd)) = (pos.get(&s), pos.get(&d)) {
                if self.base.is_identity(f) {
                    continue;
                }
                let g = match plus_maps.get(&f) {
                    Some(&g) => g,
                    None => {
                        let g = self.plus_map(f)?;
                        plus_maps.insert(f, g);
                        g
                    }
                };
                arrows.push(crate::fincat::Arrow { src: ps, dst: pd, map: self.k.map(g) });
            }
        }
        let sizes: Vec<usize> = j.iter().map(|&o| self.k.size(self.coproduct(t.comma.projection(o)).unwrap().one_plus_x)).collect();
        let l = solve_limit(&crate::fincat::ArrowDiagram { sizes, arrows }, self.step_budget)?;
        // legs: element 0 of 1+A is ⊥, element i+1 is i
        let star = 0;
        let leg_objects: Vec<usize> = j
            .iter()
            .map(|&o| {
                let (x, h) = t.comma.object(o);
                let c = self.coproduct(x).unwrap();
                let mut g = vec![self.k.apply(c.iota1, star)];
                g.extend(h.iter().map(|&v| self.k.apply(c.iota2, v)));
                t1a.comma.index_of(c.one_plus_x, &g)
            })
            .collect();
        let image: Vec<Vec<usize>> = (0..t1a.len())
            .map(|s| leg_objects.iter().map(|&lo| t1a.ev(lo, s)).collect())
            .collect();
        let mut sorted = image.clone();
        sorted.sort();
        sorted.dedup();
        let injective = sorted.len() == image.len();
        let surjective = sorted == l.families;
        // ν-construction, for every cone from a point (= element of L)
        let mut nu_checked = 0usize;
        let mut nu_agrees = true;
        let mut copairs = HashMap::new();
        for fam in &l.families {
            let preimage = image.iter().position(|f| f == fam);
            for o in 0..t1a.comma.num_objects() {
                let (z, g) = t1a.comma.object(o);
                let Some(c) = self.coproduct(z) else { continue };
                let h = &g[1..];
                let jo = t.comma.index_of(z, h);
                let Some(&jp) = pos.get(&jo) else { continue };
                let x = self
                    .base
                    .hom(one, z)
                    .into_iter()
                    .find(|&p| self.k.apply(p, 0) == g[0])
                    .ok_or_else(|| Error::validation("point of K(Z) without a base point"))?;
                let cp = match copairs.get(&(z, x)) {
                    Some(&m) => m,
                    None => {
                        let m = self.copair_with_identity(c, x)?;
                        copairs.insert((z, x), m);
                        m
                    }
                };
                let nu = self.k.apply(cp, fam[jp]);
                nu_checked += 1;
                if !matches!(preimage, Some(s) if t1a.ev(o, s) == nu) {
                    nu_agrees = false;
                }
            }
        }
        Ok(LiftReport {
            a,
            t_one_plus_a: t1a.len(),
            limit_size: l.len(),
            j_objects: j.len(),
            comparison_bijective: injective && surjective,
            nu_checked,
            nu_agrees,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineReport {
    pub terminal_singleton: bool,
    pub points_bijective: bool,
    pub failing_object: Option<String>,
    pub t1_size: Option<usize>,
    pub eta1_bijective: Option<bool>,
}

impl AffineReport {
    pub fn holds(&self) -> bool {
        self.terminal_singleton && self.points_bijective
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub a: usize,
    pub t_one_plus_a: usize,
    pub limit_size: usize,
    pub j_objects: usize,
    pub comparison_bijective: bool,
    pub nu_checked: usize,
    pub nu_agrees: bool,
}

impl LiftReport {
    pub fn verified(&self) -> bool {
        self.comparison_bijective && self.nu_agrees
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FiniteCategory;
    use crate::presets;

    fn end2() -> CodensityInstance {
        let (c, k) = presets::end2();
        CodensityInstance::new(c, k)
    }

    #[test]
    fn end2_sizes() {
        let inst = end2();
        assert_eq!(inst.codensity_object(2).unwrap().len(), 2);
        assert_eq!(inst.codensity_object(3).unwrap().len(), 8);
    }

    #[test]
    fn end2_large_carrier_is_a_resource_error() {
        let inst = end2();
        assert!(inst.codensity_object(8).unwrap_err().is_resource());
        assert!(inst.codensity_object(99).unwrap_err().is_resource());
    }

    #[test]
    fn discrete_base_is_unconstrained() {
        let (c, k) = presets::discrete_base(2);
        let inst = CodensityInstance::new(c, k);
        assert_eq!(inst.codensity_object(1).unwrap().len(), 4);
    }

    #[test]
    fn end2_unit_is_evaluation() {
        let inst = end2();
        let (eta, _) = inst.codensity_unit_mult(2).unwrap();
        let t = inst.codensity_object(2).unwrap();
        for (x, &e) in eta.iter().enumerate() {
            for (o, (_, h)) in t.comma.objects().iter().enumerate() {
                assert_eq!(t.ev(o, e), h[x]);
            }
        }
    }

    #[test]
    fn end2_monad_laws() {
        let inst = end2();
        for a in 0..=2 {
            for v in inst.monad_law_checks(a) {
                assert!(v.passed, "{v:?}");
            }
        }
    }

    #[test]
    fn discrete_mu_equation() {
        let (c, k) = presets::discrete_base(2);
        let inst = CodensityInstance::new(c, k);
        assert!(inst.codensity_unit_mult(1).is_ok());
    }

    #[test]
    fn ultrafilter_sizes_on_fin_upto_three() {
        let (c, k) = presets::fin_upto(3);
        let inst = CodensityInstance::new(c, k);
        for a in 0..=3 {
            assert_eq!(inst.codensity_object(a).unwrap().len(), a, "a = {a}");
        }
    }

    #[test]
    fn factorization_cases() {
        let inst = end2();
        let cone = inst.limit_cone(3).unwrap();
        let u = inst.factor_through_limit(3, &cone).unwrap();
        assert_eq!(u, (0..8).collect::<Vec<_>>());
        let t = inst.codensity_object(3).unwrap();
        let eta = inst.unit(3).unwrap();
        let point = ConeData { apex: 1, legs: t.comma.objects().iter().map(|(_, h)| vec![h[1]]).collect() };
        assert_eq!(inst.factor_through_limit(3, &point).unwrap(), vec![eta[1]]);
        let mut broken = point.clone();
        broken.legs[0][0] = 1 - broken.legs[0][0];
        let err = inst.factor_through_limit(3, &broken).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn functoriality_of_t() {
        let inst = end2();
        for a in 1..=3usize {
            let id: Vec<usize> = (0..a).collect();
            let ta = inst.codensity_object(a).unwrap().len();
            assert_eq!(inst.fmap(&id, a).unwrap(), (0..ta).collect::<Vec<_>>());
        }
        let f = vec![1, 0, 0];
        let g = vec![1, 1];
        let gf: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        let tf = inst.fmap(&f, 2).unwrap();
        let tg = inst.fmap(&g, 2).unwrap();
        let tgf = inst.fmap(&gf, 2).unwrap();
        assert_eq!(tf.iter().map(|&i| tg[i]).collect::<Vec<_>>(), tgf);
    }

    #[test]
    fn affine_cases() {
        let inst = CodensityInstance::from_preset(&presets::pointed_sizes_one_two());
        let r = inst.affine_check().unwrap();
        assert!(r.holds());
        assert_eq!(r.eta1_bijective, Some(true));

        let base = FiniteCategory::discrete(&["1"]);
        let k = SetFunctor::constant(&base, crate::value::atoms("k", 2));
        let mut bad = CodensityInstance::new(base, k);
        bad.terminal = Some(0);
        let r = bad.affine_check().unwrap();
        assert!(!r.points_bijective);
        assert!(!r.holds());

        assert!(matches!(end2().affine_check().unwrap_err(), Error::Precondition(_)));
    }

    #[test]
    fn subprob_lift_cases() {
        let trivial = CodensityInstance::from_preset(&presets::by_name("trivial").unwrap());
        assert!(trivial.subprob_lift_check(1).unwrap().verified());
        let inst = CodensityInstance::from_preset(&presets::pointed_sizes_one_two());
        let r = inst.subprob_lift_check(1).unwrap();
        assert!(r.verified(), "{r:?}");
        let fin3 = CodensityInstance::from_preset(&presets::by_name("fin-upto-3").unwrap());
        for a in 0..=2 {
            let r = fin3.subprob_lift_check(a).unwrap();
            assert!(r.verified(), "{r:?}");
            assert_eq!(r.t_one_plus_a, a + 1);
        }
        let mut not_affine = CodensityInstance::from_preset(&presets::pointed_sizes_one_two());
        not_affine.terminal = None;
        assert!(not_affine.subprob_lift_check(1).is_err());
    }
}
