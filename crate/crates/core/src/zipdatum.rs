//! The combinatorial model of the zip stack: `(I, J, δ, θ0, ψ)`, the order
//! `⪯` on `^I W`, stratum dimensions, closures and the purity check.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, Family, Parabolic, WeylElement, WeylGroup};

/// Above this many elements of `W_I` the relation matrix is not computed.
pub const WI_GUARD: u128 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZipError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("psi does not carry I = {i:?} onto J = {j:?} (s_{bad} maps to {image})")]
    PsiMismatch { i: Vec<usize>, j: Vec<usize>, bad: usize, image: String },
    #[error("{0} is not in ^I W")]
    NotMinimal(String),
    #[error("parabolic index {0} out of range for rank {1}")]
    BadParabolic(usize, usize),
    #[error("W_I has {0} elements, above the exhaustive-scan guard")]
    TooLarge(u128),
    #[error("the supplied action does not preserve ^I W or the order: {0}")]
    BadAction(String),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("malformed poset document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone)]
pub struct ZipCombinatorics {
    group: WeylGroup,
    i: Parabolic,
    j: Parabolic,
    delta: Vec<usize>,
    theta0: WeylElement,
    gl_center: bool,
}

fn check_parabolic(g: &WeylGroup, k: &Parabolic) -> Result<(), ZipError> {
    match k.iter().find(|&i| i == 0 || i > g.rank()) {
        Some(i) => Err(ZipError::BadParabolic(i, g.rank())),
        None => Ok(()),
    }
}

/// Builds the datum for user-supplied `I`, `J` and `δ`.
pub fn build_zip(group: &WeylGroup, i: &Parabolic, j: &Parabolic, delta: &[usize]) -> Result<ZipCombinatorics, ZipError> {
    check_parabolic(group, i)?;
    check_parabolic(group, j)?;
    group.check_graph_automorphism(delta)?;
    let delta_i = Parabolic(i.iter().map(|k| delta[k - 1]).collect());
    let theta0 = group.min_double_coset_rep(j, &group.longest_element(), &delta_i);
    let z = ZipCombinatorics {
        group: group.clone(),
        i: i.clone(),
        j: j.clone(),
        delta: delta.to_vec(),
        theta0,
        gl_center: group.family() == Family::A,
    };
    let mut images = Vec::new();
    for k in i.iter() {
        let img = z.psi(&group.simple(k));
        match group.simple_index(&img) {
            Some(t) if j.contains(t) => images.push(t),
            _ => {
                return Err(ZipError::PsiMismatch {
                    i: i.to_vec(),
                    j: j.to_vec(),
                    bad: k,
                    image: format!("{:?}", group.reduced_word(&img)),
                })
            }
        }
    }
    images.sort_unstable();
    images.dedup();
    if images.len() != j.len() {
        return Err(ZipError::PsiMismatch { i: i.to_vec(), j: j.to_vec(), bad: 0, image: format!("{images:?}") });
    }
    Ok(z)
}

/// The datum attached to a cocharacter of type `I`: `J` is the `w0`-conjugate of `δ(I)`.
pub fn zip_from_cocharacter(group: &WeylGroup, i: &Parabolic, delta: &[usize]) -> Result<ZipCombinatorics, ZipError> {
    check_parabolic(group, i)?;
    group.check_graph_automorphism(delta)?;
    let j = opposite_type(group, i, delta);
    build_zip(group, i, &j, delta)
}

/// `{ index of w0·s_{δ(i)}·w0 : i ∈ I }`.
pub fn opposite_type(group: &WeylGroup, i: &Parabolic, delta: &[usize]) -> Parabolic {
    let w0 = group.longest_element();
    Parabolic(
        i.iter()
            .map(|k| {
                let c = group.mul(&group.mul(&w0, &group.simple(delta[k - 1])), &w0);
                group.simple_index(&c).expect("w0 conjugation permutes simple reflections")
            })
            .collect(),
    )
}

impl ZipCombinatorics {
    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn i(&self) -> &Parabolic {
        &self.i
    }

    pub fn j(&self) -> &Parabolic {
        &self.j
    }

    pub fn delta(&self) -> &[usize] {
        &self.delta
    }

    pub fn theta0(&self) -> &WeylElement {
        &self.theta0
    }

    pub fn gl_center(&self) -> bool {
        self.gl_center
    }

    /// Whether type A is read as `GL_n` (central torus included in dimensions).
    pub fn with_gl_center(mut self, on: bool) -> Self {
        self.gl_center = on && self.group.family() == Family::A;
        self
    }

    /// `ψ(w) = θ0·δ(w)·θ0^{-1}`.
    pub fn psi(&self, w: &WeylElement) -> WeylElement {
        let g = &self.group;
        let dw = g.apply_delta_unchecked(&self.delta, w);
        g.mul(&g.mul(&self.theta0, &dw), &g.inverse(&self.theta0))
    }

    pub fn carrier(&self) -> Vec<WeylElement> {
        self.group.min_coset_reps(&self.i)
    }

    fn check_member(&self, w: &WeylElement) -> Result<(), ZipError> {
        if w.degree() != self.group.degree() {
            return Err(CoxeterError::GroupMismatch(w.degree(), self.group.degree()).into());
        }
        if !self.group.is_min_coset_rep(&self.i, w) {
            return Err(ZipError::NotMinimal(w.to_string()));
        }
        Ok(())
    }

    /// Pairs `(u, ψ(u)^{-1})` for every `u ∈ W_I`.
    pub fn twist_table(&self) -> Result<Vec<(WeylElement, WeylElement)>, ZipError> {
        let size = self.group.parabolic_order(&self.i);
        if size > WI_GUARD {
            return Err(ZipError::TooLarge(size));
        }
        let g = &self.group;
        Ok(g.parabolic_elements(&self.i)
            .into_iter()
            .map(|u| {
                let p = g.inverse(&self.psi(&u));
                (u, p)
            })
            .collect())
    }

    /// `w' ⪯ w` iff `u·w'·ψ(u)^{-1} ≤ w` for some `u ∈ W_I` (exhaustive scan).
    pub fn twisted_leq(&self, w1: &WeylElement, w: &WeylElement) -> Result<bool, ZipError> {
        self.check_member(w1)?;
        self.check_member(w)?;
        let table = self.twist_table()?;
        Ok(self.twisted_leq_with(&table, w1, w))
    }

    fn twisted_leq_with(&self, table: &[(WeylElement, WeylElement)], w1: &WeylElement, w: &WeylElement) -> bool {
        let g = &self.group;
        table.iter().any(|(u, pinv)| {
            let x = g.mul(&g.mul(u, w1), pinv);
            g.bruhat_leq(&x, w).expect("same group")
        })
    }

    /// Rank of the maximal torus used for dimensions.
    pub fn torus_rank(&self) -> usize {
        if self.gl_center {
            self.group.degree()
        } else {
            self.group.rank()
        }
    }

    pub fn dim_parabolic(&self) -> usize {
        let g = &self.group;
        self.torus_rank() + g.positive_root_count() + g.length(&g.longest_element_parabolic(&self.i))
    }

    pub fn dim_group(&self) -> usize {
        self.torus_rank() + 2 * self.group.positive_root_count()
    }

    pub fn stratum_dimension(&self, w: &WeylElement) -> Result<usize, ZipError> {
        self.check_member(w)?;
        Ok(self.dim_parabolic() + self.group.length(w))
    }

    pub fn stratum_poset(&self) -> StratumPoset {
        let g = &self.group;
        let carrier = self.carrier();
        let words: Vec<Vec<usize>> = carrier.iter().map(|w| g.reduced_word(w)).collect();
        let lengths: Vec<usize> = words.iter().map(|w| w.len()).collect();
        let dp = self.dim_parabolic();
        let dims = lengths.iter().map(|l| dp + l).collect();
        let leq = self.twist_table().ok().map(|table| {
            carrier
                .iter()
                .map(|a| carrier.iter().map(|b| self.twisted_leq_with(&table, a, b)).collect())
                .collect()
        });
        StratumPoset {
            family: g.family(),
            rank: g.rank(),
            gl_center: self.gl_center,
            i: self.i.to_vec(),
            j: self.j.to_vec(),
            delta: self.delta.clone(),
            carrier,
            words,
            lengths,
            dims,
            leq,
        }
    }

    pub fn purity_check(&self) -> PurityReport {
        purity_check_poset(&self.stratum_poset())
    }
}

/// The poset `(^I W, ⪯)` with lengths and dimensions.
///
/// `leq[a][b]` means `carrier[a] ⪯ carrier[b]`. It is `None` when `W_I` is too
/// large to scan; carrier, lengths and dimensions are always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumPoset {
    pub family: Family,
    pub rank: usize,
    pub gl_center: bool,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub delta: Vec<usize>,
    pub carrier: Vec<WeylElement>,
    pub words: Vec<Vec<usize>>,
    pub lengths: Vec<usize>,
    pub dims: Vec<usize>,
    pub leq: Option<Vec<Vec<bool>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub stratum: Vec<usize>,
    pub boundary: Vec<usize>,
    pub length: usize,
    pub boundary_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurityReport {
    pub pass: bool,
    pub strata: usize,
    pub checked_pairs: usize,
    pub violations: Vec<Violation>,
    pub order_defects: Vec<String>,
}

impl StratumPoset {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn index_of(&self, w: &WeylElement) -> Option<usize> {
        self.carrier.iter().position(|x| x == w)
    }

    fn rel(&self) -> &Vec<Vec<bool>> {
        self.leq.as_ref().expect("relation matrix not computed for this poset")
    }

    pub fn has_relation(&self) -> bool {
        self.leq.is_some()
    }

    /// `{w' : w' ⪯ w}` as carrier indices.
    pub fn closure(&self, w: usize) -> Vec<usize> {
        let r = self.rel();
        (0..self.len()).filter(|&a| r[a][w]).collect()
    }

    /// Maximal elements of `closure(w) \ {w}`.
    pub fn boundary_maximal(&self, w: usize) -> Vec<usize> {
        let r = self.rel();
        let below: Vec<usize> = self.closure(w).into_iter().filter(|&a| a != w).collect();
        below
            .iter()
            .copied()
            .filter(|&a| !below.iter().any(|&b| b != a && r[a][b]))
            .collect()
    }

    /// Cover relations `(a, b)` with `a ≺ b`, in carrier order.
    pub fn covers(&self) -> Option<Vec<(usize, usize)>> {
        self.leq.as_ref()?;
        let mut out = Vec::new();
        for b in 0..self.len() {
            let mut lower = self.boundary_maximal(b);
            lower.sort_unstable();
            out.extend(lower.into_iter().map(|a| (a, b)));
        }
        out.sort_unstable();
        Some(out)
    }

    pub fn minimum(&self) -> Option<usize> {
        let r = self.rel();
        let mins: Vec<usize> = (0..self.len()).filter(|&a| (0..self.len()).all(|b| r[a][b])).collect();
        (mins.len() == 1).then(|| mins[0])
    }

    pub fn maximum(&self) -> Option<usize> {
        let r = self.rel();
        let maxs: Vec<usize> = (0..self.len()).filter(|&b| (0..self.len()).all(|a| r[a][b])).collect();
        (maxs.len() == 1).then(|| maxs[0])
    }

    /// Partial-order axioms, refinement of length, unique extrema.
    pub fn order_defects(&self) -> Vec<String> {
        let Some(r) = &self.leq else { return Vec::new() };
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            if !r[a][a] {
                out.push(format!("not reflexive at {:?}", self.words[a]));
            }
            for b in 0..n {
                if a != b && r[a][b] && r[b][a] {
                    out.push(format!("not antisymmetric: {:?} {:?}", self.words[a], self.words[b]));
                }
                if r[a][b] && self.lengths[a] > self.lengths[b] {
                    out.push(format!("length not monotone: {:?} {:?}", self.words[a], self.words[b]));
                }
                if r[a][b] {
                    for c in 0..n {
                        if r[b][c] && !r[a][c] {
                            out.push(format!(
                                "not transitive: {:?} {:?} {:?}",
                                self.words[a], self.words[b], self.words[c]
                            ));
                        }
                    }
                }
            }
        }
        if n > 0 && self.minimum().is_none() {
            out.push("no unique minimum".into());
        }
        if n > 0 && self.maximum().is_none() {
            out.push("no unique maximum".into());
        }
        out
    }

    fn label(&self, a: usize) -> String {
        if self.words[a].is_empty() {
            "e".to_string()
        } else {
            self.words[a].iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph strata {\n  rankdir=BT;\n");
        for a in 0..self.len() {
            let _ = writeln!(s, "  n{a} [label=\"{} | {} | {}\"];", self.label(a), self.lengths[a], self.dims[a]);
        }
        for (a, b) in self.covers().unwrap_or_default() {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        let doc = PosetDoc {
            group: GroupDoc { family: self.family.to_string(), rank: self.rank, gl_center: self.gl_center },
            i: self.i.clone(),
            j: self.j.clone(),
            delta: self.delta.clone(),
            strata: (0..self.len())
                .map(|a| StratumDoc { word: self.words[a].clone(), length: self.lengths[a], dim: self.dims[a] })
                .collect(),
            covers: self.covers().map(|c| c.into_iter().map(|(a, b)| [a, b]).collect()),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn export(&self, format: &str) -> Result<String, ZipError> {
        match format {
            "json" => Ok(self.to_json()),
            "dot" => Ok(self.to_dot()),
            other => Err(ZipError::UnknownFormat(other.to_string())),
        }
    }

    /// Parses a JSON document produced by [`StratumPoset::to_json`].
    ///
    /// The relation is rebuilt as the reflexive-transitive closure of the covers.
    pub fn from_json(text: &str) -> Result<StratumPoset, ZipError> {
        let doc: PosetDoc = serde_json::from_str(text).map_err(|e| ZipError::Parse(e.to_string()))?;
        let family: Family = doc.group.family.parse().map_err(ZipError::Parse)?;
        let g = WeylGroup::new(family, doc.group.rank)?;
        let mut carrier = Vec::new();
        for s in &doc.strata {
            if s.word.iter().any(|&i| i == 0 || i > g.rank()) {
                return Err(ZipError::Parse(format!("bad word {:?}", s.word)));
            }
            carrier.push(g.from_word(&s.word));
        }
        let n = carrier.len();
        let leq = match &doc.covers {
            None => None,
            Some(covers) => {
                let mut r = vec![vec![false; n]; n];
                for (a, row) in r.iter_mut().enumerate() {
                    row[a] = true;
                }
                for c in covers {
                    if c[0] >= n || c[1] >= n {
                        return Err(ZipError::Parse(format!("cover {c:?} out of range")));
                    }
                    r[c[0]][c[1]] = true;
                }
                for k in 0..n {
                    for a in 0..n {
                        if r[a][k] {
                            for b in 0..n {
                                if r[k][b] {
                                    r[a][b] = true;
                                }
                            }
                        }
                    }
                }
                Some(r)
            }
        };
        Ok(StratumPoset {
            family,
            rank: doc.group.rank,
            gl_center: doc.group.gl_center,
            i: doc.i,
            j: doc.j,
            delta: doc.delta,
            carrier,
            words: doc.strata.iter().map(|s| s.word.clone()).collect(),
            lengths: doc.strata.iter().map(|s| s.length).collect(),
            dims: doc.strata.iter().map(|s| s.dim).collect(),
            leq,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    family: String,
    rank: usize,
    gl_center: bool,
}

#[derive(Serialize, Deserialize)]
struct StratumDoc {
    word: Vec<usize>,
    length: usize,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PosetDoc {
    group: GroupDoc,
    #[serde(rename = "I")]
    i: Vec<usize>,
    #[serde(rename = "J")]
    j: Vec<usize>,
    delta: Vec<usize>,
    strata: Vec<StratumDoc>,
    covers: Option<Vec<[usize; 2]>>,
}

/// Every maximal boundary stratum of every closure must have length one less.
pub fn purity_check_poset(p: &StratumPoset) -> PurityReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    let order_defects = p.order_defects();
    if p.has_relation() {
        for w in 0..p.len() {
            for b in p.boundary_maximal(w) {
                checked += 1;
                if p.lengths[w] != p.lengths[b] + 1 {
                    violations.push(Violation {
                        stratum: p.words[w].clone(),
                        boundary: p.words[b].clone(),
                        length: p.lengths[w],
                        boundary_length: p.lengths[b],
                    });
                }
            }
        }
    } else {
        return PurityReport {
            pass: false,
            strata: p.len(),
            checked_pairs: 0,
            violations,
            order_defects: vec!["relation matrix not available".into()],
        };
    }
    PurityReport { pass: violations.is_empty() && order_defects.is_empty(), strata: p.len(), checked_pairs: checked, violations, order_defects }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisQuotient {
    /// Orbits as sorted lists of carrier indices, ordered by their first element.
    pub orbits: Vec<Vec<usize>>,
    pub induced_leq: Vec<Vec<bool>>,
}

impl GaloisQuotient {
    pub fn orbit_of(&self, a: usize) -> usize {
        self.orbits.iter().position(|o| o.contains(&a)).expect("partition")
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.orbits.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !(self.induced_leq[a][b] && self.induced_leq[b][a])))
    }
}

/// The action of a diagram automorphism on `^I W`, as a map of carrier indices.
pub fn delta_action(p: &StratumPoset, g: &WeylGroup, delta: &[usize]) -> Result<Vec<usize>, ZipError> {
    g.check_graph_automorphism(delta)?;
    let pos: HashMap<&WeylElement, usize> = p.carrier.iter().enumerate().map(|(k, w)| (w, k)).collect();
    p.carrier
        .iter()
        .map(|w| {
            let img = g.apply_delta_unchecked(delta, w);
            pos.get(&img).copied().ok_or_else(|| ZipError::BadAction(format!("{w} leaves ^I W")))
        })
        .collect()
}

/// Orbit partition of `^I W` under an order-preserving permutation and the induced order.
pub fn galois_quotient(p: &StratumPoset, action: &[usize]) -> Result<GaloisQuotient, ZipError> {
    let n = p.len();
    if action.len() != n {
        return Err(ZipError::BadAction("wrong length".into()));
    }
    let mut seen = vec![false; n];
    for &a in action {
        if a >= n || seen[a] {
            return Err(ZipError::BadAction("not a permutation of ^I W".into()));
        }
        seen[a] = true;
    }
    let r = p.leq.as_ref().ok_or_else(|| ZipError::BadAction("relation matrix not available".into()))?;
    for a in 0..n {
        for b in 0..n {
            if r[a][b] != r[action[a]][action[b]] {
                return Err(ZipError::BadAction(format!("order not preserved at {:?} {:?}", p.words[a], p.words[b])));
            }
        }
    }
    let mut orbit_id = vec![usize::MAX; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if orbit_id[start] != usize::MAX {
            continue;
        }
        let mut orbit = vec![start];
        orbit_id[start] = orbits.len();
        let mut cur = action[start];
        while cur != start {
            orbit_id[cur] = orbits.len();
            orbit.push(cur);
            cur = action[cur];
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    let m = orbits.len();
    let mut induced = vec![vec![false; m]; m];
    for a in 0..n {
        for b in 0..n {
            if r[a][b] {
                induced[orbit_id[a]][orbit_id[b]] = true;
            }
        }
    }
    Ok(GaloisQuotient { orbits, induced_leq: induced })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(rank: usize) -> WeylGroup {
        WeylGroup::new(Family::A, rank).unwrap()
    }

    fn id(rank: usize) -> Vec<usize> {
        (1..=rank).collect()
    }

    #[test]
    fn theta0_examples() {
        let g = a(1);
        let z = build_zip(&g, &Parabolic::empty(), &Parabolic::empty(), &id(1)).unwrap();
        assert_eq!(z.theta0(), &g.simple(1));
        let full = Parabolic::full(1);
        let z = build_zip(&g, &full, &full, &id(1)).unwrap();
        assert_eq!(z.theta0(), &g.identity());

        let g = a(2);
        let i = Parabolic::from_slice(&[1]);
        let err = build_zip(&g, &i, &Parabolic::from_slice(&[1]), &id(2)).unwrap_err();
        assert!(matches!(err, ZipError::PsiMismatch { .. }));
        let z = build_zip(&g, &i, &Parabolic::from_slice(&[2]), &id(2)).unwrap();
        assert_eq!(z.psi(&g.simple(1)), g.simple(2));
        assert_eq!(g.reduced_word(z.theta0()), vec![1, 2]);
    }

    #[test]
    fn theta0_is_brute_force_minimum() {
        for f in [Family::A, Family::B, Family::D] {
            let g = WeylGroup::new(f, 3).unwrap();
            for i in Parabolic::all_subsets(3) {
                for delta in g.graph_automorphisms() {
                    let z = zip_from_cocharacter(&g, &i, &delta).unwrap();
                    let di = Parabolic(i.iter().map(|k| delta[k - 1]).collect());
                    let w0 = g.longest_element();
                    let mut best: Option<WeylElement> = None;
                    for u in g.parabolic_elements(z.j()) {
                        for v in g.parabolic_elements(&di) {
                            let x = g.mul(&g.mul(&u, &w0), &v);
                            if best.as_ref().map_or(true, |b| g.length(&x) < g.length(b)) {
                                best = Some(x);
                            }
                        }
                    }
                    assert_eq!(z.theta0(), &best.unwrap());
                }
            }
        }
    }

    #[test]
    fn cocharacter_types() {
        let g = a(1);
        let z = zip_from_cocharacter(&g, &Parabolic::full(1), &id(1)).unwrap();
        assert_eq!(z.j(), &Parabolic::full(1));
        let g = a(3);
        let z = zip_from_cocharacter(&g, &Parabolic::from_slice(&[1]), &id(3)).unwrap();
        assert_eq!(z.j(), &Parabolic::from_slice(&[3]));
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(3)).unwrap();
        assert!(z.j().is_empty());
    }

    #[test]
    fn twisted_leq_small() {
        let g = a(1);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(1)).unwrap();
        let e = g.identity();
        let s = g.simple(1);
        assert!(z.twisted_leq(&e, &s).unwrap());
        assert!(!z.twisted_leq(&s, &e).unwrap());
        assert!(z.twisted_leq(&s, &s).unwrap());

        let g = a(2);
        let z = zip_from_cocharacter(&g, &Parabolic::from_slice(&[1]), &id(2)).unwrap();
        let p = z.stratum_poset();
        assert_eq!(p.words, vec![vec![], vec![2], vec![2, 1]]);
        let r = p.leq.as_ref().unwrap();
        assert!(r[0][1] && r[1][2] && r[0][2]);
        assert!(!r[1][0] && !r[2][1]);
        assert!(z.twisted_leq(&g.simple(1), &g.identity()).is_err());
    }

    #[test]
    fn posets_and_dimensions() {
        let g = a(1);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(1)).unwrap();
        let p = z.stratum_poset();
        assert_eq!(p.len(), 2);
        assert_eq!(p.dims, vec![3, 4]);
        assert_eq!(p.covers().unwrap(), vec![(0, 1)]);

        let g = a(2);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(2)).unwrap();
        let p = z.stratum_poset();
        assert_eq!(p.len(), 6);
        assert!(p.order_defects().is_empty());
        let top = p.maximum().unwrap();
        let mut bm = p.boundary_maximal(top);
        bm.sort_unstable();
        let len2: Vec<usize> = (0..6).filter(|&k| p.lengths[k] == 2).collect();
        assert_eq!(bm, len2);
        assert_eq!(p.closure(p.minimum().unwrap()), vec![p.minimum().unwrap()]);
        assert_eq!(p.closure(top).len(), 6);

        let g = a(3);
        let z = zip_from_cocharacter(&g, &Parabolic::from_slice(&[1, 2]), &id(3)).unwrap();
        assert_eq!(z.stratum_poset().len(), 4);
    }

    #[test]
    fn twisted_order_is_a_partial_order_everywhere() {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for rank in 1..=3 {
                let Ok(g) = WeylGroup::new(f, rank) else { continue };
                for i in Parabolic::all_subsets(rank) {
                    for delta in g.graph_automorphisms() {
                        let z = zip_from_cocharacter(&g, &i, &delta).unwrap();
                        let p = z.stratum_poset();
                        assert!(p.order_defects().is_empty(), "{} {:?} {:?}", g.name(), i, delta);
                        assert_eq!(p.len() as u128 * g.parabolic_order(&i), g.order());
                        let (lo, hi) = (p.minimum().unwrap(), p.maximum().unwrap());
                        let w0 = g.longest_element();
                        let w0i = g.longest_element_parabolic(&i);
                        assert_eq!(p.dims[hi] - p.dims[lo], g.length(&w0) - g.length(&w0i));
                        assert_eq!(p.dims[hi], z.dim_group());
                    }
                }
            }
        }
    }

    #[test]
    fn empty_type_gives_bruhat_order() {
        for f in [Family::A, Family::B, Family::D] {
            let g = WeylGroup::new(f, 3).unwrap();
            let z = zip_from_cocharacter(&g, &Parabolic::empty(), &(1..=3).collect::<Vec<_>>()).unwrap();
            let p = z.stratum_poset();
            let r = p.leq.as_ref().unwrap();
            for a in 0..p.len() {
                for b in 0..p.len() {
                    assert_eq!(r[a][b], g.bruhat_leq(&p.carrier[a], &p.carrier[b]).unwrap());
                }
            }
        }
    }

    #[test]
    fn purity_small_and_negative_control() {
        let g = a(1);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(1)).unwrap();
        assert!(z.purity_check().pass);

        let g = a(2);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(2)).unwrap();
        let mut p = z.stratum_poset();
        let n = p.len();
        let mut r = vec![vec![false; n]; n];
        for (k, row) in r.iter_mut().enumerate() {
            row[k] = true;
        }
        let e = p.index_of(&g.identity()).unwrap();
        let top = p.index_of(&g.longest_element()).unwrap();
        r[e][top] = true;
        p.leq = Some(r);
        let rep = purity_check_poset(&p);
        assert!(!rep.pass);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].length, 3);
        assert_eq!(rep.violations[0].boundary_length, 0);
    }

    #[test]
    fn export_formats() {
        let g = a(1);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(1)).unwrap();
        let p = z.stratum_poset();
        let dot = p.to_dot();
        assert_eq!(dot.matches("[label=").count(), 2);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("\"e | 0 | 3\""));
        assert!(p.export("svg").is_err());

        let g = a(3);
        let z = zip_from_cocharacter(&g, &Parabolic::from_slice(&[2]), &id(3)).unwrap();
        let p = z.stratum_poset();
        let text = p.to_json();
        let back = StratumPoset::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn galois_quotients() {
        let g = a(3);
        let z = zip_from_cocharacter(&g, &Parabolic::empty(), &id(3)).unwrap();
        let p = z.stratum_poset();
        let trivial: Vec<usize> = (0..p.len()).collect();
        let q = galois_quotient(&p, &trivial).unwrap();
        assert_eq!(q.orbits.len(), p.len());
        assert_eq!(&q.induced_leq, p.leq.as_ref().unwrap());

        let act = delta_action(&p, &g, &[3, 2, 1]).unwrap();
        let q = galois_quotient(&p, &act).unwrap();
        assert!(q.orbits.iter().all(|o| o.len() <= 2));
        assert!(q.orbits.iter().any(|o| o.len() == 2));
        assert!(q.is_antisymmetric());
        let r = p.leq.as_ref().unwrap();
        for a in 0..p.len() {
            for b in 0..p.len() {
                if r[a][b] {
                    assert!(q.induced_leq[q.orbit_of(a)][q.orbit_of(b)]);
                }
            }
        }
        let mut bad = trivial.clone();
        bad.swap(0, 1);
        assert!(galois_quotient(&p, &bad).is_err());
    }

    #[test]
    fn large_levi_skips_relation() {
        let g = a(21);
        let i = Parabolic((2..=20).collect());
        let z = zip_from_cocharacter(&g, &i, &id(21)).unwrap();
        let p = z.stratum_poset();
        assert_eq!(p.len(), 462);
        assert!(p.leq.is_none());
        let doc: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert!(doc["covers"].is_null());
        assert_eq!(doc["strata"].as_array().unwrap().len(), 462);
    }
}
