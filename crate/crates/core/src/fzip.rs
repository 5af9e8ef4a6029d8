//! Concrete F-zips over finite fields.
//!
//! An F-zip of rank `n` over `F_{q^s}` is stored as two filtrations of
//! `F_{q^s}^n` by canonical column spans and, for every weight `i`, the matrix
//! of the `q`-semilinear isomorphism `φ_i: σ*gr_C^i → gr^D_i` with respect to
//! the canonical graded bases (see [`FZipConcrete::gr_c_basis`]).
//!
//! Filtration lists follow a covering rule: a listed `C^i` stays in force for
//! the unlisted indices up to the next listed one. `C` must start at the whole
//! space and end at zero, `D` must start at zero and end at the whole space.
//! The dual uses `C^i(M^∨) = (C^{1-i}M)^⊥` and `D_i(M^∨) = (D_{-i-1}M)^⊥`, which
//! makes the dual of the Tate zip of weight `d` the Tate zip of weight `-d`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{Family, Parabolic, WeylGroup};
use crate::grouplab::datum::{block_parabolic, Located};
use crate::grouplab::field::{Fe, FiniteField};
use crate::grouplab::mat::Mat;
use crate::grouplab::{LabError, StandardForms, ZipDatumGroupLevel};
use crate::zipdatum::{zip_from_cocharacter, StratumPoset, ZipError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FZipError {
    #[error("invalid filtration: {0}")]
    Filtration(String),
    #[error("graded ranks differ: C gives {c:?}, D gives {d:?}")]
    RankMismatch { c: BTreeMap<i64, usize>, d: BTreeMap<i64, usize> },
    #[error("invalid phi: {0}")]
    Phi(String),
    #[error("the two zips live over different fields")]
    FieldMismatch,
    #[error("not a level-1 Dieudonné module: {0}")]
    ImKerMismatch(String),
    #[error("no standard representative reached up to extension degree {0}")]
    Undetermined(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Zip(#[from] ZipError),
}

/// The function `n̄`: weight ↦ rank of the graded piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FZipType {
    pub n_of: BTreeMap<i64, usize>,
}

impl FZipType {
    pub fn new(pairs: &[(i64, usize)]) -> FZipType {
        let mut n_of = BTreeMap::new();
        for &(i, r) in pairs {
            if r > 0 {
                *n_of.entry(i).or_insert(0) += r;
            }
        }
        FZipType { n_of }
    }

    pub fn total_rank(&self) -> usize {
        self.n_of.values().sum()
    }

    /// Block sizes in increasing weight order.
    pub fn blocks(&self) -> Vec<usize> {
        self.n_of.values().copied().filter(|&r| r > 0).collect()
    }

    pub fn convolve(&self, other: &FZipType) -> FZipType {
        let mut pairs = Vec::new();
        for (&i, &a) in &self.n_of {
            for (&j, &b) in &other.n_of {
                pairs.push((i + j, a * b));
            }
        }
        FZipType::new(&pairs)
    }

    pub fn dual(&self) -> FZipType {
        FZipType::new(&self.n_of.iter().map(|(&i, &r)| (-i, r)).collect::<Vec<_>>())
    }
}

/// `(n, I)` with `I` the simple reflections of the block-diagonal Levi.
pub fn type_to_parabolic(t: &FZipType) -> Result<(usize, Parabolic), FZipError> {
    let n = t.total_rank();
    if n == 0 {
        return Err(FZipError::Filtration("type has total rank zero".into()));
    }
    Ok((n, block_parabolic(&t.blocks())))
}

/// Stratum poset of `GL_n` for the given type, δ trivial.
pub fn enumerate_strata(t: &FZipType) -> Result<StratumPoset, FZipError> {
    let (n, i) = type_to_parabolic(t)?;
    let g = WeylGroup::new(Family::A, n - 1).map_err(ZipError::from)?;
    let delta: Vec<usize> = (1..n).collect();
    Ok(zip_from_cocharacter(&g, &i, &delta)?.with_gl_center(true).stratum_poset())
}

#[derive(Debug, Clone)]
pub struct FZipConcrete {
    field: FiniteField,
    n: usize,
    c: BTreeMap<i64, Mat>,
    d: BTreeMap<i64, Mat>,
    phi: BTreeMap<i64, Mat>,
}

fn kron_vec(f: &FiniteField, u: &[Fe], v: &[Fe]) -> Vec<Fe> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| f.mul(a, b))).collect()
}

fn kron_span(f: &FiniteField, a: &Mat, b: &Mat) -> Mat {
    let mut cols = Vec::new();
    for j in 0..a.cols {
        for k in 0..b.cols {
            cols.push(kron_vec(f, &a.col(j), &b.col(k)));
        }
    }
    Mat::from_cols(a.rows * b.rows, &cols)
}

/// Coordinates of `v` on `basis` modulo `span(modulo)`.
fn coords_mod(f: &FiniteField, basis: &Mat, modulo: &Mat, v: &[Fe]) -> Option<Vec<Fe>> {
    let sol = f.solve(&basis.hcat(modulo), v)?;
    Some(sol[..basis.cols].to_vec())
}

fn sum_spans(f: &FiniteField, n: usize, parts: &[Mat]) -> Mat {
    let all = parts.iter().fold(Mat::zeros(n, 0), |acc, m| acc.hcat(m));
    f.col_span(&all)
}

impl FZipConcrete {
    /// Checks every invariant and canonicalizes the filtrations.
    pub fn new(
        field: FiniteField,
        n: usize,
        c: Vec<(i64, Mat)>,
        d: Vec<(i64, Mat)>,
        phi: Vec<(i64, Mat)>,
    ) -> Result<Self, FZipError> {
        if n == 0 {
            return Err(FZipError::Filtration("rank must be positive".into()));
        }
        let canon = |name: &str, list: Vec<(i64, Mat)>| -> Result<BTreeMap<i64, Mat>, FZipError> {
            let mut out = BTreeMap::new();
            for (i, m) in list {
                if m.rows != n || m.a.iter().any(|&x| x >= field.size()) {
                    return Err(FZipError::Filtration(format!("{name}[{i}] is not a set of vectors in F^{n}")));
                }
                if out.insert(i, field.col_span(&m)).is_some() {
                    return Err(FZipError::Filtration(format!("{name}[{i}] listed twice")));
                }
            }
            if out.is_empty() {
                return Err(FZipError::Filtration(format!("{name} is empty")));
            }
            Ok(out)
        };
        let c = canon("C", c)?;
        let d = canon("D", d)?;
        let dims = |m: &BTreeMap<i64, Mat>| m.values().map(|x| x.cols).collect::<Vec<_>>();
        let (cd, dd) = (dims(&c), dims(&d));
        if cd[0] != n || *cd.last().unwrap() != 0 {
            return Err(FZipError::Filtration("C must start at the whole space and end at zero".into()));
        }
        if dd[0] != 0 || *dd.last().unwrap() != n {
            return Err(FZipError::Filtration("D must start at zero and end at the whole space".into()));
        }
        let cv: Vec<(&i64, &Mat)> = c.iter().collect();
        for w in cv.windows(2) {
            if !field.span_contains(w[0].1, w[1].1) {
                return Err(FZipError::Filtration(format!("C^{} is not contained in C^{}", w[1].0, w[0].0)));
            }
        }
        let dv: Vec<(&i64, &Mat)> = d.iter().collect();
        for w in dv.windows(2) {
            if !field.span_contains(w[1].1, w[0].1) {
                return Err(FZipError::Filtration(format!("D_{} is not contained in D_{}", w[0].0, w[1].0)));
            }
        }
        let mut z = FZipConcrete { field, n, c, d, phi: BTreeMap::new() };
        let (tc, td) = (z.type_from_c(), z.type_from_d());
        if tc != td {
            return Err(FZipError::RankMismatch { c: tc.n_of, d: td.n_of });
        }
        let mut map = BTreeMap::new();
        for (i, m) in phi {
            if map.insert(i, m).is_some() {
                return Err(FZipError::Phi(format!("phi_{i} listed twice")));
            }
        }
        if map.keys().copied().collect::<Vec<_>>() != tc.n_of.keys().copied().collect::<Vec<_>>() {
            return Err(FZipError::Phi(format!(
                "phi given for weights {:?}, type has weights {:?}",
                map.keys().collect::<Vec<_>>(),
                tc.n_of.keys().collect::<Vec<_>>()
            )));
        }
        for (i, m) in &map {
            let r = tc.n_of[i];
            if m.rows != r || m.cols != r || m.a.iter().any(|&x| x >= z.field.size()) || !z.field.is_invertible(m) {
                return Err(FZipError::Phi(format!("phi_{i} must be an invertible {r}×{r} matrix")));
            }
        }
        z.phi = map;
        Ok(z)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c_at(&self, i: i64) -> Mat {
        match self.c.range(..=i).next_back() {
            Some((_, m)) => m.clone(),
            None => Mat::identity(self.n),
        }
    }

    pub fn d_at(&self, i: i64) -> Mat {
        match self.d.range(..=i).next_back() {
            Some((_, m)) => m.clone(),
            None => Mat::zeros(self.n, 0),
        }
    }

    fn c_range(&self) -> (i64, i64) {
        (*self.c.keys().next().unwrap(), *self.c.keys().next_back().unwrap())
    }

    fn d_range(&self) -> (i64, i64) {
        (*self.d.keys().next().unwrap(), *self.d.keys().next_back().unwrap())
    }

    fn type_from_c(&self) -> FZipType {
        let (lo, hi) = self.c_range();
        FZipType::new(&(lo..hi).map(|i| (i, self.c_at(i).cols - self.c_at(i + 1).cols)).collect::<Vec<_>>())
    }

    fn type_from_d(&self) -> FZipType {
        let (lo, hi) = self.d_range();
        FZipType::new(&(lo + 1..=hi).map(|i| (i, self.d_at(i).cols - self.d_at(i - 1).cols)).collect::<Vec<_>>())
    }

    pub fn zip_type(&self) -> FZipType {
        self.type_from_c()
    }

    pub fn phi(&self, i: i64) -> Option<&Mat> {
        self.phi.get(&i)
    }

    /// Canonical lifts of a basis of `gr_C^i = C^i / C^{i+1}`.
    pub fn gr_c_basis(&self, i: i64) -> Mat {
        self.field.complement_in(&self.c_at(i + 1), &self.c_at(i))
    }

    /// Canonical lifts of a basis of `gr^D_i = D_i / D_{i-1}`.
    pub fn gr_d_basis(&self, i: i64) -> Mat {
        self.field.complement_in(&self.d_at(i - 1), &self.d_at(i))
    }

    /// A lift in `D_i` of `φ_i(σ v)` for `v ∈ C^i`.
    pub fn apply_phi(&self, i: i64, v: &[Fe]) -> Option<Vec<Fe>> {
        let f = &self.field;
        let m = self.phi.get(&i)?;
        let a = coords_mod(f, &self.gr_c_basis(i), &self.c_at(i + 1), v)?;
        let sa: Vec<Fe> = a.iter().map(|&x| f.frob(x, 1)).collect();
        Some(f.mat_vec(&self.gr_d_basis(i), &f.mat_vec(m, &sa)))
    }

    /// Matrices of `φ` on canonical bases from a rule giving a lift of `φ_i(σ r)` for each basis lift `r`.
    fn phi_from(&self, img: impl Fn(i64, &[Fe]) -> Result<Vec<Fe>, FZipError>) -> Result<BTreeMap<i64, Mat>, FZipError> {
        let f = &self.field;
        let mut out = BTreeMap::new();
        for &i in self.zip_type().n_of.keys() {
            let cb = self.gr_c_basis(i);
            let db = self.gr_d_basis(i);
            let lower = self.d_at(i - 1);
            let mut cols = Vec::new();
            for k in 0..cb.cols {
                let y = img(i, &cb.col(k))?;
                cols.push(coords_mod(f, &db, &lower, &y).ok_or_else(|| FZipError::Phi(format!("image of phi_{i} leaves D_{i}")))?);
            }
            let m = Mat::from_cols(db.cols, &cols);
            if !f.is_invertible(&m) {
                return Err(FZipError::Phi(format!("induced phi_{i} is not invertible")));
            }
            out.insert(i, m);
        }
        Ok(out)
    }

    fn with_phi(mut self, img: impl Fn(i64, &[Fe]) -> Result<Vec<Fe>, FZipError>) -> Result<Self, FZipError> {
        self.phi = self.phi_from(img)?;
        Ok(self)
    }

    /// Rank-one zip of weight `d`.
    pub fn tate(field: &FiniteField, d: i64) -> FZipConcrete {
        let one = Mat::identity(1);
        let zero = Mat::zeros(1, 0);
        FZipConcrete::new(
            field.clone(),
            1,
            vec![(d, one.clone()), (d + 1, zero.clone())],
            vec![(d - 1, zero), (d, one.clone())],
            vec![(d, one)],
        )
        .expect("the Tate zip is well formed")
    }

    /// Image under `h ∈ GL_n`: filtrations moved by `h`, `φ` conjugated.
    pub fn transform(&self, h: &Mat) -> Result<FZipConcrete, FZipError> {
        let f = &self.field;
        let hinv = f.inverse(h).ok_or(LabError::Singular)?;
        let c = self.c.iter().map(|(&i, m)| (i, f.mat_mul(h, m))).collect();
        let d = self.d.iter().map(|(&i, m)| (i, f.mat_mul(h, m))).collect();
        let phi = self.phi.iter().map(|(&i, m)| (i, m.clone())).collect();
        let moved = FZipConcrete::new(f.clone(), self.n, c, d, phi)?;
        moved.with_phi(|i, r| {
            let v = f.mat_vec(&hinv, r);
            let y = self.apply_phi(i, &v).ok_or_else(|| FZipError::Phi("transform".into()))?;
            Ok(f.mat_vec(h, &y))
        })
    }

    pub fn tensor(&self, other: &FZipConcrete) -> Result<FZipConcrete, FZipError> {
        if self.field.spec() != other.field.spec() {
            return Err(FZipError::FieldMismatch);
        }
        let f = &self.field;
        let n = self.n * other.n;
        let (ca, cb) = (self.c_range(), other.c_range());
        let c: Vec<(i64, Mat)> = (ca.0 + cb.0..=ca.1 + cb.1)
            .map(|i| {
                let parts: Vec<Mat> = (ca.0..=ca.1).map(|j| kron_span(f, &self.c_at(j), &other.c_at(i - j))).collect();
                (i, sum_spans(f, n, &parts))
            })
            .collect();
        let (da, db) = (self.d_range(), other.d_range());
        let d: Vec<(i64, Mat)> = (da.0 + db.0..=da.1 + db.1)
            .map(|i| {
                let parts: Vec<Mat> = (da.0..=da.1).map(|j| kron_span(f, &self.d_at(j), &other.d_at(i - j))).collect();
                (i, sum_spans(f, n, &parts))
            })
            .collect();
        let t = self.zip_type().convolve(&other.zip_type());
        let placeholder = t.n_of.iter().map(|(&i, &r)| (i, Mat::identity(r))).collect();
        let out = FZipConcrete::new(f.clone(), n, c, d, placeholder)?;
        let c_next = |i: i64| out.c_at(i + 1);
        let pieces = |i: i64| -> Vec<(i64, Mat, Mat)> {
            self.zip_type()
                .n_of
                .keys()
                .filter(|&&j| other.zip_type().n_of.contains_key(&(i - j)))
                .map(|&j| (j, self.gr_c_basis(j), other.gr_c_basis(i - j)))
                .collect()
        };
        let phi = out.phi_from(|i, r| {
            let ps = pieces(i);
            let basis = ps.iter().fold(Mat::zeros(n, 0), |acc, (_, a, b)| acc.hcat(&kron_span(f, a, b)));
            let coef = coords_mod(f, &basis, &c_next(i), r).ok_or_else(|| FZipError::Phi("tensor decomposition".into()))?;
            let mut y = vec![0; n];
            let mut k = 0;
            for (j, a, b) in &ps {
                for s in 0..a.cols {
                    let pa = self.apply_phi(*j, &a.col(s)).unwrap();
                    for t in 0..b.cols {
                        let pb = other.apply_phi(i - j, &b.col(t)).unwrap();
                        let term = kron_vec(f, &pa, &pb);
                        let cq = f.frob(coef[k], 1);
                        for (yy, tt) in y.iter_mut().zip(&term) {
                            *yy = f.add(*yy, f.mul(cq, *tt));
                        }
                        k += 1;
                    }
                }
            }
            Ok(y)
        })?;
        Ok(FZipConcrete { phi, ..out })
    }

    pub fn dual(&self) -> Result<FZipConcrete, FZipError> {
        let f = &self.field;
        let n = self.n;
        let (clo, chi) = self.c_range();
        let (dlo, dhi) = self.d_range();
        let c: Vec<(i64, Mat)> = (1 - chi..=1 - clo).map(|i| (i, f.annihilator(&self.c_at(1 - i)))).collect();
        let d: Vec<(i64, Mat)> = (-dhi - 1..=-dlo - 1).map(|i| (i, f.annihilator(&self.d_at(-i - 1)))).collect();
        let t = self.zip_type().dual();
        let placeholder = t.n_of.iter().map(|(&i, &r)| (i, Mat::identity(r))).collect();
        let out = FZipConcrete::new(f.clone(), n, c, d, placeholder)?;
        let phi = out.phi_from(|i, fv| {
            // ⟨φ^∨(σf), φ(σv)⟩ = σ⟨f, v⟩ on gr^{-i}, and φ^∨(σf) kills D_{-i-1}.
            let low = self.d_at(-i - 1);
            let vs = self.gr_c_basis(-i);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for k in 0..low.cols {
                rows.push(low.col(k));
                rhs.push(0);
            }
            for k in 0..vs.cols {
                let v = vs.col(k);
                rows.push(self.apply_phi(-i, &v).unwrap());
                rhs.push(f.frob(f.dot(fv, &v), 1));
            }
            f.solve(&Mat::from_rows(&rows), &rhs).ok_or_else(|| FZipError::Phi("dual pairing has no solution".into()))
        })?;
        Ok(FZipConcrete { phi, ..out })
    }

    /// `g = b_C^{-1}·b_D`, with `b_C` the graded lifts of `C` in increasing weight order and `b_D` their `φ`-images.
    pub fn group_element(&self) -> Mat {
        let f = &self.field;
        let mut bc = Mat::zeros(self.n, 0);
        let mut bd = Mat::zeros(self.n, 0);
        for (&i, m) in &self.phi {
            bc = bc.hcat(&self.gr_c_basis(i));
            bd = bd.hcat(&f.mat_mul(&self.gr_d_basis(i), m));
        }
        f.mat_mul(&f.inverse(&bc).expect("graded lifts form a basis"), &bd)
    }

    pub fn classify(&self, max_ext: u32) -> Result<StratumLabel, FZipError> {
        let blocks = self.zip_type().blocks();
        let d = ZipDatumGroupLevel::gl(&blocks)?;
        let sf = StandardForms::gl(&blocks)?;
        let g = self.group_element();
        match sf.locate(&d, &self.field, &g, max_ext)? {
            Located::Found { stratum, ext, explored } => Ok(StratumLabel {
                word: sf.words[stratum].clone(),
                length: sf.lengths[stratum],
                max_length: *sf.lengths.iter().max().unwrap(),
                strata: sf.len(),
                ext,
                explored,
                element: g.to_rows(),
            }),
            Located::Undetermined { .. } => Err(FZipError::Undetermined(max_ext)),
        }
    }

    pub fn to_json(&self) -> String {
        let f = &self.field;
        let spec = f.spec();
        let doc = FZipDoc {
            p: spec.p,
            q: spec.q,
            ext_deg: spec.ext,
            n: self.n,
            c: self.c.iter().map(|(&i, m)| FiltrationDoc { i, cols: m.cols_vec() }).collect(),
            d: self.d.iter().map(|(&i, m)| FiltrationDoc { i, cols: m.cols_vec() }).collect(),
            phi: self.phi.iter().map(|(&i, m)| PhiDoc { i, matrix: m.to_rows(), frob_exp: 1 }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<FZipConcrete, FZipError> {
        let doc: FZipDoc = serde_json::from_str(text).map_err(|e| FZipError::Parse(e.to_string()))?;
        let field = FiniteField::from_q(doc.q, doc.ext_deg).map_err(FZipError::Parse)?;
        if field.p() != doc.p {
            return Err(FZipError::Parse(format!("q = {} is not a power of p = {}", doc.q, doc.p)));
        }
        let n = doc.n;
        let filt = |list: Vec<FiltrationDoc>| -> Result<Vec<(i64, Mat)>, FZipError> {
            list.into_iter()
                .map(|e| {
                    if e.cols.iter().any(|c| c.len() != n) {
                        return Err(FZipError::Filtration(format!("index {}: columns must have length {n}", e.i)));
                    }
                    Ok((e.i, Mat::from_cols(n, &e.cols)))
                })
                .collect()
        };
        let mut phi = Vec::new();
        for e in doc.phi {
            if e.frob_exp != 1 {
                return Err(FZipError::Phi(format!("phi_{} has frob_exp {}, only 1 is supported", e.i, e.frob_exp)));
            }
            let w = e.matrix.first().map_or(0, |r| r.len());
            if e.matrix.iter().any(|r| r.len() != w) {
                return Err(FZipError::Phi(format!("phi_{} is ragged", e.i)));
            }
            phi.push((e.i, Mat::from_rows(&e.matrix)));
        }
        FZipConcrete::new(field, n, filt(doc.c)?, filt(doc.d)?, phi)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FiltrationDoc {
    i: i64,
    cols: Vec<Vec<Fe>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PhiDoc {
    i: i64,
    matrix: Vec<Vec<Fe>>,
    frob_exp: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct FZipDoc {
    p: u32,
    q: u32,
    ext_deg: u32,
    n: usize,
    #[serde(rename = "C")]
    c: Vec<FiltrationDoc>,
    #[serde(rename = "D")]
    d: Vec<FiltrationDoc>,
    phi: Vec<PhiDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumLabel {
    pub word: Vec<usize>,
    pub length: usize,
    pub max_length: usize,
    pub strata: usize,
    /// Extension degree at which the standard representative was reached.
    pub ext: u32,
    pub explored: usize,
    pub element: Vec<Vec<Fe>>,
}

impl StratumLabel {
    pub fn describe(&self) -> String {
        let kind = if self.strata == 1 {
            "unique stratum"
        } else if self.length == self.max_length {
            "open stratum"
        } else if self.length == 0 {
            "closed stratum"
        } else {
            "intermediate stratum"
        };
        let w = if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|s| format!("s{s}")).collect::<Vec<_>>().join(" ")
        };
        format!("{kind}, length {} (w = {w})", self.length)
    }
}

/// F-zip of a level-one Dieudonné module `(M, F, V)` over `F_p`.
///
/// `F(v) = F_mat·σ(v)` and `V(x) = v` whenever `V_mat·x = σ(v)`; both matrices must have entries in `F_p`.
/// The filtrations are `C^1 = ker F` and `D_0 = ker V`.
pub fn dieudonne_to_fzip(field: &FiniteField, f_mat: &Mat, v_mat: &Mat) -> Result<FZipConcrete, FZipError> {
    let n = f_mat.rows;
    if f_mat.cols != n || v_mat.rows != n || v_mat.cols != n {
        return Err(FZipError::ImKerMismatch("F and V must be square of the same size".into()));
    }
    if field.q() != field.p() || f_mat.a.iter().chain(&v_mat.a).any(|&x| x >= field.p()) {
        return Err(FZipError::ImKerMismatch("F and V must be given over the prime field".into()));
    }
    let f = field;
    let ker_f = f.col_span(&f.kernel(f_mat));
    let ker_v = f.col_span(&f.kernel(v_mat));
    if f.col_span(v_mat) != ker_f {
        return Err(FZipError::ImKerMismatch("Im V differs from ker F".into()));
    }
    if f.col_span(f_mat) != ker_v {
        return Err(FZipError::ImKerMismatch("Im F differs from ker V".into()));
    }
    let full = Mat::identity(n);
    let zero = Mat::zeros(n, 0);
    let t = FZipType::new(&[(0, n - ker_f.cols), (1, ker_f.cols)]);
    let placeholder = t.n_of.iter().map(|(&i, &r)| (i, Mat::identity(r))).collect();
    let z = FZipConcrete::new(
        f.clone(),
        n,
        vec![(0, full.clone()), (1, ker_f), (2, zero.clone())],
        vec![(-1, zero), (0, ker_v), (1, full)],
        placeholder,
    )?;
    z.with_phi(|i, v| {
        let sv: Vec<Fe> = v.iter().map(|&x| f.frob(x, 1)).collect();
        match i {
            0 => Ok(f.mat_vec(f_mat, &sv)),
            _ => f.solve(v_mat, &sv).ok_or_else(|| FZipError::ImKerMismatch("σ(v) outside Im V".into())),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(q: u32, s: u32) -> FiniteField {
        FiniteField::from_q(q, s).unwrap()
    }

    fn m(rows: &[&[Fe]]) -> Mat {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn ordinary(f: &FiniteField) -> FZipConcrete {
        dieudonne_to_fzip(f, &m(&[&[1, 0], &[0, 0]]), &m(&[&[0, 0], &[0, 1]])).unwrap()
    }

    fn supersingular(f: &FiniteField) -> FZipConcrete {
        dieudonne_to_fzip(f, &m(&[&[0, 1], &[0, 0]]), &m(&[&[0, 1], &[0, 0]])).unwrap()
    }

    #[test]
    fn parabolic_of_types() {
        let (n, i) = type_to_parabolic(&FZipType::new(&[(0, 1), (1, 1)])).unwrap();
        assert_eq!((n, i.len()), (2, 0));
        let (n, i) = type_to_parabolic(&FZipType::new(&[(0, 1), (1, 20), (2, 1)])).unwrap();
        assert_eq!(n, 22);
        assert_eq!(i.to_vec(), (2..=20).collect::<Vec<_>>());
        let (_, i) = type_to_parabolic(&FZipType::new(&[(0, 4)])).unwrap();
        assert_eq!(i.to_vec(), vec![1, 2, 3]);
        assert!(type_to_parabolic(&FZipType::new(&[])).is_err());
    }

    #[test]
    fn strata_counts() {
        assert_eq!(enumerate_strata(&FZipType::new(&[(0, 1), (1, 1)])).unwrap().len(), 2);
        assert_eq!(enumerate_strata(&FZipType::new(&[(0, 2), (1, 1)])).unwrap().len(), 3);
        assert_eq!(enumerate_strata(&FZipType::new(&[(0, 1), (1, 20), (2, 1)])).unwrap().len(), 462);
    }

    #[test]
    fn tate_zips() {
        let f = ff(2, 1);
        assert_eq!(FZipConcrete::tate(&f, 5).zip_type(), FZipType::new(&[(5, 1)]));
        let t0 = FZipConcrete::tate(&f, 0);
        assert_eq!(t0.group_element(), Mat::identity(1));
        for d in [-2, 0, 3] {
            let dual = FZipConcrete::tate(&f, d).dual().unwrap();
            assert_eq!(dual.zip_type(), FZipType::new(&[(-d, 1)]));
            assert_eq!(dual.group_element(), Mat::identity(1));
        }
        let t = FZipConcrete::tate(&f, 2).tensor(&FZipConcrete::tate(&f, 3)).unwrap();
        assert_eq!(t.zip_type(), FZipType::new(&[(5, 1)]));
    }

    #[test]
    fn dieudonne_shapes_classify() {
        let f = ff(2, 1);
        let o = ordinary(&f);
        assert_eq!(o.zip_type(), FZipType::new(&[(0, 1), (1, 1)]));
        assert_eq!(o.group_element(), Mat::identity(2));
        let lo = o.classify(3).unwrap();
        assert_eq!((lo.length, lo.ext), (1, 1));
        assert!(lo.describe().starts_with("open stratum"));
        let s = supersingular(&f);
        assert_eq!(s.group_element(), m(&[&[0, 1], &[1, 0]]));
        let ls = s.classify(3).unwrap();
        assert_eq!(ls.length, 0);
        assert!(ls.describe().starts_with("closed stratum"));
    }

    #[test]
    fn dieudonne_rejects_non_exact_input() {
        let f = ff(2, 1);
        let err = dieudonne_to_fzip(&f, &Mat::zeros(2, 2), &Mat::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, FZipError::ImKerMismatch(_)));
        // F = 0 with V invertible is exact: every vector has weight one.
        let z = dieudonne_to_fzip(&f, &Mat::zeros(2, 2), &Mat::identity(2)).unwrap();
        assert_eq!(z.zip_type(), FZipType::new(&[(1, 2)]));
        let err = dieudonne_to_fzip(&f, &Mat::identity(2), &Mat::identity(2)).unwrap_err();
        assert!(matches!(err, FZipError::ImKerMismatch(_)));
    }

    #[test]
    fn classification_is_invariant_under_base_change() {
        let f = ff(3, 1);
        let gl = crate::grouplab::Pattern::full(2).points(&f).unwrap();
        for z in [ordinary(&f), supersingular(&f)] {
            let base = z.classify(3).unwrap().word;
            for h in gl.iter().step_by(5) {
                assert_eq!(z.transform(h).unwrap().classify(3).unwrap().word, base);
            }
        }
    }

    #[test]
    fn tensor_and_dual_types() {
        let f = ff(2, 1);
        let o = ordinary(&f);
        let s = supersingular(&f);
        let t = o.tensor(&s).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.zip_type(), o.zip_type().convolve(&s.zip_type()));
        assert_eq!(t.zip_type(), FZipType::new(&[(0, 1), (1, 2), (2, 1)]));
        assert_eq!(o.dual().unwrap().zip_type(), FZipType::new(&[(-1, 1), (0, 1)]));
        let unit = o.tensor(&FZipConcrete::tate(&f, 0)).unwrap();
        assert_eq!(unit.zip_type(), o.zip_type());
        assert_eq!(unit.classify(2).unwrap().word, o.classify(2).unwrap().word);
        assert_eq!(s.tensor(&FZipConcrete::tate(&f, 0)).unwrap().classify(2).unwrap().word, s.classify(2).unwrap().word);
        assert_eq!(o.dual().unwrap().classify(2).unwrap().length, 1);
        assert_eq!(s.dual().unwrap().classify(2).unwrap().length, 0);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = ff(2, 1);
        let o = ordinary(&f);
        let back = FZipConcrete::from_json(&o.to_json()).unwrap();
        assert_eq!(back.group_element(), o.group_element());
        let bad = r#"{"p":2,"q":2,"ext_deg":1,"n":2,
            "C":[{"i":0,"cols":[[1,0],[0,1]]},{"i":1,"cols":[[1,0]]},{"i":2,"cols":[]}],
            "D":[{"i":-1,"cols":[]},{"i":0,"cols":[[1,0],[0,1]]},{"i":1,"cols":[[1,0],[0,1]]}],
            "phi":[{"i":0,"matrix":[[1]],"frob_exp":1},{"i":1,"matrix":[[1]],"frob_exp":1}]}"#;
        assert!(matches!(FZipConcrete::from_json(bad), Err(FZipError::RankMismatch { .. })));
        let bad = r#"{"p":2,"q":2,"ext_deg":1,"n":1,
            "C":[{"i":0,"cols":[[1]]},{"i":1,"cols":[]}],
            "D":[{"i":-1,"cols":[]},{"i":0,"cols":[[1]]}],
            "phi":[{"i":0,"matrix":[[1]],"frob_exp":2}]}"#;
        assert!(matches!(FZipConcrete::from_json(bad), Err(FZipError::Phi(_))));
    }
}
