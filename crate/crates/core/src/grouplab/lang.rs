//! Preimages under the Lang map `h ↦ h^{-1}·F(h)` on `GL_n`, by exhaustive search.

use std::collections::HashMap;

use serde::Serialize;

use super::field::FiniteField;
use super::mat::Mat;
use super::{LabError, Pattern};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LangOutcome {
    Found { ext: u32, h: Vec<Vec<u32>> },
    Undetermined { max_ext: u32 },
}

/// `h^{-1}·F(h)` with `F` the entrywise `q^exp`-power.
pub fn lang_map(f: &FiniteField, h: &Mat, exp: u32) -> Result<Mat, LabError> {
    let hinv = f.inverse(h).ok_or(LabError::Singular)?;
    Ok(f.mat_mul(&hinv, &f.mat_frob(h, exp)))
}

/// Image of the Lang map on `GL_n(F_{q^ext})`, keyed by value, with one preimage each.
pub fn lang_image(n: usize, q: u32, ext: u32, exp: u32) -> Result<(FiniteField, HashMap<u128, Mat>), LabError> {
    let f = FiniteField::from_q(q, ext).map_err(LabError::Field)?;
    let mut image = HashMap::new();
    for h in Pattern::full(n).points(&f)? {
        let g = lang_map(&f, &h, exp)?;
        image.entry(g.key(f.size())).or_insert(h);
    }
    Ok((f, image))
}

/// Some `h` over `F_{q^{s'}}`, `s | s' ≤ max_ext`, with `h^{-1}F(h) = g`.
pub fn lang_preimage(f: &FiniteField, g: &Mat, exp: u32, max_ext: u32) -> Result<LangOutcome, LabError> {
    if !f.is_invertible(g) {
        return Err(LabError::Singular);
    }
    let s = f.ext();
    let mut ext = s;
    while ext <= max_ext {
        let (big, image) = lang_image(g.rows, f.q(), ext, exp)?;
        let table = big.embedding_from(f).ok_or_else(|| LabError::Field("no embedding".into()))?;
        if let Some(h) = image.get(&big.mat_embed(&table, g).key(big.size())) {
            return Ok(LangOutcome::Found { ext, h: h.to_rows() });
        }
        ext += s;
    }
    Ok(LangOutcome::Undetermined { max_ext })
}

/// Multiplicative order of an invertible matrix.
pub fn element_order(f: &FiniteField, g: &Mat) -> u64 {
    let id = Mat::identity(g.rows);
    let mut x = g.clone();
    let mut k = 1;
    while x != id {
        x = f.mat_mul(&x, g);
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Serialize)]
pub struct LangSweepEntry {
    pub g: Vec<Vec<u32>>,
    pub order: u64,
    /// Smallest extension degree with a preimage, if any up to the bound.
    pub ext: Option<u32>,
}

/// Preimage search for every `g ∈ GL_n(F_q)` with the `q`-Frobenius, extension degrees `1..=max_ext`.
pub fn lang_sweep(n: usize, q: u32, max_ext: u32) -> Result<Vec<LangSweepEntry>, LabError> {
    let small = FiniteField::from_q(q, 1).map_err(LabError::Field)?;
    let elements = Pattern::full(n).points(&small)?;
    let mut found: Vec<Option<u32>> = vec![None; elements.len()];
    for ext in 1..=max_ext {
        let (big, image) = lang_image(n, q, ext, 1)?;
        let table = big.embedding_from(&small).ok_or_else(|| LabError::Field("no embedding".into()))?;
        for (slot, g) in found.iter_mut().zip(&elements) {
            if slot.is_none() && image.contains_key(&big.mat_embed(&table, g).key(big.size())) {
                *slot = Some(ext);
            }
        }
    }
    Ok(elements
        .iter()
        .zip(found)
        .map(|(g, ext)| LangSweepEntry { g: g.to_rows(), order: element_order(&small, g), ext })
        .collect())
}
