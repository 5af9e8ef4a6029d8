//! Dimensions read off from point counts over `F_{q^s}`, `s = 1, 2, …`.

use serde::Serialize;

use super::{LabError, StandardForms, ZipDatumGroupLevel};
use crate::coxeter::{Family, WeylGroup};
use crate::zipdatum::zip_from_cocharacter;

/// `round(log_q(size_{s+1}/size_s))` for each consecutive pair.
pub fn growth_exponents(sizes: &[u128], q: u32) -> Vec<i64> {
    sizes
        .windows(2)
        .map(|w| ((w[1] as f64 / w[0] as f64).ln() / (q as f64).ln()).round() as i64)
        .collect()
}

/// Growth degree of `|O(F_{q^s})|`; the last two exponents must agree.
pub fn dimension_estimate(sizes: &[u128], q: u32) -> Result<i64, LabError> {
    if sizes.len() < 3 {
        return Err(LabError::TooFewSizes(3));
    }
    if sizes.contains(&0) {
        return Err(LabError::InconsistentGrowth(vec![]));
    }
    let e = growth_exponents(sizes, q);
    let k = e.len();
    if e[k - 1] == e[k - 2] {
        Ok(e[k - 1])
    } else {
        Err(LabError::InconsistentGrowth(e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumGrowth {
    pub word: Vec<usize>,
    pub length: usize,
    /// `dim P + ℓ(w)` with the `GL` convention.
    pub expected: usize,
    pub sizes: Vec<u128>,
    pub exponents: Vec<i64>,
    pub estimate: Option<i64>,
}

impl StratumGrowth {
    pub fn agrees(&self) -> bool {
        self.estimate == Some(self.expected as i64)
    }
}

/// Point counts of every stratum of the `GL_n` datum over `F_{q^s}`, `s ∈ exts`, and their growth.
pub fn stratum_growth(blocks: &[usize], q: u32, exts: &[u32]) -> Result<Vec<StratumGrowth>, LabError> {
    let d = ZipDatumGroupLevel::gl(blocks)?;
    let sf = StandardForms::gl(blocks)?;
    let n = d.n;
    let g = WeylGroup::new(Family::A, n - 1).map_err(|e| LabError::BadDatum(e.to_string()))?;
    let delta: Vec<usize> = (1..n).collect();
    let z = zip_from_cocharacter(&g, &super::datum::block_parabolic(blocks), &delta)
        .map_err(|e| LabError::BadDatum(e.to_string()))?
        .with_gl_center(true);
    let mut out = Vec::new();
    for k in 0..sf.len() {
        let w = super::datum::weyl_of_perm(&g, &sf.strata[k]);
        let expected = z.stratum_dimension(&w).map_err(|e| LabError::BadDatum(e.to_string()))?;
        let sizes = exts
            .iter()
            .map(|&s| d.stratum_count(&sf.reps[k], (q as u128).pow(s)))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(StratumGrowth {
            word: sf.words[k].clone(),
            length: sf.lengths[k],
            expected,
            exponents: growth_exponents(&sizes, q),
            estimate: dimension_estimate(&sizes, q).ok(),
            sizes,
        });
    }
    Ok(out)
}
