//! Conjugation on `GL_2`: the orbit of a regular unipotent element has a
//! boundary point of codimension two inside its fiber under
//! `λ(a, b; c, d) = (a + d, ad − bc)`. This is what breaks purity once the
//! finiteness of orbits is dropped.

use serde::Serialize;

use super::dimension::dimension_estimate;
use super::field::{Fe, FiniteField};
use super::mat::Mat;
use super::{orbit_of, LabError};

pub fn lambda(f: &FiniteField, g: &Mat) -> (Fe, Fe) {
    (f.add(g.get(0, 0), g.get(1, 1)), f.det(g))
}

/// Conjugation orbit of `[[1,1],[0,1]]` in `GL_2(F_Q)`, as matrix keys.
pub fn unipotent_orbit(f: &FiniteField) -> Vec<u128> {
    let size = f.size();
    let mut gens = Vec::new();
    for &c in &f.additive_basis() {
        gens.push(Mat::from_rows(&[vec![1, c], vec![0, 1]]));
        gens.push(Mat::from_rows(&[vec![1, 0], vec![c, 1]]));
    }
    if size > 2 {
        gens.push(Mat::from_rows(&[vec![f.primitive(), 0], vec![0, 1]]));
    }
    let pairs: Vec<(Mat, Mat)> = gens.into_iter().map(|h| { let hi = f.inverse(&h).unwrap(); (h, hi) }).collect();
    let start = Mat::from_rows(&[vec![1, 1], vec![0, 1]]);
    orbit_of(start.key(size), |k| {
        let g = Mat::from_key(k, 2, size);
        pairs.iter().map(|(h, hi)| f.mat_mul(&f.mat_mul(h, &g), hi).key(size)).collect()
    })
}

/// The fiber `λ^{-1}(2, 1)`: for `b ≠ 0` the entry `c` is forced, for `b = 0` only `a = 1` works.
pub fn unipotent_fiber(f: &FiniteField) -> Vec<u128> {
    let two = f.from_int(2);
    let one = 1;
    let mut out = Vec::new();
    for a in f.elements() {
        let d = f.sub(two, a);
        let ad1 = f.sub(f.mul(a, d), one);
        for b in f.elements() {
            if b != 0 {
                let c = f.mul(ad1, f.inv(b));
                out.push(Mat::from_rows(&[vec![a, b], vec![c, d]]).key(f.size()));
            } else if ad1 == 0 {
                for c in f.elements() {
                    out.push(Mat::from_rows(&[vec![a, 0], vec![c, d]]).key(f.size()));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldRow {
    pub q: u32,
    pub orbit_size: u128,
    pub expected: u128,
    pub lambda_constant: bool,
    pub identity_in_fiber: bool,
    pub identity_in_orbit: bool,
    pub fiber_size: u128,
    pub fiber_is_orbit_plus_identity: bool,
}

impl FieldRow {
    pub fn ok(&self) -> bool {
        self.orbit_size == self.expected
            && self.lambda_constant
            && self.identity_in_fiber
            && !self.identity_in_orbit
            && self.fiber_is_orbit_plus_identity
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub q: u32,
    pub orbit_sizes: Vec<u128>,
    pub boundary_sizes: Vec<u128>,
    pub orbit_dim: i64,
    pub boundary_dim: i64,
    pub codimension: i64,
    pub ambient_dim: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub rows: Vec<FieldRow>,
    pub witness: Witness,
}

impl CounterexampleReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(FieldRow::ok) && self.witness.orbit_dim == 2 && self.witness.codimension == 2
    }
}

pub fn field_row(q: u32) -> Result<FieldRow, LabError> {
    let f = FiniteField::from_q(q, 1).map_err(LabError::Field)?;
    let size = f.size();
    let orbit = unipotent_orbit(&f);
    let fiber = unipotent_fiber(&f);
    let target = (f.from_int(2), 1);
    let id = Mat::identity(2).key(size);
    let mut rest: Vec<u128> = fiber.iter().copied().filter(|&k| k != id).collect();
    rest.sort_unstable();
    Ok(FieldRow {
        q,
        orbit_size: orbit.len() as u128,
        expected: (q as u128).pow(2) - 1,
        lambda_constant: orbit.iter().all(|&k| lambda(&f, &Mat::from_key(k, 2, size)) == target),
        identity_in_fiber: lambda(&f, &Mat::identity(2)) == target && fiber.binary_search(&id).is_ok(),
        identity_in_orbit: orbit.binary_search(&id).is_ok(),
        fiber_size: fiber.len() as u128,
        fiber_is_orbit_plus_identity: rest == orbit,
    })
}

/// Dimension count over `F_{q^s}`, `s = 1..=exts`: the orbit grows like `Q^2`, its boundary in the fiber is a point.
pub fn witness(q: u32, exts: u32) -> Result<Witness, LabError> {
    let mut orbit_sizes = Vec::new();
    let mut boundary_sizes = Vec::new();
    for s in 1..=exts {
        let f = FiniteField::from_q(q, s).map_err(LabError::Field)?;
        let orbit = unipotent_orbit(&f);
        let fiber = unipotent_fiber(&f);
        orbit_sizes.push(orbit.len() as u128);
        boundary_sizes.push((fiber.len() - orbit.len()) as u128);
    }
    let orbit_dim = dimension_estimate(&orbit_sizes, q)?;
    let boundary_dim = dimension_estimate(&boundary_sizes, q)?;
    Ok(Witness { q, orbit_sizes, boundary_sizes, orbit_dim, boundary_dim, codimension: orbit_dim - boundary_dim, ambient_dim: 4 })
}

pub fn counterexample_gl2(qs: &[u32]) -> Result<CounterexampleReport, LabError> {
    let rows = qs.iter().map(|&q| field_row(q)).collect::<Result<Vec<_>, _>>()?;
    let witness = witness(2, 4)?;
    Ok(CounterexampleReport { rows, witness })
}
