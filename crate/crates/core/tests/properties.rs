//! Randomized properties across modules.

use std::sync::OnceLock;

use proptest::prelude::*;

use zipstrata::coxeter::{Family, WeylGroup};
use zipstrata::fzip::FZipType;
use zipstrata::grouplab::{FiniteField, Mat, Pattern, ZipDatumGroupLevel};
use zipstrata::witt::GaloisRing;

struct Gl3 {
    f: FiniteField,
    datum: ZipDatumGroupLevel,
    lower: Vec<Mat>,
    upper: Vec<Mat>,
    all: Vec<Mat>,
}

fn gl3_f3() -> &'static Gl3 {
    static CELL: OnceLock<Gl3> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = FiniteField::from_q(3, 1).unwrap();
        Gl3 {
            datum: ZipDatumGroupLevel::gl(&[1, 1, 1]).unwrap(),
            lower: Pattern::lower_block(&[1, 1, 1]).points(&f).unwrap(),
            upper: Pattern::upper_block(&[1, 1, 1]).points(&f).unwrap(),
            all: Pattern::full(3).points(&f).unwrap(),
            f,
        }
    })
}

fn weyl(family: Family, rank: usize) -> &'static (WeylGroup, Vec<zipstrata::coxeter::WeylElement>) {
    static B4: OnceLock<(WeylGroup, Vec<zipstrata::coxeter::WeylElement>)> = OnceLock::new();
    static D4: OnceLock<(WeylGroup, Vec<zipstrata::coxeter::WeylElement>)> = OnceLock::new();
    static A4: OnceLock<(WeylGroup, Vec<zipstrata::coxeter::WeylElement>)> = OnceLock::new();
    let cell = match family {
        Family::B => &B4,
        Family::D => &D4,
        _ => &A4,
    };
    cell.get_or_init(|| {
        let g = WeylGroup::new(family, rank).unwrap();
        let el = g.elements();
        (g, el)
    })
}

fn ring() -> &'static GaloisRing {
    static R: OnceLock<GaloisRing> = OnceLock::new();
    R.get_or_init(|| GaloisRing::new(3, 3, 2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bruhat_cell_is_two_sided_invariant(a in 0usize..216, b in 0usize..216, g in 0usize..11232) {
        let c = gl3_f3();
        assert_eq!(c.lower.len(), 216);
        assert_eq!(c.all.len(), 11232);
        let y = &c.all[g];
        let moved = c.f.mat_mul(&c.f.mat_mul(&c.lower[a], y), &c.f.inverse(&c.upper[b]).unwrap());
        prop_assert_eq!(c.datum.bruhat_cell(&c.f, y).unwrap(), c.datum.bruhat_cell(&c.f, &moved).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bruhat_criterion_matches_subwords_on_b4_and_d4(x in 0usize..384, y in 0usize..384, d in any::<bool>()) {
        let (family, order) = if d { (Family::D, 192) } else { (Family::B, 384) };
        let (g, el) = weyl(family, 4);
        prop_assert_eq!(el.len(), order);
        let (v, w) = (&el[x % order], &el[y % order]);
        prop_assert_eq!(g.bruhat_leq(v, w).unwrap(), g.bruhat_leq_subword(v, w).unwrap());
    }

    #[test]
    fn length_is_subadditive(x in 0usize..120, y in 0usize..120) {
        let (g, el) = weyl(Family::A, 4);
        let (v, w) = (&el[x], &el[y]);
        let lv = g.length(v) as i64;
        let lw = g.length(w) as i64;
        let lvw = g.length(&g.mul(v, w)) as i64;
        prop_assert!(lvw <= lv + lw && lvw >= (lv - lw).abs());
        prop_assert_eq!(g.length(&g.inverse(v)), g.length(v));
        prop_assert_eq!(g.from_word(&g.reduced_word(v)), v.clone());
    }

    #[test]
    fn galois_ring_frobenius_is_a_ring_map(a in 0u32..729, b in 0u32..729) {
        let r = ring();
        prop_assert_eq!(r.size(), 729);
        prop_assert_eq!(r.frobenius(r.mul(a, b)), r.mul(r.frobenius(a), r.frobenius(b)));
        prop_assert_eq!(r.frobenius(r.add(a, b)), r.add(r.frobenius(a), r.frobenius(b)));
        prop_assert_eq!(r.frobenius(r.verschiebung(a)), r.scale_int(3, a));
        prop_assert_eq!(r.frobenius_pow(a, 3), a);
    }

    #[test]
    fn fzip_type_arithmetic(xs in prop::collection::vec((-3i64..4, 1usize..3), 1..4),
                            ys in prop::collection::vec((-3i64..4, 1usize..3), 1..4)) {
        let a = FZipType::new(&xs);
        let b = FZipType::new(&ys);
        prop_assert_eq!(a.dual().dual(), a.clone());
        prop_assert_eq!(a.convolve(&b).total_rank(), a.total_rank() * b.total_rank());
        prop_assert_eq!(a.convolve(&b), b.convolve(&a));
        prop_assert_eq!(a.convolve(&b).dual(), a.dual().convolve(&b.dual()));
    }
}

#[test]
fn field_frobenius_fixes_exactly_the_base() {
    let big = FiniteField::from_q(4, 2).unwrap();
    let fixed = big.elements().filter(|&a| big.frob(a, 1) == a).count();
    assert_eq!(fixed, 4);
    let all_gl2 = Pattern::full(2).points(&FiniteField::from_q(3, 1).unwrap()).unwrap();
    assert_eq!(all_gl2.len(), 48);
    assert!(all_gl2.iter().all(|m: &Mat| m.rows == 2));
}
