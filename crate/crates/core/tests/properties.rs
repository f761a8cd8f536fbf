use frobpoly::encode::{build_encode_matrix, decode, encode, PartitionSpec};
use frobpoly::fft::{i_lch_butterfly, lch_butterfly, plan_butterflies};
use frobpoly::poly_basis::{basis_cvt, i_basis_cvt};
use frobpoly::{karatsuba_mul, naive_mul, BitPoly, CantorVec, FieldChoice, FieldParams, Gf64, Multiplier};
use proptest::prelude::*;

fn poly(max_bits: usize) -> impl Strategy<Value = BitPoly> {
    (1..=max_bits).prop_flat_map(|n| {
        proptest::collection::vec(any::<u64>(), n.div_ceil(64)).prop_map(move |w| BitPoly::from_words(w, n))
    })
}

fn fft() -> Multiplier {
    Multiplier::new(FieldChoice::Auto).with_fft_threshold(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_matches_schoolbook(a in poly(3000), b in poly(3000)) {
        prop_assert_eq!(fft().mul(&a, &b).unwrap(), naive_mul(&a, &b));
    }

    #[test]
    fn commutative(a in poly(5000), b in poly(5000)) {
        prop_assert_eq!(fft().mul(&a, &b).unwrap(), fft().mul(&b, &a).unwrap());
    }

    #[test]
    fn distributive(a in poly(4000), b in poly(4000), c in poly(4000)) {
        let n = b.len().max(c.len());
        let mut bc = b.clone().resized(n);
        bc ^= &c;
        let lhs = fft().mul(&a, &bc).unwrap();
        let mut rhs = fft().mul(&a, &b).unwrap().resized(lhs.len());
        rhs ^= &fft().mul(&a, &c).unwrap().resized(lhs.len());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn associative(a in poly(2000), b in poly(2000), c in poly(2000)) {
        let m = fft();
        let ab_c = m.mul(&m.mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = m.mul(&a, &m.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn fields_agree(a in poly(6000), b in poly(6000)) {
        let m64 = Multiplier::new(FieldChoice::M64).with_fft_threshold(0).mul(&a, &b).unwrap();
        let m128 = Multiplier::new(FieldChoice::M128).with_fft_threshold(0).mul(&a, &b).unwrap();
        prop_assert_eq!(&m64, &m128);
        prop_assert_eq!(m64, karatsuba_mul(&a, &b));
    }

    #[test]
    fn basis_cvt_is_linear(log in 1u32..14, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = BitPoly::random(1 << log, &mut rng);
        let g = BitPoly::random(1 << log, &mut rng);
        let mut sum = f.clone();
        sum ^= &g;
        let (mut cf, mut cg) = (f.clone(), g.clone());
        basis_cvt(&mut cf).unwrap();
        basis_cvt(&mut cg).unwrap();
        basis_cvt(&mut sum).unwrap();
        cf ^= &cg;
        prop_assert_eq!(&sum, &cf);
        i_basis_cvt(&mut sum).unwrap();
        let mut want = f;
        want ^= &g;
        prop_assert_eq!(sum, want);
    }

    #[test]
    fn butterfly_round_trip(l in 0u32..12, v in proptest::collection::vec(any::<u64>(), 4096)) {
        let p = FieldParams::<Gf64>::new().unwrap();
        let plan = plan_butterflies(&p, l, CantorVec::unit(l as usize + 32));
        let orig = v[..1 << l].to_vec();
        let mut w = orig.clone();
        lch_butterfly(&mut w, &plan).unwrap();
        i_lch_butterfly(&mut w, &plan).unwrap();
        prop_assert_eq!(w, orig);
    }

    #[test]
    fn encode_round_trip(l in 0u32..10, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = FieldParams::<Gf64>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let spec = PartitionSpec::new(64, l).unwrap();
        let a = BitPoly::random(spec.n_bits(), &mut rng);
        let v = encode(&a, &spec, &e).unwrap();
        prop_assert_eq!(decode(&v, &spec, &e).unwrap(), a);
    }
}

#[test]
fn multiplicative_identity_and_zero() {
    let a = BitPoly::from_le_bytes(&[0xde, 0xad, 0xbe, 0xef, 0x01]);
    let one = BitPoly::one();
    assert_eq!(fft().mul(&a, &one).unwrap(), a);
    let zero = BitPoly::zero(100);
    assert!(fft().mul(&a, &zero).unwrap().is_zero());
    assert_eq!(fft().mul(&a, &BitPoly::zero(0)).unwrap().len(), 0);
}
