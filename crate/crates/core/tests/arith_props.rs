use ellchi_core::arith::{parse_polynomial, parse_rational_function, parse_series};
use ellchi_core::{
    DenominatorFactor, Monomial, Polynomial, RationalFunction, Scalar, TruncatedSeries,
};
use proptest::prelude::*;

const ARITY: usize = 2;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Scalar::new(a.into(), b.into()))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u32..4, 0u32..4), scalar()), 0..5).prop_map(|terms| {
        Polynomial::from_terms(
            ARITY,
            terms
                .into_iter()
                .map(|((a, b), c)| (Monomial::from_exponents(&[a, b]), c)),
        )
    })
}

const VOCABULARY: [&[i64]; 5] = [&[1, -1], &[1, 1], &[1, 0, 1], &[1, 1, 1], &[1, -1, 1]];

fn factor() -> impl Strategy<Value = DenominatorFactor> {
    (0..ARITY, 0..VOCABULARY.len(), 1u32..=2).prop_map(|(v, k, e)| {
        DenominatorFactor::new(Polynomial::univariate(ARITY, v, VOCABULARY[k]), e)
    })
}

fn rational_function() -> impl Strategy<Value = RationalFunction> {
    (polynomial(), prop::collection::vec(factor(), 0..3))
        .prop_map(|(num, den)| RationalFunction::new(num, den).unwrap())
}

fn point() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(scalar(), ARITY)
}

fn expand(f: &RationalFunction) -> TruncatedSeries {
    f.taylor_expand(&[6, 6])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_ring_laws(a in polynomial(), b in polynomial(), c in polynomial()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn rational_function_ring_laws(
        a in rational_function(),
        b in rational_function(),
        c in rational_function(),
    ) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn normalize_is_idempotent_and_keeps_values(num in polynomial(), den in prop::collection::vec(factor(), 0..3), x in point()) {
        let raw_value = {
            let mut d = Scalar::from_integer(1.into());
            let mut pole = false;
            for f in &den {
                let v = f.polynomial.eval(&x).unwrap();
                pole |= v == Scalar::from_integer(0.into());
                for _ in 0..f.exponent {
                    d *= v.clone();
                }
            }
            (!pole).then(|| num.eval(&x).unwrap() / d)
        };
        let f = RationalFunction::new(num.clone(), den).unwrap();
        prop_assert_eq!(f.clone().normalize(), f.clone());
        if let Some(want) = raw_value {
            prop_assert_eq!(f.eval_at(&x).unwrap(), want);
        }
    }

    #[test]
    fn taylor_expansion_is_a_ring_homomorphism(a in rational_function(), b in rational_function()) {
        let (sa, sb) = (expand(&a), expand(&b));
        prop_assert_eq!(expand(&(&a * &b)), sa.checked_mul(&sb).unwrap());
        prop_assert_eq!(expand(&(&a + &b)), sa.checked_add(&sb).unwrap());
    }

    #[test]
    fn regular_part_reassembles(f in rational_function(), v in 0..ARITY) {
        let g = f.extract_regular_part(v).unwrap();
        let var = RationalFunction::from_polynomial(Polynomial::var(ARITY, v));
        prop_assert_eq!(&(&g * &var) + &f.substitute_zero(v), f);
    }

    #[test]
    fn inversion_is_an_involution(f in rational_function(), v in 0..ARITY) {
        let Ok(g) = f.invert_variable(v) else { return Ok(()); };
        prop_assert_eq!(g.clone().normalize(), g.clone());
        let Ok(h) = g.invert_variable(v) else { return Ok(()); };
        prop_assert_eq!(h, f);
    }

    #[test]
    fn serialization_round_trips(p in polynomial(), f in rational_function(), c in scalar()) {
        prop_assert_eq!(parse_polynomial(&p.to_string(), ARITY).unwrap(), p);
        prop_assert_eq!(parse_rational_function(&f.to_string(), ARITY).unwrap(), f.clone());
        prop_assert_eq!(ellchi_core::arith::parse_scalar(&c.to_string()).unwrap(), c);
        let s = f.taylor_expand_bounded(&[5, 4], Some(7));
        prop_assert_eq!(parse_series(&s.to_string()).unwrap(), s);
    }
}

/// Regular at 0 and at infinity and vanishing at both, so inversion is
/// defined in both directions.
#[test]
fn inversion_involution_on_its_domain() {
    let x = Polynomial::var(1, 0);
    let cases = [
        RationalFunction::new(
            x.clone(),
            [DenominatorFactor::new(
                Polynomial::univariate(1, 0, &[1, -1]),
                2,
            )],
        )
        .unwrap(),
        RationalFunction::new(
            &x + &x.pow(2),
            [
                DenominatorFactor::new(Polynomial::univariate(1, 0, &[1, -1]), 1),
                DenominatorFactor::new(Polynomial::univariate(1, 0, &[1, 0, 1]), 1),
            ],
        )
        .unwrap(),
        RationalFunction::new(
            x.pow(2),
            [
                DenominatorFactor::new(Polynomial::univariate(1, 0, &[1, -1]), 2),
                DenominatorFactor::new(Polynomial::univariate(1, 0, &[1, 1, 1]), 1),
            ],
        )
        .unwrap(),
    ];
    for f in cases {
        let g = f.invert_variable(0).unwrap();
        assert_eq!(g.clone().normalize(), g);
        assert_eq!(g.invert_variable(0).unwrap(), f);
    }
}
