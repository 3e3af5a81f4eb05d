//! Property tests: decomposition round trips with random (including
//! non-generating) bases, isotropy invariances, splitness antisymmetry, and
//! parser round trips.

use num_bigint::BigInt;
use proptest::prelude::*;

use ultraforms::decompose::{decompose, verify_decomposition};
use ultraforms::laurent::{parse_element, LaurentElement, LaurentField, LeadingData};
use ultraforms::quadform::{self, DiagonalForm};
use ultraforms::valgroup::{rational_rank, ExponentVector};
use ultraforms::brauer;

/// A full-rank integer basis built from the identity by row additions and
/// nonzero row scalings. Scalings by multiples of l produce non-generating
/// bases (e.g. t1^2 for l = 2) that force the deep-denominator branch.
fn build_basis(n: usize, ops: &[(usize, usize, i64)], scales: &[i64]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    for &(r, r2, f) in ops {
        let (r, r2) = (r % n, r2 % n);
        if r != r2 {
            for c in 0..n {
                m[r][c] += f * m[r2][c];
            }
        }
    }
    for (row, &s) in m.iter_mut().zip(scales) {
        for x in row.iter_mut() {
            *x *= s.max(1);
        }
    }
    m.iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn lead(field: LaurentField, coeff: u64, expo: &[i64]) -> LeadingData {
    LeadingData::new(field, coeff, expo.iter().map(|&e| BigInt::from(e)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decompose_round_trip(
        p_idx in 0usize..3,
        l_idx in 0usize..2,
        n in 1usize..=3,
        ops in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..5),
        scales in prop::collection::vec(1i64..=4, 3),
        rows in prop::collection::vec(
            (1u64..13, prop::collection::vec(-20i64..=20, 3)),
            1..=6
        ),
    ) {
        let l = [2u64, 3][l_idx];
        // keep l != p
        let p = if l == 3 { [5u64, 7, 13][p_idx] } else { [3u64, 5, 7][p_idx] };
        let field = LaurentField::new(p, n).unwrap();
        let basis_vecs = build_basis(n, &ops, &scales);
        prop_assume!(
            rational_rank(
                &basis_vecs
                    .iter()
                    .map(|v| ExponentVector::from_bigints(v))
                    .collect::<Vec<_>>()
            ) == n
        );
        let basis: Vec<LeadingData> = basis_vecs
            .iter()
            .map(|v| LeadingData::new(field, 1, v.clone()).unwrap())
            .collect();
        let a: Vec<LeadingData> = rows
            .iter()
            .map(|(c, e)| lead(field, c % (p - 1) + 1, &e[..n]))
            .collect();
        let result = decompose(&a, &basis, l).unwrap();
        prop_assert!(verify_decomposition(&a, &basis, l, &result).unwrap());
        for row in &result.mu {
            for &m in row {
                prop_assert!(m < l);
            }
        }
    }

    #[test]
    fn mu_tamper_always_detected(
        n in 1usize..=2,
        rows in prop::collection::vec(
            (1u64..3, prop::collection::vec(-9i64..=9, 2)),
            1..=4
        ),
        ti in 0usize..16,
        tj in 0usize..4,
    ) {
        let field = LaurentField::new(3, n).unwrap();
        let basis: Vec<LeadingData> = (0..n)
            .map(|j| {
                let mut e = vec![0i64; n];
                e[j] = 1;
                lead(field, 1, &e)
            })
            .collect();
        let a: Vec<LeadingData> = rows.iter().map(|(c, e)| lead(field, *c, &e[..n])).collect();
        let mut result = decompose(&a, &basis, 2).unwrap();
        let (i, j) = (ti % a.len(), tj % n);
        result.mu[i][j] = (result.mu[i][j] + 1) % 2;
        prop_assert!(!verify_decomposition(&a, &basis, 2, &result).unwrap());
    }

    #[test]
    fn isotropy_invariances(
        coeffs in prop::collection::vec(
            (1u64..=2, 0i64..=1, 0i64..=1),
            1..=6
        ),
        perm_seed in 0usize..720,
        scale in (1u64..=2, 0i64..=1, 0i64..=1),
    ) {
        let field = LaurentField::new(3, 2).unwrap();
        let basis = quadform::standard_basis(field).unwrap();
        let mk = |cs: &[(u64, i64, i64)]| {
            DiagonalForm::from_leads(
                field,
                cs.iter().map(|&(u, e1, e2)| lead(field, u, &[e1, e2])).collect(),
            )
            .unwrap()
        };
        let base = quadform::is_isotropic(&mk(&coeffs), &basis).unwrap().0;

        // permutation invariance
        let mut permuted = coeffs.clone();
        let mut seed = perm_seed;
        for i in (1..permuted.len()).rev() {
            permuted.swap(i, seed % (i + 1));
            seed /= i + 1;
        }
        prop_assert_eq!(quadform::is_isotropic(&mk(&permuted), &basis).unwrap().0, base);

        // scaling one coefficient by a square
        let mut scaled = coeffs.clone();
        scaled[0] = (scaled[0].0, scaled[0].1 + 2, scaled[0].2 - 4);
        prop_assert_eq!(quadform::is_isotropic(&mk(&scaled), &basis).unwrap().0, base);

        // scaling the whole form by a nonzero element
        let whole: Vec<(u64, i64, i64)> = coeffs
            .iter()
            .map(|&(u, e1, e2)| (u * scale.0 % 3, e1 + scale.1, e2 + scale.2))
            .map(|(u, e1, e2)| (if u == 0 { 1 } else { u }, e1, e2))
            .collect();
        // (guard: u * s mod 3 is never 0 for u, s in {1, 2})
        prop_assert_eq!(quadform::is_isotropic(&mk(&whole), &basis).unwrap().0, base);
    }

    #[test]
    fn hyperbolic_implies_isotropic(
        coeffs in prop::collection::vec(
            (1u64..=2, 0i64..=1, 0i64..=1),
            2..=6
        ),
    ) {
        let field = LaurentField::new(3, 2).unwrap();
        let basis = quadform::standard_basis(field).unwrap();
        let q = DiagonalForm::from_leads(
            field,
            coeffs.iter().map(|&(u, e1, e2)| lead(field, u, &[e1, e2])).collect(),
        )
        .unwrap();
        if quadform::is_hyperbolic(&q, &basis).unwrap() {
            prop_assert!(quadform::is_isotropic(&q, &basis).unwrap().0);
        }
    }

    #[test]
    fn symbol_antisymmetry(
        a in (1u64..=2, 0i64..=1, 0i64..=1),
        b in (1u64..=2, 0i64..=1, 0i64..=1),
    ) {
        let field = LaurentField::new(3, 2).unwrap();
        let el = |(u, e1, e2): (u64, i64, i64)| {
            LaurentElement::monomial(field, u as i64, vec![e1, e2]).unwrap()
        };
        let (ea, eb) = (el(a), el(b));
        let e = brauer::BrauerExpr::new(
            field,
            2,
            vec![(ea.clone(), eb.clone(), 1), (eb, ea, 1)],
        )
        .unwrap();
        prop_assert!(brauer::is_split(&e).unwrap());
    }

    #[test]
    fn parse_print_round_trip(
        terms in prop::collection::vec(
            (prop::collection::vec(-7i64..=7, 2), 0i64..3),
            1..6
        ),
    ) {
        let field = LaurentField::new(3, 2).unwrap();
        let e = LaurentElement::from_terms(field, terms).unwrap();
        prop_assume!(!e.is_zero());
        let printed = e.to_string();
        let reparsed = parse_element(&printed, field).unwrap();
        prop_assert_eq!(&e, &reparsed);
        prop_assert_eq!(printed.clone(), reparsed.to_string());
    }

    #[test]
    fn springer_agrees_with_block_oracle(
        coeffs in prop::collection::vec(
            (1u64..=2, 0i64..=3, -2i64..=2),
            1..=5
        ),
    ) {
        let field = LaurentField::new(3, 2).unwrap();
        let basis = quadform::standard_basis(field).unwrap();
        let q = DiagonalForm::from_leads(
            field,
            coeffs.iter().map(|&(u, e1, e2)| lead(field, u, &[e1, e2])).collect(),
        )
        .unwrap();
        prop_assert_eq!(
            quadform::is_isotropic(&q, &basis).unwrap().0,
            quadform::is_isotropic_springer(&q).unwrap()
        );
    }
}
