use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;

use ultraforms::decompose::decompose;
use ultraforms::laurent::{LaurentField, LeadingData};
use ultraforms::quadform::{self, DiagonalForm};

fn lead(field: LaurentField, coeff: u64, expo: &[i64]) -> LeadingData {
    LeadingData::new(field, coeff, expo.iter().map(|&e| BigInt::from(e)).collect()).unwrap()
}

fn bench_decompose(c: &mut Criterion) {
    let field = LaurentField::new(3, 3).unwrap();
    // a scaled basis forcing the pivot branch in every coordinate
    let basis = vec![
        lead(field, 1, &[2, 0, 0]),
        lead(field, 1, &[1, 4, 0]),
        lead(field, 1, &[0, 3, 2]),
    ];
    let a: Vec<LeadingData> = (0..6)
        .map(|i| lead(field, 1 + (i as u64 % 2), &[i - 3, 2 * i - 5, 7 - i]))
        .collect();
    c.bench_function("decompose n=3 s=6", |b| {
        b.iter(|| decompose(std::hint::black_box(&a), &basis, 2).unwrap())
    });
}

fn bench_isotropy(c: &mut Criterion) {
    let field = LaurentField::new(3, 2).unwrap();
    let basis = quadform::standard_basis(field).unwrap();
    let coeffs: Vec<LeadingData> = (0..8)
        .map(|i| lead(field, 1 + (i as u64 % 2), &[i % 2, (i / 2) % 2]))
        .collect();
    let q = DiagonalForm::from_leads(field, coeffs).unwrap();
    c.bench_function("isotropy dim=8 n=2", |b| {
        b.iter(|| quadform::is_isotropic(std::hint::black_box(&q), &basis).unwrap())
    });
    c.bench_function("springer dim=8 n=2", |b| {
        b.iter(|| quadform::is_isotropic_springer(std::hint::black_box(&q)).unwrap())
    });
}

fn bench_survey(c: &mut Criterion) {
    c.bench_function("survey p=3 n=1 d_max=4", |b| {
        b.iter(|| quadform::anisotropic_survey(3, 1, 4, 1_000_000).unwrap())
    });
}

criterion_group!(benches, bench_decompose, bench_isotropy, bench_survey);
criterion_main!(benches);
