//! Executable square-class decomposition over the value group: given
//! nonzero elements a_1..a_s and a rank-n basis, produce generators
//! c_1..c_n, an exponent matrix mu with entries in [0, l), and l-th-power
//! parts b_i so that a_i = u_i * prod_j c_j^{mu_ij} * b_i^l with u_i a
//! unit. Everything is tracked as group words over the inputs, so the
//! certificate stays small and exact no matter how large the intermediate
//! exponents get.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{GroupWord, LaurentField, LeadingData};
use crate::valgroup::{self, ExponentVector, ValuationBasis};

/// Certificate for the decomposition of a_1..a_s over c_1..c_n.
///
/// Words are over the names `a1..as` (the inputs) and `pi1..pin` (the basis
/// monomials); see [`standard_env`].
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResult {
    /// Generators c_j, as words in the a_i and pi_j.
    pub c: Vec<GroupWord>,
    /// s x n exponent matrix, entries in [0, l).
    pub mu: Vec<Vec<u64>>,
    /// l-th power parts b_i, as words.
    pub b: Vec<GroupWord>,
    /// Residues of the unit factors u_i.
    pub u_class: Vec<u64>,
    /// Whether the valuations of the c_j are linearly independent mod l.
    /// False flags a degenerate basis (see [`crate::quadform`]).
    pub independent: bool,
}

/// Smallest positive m' with m * m' = 1 (mod l^k), by extended Euclid.
pub fn coprime_inverse(m: &BigInt, l: u64, k: u32) -> Result<BigInt> {
    let modulus = BigInt::from(l).pow(k);
    let mr = m.mod_floor(&modulus);
    let ext = mr.extended_gcd(&modulus);
    if !ext.gcd.is_one() {
        return Err(Error::Domain(format!("gcd({m}, {l}) != 1")));
    }
    Ok(ext.x.mod_floor(&modulus))
}

/// Environment binding the canonical names `a1..as` and `pi1..pin` used by
/// decomposition certificates.
pub fn standard_env(a: &[LeadingData], basis: &[LeadingData]) -> BTreeMap<String, LeadingData> {
    let mut env = BTreeMap::new();
    for (i, d) in a.iter().enumerate() {
        env.insert(format!("a{}", i + 1), d.clone());
    }
    for (j, d) in basis.iter().enumerate() {
        env.insert(format!("pi{}", j + 1), d.clone());
    }
    env
}

fn valuation_basis(basis: &[LeadingData]) -> Result<ValuationBasis> {
    ValuationBasis::new(basis.iter().map(|d| d.expo.clone()).collect())
}

fn coords_of(d: &LeadingData, basis: &ValuationBasis) -> Result<Vec<BigRational>> {
    let v = ExponentVector::from_bigints(&d.expo);
    Ok(valgroup::coordinates(&v, basis)?.0)
}

fn small_prime(l: u64) -> bool {
    if l < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= l {
        if l % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Rank over F_l of the reductions mod l of integer vectors.
fn mod_l_rank(vectors: &[Vec<BigInt>], l: u64) -> usize {
    let lb = BigInt::from(l);
    let mut m: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.mod_floor(&lb).to_u64().expect("residue fits"))
                .collect()
        })
        .collect();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let inv_mod = |x: u64| -> u64 {
        // l is prime and x != 0
        let mut r = 1u64;
        let mut b = x % l;
        let mut e = l - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % l;
            }
            b = b * b % l;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        if let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) {
            m.swap(row, pr);
            let inv = inv_mod(m[row][col]);
            for c in 0..ncols {
                m[row][c] = m[row][c] * inv % l;
            }
            for r in 0..m.len() {
                if r != row && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..ncols {
                        m[r][c] = (m[r][c] + (l - f) * m[row][c]) % l;
                    }
                }
            }
            row += 1;
            rank += 1;
        }
    }
    rank
}

struct Row {
    /// Current residual element, as a word.
    v: GroupWord,
    /// Accumulated l-th root contributions.
    h: GroupWord,
    /// Exponent applied to a_i so far (coprime to l): a_i^m = v * prod c^mu_acc * h^l.
    m: BigInt,
    mu_acc: Vec<BigInt>,
}

/// Decompose a_1..a_s over the given basis modulo l-th powers.
///
/// Coordinates are processed one at a time. In each coordinate, prime-to-l
/// denominator parts are first removed by raising rows to coprime powers
/// (valid modulo l-th powers, with the compensating root tracked exactly).
/// If all remaining exponents are integral the basis monomial itself clears
/// the coordinate; otherwise the row with the deepest l-power denominator
/// is normalized to exponent 1/l^y and used as the pivot to clear everyone
/// else. Pivot ties break to the lowest index so output is deterministic.
pub fn decompose(
    a: &[LeadingData],
    basis: &[LeadingData],
    l: u64,
) -> Result<DecompositionResult> {
    if !small_prime(l) {
        return Err(Error::Precondition(format!("l = {l} must be prime")));
    }
    let field: LaurentField = if let Some(d) = basis.first() {
        d.field()
    } else {
        return Err(Error::Precondition("empty basis".into()));
    };
    if l == field.p() {
        return Err(Error::Precondition("l = p is not allowed".into()));
    }
    let n = field.n;
    if basis.len() != n {
        return Err(Error::Precondition(format!(
            "basis must have n = {n} elements"
        )));
    }
    let vbasis = valuation_basis(basis)?;
    let env = standard_env(a, basis);

    let s = a.len();
    let mut rows: Vec<Row> = (0..s)
        .map(|i| Row {
            v: GroupWord::generator(&format!("a{}", i + 1)),
            h: GroupWord::one(),
            m: BigInt::one(),
            mu_acc: vec![BigInt::zero(); n],
        })
        .collect();
    let mut c_words: Vec<GroupWord> = Vec::with_capacity(n);

    for j in 0..n {
        // (x, y) with coordinate j of row i equal to x / l^y, after removing
        // the prime-to-l denominator part; None when the coordinate is zero.
        let split = |rows: &[Row], i: usize| -> Result<Option<(BigInt, u32, BigInt)>> {
            let d = rows[i].v.evaluate(&env, field)?;
            let r = &coords_of(&d, &vbasis)?[j];
            if r.is_zero() {
                Ok(None)
            } else {
                Ok(Some(valgroup::l_adic_split(r, l)))
            }
        };

        // remove prime-to-l denominator parts by raising to the power z
        for i in 0..s {
            if let Some((_, _, z)) = split(&rows, i)? {
                if !z.is_one() {
                    let row = &mut rows[i];
                    row.v = row.v.pow(&z);
                    row.h = row.h.pow(&z);
                    row.m *= &z;
                    for e in row.mu_acc.iter_mut() {
                        *e *= &z;
                    }
                }
            }
        }

        let mut parts: Vec<Option<(BigInt, u32)>> = Vec::with_capacity(s);
        for i in 0..s {
            parts.push(split(&rows, i)?.map(|(x, y, z)| {
                debug_assert!(z.is_one());
                (x, y)
            }));
        }
        let y_max = parts
            .iter()
            .flatten()
            .map(|(_, y)| *y)
            .max()
            .unwrap_or(0);

        let c_word = if parts.iter().all(|p| p.is_none()) || y_max == 0 {
            // Case (i): all exponents integral; the basis monomial clears
            // the coordinate. Also the degenerate s = 0 choice.
            GroupWord::generator(&format!("pi{}", j + 1))
        } else {
            // Case (ii): pick the pivot with maximal y, lowest index first.
            let pivot = parts
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.as_ref().map(|(_, y)| (i, *y)))
                .filter(|&(_, y)| y == y_max)
                .map(|(i, _)| i)
                .next()
                .expect("y_max came from some row");
            let (x_p, _) = parts[pivot].clone().expect("pivot has a coordinate");
            // renormalize the pivot exponent to 1/l^y + (l-multiple)
            let mp = coprime_inverse(&x_p, l, y_max + 1)?;
            {
                let row = &mut rows[pivot];
                row.v = row.v.pow(&mp);
                row.h = row.h.pow(&mp);
                row.m *= &mp;
                for e in row.mu_acc.iter_mut() {
                    *e *= &mp;
                }
            }
            // clear the leftover l-multiple with an exact l-th power of pi_j
            let d = rows[pivot].v.evaluate(&env, field)?;
            let r = coords_of(&d, &vbasis)?[j].clone();
            let target = BigRational::new(BigInt::one(), BigInt::from(l).pow(y_max));
            let delta = &r - &target;
            debug_assert!(delta.denom().is_one());
            let w = delta.numer() / BigInt::from(l);
            debug_assert_eq!(&w * BigInt::from(l), delta.numer().clone());
            if !w.is_zero() {
                let pi = GroupWord::generator(&format!("pi{}", j + 1));
                let lw = &w * BigInt::from(l);
                let row = &mut rows[pivot];
                row.v = row.v.mul(&pi.pow(&-&lw));
                row.h = row.h.mul(&pi.pow(&w));
            }
            rows[pivot].v.clone()
        };

        // clear coordinate j of every row with c_j
        for i in 0..s {
            if let Some((x, y, z)) = split(&rows, i)? {
                debug_assert!(z.is_one());
                let e = &x * BigInt::from(l).pow(y_max.saturating_sub(y));
                debug_assert!(y <= y_max || c_words.len() != j); // y <= y_max by choice of pivot
                let row = &mut rows[i];
                row.v = row.v.mul(&c_word.pow(&-&e));
                row.mu_acc[j] += e;
            }
            debug_assert!(split(&rows, i)?.is_none());
        }
        c_words.push(c_word);
    }

    // assemble: a_i = (v_i Π c^mu_acc h^l)^{m'} * a_i^{1 - m m'} with m m' = 1 mod l
    let mut mu = Vec::with_capacity(s);
    let mut b = Vec::with_capacity(s);
    let mut u_class = Vec::with_capacity(s);
    let lb = BigInt::from(l);
    for (i, row) in rows.iter().enumerate() {
        let m_prime = coprime_inverse(&row.m, l, 1)?;
        let q_fold = (BigInt::one() - &row.m * &m_prime) / &lb;
        let mut mu_row = Vec::with_capacity(n);
        let mut b_word = row
            .h
            .pow(&m_prime)
            .mul(&GroupWord::generator(&format!("a{}", i + 1)).pow(&q_fold));
        for j in 0..n {
            let scaled = &row.mu_acc[j] * &m_prime;
            let rem = scaled.mod_floor(&lb);
            let quot = (&scaled - &rem) / &lb;
            mu_row.push(rem.to_u64().expect("mu entry in [0, l)"));
            if !quot.is_zero() {
                b_word = b_word.mul(&c_words[j].pow(&quot));
            }
        }
        let u_word = row.v.pow(&m_prime);
        let u = u_word.evaluate(&env, field)?;
        if !u.is_unit() {
            return Err(Error::Certificate(format!(
                "residual of a{} is not a unit",
                i + 1
            )));
        }
        mu.push(mu_row);
        b.push(b_word);
        u_class.push(u.coeff);
    }

    let c_vals: Vec<Vec<BigInt>> = c_words
        .iter()
        .map(|w| Ok(w.evaluate(&env, field)?.expo))
        .collect::<Result<_>>()?;
    let independent = mod_l_rank(&c_vals, l) == n;

    Ok(DecompositionResult {
        c: c_words,
        mu,
        b,
        u_class,
        independent,
    })
}

/// Certificate check: for every i, val(a_i) = sum_j mu_ij val(c_j) +
/// l * val(b_i) exactly in Z^n, the residues match, mu entries are in
/// range, and the recorded mod-l independence flag is accurate. Everything
/// is evaluated through words, never by expanding Laurent polynomials.
pub fn verify_decomposition(
    a: &[LeadingData],
    basis: &[LeadingData],
    l: u64,
    result: &DecompositionResult,
) -> Result<bool> {
    Ok(verify_issues(a, basis, l, result)?.is_empty())
}

/// Like [`verify_decomposition`] but reports what failed.
pub fn verify_issues(
    a: &[LeadingData],
    basis: &[LeadingData],
    l: u64,
    result: &DecompositionResult,
) -> Result<Vec<String>> {
    let field = basis
        .first()
        .ok_or_else(|| Error::Precondition("empty basis".into()))?
        .field();
    let n = field.n;
    let env = standard_env(a, basis);
    let mut issues = Vec::new();
    if result.c.len() != n
        || result.mu.len() != a.len()
        || result.b.len() != a.len()
        || result.u_class.len() != a.len()
    {
        issues.push("shape mismatch".into());
        return Ok(issues);
    }
    let c_evals: Vec<LeadingData> = result
        .c
        .iter()
        .map(|w| w.evaluate(&env, field))
        .collect::<Result<_>>()?;
    for (i, d) in a.iter().enumerate() {
        let b_eval = result.b[i].evaluate(&env, field)?;
        let mut rhs_val = vec![BigInt::zero(); n];
        let mut rhs_coeff = result.u_class[i] % field.p();
        if rhs_coeff == 0 {
            issues.push(format!("u_class[{i}] is zero"));
            continue;
        }
        for (j, c) in c_evals.iter().enumerate() {
            let m = result.mu[i][j];
            if m >= l {
                issues.push(format!("mu[{i}][{j}] = {m} out of range [0, {l})"));
            }
            for (acc, e) in rhs_val.iter_mut().zip(&c.expo) {
                *acc += e * BigInt::from(m);
            }
            rhs_coeff = field
                .residue
                .mul(rhs_coeff, field.residue.pow(c.coeff, m));
        }
        for (acc, e) in rhs_val.iter_mut().zip(&b_eval.expo) {
            *acc += e * BigInt::from(l);
        }
        rhs_coeff = field
            .residue
            .mul(rhs_coeff, field.residue.pow(b_eval.coeff, l));
        if rhs_val != d.expo {
            issues.push(format!(
                "valuation identity fails for a{}: {:?} != {:?}",
                i + 1,
                d.expo,
                rhs_val
            ));
        }
        if rhs_coeff != d.coeff {
            issues.push(format!(
                "residue identity fails for a{}: {} != {}",
                i + 1,
                d.coeff,
                rhs_coeff
            ));
        }
    }
    let c_vals: Vec<Vec<BigInt>> = c_evals.iter().map(|c| c.expo.clone()).collect();
    let independent = mod_l_rank(&c_vals, l) == n;
    if independent != result.independent {
        issues.push(format!(
            "independence flag is {} but the c valuations have mod-{l} rank {}",
            result.independent,
            mod_l_rank(&c_vals, l)
        ));
    }
    Ok(issues)
}
