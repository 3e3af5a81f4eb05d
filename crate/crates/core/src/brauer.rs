//! Cyclic symbol algebras (a,b)_l over K: bilinear/antisymmetry rewrites,
//! decomposition into unramified and ramified parts, splitness and exact
//! index for quaternions and biquaternions, and the period-index bound.
//!
//! Brauer classes are represented as formal symbol lists; all computation is
//! at the level of l-classes of the slots, which determine the class because
//! 1-units are l-th powers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::decompose;
use crate::error::{Error, Result};
use crate::finite_field::FFElement;
use crate::laurent::{self, GroupWord, LClass, LaurentElement, LaurentField, LeadingData};
use crate::quadform::{self, DiagonalForm};

/// One symbol (a, b)_l with a multiplicity in [1, l).
#[derive(Debug, Clone)]
pub struct Symbol {
    pub a: LeadingData,
    pub b: LeadingData,
    pub multiplicity: u64,
}

/// A formal product of symbols with a common l, representing a class in
/// Br_l(K). The empty list is the trivial class.
#[derive(Debug, Clone)]
pub struct BrauerExpr {
    pub field: LaurentField,
    pub l: u64,
    pub symbols: Vec<Symbol>,
}

impl BrauerExpr {
    /// Symbols with multiplicity reduced mod l; zero multiplicities are
    /// dropped. For odd l the root of unity ω must exist, i.e. l | p - 1.
    pub fn new(
        field: LaurentField,
        l: u64,
        symbols: Vec<(LaurentElement, LaurentElement, u64)>,
    ) -> Result<Self> {
        // existence check for ω; also validates l prime, l != p
        field.residue.primitive_root_of_unity(l)?;
        let mut out = Vec::new();
        for (a, b, m) in symbols {
            let m = m % l;
            if m == 0 {
                continue;
            }
            out.push(Symbol {
                a: a.leading()?,
                b: b.leading()?,
                multiplicity: m,
            });
        }
        Ok(BrauerExpr {
            field,
            l,
            symbols: out,
        })
    }
}

/// A symbol reduced to l-class data: slot = (unit residue, exponents mod l).
type ClassSlot = (FFElement, Vec<u64>);
type ClassSym = (ClassSlot, ClassSlot, u64);

fn class_slot(d: &LeadingData, l: u64) -> ClassSlot {
    let lb = BigInt::from(l);
    (
        d.coeff,
        d.expo
            .iter()
            .map(|e| e.mod_floor(&lb).to_u64().expect("residue fits"))
            .collect(),
    )
}

/// Complete splitness decision by iterated residues, independent of
/// `symbol_decompose`: Br_l(K_k) = Br_l(K_{k-1}) ⊕ K_{k-1}*/l, and
/// (t^α u, t^β w) = (u, w) + (t, (-1)^{αβ} w^α u^{-β}) for the outermost
/// variable t. The class is split iff every level's accumulated residue is
/// an l-th-power class and the fully unramified part lands in the trivial
/// group Br_l(F_p).
pub fn is_split(expr: &BrauerExpr) -> Result<bool> {
    let syms: Vec<ClassSym> = expr
        .symbols
        .iter()
        .map(|s| {
            (
                class_slot(&s.a, expr.l),
                class_slot(&s.b, expr.l),
                s.multiplicity,
            )
        })
        .collect();
    split_rec(&expr.field, expr.l, expr.field.n, &syms)
}

fn split_rec(field: &LaurentField, l: u64, k: usize, syms: &[ClassSym]) -> Result<bool> {
    if k == 0 {
        // Br_l of a finite field is trivial
        return Ok(true);
    }
    let fp = &field.residue;
    let neg1 = fp.p() - 1;
    let mut unit_acc: FFElement = 1;
    let mut expo_acc = vec![0u64; k - 1];
    let mut unram = Vec::with_capacity(syms.len());
    for ((cu, ce), (du, de), m) in syms {
        let alpha = ce[k - 1];
        let beta = de[k - 1];
        // residue contribution ((-1)^{αβ} b'^α a'^{-β})^m with a', b' the
        // slots stripped of t_k
        let mut r = fp.pow(neg1, alpha * beta);
        r = fp.mul(r, fp.pow(*du, alpha));
        r = fp.mul(r, fp.pow(fp.inv(*cu)?, beta));
        unit_acc = fp.mul(unit_acc, fp.pow(r, *m));
        for j in 0..k - 1 {
            let term = (alpha * de[j] + beta * (l - ce[j] % l) % l) % l;
            expo_acc[j] = (expo_acc[j] + m * term) % l;
        }
        unram.push((
            (*cu, ce[..k - 1].to_vec()),
            (*du, de[..k - 1].to_vec()),
            *m,
        ));
    }
    if expo_acc.iter().any(|&e| e != 0) || !fp.is_lth_power(unit_acc, l)? {
        return Ok(false);
    }
    split_rec(field, l, k - 1, &unram)
}

#[derive(Debug, Clone, Serialize)]
pub struct UnramifiedEntry {
    /// Unit slots as words over the a_i, pi_j (valuation zero on evaluation).
    pub a: GroupWord,
    pub b: GroupWord,
    pub a_residue: FFElement,
    pub b_residue: FFElement,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RamifiedEntry {
    pub x: GroupWord,
    pub c: GroupWord,
    pub x_class: LClass,
}

/// Normal form A = A_0 ⊗ Π_j (x_j, c_j): unramified unit-unit symbols plus
/// at most n ramified symbols against the decomposition generators.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolDecomposition {
    pub unramified: Vec<UnramifiedEntry>,
    pub ramified: Vec<RamifiedEntry>,
    /// The square/l-class decomposition of all slots the rewrite is based on.
    pub certificate: decompose::DecompositionResult,
}

/// Decompose every slot over the basis, expand each symbol bilinearly, and
/// move exponents across slots via (α, β^j) = (α^j, β) and
/// (α, β) = (β^{-1}, α) until only unit-unit and (·, c_j) symbols remain.
/// The result is certified: the input tensored with the inverse of the
/// output must pass the independent splitness oracle.
pub fn symbol_decompose(expr: &BrauerExpr, basis: &[LeadingData]) -> Result<SymbolDecomposition> {
    let field = expr.field;
    let l = expr.l;
    let n = field.n;
    let mut slots = Vec::with_capacity(2 * expr.symbols.len());
    for s in &expr.symbols {
        slots.push(s.a.clone());
        slots.push(s.b.clone());
    }
    let result = decompose::decompose(&slots, basis, l)?;
    let mut env = decompose::standard_env(&slots, basis);
    env.insert(
        "neg1".to_string(),
        LeadingData::new(field, field.p() - 1, vec![BigInt::from(0); n])?,
    );

    // exact unit words U_i = a_i * b_i^{-l} * Π_j c_j^{-μ_ij}
    let unit_word = |i: usize| -> GroupWord {
        let mut w = GroupWord::generator(&format!("a{}", i + 1))
            .mul(&result.b[i].pow(&BigInt::from(-(l as i64))));
        for (j, c) in result.c.iter().enumerate() {
            let e = result.mu[i][j];
            if e != 0 {
                w = w.mul(&c.pow(&BigInt::from(-(e as i64))));
            }
        }
        w
    };

    let mut unramified = Vec::new();
    let mut x_words = vec![GroupWord::one(); n];
    for (i, s) in expr.symbols.iter().enumerate() {
        let (ia, ib) = (2 * i, 2 * i + 1);
        let ua = unit_word(ia);
        let ub = unit_word(ib);
        let m = BigInt::from(s.multiplicity);
        let ra = &result.mu[ia];
        let rb = &result.mu[ib];
        unramified.push(UnramifiedEntry {
            a_residue: ua.evaluate(&env, field)?.coeff,
            b_residue: ub.evaluate(&env, field)?.coeff,
            a: ua.clone(),
            b: ub.clone(),
            multiplicity: s.multiplicity,
        });
        for j in 0..n {
            // (U_a, c_j^{rb_j}) = (U_a^{rb_j}, c_j)
            if rb[j] != 0 {
                x_words[j] = x_words[j].mul(&ua.pow(&(BigInt::from(rb[j]) * &m)));
            }
            // (c_j^{ra_j}, U_b) = (U_b^{-ra_j}, c_j)
            if ra[j] != 0 {
                x_words[j] = x_words[j].mul(&ub.pow(&(-BigInt::from(ra[j]) * &m)));
            }
            // (c_j, c_j) = (-1, c_j)
            if ra[j] != 0 && rb[j] != 0 {
                x_words[j] = x_words[j]
                    .mul(&GroupWord::generator("neg1").pow(&(BigInt::from(ra[j] * rb[j]) * &m)));
            }
            // cross terms: (c_j, c_k) with j < k stays on c_k; with j > k
            // flips to (c_k^{-1}, c_j)
            for k in 0..n {
                if k == j || ra[j] == 0 || rb[k] == 0 {
                    continue;
                }
                let e = BigInt::from(ra[j] * rb[k]) * &m;
                if j < k {
                    x_words[k] = x_words[k].mul(&result.c[j].pow(&e));
                } else {
                    x_words[j] = x_words[j].mul(&result.c[k].pow(&-e));
                }
            }
        }
    }

    let mut ramified = Vec::new();
    for (j, x) in x_words.iter().enumerate() {
        let x_class = laurent::l_class(&x.evaluate(&env, field)?, l)?;
        if !x_class.is_trivial() {
            ramified.push(RamifiedEntry {
                x: x.clone(),
                c: result.c[j].clone(),
                x_class,
            });
        }
    }

    let dec = SymbolDecomposition {
        unramified,
        ramified,
        certificate: result,
    };
    certify(expr, &dec, &env)?;
    Ok(dec)
}

/// Check input ⊗ output^{-1} against the independent splitness oracle.
fn certify(
    expr: &BrauerExpr,
    dec: &SymbolDecomposition,
    env: &BTreeMap<String, LeadingData>,
) -> Result<()> {
    let field = expr.field;
    let l = expr.l;
    let mut syms: Vec<ClassSym> = Vec::new();
    for s in &expr.symbols {
        syms.push((
            class_slot(&s.a, l),
            class_slot(&s.b, l),
            s.multiplicity,
        ));
    }
    for u in &dec.unramified {
        let a = u.a.evaluate(env, field)?;
        let b = u.b.evaluate(env, field)?;
        syms.push((class_slot(&a, l), class_slot(&b, l), l - u.multiplicity));
    }
    for r in &dec.ramified {
        let x = r.x.evaluate(env, field)?;
        let c = r.c.evaluate(env, field)?;
        syms.push((class_slot(&x, l), class_slot(&c, l), l - 1));
    }
    if split_rec(&field, l, field.n, &syms)? {
        Ok(())
    } else {
        Err(Error::Certificate(
            "symbol decomposition does not match the input class".into(),
        ))
    }
}

/// (a, b) with l = 2 is split iff the conic ⟨1, -a, -b⟩ is isotropic.
pub fn quaternion_split(a: &LaurentElement, b: &LaurentElement) -> Result<bool> {
    let field = a.field();
    if a.is_zero() || b.is_zero() {
        return Err(Error::Domain("symbol slots must be nonzero".into()));
    }
    let one = LaurentElement::monomial(field, 1, vec![0; field.n])?;
    let q = DiagonalForm::new(field, vec![one, a.neg(), b.neg()])?;
    let basis = quadform::standard_basis(field)?;
    Ok(quadform::is_isotropic(&q, &basis)?.0)
}

/// Exact index of (a1,b1) ⊗ (a2,b2) via the Albert form
/// ⟨a1, b1, -a1b1, -a2, -b2, a2b2⟩: 1 if it is hyperbolic, 4 if it is
/// anisotropic, otherwise 2.
pub fn biquaternion_index(
    s1: (&LaurentElement, &LaurentElement),
    s2: (&LaurentElement, &LaurentElement),
) -> Result<u64> {
    let field = s1.0.field();
    let (a1, b1) = s1;
    let (a2, b2) = s2;
    for x in [a1, b1, a2, b2] {
        if x.is_zero() {
            return Err(Error::Domain("symbol slots must be nonzero".into()));
        }
    }
    let albert = DiagonalForm::new(
        field,
        vec![
            a1.clone(),
            b1.clone(),
            a1.mul(b1).neg(),
            a2.neg(),
            b2.neg(),
            a2.mul(b2),
        ],
    )?;
    let basis = quadform::standard_basis(field)?;
    if quadform::is_hyperbolic(&albert, &basis)? {
        Ok(1)
    } else if !quadform::is_isotropic(&albert, &basis)?.0 {
        Ok(4)
    } else {
        Ok(2)
    }
}

/// Period-index bound ind(Ã_0) · l^r with r the number of nontrivial
/// ramified entries; ind(Ã_0) = 1 over the finite residue field.
pub fn index_bound(expr: &BrauerExpr, basis: &[LeadingData]) -> Result<u64> {
    let dec = symbol_decompose(expr, basis)?;
    Ok(expr.l.pow(dec.ramified.len() as u32))
}
