//! Diagonal quadratic forms over K = F_p((t1))...((tn)): the 2^n residue-form
//! decomposition, isotropy and hyperbolicity decisions, an independent
//! Springer-recursion oracle, and the exhaustive anisotropic-dimension survey.
//!
//! Since p is odd, every 1-unit is a square by Hensel's lemma, so the square
//! class of a coefficient is determined by its leading term. Forms are
//! therefore ingested down to [`LeadingData`] immediately.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::decompose::{self, DecompositionResult};
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, ResidueForm};
use crate::laurent::{GroupWord, LaurentElement, LaurentField, LeadingData};

/// A diagonal form ⟨a_1, ..., a_s⟩ with nonzero coefficients.
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    field: LaurentField,
    coeffs: Vec<LeadingData>,
}

impl DiagonalForm {
    pub fn new(field: LaurentField, coeffs: Vec<LaurentElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("form must have dimension >= 1".into()));
        }
        let leads = coeffs
            .iter()
            .map(|c| c.leading())
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalForm {
            field,
            coeffs: leads,
        })
    }

    pub fn from_leads(field: LaurentField, coeffs: Vec<LeadingData>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("form must have dimension >= 1".into()));
        }
        Ok(DiagonalForm { field, coeffs })
    }

    pub fn field(&self) -> LaurentField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[LeadingData] {
        &self.coeffs
    }
}

/// The 2^n-block decomposition of a form: coefficients sorted by the class
/// θ = Π c_j^{θ_j} of their non-unit part, each block a residue form.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueDecomposition {
    /// Unit residues per class vector θ ∈ {0,1}^n (absent blocks omitted).
    pub blocks: BTreeMap<Vec<u64>, Vec<FFElement>>,
    /// Word representative Π c_j^{θ_j} for each present block.
    pub theta_reps: BTreeMap<Vec<u64>, GroupWord>,
    /// The decomposition certificate the blocks were read off from.
    pub certificate: DecompositionResult,
}

/// Sort the coefficients of q into residue blocks via the square-class
/// decomposition over the basis. Degenerate bases (where the c_j square
/// classes collide) are rejected rather than silently merged.
pub fn residue_decomposition(q: &DiagonalForm, basis: &[LeadingData]) -> Result<ResidueDecomposition> {
    let result = decompose::decompose(&q.coeffs, basis, 2)?;
    if !result.independent {
        return Err(Error::DegenerateBasis);
    }
    let mut blocks: BTreeMap<Vec<u64>, Vec<FFElement>> = BTreeMap::new();
    let mut theta_reps = BTreeMap::new();
    for (i, row) in result.mu.iter().enumerate() {
        let theta = row.clone();
        blocks
            .entry(theta.clone())
            .or_default()
            .push(result.u_class[i]);
        theta_reps.entry(theta.clone()).or_insert_with(|| {
            let mut w = GroupWord::one();
            for (j, &e) in theta.iter().enumerate() {
                if e != 0 {
                    w = w.mul(&result.c[j].pow(&BigInt::from(e)));
                }
            }
            w
        });
    }
    Ok(ResidueDecomposition {
        blocks,
        theta_reps,
        certificate: result,
    })
}

/// Why a form was judged isotropic or anisotropic.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsotropyCertificate {
    /// Residue block θ has the given isotropy witness over F_p; Hensel's
    /// lemma lifts it to K.
    Witness {
        theta: Vec<u64>,
        vector: Vec<FFElement>,
    },
    /// Every residue block is anisotropic over F_p; listed with dimensions.
    Anisotropic { blocks: Vec<(Vec<u64>, usize)> },
}

/// Decide isotropy through the residue decomposition: q is isotropic over K
/// iff some block is isotropic over F_p.
pub fn is_isotropic(
    q: &DiagonalForm,
    basis: &[LeadingData],
) -> Result<(bool, IsotropyCertificate)> {
    let dec = residue_decomposition(q, basis)?;
    let mut report = Vec::new();
    for (theta, units) in &dec.blocks {
        let form = ResidueForm::new(&q.field.residue, units.clone())?;
        if let Some(witness) = crate::finite_field::residue_isotropic(&q.field.residue, &form)? {
            return Ok((
                true,
                IsotropyCertificate::Witness {
                    theta: theta.clone(),
                    vector: witness,
                },
            ));
        }
        report.push((theta.clone(), units.len()));
    }
    Ok((false, IsotropyCertificate::Anisotropic { blocks: report }))
}

/// Independent isotropy oracle by iterated Springer decomposition: split by
/// the parity of the outermost exponent, recurse on the residue field
/// F_p((t1))...((t_{n-1})), never calling `decompose`.
pub fn is_isotropic_springer(q: &DiagonalForm) -> Result<bool> {
    let coeffs: Vec<(FFElement, Vec<BigInt>)> = q
        .coeffs
        .iter()
        .map(|d| (d.coeff, d.expo.clone()))
        .collect();
    springer(&q.field.residue, q.field.n, &coeffs)
}

/// Recursion on the prefix length: a coefficient u * t1^e1...tk^ek over
/// K_k = F_p((t1))...((tk)) is sorted by the parity of e_k (even exponents
/// are squares times an element of K_{k-1}).
fn springer(residue: &crate::finite_field::PrimeField, k: usize, coeffs: &[(FFElement, Vec<BigInt>)]) -> Result<bool> {
    if coeffs.is_empty() {
        return Ok(false);
    }
    if k == 0 {
        let form = ResidueForm::new(residue, coeffs.iter().map(|(c, _)| *c).collect())?;
        return Ok(crate::finite_field::residue_isotropic(residue, &form)?.is_some());
    }
    let two = BigInt::from(2);
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (c, expo) in coeffs {
        if expo[k - 1].mod_floor(&two).to_u64() == Some(0) {
            even.push((*c, expo.clone()));
        } else {
            odd.push((*c, expo.clone()));
        }
    }
    Ok(springer(residue, k - 1, &even)? || springer(residue, k - 1, &odd)?)
}

/// q is hyperbolic over K iff every residue block has even dimension and is
/// hyperbolic over F_p (iterated Springer decomposition of the Witt ring).
pub fn is_hyperbolic(q: &DiagonalForm, basis: &[LeadingData]) -> Result<bool> {
    if q.dim() % 2 != 0 {
        return Ok(false);
    }
    let dec = residue_decomposition(q, basis)?;
    for units in dec.blocks.values() {
        if units.len() % 2 != 0 {
            return Ok(false);
        }
        let form = ResidueForm::new(&q.field.residue, units.clone())?;
        if !crate::finite_field::residue_hyperbolic(&q.field.residue, &form)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One square class of K, as a monomial representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SquareClass {
    pub expo: Vec<u64>,
    pub unit: FFElement,
}

/// The 2^(n+1) square classes in canonical order: exponent vector lex
/// (outermost variable most significant), then unit representative.
pub fn square_classes(field: LaurentField) -> Vec<SquareClass> {
    let ns = field.residue.nonsquare();
    let n = field.n;
    let mut out = Vec::with_capacity(1 << (n + 1));
    for bits in 0..(1u64 << n) {
        let expo: Vec<u64> = (0..n).map(|j| (bits >> (n - 1 - j)) & 1).collect();
        for unit in [1, ns] {
            out.push(SquareClass {
                expo: expo.clone(),
                unit,
            });
        }
    }
    out
}

fn class_element(field: LaurentField, class: &SquareClass) -> Result<LaurentElement> {
    LaurentElement::monomial(
        field,
        class.unit as i64,
        class.expo.iter().map(|&e| e as i64).collect(),
    )
}

/// The standard basis monomials t1, ..., tn as leading data.
pub fn standard_basis(field: LaurentField) -> Result<Vec<LeadingData>> {
    (0..field.n)
        .map(|j| {
            let mut expo = vec![0i64; field.n];
            expo[j] = 1;
            Ok(LaurentElement::monomial(field, 1, expo)?.leading()?)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub p: u64,
    pub n: usize,
    pub d_max: usize,
    pub forms_checked: u64,
    /// Largest dimension of an anisotropic form found.
    pub max_anisotropic_dim: usize,
    /// First anisotropic witness per dimension, in enumeration order.
    pub witnesses: BTreeMap<usize, String>,
}

/// Exhaustively enumerate diagonal forms up to isometry — multisets of the
/// 2^(n+1) square classes — of dimension 1..=d_max, decide isotropy through
/// both oracles, and report the maximum anisotropic dimension with one
/// witness per dimension. Any oracle disagreement is a hard error.
pub fn anisotropic_survey(
    p: u64,
    n: usize,
    d_max: usize,
    max_enum: u64,
) -> Result<SurveyReport> {
    let field = LaurentField::new(p, n)?;
    let classes = square_classes(field);
    let k = classes.len();

    let mut total: u64 = 0;
    for d in 1..=d_max {
        let mut count = BigInt::from(1);
        for i in 0..d {
            count = count * BigInt::from(k + i) / BigInt::from(i + 1);
        }
        total = total.saturating_add(count.to_u64().unwrap_or(u64::MAX));
    }
    if total > max_enum {
        return Err(Error::ResourceLimit(format!(
            "survey would enumerate {total} forms, limit is {max_enum}"
        )));
    }

    let basis = standard_basis(field)?;
    let mut report = SurveyReport {
        p,
        n,
        d_max,
        forms_checked: 0,
        max_anisotropic_dim: 0,
        witnesses: BTreeMap::new(),
    };

    for d in 1..=d_max {
        // multisets as nondecreasing index sequences
        let mut idx = vec![0usize; d];
        loop {
            let leads: Vec<LeadingData> = idx
                .iter()
                .map(|&i| Ok(class_element(field, &classes[i])?.leading()?))
                .collect::<Result<_>>()?;
            let form = DiagonalForm::from_leads(field, leads)?;
            let (iso, _) = is_isotropic(&form, &basis)?;
            let iso2 = is_isotropic_springer(&form)?;
            if iso != iso2 {
                return Err(Error::OracleDisagreement(format!(
                    "block oracle says {iso}, Springer oracle says {iso2} on {}",
                    form_text(field, &idx, &classes)?
                )));
            }
            report.forms_checked += 1;
            if !iso {
                report.max_anisotropic_dim = report.max_anisotropic_dim.max(d);
                report
                    .witnesses
                    .entry(d)
                    .or_insert(form_text(field, &idx, &classes)?);
            }
            // next nondecreasing sequence
            let mut pos = d;
            while pos > 0 && idx[pos - 1] == k - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            let v = idx[pos - 1] + 1;
            for slot in idx.iter_mut().skip(pos - 1) {
                *slot = v;
            }
        }
    }
    Ok(report)
}

fn form_text(field: LaurentField, idx: &[usize], classes: &[SquareClass]) -> Result<String> {
    let parts: Vec<String> = idx
        .iter()
        .map(|&i| Ok(class_element(field, &classes[i])?.to_string()))
        .collect::<Result<_>>()?;
    Ok(parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_element;

    fn form(field: LaurentField, exprs: &[&str]) -> DiagonalForm {
        DiagonalForm::new(
            field,
            exprs
                .iter()
                .map(|s| parse_element(s, field).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn residue_decomposition_sorts_by_class() {
        let f = LaurentField::new(3, 1).unwrap();
        let basis = standard_basis(f).unwrap();
        let q = form(f, &["1", "2", "t1", "2*t1"]);
        let dec = residue_decomposition(&q, &basis).unwrap();
        assert_eq!(dec.blocks[&vec![0]], vec![1, 2]);
        assert_eq!(dec.blocks[&vec![1]], vec![1, 2]);

        let q = form(f, &["1", "1"]);
        let dec = residue_decomposition(&q, &basis).unwrap();
        assert_eq!(dec.blocks[&vec![0]], vec![1, 1]);
        assert!(!dec.blocks.contains_key(&vec![1]));
    }

    #[test]
    fn residue_decomposition_n2_single_coefficient() {
        let f = LaurentField::new(3, 2).unwrap();
        let basis = standard_basis(f).unwrap();
        let q = form(f, &["t1*t2"]);
        let dec = residue_decomposition(&q, &basis).unwrap();
        assert_eq!(dec.blocks[&vec![1, 1]], vec![1]);
        assert_eq!(dec.blocks.len(), 1);
    }

    #[test]
    fn degenerate_basis_rejected() {
        let f = LaurentField::new(3, 1).unwrap();
        let basis = vec![parse_element("t1^2", f).unwrap().leading().unwrap()];
        let q = form(f, &["t1^4"]);
        assert!(matches!(
            residue_decomposition(&q, &basis),
            Err(Error::DegenerateBasis)
        ));
    }

    #[test]
    fn isotropy_examples() {
        let f = LaurentField::new(3, 1).unwrap();
        let basis = standard_basis(f).unwrap();
        let (iso, _) = is_isotropic(&form(f, &["1", "-1"]), &basis).unwrap();
        assert!(iso);
        let (iso, cert) = is_isotropic(&form(f, &["1", "1", "t1", "t1"]), &basis).unwrap();
        assert!(!iso);
        assert!(matches!(cert, IsotropyCertificate::Anisotropic { .. }));
        let (iso, cert) = is_isotropic(&form(f, &["1", "1", "1", "t1"]), &basis).unwrap();
        assert!(iso);
        match cert {
            IsotropyCertificate::Witness { theta, vector } => {
                assert_eq!(theta, vec![0]);
                // the witness solves the block form over F_3
                let mut acc = 0u64;
                for &w in &vector {
                    acc = (acc + w * w) % 3;
                }
                assert_eq!(acc, 0);
            }
            _ => panic!("expected a witness"),
        }
    }

    #[test]
    fn springer_examples() {
        let f1 = LaurentField::new(3, 1).unwrap();
        assert!(!is_isotropic_springer(&form(f1, &["1", "1", "t1", "t1"])).unwrap());
        let f2 = LaurentField::new(3, 2).unwrap();
        assert!(!is_isotropic_springer(&form(
            f2,
            &["1", "1", "t1", "t1", "t2", "t2", "t1*t2", "t1*t2"]
        ))
        .unwrap());
        assert!(is_isotropic_springer(&form(f2, &["t1*t2", "2*t1*t2"])).unwrap());
    }

    #[test]
    fn hyperbolic_examples() {
        let f = LaurentField::new(3, 1).unwrap();
        let basis = standard_basis(f).unwrap();
        assert!(is_hyperbolic(&form(f, &["1", "-1", "t1", "2*t1"]), &basis).unwrap());
        assert!(!is_hyperbolic(&form(f, &["1", "1"]), &basis).unwrap());
        assert!(!is_hyperbolic(&form(f, &["1", "-1", "t1"]), &basis).unwrap());
    }

    #[test]
    fn survey_p3_n1() {
        let r = anisotropic_survey(3, 1, 5, 1_000_000).unwrap();
        assert_eq!(r.max_anisotropic_dim, 4);
        assert_eq!(r.witnesses[&4], "1,1,t1,t1");
    }

    #[test]
    fn survey_p5_n1() {
        let r = anisotropic_survey(5, 1, 5, 1_000_000).unwrap();
        assert_eq!(r.max_anisotropic_dim, 4);
    }

    #[test]
    fn survey_resource_guard() {
        assert!(matches!(
            anisotropic_survey(3, 2, 9, 100),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn square_class_count() {
        let f = LaurentField::new(3, 2).unwrap();
        assert_eq!(square_classes(f).len(), 8);
        let f = LaurentField::new(7, 1).unwrap();
        let cs = square_classes(f);
        assert_eq!(cs.len(), 4);
        assert_eq!(cs[0], SquareClass { expo: vec![0], unit: 1 });
        assert!(!f.residue.is_square(cs[1].unit).unwrap());
    }
}
