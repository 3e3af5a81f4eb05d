//! Symbolic calculator for the numeric bounds: u-invariants and Brauer
//! l-dimensions of k, its finite and function-field extensions, and the
//! completion case analysis under Abhyankar's inequality. No field data is
//! consumed here; desk-scale verification of the same formulas lives in the
//! quadform and brauer modules.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A natural number or ∞; ∞ absorbs arithmetic (u(ℝ) = ∞ is allowed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl Serialize for ExtNat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtNat::Fin(x) => s.serialize_u64(*x),
            ExtNat::Inf => s.serialize_str("inf"),
        }
    }
}

impl ExtNat {
    /// Multiply by 2^e.
    pub fn times_pow2(self, e: u32) -> ExtNat {
        match self {
            ExtNat::Fin(x) => ExtNat::Fin(x << e),
            ExtNat::Inf => ExtNat::Inf,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(x) => write!(f, "{x}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

/// Input invariants of the residue field k̃. Only positivity is enforced;
/// no cross-constraints are assumed. Absent fields suppress the bounds that
/// need them.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FieldInvariants {
    /// Rational rank of the value group.
    pub n: u32,
    /// u(k̃)
    pub u_residue: Option<ExtNat>,
    /// u_s(k̃)
    pub us_residue: Option<ExtNat>,
    /// Br_l dim(k̃)
    pub d: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub quantity: String,
    pub formula: String,
    pub value: String,
}

/// All five bounds, each with the formula used. Bounds whose inputs are
/// absent are omitted.
pub fn invariant_bounds(inv: &FieldInvariants) -> Vec<BoundEntry> {
    let n = inv.n;
    let mut out = Vec::new();
    if let Some(u) = inv.u_residue {
        out.push(BoundEntry {
            quantity: "u(k)".into(),
            formula: format!("2^{n} * u(residue)"),
            value: u.times_pow2(n).to_string(),
        });
    }
    if let Some(us) = inv.us_residue {
        out.push(BoundEntry {
            quantity: "u_s(k)".into(),
            formula: format!("2^{n} * u_s(residue)"),
            value: us.times_pow2(n).to_string(),
        });
        out.push(BoundEntry {
            quantity: "u(F)".into(),
            formula: format!("2^{} * u_s(residue)", n + 1),
            value: us.times_pow2(n + 1).to_string(),
        });
    }
    if let Some(d) = inv.d {
        out.push(BoundEntry {
            quantity: "Br_l dim(k)".into(),
            formula: format!("d + {n}"),
            value: (d + n as u64).to_string(),
        });
        out.push(BoundEntry {
            quantity: "Br_l dim(F)".into(),
            formula: format!("d + 1 + {n}"),
            value: (d + 1 + n as u64).to_string(),
        });
    }
    out
}

/// Which completion case of the function-field argument applies for a
/// valuation v on F = k(C): s is the rational rank added to the value group
/// and t the transcendence degree added to the residue field; Abhyankar
/// forces s + t ≤ 1.
#[derive(Debug, Clone, Serialize)]
pub struct CompletionTrace {
    pub s: u32,
    pub t: u32,
    pub case: String,
    pub residue_extension: String,
    /// dim_Q of the divisible closure of |F_v*|.
    pub rank: u32,
    /// u(F_v) bound in terms of u_s(residue), when provided.
    pub u_bound: Option<ExtNat>,
    /// Br_l dim(F_v) bound in terms of d, when provided.
    pub br_bound: Option<u64>,
}

pub fn completion_case_trace(s: u32, t: u32, inv: &FieldInvariants) -> Result<CompletionTrace> {
    if s + t > 1 {
        return Err(Error::Precondition(format!(
            "Abhyankar inequality violated: s + t = {} > 1",
            s + t
        )));
    }
    let n = inv.n;
    let (case, residue_extension, rank, u_shift, br_add) = match (s, t) {
        (0, 0) => (
            "t = 0, s = 0",
            "residue extension is finite over the residue field",
            n,
            n,
            n as u64,
        ),
        (1, 0) => (
            "t = 0, s = 1",
            "residue extension is finite; value group gains rank 1",
            n + 1,
            n + 1,
            n as u64 + 1,
        ),
        (0, 1) => (
            "t = 1, s = 0",
            "residue extension is finitely generated of transcendence degree 1",
            n,
            n + 1,
            n as u64 + 1,
        ),
        _ => unreachable!("s + t <= 1"),
    };
    Ok(CompletionTrace {
        s,
        t,
        case: case.into(),
        residue_extension: residue_extension.into(),
        rank,
        u_bound: inv.us_residue.map(|us| us.times_pow2(u_shift)),
        br_bound: inv.d.map(|d| d + br_add),
    })
}
