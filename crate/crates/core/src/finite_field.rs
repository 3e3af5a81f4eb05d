//! Arithmetic in the residue field F_p (p an odd prime): power classes,
//! roots of unity, and isotropy / hyperbolicity decisions for diagonal
//! forms over F_p.

use serde::Serialize;

use crate::error::{Error, Result};

/// An element of F_p, reduced into `[0, p)`.
pub type FFElement = u64;

/// The prime field F_p for an odd prime p, 3 <= p <= 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p > (1 << 31) || p % 2 == 0 || !is_prime(p) {
            return Err(Error::InvalidField(format!(
                "p = {p} must be an odd prime with 3 <= p <= 2^31"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> FFElement {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: FFElement, b: FFElement) -> FFElement {
        (a + b) % self.p
    }

    pub fn neg(&self, a: FFElement) -> FFElement {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn sub(&self, a: FFElement, b: FFElement) -> FFElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElement, b: FFElement) -> FFElement {
        // p < 2^31, so the product fits in u64.
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: FFElement, mut e: u64) -> FFElement {
        base %= self.p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FFElement) -> Result<FFElement> {
        if a % self.p == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Euler criterion: x^((p-1)/2) == 1.
    pub fn is_square(&self, x: FFElement) -> Result<bool> {
        if x % self.p == 0 {
            return Err(Error::Domain("is_square of zero".into()));
        }
        Ok(self.pow(x, (self.p - 1) / 2) == 1)
    }

    /// Smallest quadratic nonresidue, used as the canonical representative of
    /// the nontrivial square class.
    pub fn nonsquare(&self) -> FFElement {
        let mut x = 2;
        loop {
            if !self.is_square(x).expect("nonzero") {
                return x;
            }
            x += 1;
        }
    }

    /// Deterministic primitive l-th root of unity: the smallest omega != 1
    /// with omega^l = 1. For l = 2 this is p - 1; for odd l it exists iff
    /// l | p - 1.
    pub fn primitive_root_of_unity(&self, l: u64) -> Result<FFElement> {
        if l == self.p {
            return Err(Error::Precondition("l = p".into()));
        }
        if l == 2 {
            return Ok(self.p - 1);
        }
        if (self.p - 1) % l != 0 {
            return Err(Error::Domain(format!(
                "no l-th roots of unity: {} does not divide p - 1 = {}",
                l,
                self.p - 1
            )));
        }
        // Any x with x^((p-1)/l) != 1 yields a generator of mu_l; the group
        // mu_l is tiny (l elements), so take the minimum over it.
        let e = (self.p - 1) / l;
        let mut x = 2;
        let gen = loop {
            let c = self.pow(x, e);
            if c != 1 {
                break c;
            }
            x += 1;
        };
        let mut best = gen;
        let mut w = self.mul(gen, gen);
        while w != 1 {
            if w != 1 && w < best {
                best = w;
            }
            w = self.mul(w, gen);
        }
        Ok(best)
    }

    /// Membership in (F_p*)^l. The l-th powers form the subgroup of index
    /// gcd(l, p-1).
    pub fn is_lth_power(&self, x: FFElement, l: u64) -> Result<bool> {
        if x % self.p == 0 {
            return Err(Error::Domain("is_lth_power of zero".into()));
        }
        let g = num_integer::gcd(l, self.p - 1);
        Ok(self.pow(x, (self.p - 1) / g) == 1)
    }

    /// Smallest positive representative of the coset of `x` in F_p*/(F_p*)^l.
    pub fn lth_class_rep(&self, x: FFElement, l: u64) -> Result<FFElement> {
        if x % self.p == 0 {
            return Err(Error::Domain("class of zero".into()));
        }
        let xi = self.inv(x)?;
        for c in 1..self.p {
            if self.is_lth_power(self.mul(c, xi), l)? {
                return Ok(c);
            }
        }
        unreachable!("x lies in its own coset")
    }

    /// Index of the coset of `x` in F_p*/(F_p*)^l ~ Z/g, g = gcd(l, p-1),
    /// with respect to a fixed generator. Used for class bookkeeping at odd l.
    pub fn lth_class_index(&self, x: FFElement, l: u64) -> Result<u64> {
        if x % self.p == 0 {
            return Err(Error::Domain("class of zero".into()));
        }
        let g = num_integer::gcd(l, self.p - 1);
        if g == 1 {
            return Ok(0);
        }
        let e = (self.p - 1) / g;
        // x^e lies in mu_g; its discrete log base omega^e for a fixed
        // generator omega of the character image is the class index.
        let mut w = 2;
        let gen = loop {
            let c = self.pow(w, e);
            if c != 1 {
                // need an element of exact order g
                let mut ord = 1;
                let mut acc = c;
                while acc != 1 {
                    acc = self.mul(acc, c);
                    ord += 1;
                }
                if ord == g {
                    break c;
                }
            }
            w += 1;
        };
        let target = self.pow(x, e);
        let mut acc = 1u64;
        for i in 0..g {
            if acc == target {
                return Ok(i);
            }
            acc = self.mul(acc, gen);
        }
        unreachable!("x^e lies in the cyclic image")
    }
}

/// A diagonal quadratic form over F_p: nonempty list of nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueForm {
    pub coeffs: Vec<FFElement>,
}

impl ResidueForm {
    pub fn new(field: &PrimeField, coeffs: Vec<FFElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("empty form".into()));
        }
        if coeffs.iter().any(|&c| c % field.p() == 0) {
            return Err(Error::Domain("zero coefficient in diagonal form".into()));
        }
        Ok(ResidueForm {
            coeffs: coeffs.iter().map(|&c| c % field.p()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

/// Isotropy over F_p with a verified witness.
///
/// dim >= 3 is always isotropic (Chevalley-Warning); the witness search runs
/// lexicographically over the first min(d, 3) coordinates with trailing
/// zeros, first hit wins, so answers are deterministic. Every "isotropic"
/// answer carries a witness that is re-checked before returning.
pub fn residue_isotropic(field: &PrimeField, form: &ResidueForm) -> Result<Option<Vec<FFElement>>> {
    let d = form.dim();
    let p = field.p();
    match d {
        1 => Ok(None),
        2 => {
            let disc = field.neg(field.mul(form.coeffs[0], form.coeffs[1]));
            if !field.is_square(disc)? {
                return Ok(None);
            }
            for v0 in 0..p {
                for v1 in 0..p {
                    if v0 == 0 && v1 == 0 {
                        continue;
                    }
                    if eval_form(field, &form.coeffs[..2], &[v0, v1]) == 0 {
                        return Ok(Some(pad(vec![v0, v1], d)));
                    }
                }
            }
            unreachable!("square signed discriminant guarantees a zero")
        }
        _ => {
            for v0 in 0..p {
                for v1 in 0..p {
                    for v2 in 0..p {
                        if v0 == 0 && v1 == 0 && v2 == 0 {
                            continue;
                        }
                        if eval_form(field, &form.coeffs[..3], &[v0, v1, v2]) == 0 {
                            return Ok(Some(pad(vec![v0, v1, v2], d)));
                        }
                    }
                }
            }
            unreachable!("Chevalley-Warning guarantees a zero in 3 variables")
        }
    }
}

fn pad(mut v: Vec<FFElement>, d: usize) -> Vec<FFElement> {
    v.resize(d, 0);
    v
}

fn eval_form(field: &PrimeField, coeffs: &[FFElement], v: &[FFElement]) -> FFElement {
    let mut acc = 0;
    for (&c, &x) in coeffs.iter().zip(v) {
        acc = field.add(acc, field.mul(c, field.mul(x, x)));
    }
    acc
}

/// Hyperbolicity over F_p: even dimension and square signed discriminant
/// (-1)^(d/2) * prod c_i. Cross-checked against an explicit repeated
/// witness-splitting Witt decomposition; a mismatch is a bug and surfaces
/// as `Error::Certificate`.
pub fn residue_hyperbolic(field: &PrimeField, form: &ResidueForm) -> Result<bool> {
    let d = form.dim();
    let by_disc = if d % 2 != 0 {
        false
    } else {
        let mut disc: FFElement = 1;
        for &c in &form.coeffs {
            disc = field.mul(disc, c);
        }
        if (d / 2) % 2 == 1 {
            disc = field.neg(disc);
        }
        field.is_square(disc)?
    };
    let kernel = witt_anisotropic_kernel(field, &form.coeffs)?;
    let by_split = kernel.is_empty();
    if by_disc != by_split {
        return Err(Error::Certificate(format!(
            "hyperbolicity routes disagree on {:?}: discriminant says {}, Witt splitting says {}",
            form.coeffs, by_disc, by_split
        )));
    }
    Ok(by_disc)
}

/// Anisotropic kernel of a diagonal form over F_p by repeated hyperbolic
/// splitting: find an isotropic vector, split off the hyperbolic plane it
/// spans, diagonalize the orthogonal complement, recurse.
pub fn witt_anisotropic_kernel(field: &PrimeField, coeffs: &[FFElement]) -> Result<Vec<FFElement>> {
    let mut current: Vec<FFElement> = coeffs.to_vec();
    loop {
        if current.is_empty() {
            return Ok(current);
        }
        let form = ResidueForm::new(field, current.clone())?;
        let witness = residue_isotropic(field, &form)?;
        let v = match witness {
            None => return Ok(current),
            Some(v) => v,
        };
        current = split_hyperbolic_plane(field, &current, &v)?;
    }
}

/// Given diagonal Gram `coeffs` and an isotropic vector `v`, return a
/// diagonalization of the orthogonal complement of the hyperbolic plane
/// containing `v`.
fn split_hyperbolic_plane(
    field: &PrimeField,
    coeffs: &[FFElement],
    v: &[FFElement],
) -> Result<Vec<FFElement>> {
    let d = coeffs.len();
    // b(v, e_k) = c_k v_k; nonzero for any k in the support of v.
    let k = v
        .iter()
        .position(|&x| x != 0)
        .ok_or_else(|| Error::Certificate("zero witness".into()))?;
    let u: Vec<FFElement> = (0..d).map(|i| if i == k { 1 } else { 0 }).collect();
    let b = |x: &[FFElement], y: &[FFElement]| -> FFElement {
        let mut acc = 0;
        for i in 0..d {
            acc = field.add(acc, field.mul(coeffs[i], field.mul(x[i], y[i])));
        }
        acc
    };
    // Orthogonal complement of span{v, u}: nullspace of the 2 x d system
    // b(v, w) = b(u, w) = 0.
    let rows = [
        (0..d).map(|i| field.mul(coeffs[i], v[i])).collect::<Vec<_>>(),
        (0..d).map(|i| field.mul(coeffs[i], u[i])).collect::<Vec<_>>(),
    ];
    let basis = nullspace_mod_p(field, &rows, d);
    if basis.len() != d - 2 {
        return Err(Error::Certificate("complement has wrong dimension".into()));
    }
    // Gram matrix of the complement, then congruence-diagonalize mod p.
    let mut gram = vec![vec![0u64; d - 2]; d - 2];
    for i in 0..d - 2 {
        for j in 0..d - 2 {
            gram[i][j] = b(&basis[i], &basis[j]);
        }
    }
    diagonalize_symmetric(field, gram)
}

/// Nullspace basis of a small system of linear forms mod p.
fn nullspace_mod_p(field: &PrimeField, rows: &[Vec<FFElement>], d: usize) -> Vec<Vec<FFElement>> {
    let mut m: Vec<Vec<FFElement>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..d {
        if r >= m.len() {
            break;
        }
        if let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) {
            m.swap(r, pr);
            let inv = field.inv(m[r][c]).expect("pivot nonzero");
            for x in m[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in 0..d {
                        let t = field.mul(f, m[r][j]);
                        m[i][j] = field.sub(m[i][j], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut w = vec![0u64; d];
        w[f] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            w[pc] = field.neg(m[ri][f]);
        }
        basis.push(w);
    }
    basis
}

/// Congruence diagonalization of a nondegenerate symmetric matrix mod p
/// (char != 2). Returns the diagonal entries.
fn diagonalize_symmetric(field: &PrimeField, mut g: Vec<Vec<u64>>) -> Result<Vec<FFElement>> {
    let d = g.len();
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        if g[k][k] == 0 {
            // find j > k with g[k][j] != 0 and add row/col j into k;
            // the new diagonal entry is 2 g[k][j] != 0 since char != 2
            let j = (k + 1..d)
                .find(|&j| g[k][j] != 0)
                .ok_or_else(|| Error::Certificate("degenerate Gram block".into()))?;
            for c in 0..d {
                g[k][c] = field.add(g[k][c], g[j][c]);
            }
            for r in 0..d {
                g[r][k] = field.add(g[r][k], g[r][j]);
            }
        }
        let pivot = g[k][k];
        let inv = field.inv(pivot)?;
        // clear row/column k below
        for j in k + 1..d {
            if g[k][j] != 0 {
                let f = field.mul(g[k][j], inv);
                for c in 0..d {
                    let t = field.mul(f, g[k][c]);
                    g[j][c] = field.sub(g[j][c], t);
                }
                for r in 0..d {
                    let t = field.mul(f, g[r][k]);
                    g[r][j] = field.sub(g[r][j], t);
                }
            }
        }
        out.push(pivot);
    }
    Ok(out)
}
