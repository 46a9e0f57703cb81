//! Binary-symplectic Pauli algebra.
//!
//! An N-qubit Pauli string is a pair of N-bit vectors `(x, z)` denoting the
//! Hermitian Heisenberg-Weyl string `T^(x,z) = i^(x·z) X^x Z^z` (so `(1,1)` is
//! `Y`, not `iY`). An operator is a check matrix of such rows plus a complex
//! coefficient per row. All arithmetic reduces to word-wide XOR, AND and
//! popcount plus an exact quarter-phase bookkeeping.

use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use num_complex::Complex64;

/// Relative magnitude below which a coefficient is treated as roundoff.
pub const COEFF_DROP_TOLERANCE: f64 = 1e-14;

const QUARTER_PHASES: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(&x, &y)| (x & y).count_ones()).sum()
}

/// Symplectic product of two rows: 1 means the strings anticommute.
#[inline]
fn symplectic(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    (popcount_and(x1, z2) + popcount_and(x2, z1)) & 1 == 1
}

/// Exponent k of the product phase i^k in `T^(r1) T^(r2) = i^k T^(r1 xor r2)`.
///
/// First factor: exp(i pi/2 (x2·z1 - x1·z2)). Second factor compares the
/// integer inner product (x1+x2)·(z1+z2) with its mod-2 counterpart; all four
/// cross terms are integer popcounts, so the phase is exact.
fn phase_exponent(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u8 {
    let reorder = popcount_and(x2, z1) as i64 - popcount_and(x1, z2) as i64;
    let int_prod = (popcount_and(x1, z1) + popcount_and(x1, z2) + popcount_and(x2, z1)
        + popcount_and(x2, z2)) as i64;
    let xor_prod = x1
        .iter()
        .zip(x2)
        .zip(z1.iter().zip(z2))
        .map(|((&a1, &a2), (&b1, &b2))| ((a1 ^ a2) & (b1 ^ b2)).count_ones())
        .sum::<u32>() as i64;
    (reorder + int_prod - xor_prod).rem_euclid(4) as u8
}

/// Single Pauli string as a pair of packed bit vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliTerm {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "need at least one qubit");
        let w = words_for(n);
        PauliTerm { n, x: vec![0; w], z: vec![0; w] }
    }

    /// Build from one letter on one site.
    pub fn single(n: usize, site: usize, letter: char) -> Result<Self> {
        Self::from_sites(n, &[(site, letter)])
    }

    pub fn from_sites(n: usize, sites: &[(usize, char)]) -> Result<Self> {
        let mut t = Self::identity(n);
        for &(site, letter) in sites {
            if site >= n {
                return Err(Error::InvalidInput(format!(
                    "site {site} out of range for {n} qubits"
                )));
            }
            let (xb, zb) = match letter {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => {
                    return Err(Error::InvalidInput(format!("unknown Pauli letter {other:?}")))
                }
            };
            t.put(site, xb, zb);
        }
        Ok(t)
    }

    pub fn from_letters(letters: &str) -> Result<Self> {
        let n = letters.chars().count();
        if n == 0 {
            return Err(Error::InvalidInput("empty Pauli letter string".into()));
        }
        let mut t = Self::identity(n);
        for (site, letter) in letters.chars().enumerate() {
            let (xb, zb) = match letter {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => {
                    return Err(Error::InvalidInput(format!("unknown Pauli letter {other:?}")))
                }
            };
            t.put(site, xb, zb);
        }
        Ok(t)
    }

    fn put(&mut self, site: usize, xb: bool, zb: bool) {
        let (w, b) = (site / 64, site % 64);
        if xb {
            self.x[w] |= 1 << b;
        } else {
            self.x[w] &= !(1 << b);
        }
        if zb {
            self.z[w] |= 1 << b;
        } else {
            self.z[w] &= !(1 << b);
        }
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, site: usize) -> bool {
        (self.x[site / 64] >> (site % 64)) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        (self.z[site / 64] >> (site % 64)) & 1 == 1
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of non-identity sites.
    pub fn support(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&a, &b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(!symplectic(&self.x, &self.z, &other.x, &other.z))
    }

    pub fn letters(&self) -> String {
        (0..self.n)
            .map(|i| match (self.x_bit(i), self.z_bit(i)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            })
            .collect()
    }
}

impl std::fmt::Debug for PauliTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letters())
    }
}

/// Phase factor of the product of two Pauli strings, one of {1, i, -1, -i}.
pub fn phase_f(r1: &PauliTerm, r2: &PauliTerm) -> Result<Complex64> {
    if r1.n != r2.n {
        return Err(Error::SizeMismatch { left: r1.n, right: r2.n });
    }
    Ok(QUARTER_PHASES[phase_exponent(&r1.x, &r1.z, &r2.x, &r2.z) as usize])
}

/// Bit matrix of pairwise anticommutation indicators between two operators.
#[derive(Clone, Debug)]
pub struct CommutationMatrix {
    entries: BitMatrix,
}

impl CommutationMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    /// true means the row pair anticommutes.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.entries.get(i, j)
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.entries.row_is_zero(i)
    }

    pub fn as_bitmatrix(&self) -> &BitMatrix {
        &self.entries
    }
}

/// Operator as a check matrix plus coefficient vector, kept in canonical form:
/// rows strictly increasing in the fixed `(x, z)` word order, no duplicates,
/// no coefficient below the drop threshold.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    words: usize,
    /// Flat row storage, `2 * words` u64 per row: x words then z words.
    bits: Vec<u64>,
    coeffs: Vec<Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "need at least one qubit");
        PauliSum { n, words: words_for(n), bits: Vec::new(), coeffs: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_terms(n, &[(Complex64::new(1.0, 0.0), PauliTerm::identity(n))])
    }

    pub fn from_terms(n: usize, terms: &[(Complex64, PauliTerm)]) -> Self {
        let words = words_for(n);
        let mut sum = PauliSum {
            n,
            words,
            bits: Vec::with_capacity(terms.len() * 2 * words),
            coeffs: Vec::with_capacity(terms.len()),
        };
        for (c, t) in terms {
            assert_eq!(t.n, n, "term size mismatch");
            sum.bits.extend_from_slice(&t.x);
            sum.bits.extend_from_slice(&t.z);
            sum.coeffs.push(*c);
        }
        sum.canonicalize_in_place();
        sum
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub(crate) fn row_x(&self, i: usize) -> &[u64] {
        &self.bits[i * 2 * self.words..i * 2 * self.words + self.words]
    }

    #[inline]
    pub(crate) fn row_z(&self, i: usize) -> &[u64] {
        &self.bits[i * 2 * self.words + self.words..(i + 1) * 2 * self.words]
    }

    pub fn term(&self, i: usize) -> PauliTerm {
        PauliTerm { n: self.n, x: self.row_x(i).to_vec(), z: self.row_z(i).to_vec() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Complex64, PauliTerm)> + '_ {
        (0..self.len()).map(|i| (self.coeffs[i], self.term(i)))
    }

    /// Largest support over the rows; 0 for the zero operator.
    pub fn max_support(&self) -> usize {
        (0..self.len())
            .map(|i| {
                self.row_x(i)
                    .iter()
                    .zip(self.row_z(i))
                    .map(|(&a, &b)| (a | b).count_ones() as usize)
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }

    fn check_size(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn push_row(&mut self, x: &[u64], z: &[u64], c: Complex64) {
        self.bits.extend_from_slice(x);
        self.bits.extend_from_slice(z);
        self.coeffs.push(c);
    }

    fn push_row_xor(&mut self, x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64], c: Complex64) {
        for (a, b) in x1.iter().zip(x2) {
            self.bits.push(a ^ b);
        }
        for (a, b) in z1.iter().zip(z2) {
            self.bits.push(a ^ b);
        }
        self.coeffs.push(c);
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.bits.extend_from_slice(&other.bits);
        out.coeffs.extend_from_slice(&other.coeffs);
        out.canonicalize_in_place();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.bits.extend_from_slice(&other.bits);
        out.coeffs.extend(other.coeffs.iter().map(|c| -c));
        out.canonicalize_in_place();
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out.canonicalize_in_place();
        out
    }

    /// Operator product; every row pair contributes `c1 c2 F(r1, r2)` on the
    /// XORed row.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum {
            n: self.n,
            words: self.words,
            bits: Vec::with_capacity(self.len() * other.len() * 2 * self.words),
            coeffs: Vec::with_capacity(self.len() * other.len()),
        };
        for i in 0..self.len() {
            let (x1, z1, c1) = (self.row_x(i), self.row_z(i), self.coeffs[i]);
            for j in 0..other.len() {
                let (x2, z2) = (other.row_x(j), other.row_z(j));
                let phase = QUARTER_PHASES[phase_exponent(x1, z1, x2, z2) as usize];
                out.push_row_xor(x1, z1, x2, z2, c1 * other.coeffs[j] * phase);
            }
        }
        out.canonicalize_in_place();
        Ok(out)
    }

    /// Commutator; only anticommuting row pairs contribute, with weight
    /// `2 c1 c2 F(r1, r2)`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = PauliSum {
            n: self.n,
            words: self.words,
            bits: Vec::new(),
            coeffs: Vec::new(),
        };
        for i in 0..self.len() {
            let (x1, z1, c1) = (self.row_x(i), self.row_z(i), self.coeffs[i]);
            for j in 0..other.len() {
                let (x2, z2) = (other.row_x(j), other.row_z(j));
                if !symplectic(x1, z1, x2, z2) {
                    continue;
                }
                let phase = QUARTER_PHASES[phase_exponent(x1, z1, x2, z2) as usize];
                out.push_row_xor(x1, z1, x2, z2, 2.0 * c1 * other.coeffs[j] * phase);
            }
        }
        out.canonicalize_in_place();
        Ok(out)
    }

    /// Pairwise anticommutation indicators, `CM_A L CM_B^T mod 2`.
    pub fn commutation_matrix(&self, other: &PauliSum) -> Result<CommutationMatrix> {
        self.check_size(other)?;
        let mut entries = BitMatrix::zeros(self.len(), other.len());
        for i in 0..self.len() {
            let (x1, z1) = (self.row_x(i), self.row_z(i));
            for j in 0..other.len() {
                if symplectic(x1, z1, other.row_x(j), other.row_z(j)) {
                    entries.set(i, j, true);
                }
            }
        }
        Ok(CommutationMatrix { entries })
    }

    /// Sort rows, merge duplicates, drop coefficients below the relative
    /// threshold. Idempotent and independent of input row order.
    pub fn canonicalize(&self) -> PauliSum {
        let mut out = self.clone();
        out.canonicalize_in_place();
        out
    }

    fn canonicalize_in_place(&mut self) {
        let k = self.coeffs.len();
        if k == 0 {
            return;
        }
        let stride = 2 * self.words;
        let mut order: Vec<u32> = (0..k as u32).collect();
        let bits = &self.bits;
        // Stable sort keeps duplicate rows in generation order, so coefficient
        // summation is deterministic.
        order.sort_by(|&a, &b| {
            let ra = &bits[a as usize * stride..(a as usize + 1) * stride];
            let rb = &bits[b as usize * stride..(b as usize + 1) * stride];
            ra.cmp(rb)
        });

        let mut new_bits: Vec<u64> = Vec::with_capacity(self.bits.len());
        let mut new_coeffs: Vec<Complex64> = Vec::with_capacity(k);
        let mut i = 0;
        while i < k {
            let idx = order[i] as usize;
            let row = &bits[idx * stride..(idx + 1) * stride];
            let mut c = self.coeffs[idx];
            let mut j = i + 1;
            while j < k {
                let jdx = order[j] as usize;
                if &bits[jdx * stride..(jdx + 1) * stride] != row {
                    break;
                }
                c += self.coeffs[jdx];
                j += 1;
            }
            new_bits.extend_from_slice(row);
            new_coeffs.push(c);
            i = j;
        }

        let max_mag = new_coeffs.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt();
        if max_mag == 0.0 {
            self.bits = Vec::new();
            self.coeffs = Vec::new();
            return;
        }
        let cut = max_mag * COEFF_DROP_TOLERANCE;
        let mut kept_bits: Vec<u64> = Vec::with_capacity(new_bits.len());
        let mut kept_coeffs: Vec<Complex64> = Vec::with_capacity(new_coeffs.len());
        for (r, c) in new_coeffs.iter().enumerate() {
            if c.norm() > cut {
                kept_bits.extend_from_slice(&new_bits[r * stride..(r + 1) * stride]);
                kept_coeffs.push(*c);
            }
        }
        self.bits = kept_bits;
        self.coeffs = kept_coeffs;
    }

    /// Every Pauli string is Hermitian, so anti-Hermiticity means purely
    /// imaginary coefficients.
    pub fn is_anti_hermitian(&self) -> bool {
        let max_mag = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.re.abs() <= 1e-10 * max_mag + 1e-14)
    }

    pub fn is_hermitian(&self) -> bool {
        let max_mag = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= 1e-10 * max_mag + 1e-14)
    }

    /// Check rows as an `N_op x 2N` bit matrix in `[x | z]` column layout.
    pub fn to_bitmatrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), 2 * self.n);
        for i in 0..self.len() {
            for site in 0..self.n {
                if (self.row_x(i)[site / 64] >> (site % 64)) & 1 == 1 {
                    m.set(i, site, true);
                }
                if (self.row_z(i)[site / 64] >> (site % 64)) & 1 == 1 {
                    m.set(i, self.n + site, true);
                }
            }
        }
        m
    }

    /// One line per term: `<coeff_re> <coeff_im> <letter string>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, t) in self.terms() {
            out.push_str(&format!("{:e} {:e} {}\n", c.re, c.im, t.letters()));
        }
        out
    }

    /// Parse the text format; accepts letter strings (`IXZY...`) and sparse
    /// `(site:letter)` lists.
    pub fn from_text(text: &str, n: usize) -> Result<PauliSum> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (re, im) = match (parts.next(), parts.next()) {
                (Some(re), Some(im)) => {
                    let re: f64 = re.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad real part {re:?}"),
                    })?;
                    let im: f64 = im.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad imaginary part {im:?}"),
                    })?;
                    (re, im)
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: "expected `<re> <im> <string>`".into(),
                    })
                }
            };
            let rest: String = parts.collect::<Vec<_>>().join("");
            let term = if rest.starts_with('(') {
                let mut sites = Vec::new();
                for piece in rest.trim_matches(|c| c == '(' || c == ')').split(")(") {
                    let (site, letter) = piece.split_once(':').ok_or_else(|| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad sparse entry {piece:?}"),
                    })?;
                    let site: usize = site.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad site index {site:?}"),
                    })?;
                    let letter = letter.chars().next().ok_or_else(|| Error::Parse {
                        line: lineno + 1,
                        msg: "missing letter".into(),
                    })?;
                    sites.push((site, letter));
                }
                PauliTerm::from_sites(n, &sites).map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: e.to_string(),
                })?
            } else {
                if rest.chars().count() != n {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected {n} letters, got {}", rest.chars().count()),
                    });
                }
                PauliTerm::from_letters(&rest).map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: e.to_string(),
                })?
            };
            terms.push((Complex64::new(re, im), term));
        }
        Ok(PauliSum::from_terms(n, &terms))
    }
}

impl std::fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, t)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)*{}", c.re, c.im, t.letters())?;
        }
        Ok(())
    }
}
