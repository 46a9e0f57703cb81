//! Stabilizer Hamiltonians and ground-state specifications.
//!
//! A stabilizer Hamiltonian is `H0 = -sum_j h_j s_j` with pairwise commuting
//! Pauli terms and positive weights: frustration-free, with the ground space
//! fixed by all `s_j` at eigenvalue +1. A ground-state spec completes the
//! independent generators with user-supplied signed stabilizers to pin one
//! state of the degenerate subspace, and carries the destabilizer rows that
//! make stabilizer decomposition a commutation check.

use crate::error::{Error, Result};
use crate::f2::{self, BitMatrix};
use crate::pauli::{phase_f, PauliSum, PauliTerm};
use num_complex::Complex64;

/// Signed stabilizer row: the sign selects the eigenvalue the state carries.
pub type SignedTerm = (i8, PauliTerm);

pub fn rows_to_bitmatrix(rows: &[PauliTerm], n: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows.len(), 2 * n);
    for (i, t) in rows.iter().enumerate() {
        for site in 0..n {
            if t.x_bit(site) {
                m.set(i, site, true);
            }
            if t.z_bit(site) {
                m.set(i, n + site, true);
            }
        }
    }
    m
}

pub fn bitmatrix_to_rows(m: &BitMatrix, n: usize) -> Vec<PauliTerm> {
    assert_eq!(m.ncols(), 2 * n);
    (0..m.nrows())
        .map(|i| {
            let sites: Vec<(usize, char)> = (0..n)
                .filter_map(|s| match (m.get(i, s), m.get(i, n + s)) {
                    (false, false) => None,
                    (true, false) => Some((s, 'X')),
                    (true, true) => Some((s, 'Y')),
                    (false, true) => Some((s, 'Z')),
                })
                .collect();
            PauliTerm::from_sites(n, &sites).expect("sites in range")
        })
        .collect()
}

/// `H0 = -sum_j h_j s_j`: canonical term list with extracted weights and the
/// first maximal independent generator subset.
#[derive(Clone, Debug)]
pub struct StabilizerHamiltonian {
    terms: PauliSum,
    weights: Vec<f64>,
    generator_indices: Vec<usize>,
}

impl StabilizerHamiltonian {
    pub fn nqubits(&self) -> usize {
        self.terms.nqubits()
    }

    /// The full signed term sum (coefficients are `-h_j`).
    pub fn terms(&self) -> &PauliSum {
        &self.terms
    }

    /// Positive weights `h_j`, aligned with the canonical term order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_terms(&self) -> usize {
        self.weights.len()
    }

    /// Independent generators, a subset of the term rows.
    pub fn generators(&self) -> Vec<PauliTerm> {
        self.generator_indices.iter().map(|&i| self.terms.term(i)).collect()
    }

    pub fn generator_rows(&self) -> BitMatrix {
        rows_to_bitmatrix(&self.generators(), self.nqubits())
    }

    pub fn num_generators(&self) -> usize {
        self.generator_indices.len()
    }

    /// Ground-state energy `-sum_j h_j`.
    pub fn ground_energy(&self) -> f64 {
        -self.weights.iter().sum::<f64>()
    }
}

/// Validate commutation and weight signs, then extract generators by F2 row
/// reduction over the term rows in canonical order.
pub fn build_stabilizer_hamiltonian(terms: &PauliSum) -> Result<StabilizerHamiltonian> {
    let n = terms.nqubits();
    let mut weights = Vec::with_capacity(terms.len());
    for (i, c) in terms.coeffs().iter().enumerate() {
        if c.im.abs() > 1e-12 * c.norm() || c.re >= 0.0 {
            return Err(Error::InvalidWeight { index: i, value: *c });
        }
        weights.push(-c.re);
    }
    let cm = terms.commutation_matrix(terms)?;
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            if cm.entry(i, j) {
                return Err(Error::NonCommutingPair { i, j });
            }
        }
    }

    // incremental elimination: keep term rows that extend the row space
    let words = (2 * n).div_ceil(64);
    let full = rows_to_bitmatrix(
        &(0..terms.len()).map(|i| terms.term(i)).collect::<Vec<_>>(),
        n,
    );
    // basis kept in reduced echelon form: each row zero at all other pivots
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut generator_indices = Vec::new();
    for i in 0..terms.len() {
        let mut row: Vec<u64> = vec![0; words];
        for c in 0..2 * n {
            if full.get(i, c) {
                row[c / 64] |= 1 << (c % 64);
            }
        }
        for (pivot, basis_row) in &echelon {
            if (row[pivot / 64] >> (pivot % 64)) & 1 == 1 {
                for (r, b) in row.iter_mut().zip(basis_row) {
                    *r ^= b;
                }
            }
        }
        if let Some(pivot) = row
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * 64 + w.trailing_zeros() as usize)
        {
            for (_, basis_row) in echelon.iter_mut() {
                if (basis_row[pivot / 64] >> (pivot % 64)) & 1 == 1 {
                    for (b, r) in basis_row.iter_mut().zip(&row) {
                        *b ^= r;
                    }
                }
            }
            echelon.push((pivot, row));
            generator_indices.push(i);
        }
    }

    Ok(StabilizerHamiltonian { terms: terms.clone(), weights, generator_indices })
}

/// A complete signed stabilizer set of rank N plus its destabilizer rows.
#[derive(Clone, Debug)]
pub struct GroundStateSpec {
    n: usize,
    rows: Vec<PauliTerm>,
    signs: Vec<i8>,
    destab: Vec<PauliTerm>,
}

impl GroundStateSpec {
    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliTerm] {
        &self.rows
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn signed_rows(&self) -> Vec<SignedTerm> {
        self.signs.iter().copied().zip(self.rows.iter().cloned()).collect()
    }

    pub fn destabilizers(&self) -> &[PauliTerm] {
        &self.destab
    }

    pub fn stab_bitmatrix(&self) -> BitMatrix {
        rows_to_bitmatrix(&self.rows, self.n)
    }

    pub fn destab_bitmatrix(&self) -> BitMatrix {
        rows_to_bitmatrix(&self.destab, self.n)
    }

    /// Index of the first stabilizer row the term anticommutes with.
    pub fn first_violation(&self, p: &PauliTerm) -> Result<Option<usize>> {
        for (i, row) in self.rows.iter().enumerate() {
            if !p.commutes_with(row)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Text serialization: sign column then the stabilizer letter string.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (sign, row) in self.signs.iter().zip(&self.rows) {
            out.push_str(&format!("{:+} {}\n", sign, row.letters()));
        }
        out
    }
}

/// Build a full spec from the Hamiltonian generators plus extra signed
/// stabilizers (logical operators, symmetry charges).
pub fn complete_ground_state(
    h: &StabilizerHamiltonian,
    extra: &[SignedTerm],
) -> Result<GroundStateSpec> {
    let n = h.nqubits();
    let mut rows = h.generators();
    let mut signs = vec![1i8; rows.len()];
    if rows.len() + extra.len() > n {
        return Err(Error::OverComplete { given: rows.len() + extra.len(), nqubits: n });
    }
    for (k, (sign, t)) in extra.iter().enumerate() {
        if t.nqubits() != n {
            return Err(Error::SizeMismatch { left: t.nqubits(), right: n });
        }
        for (i, row) in rows.iter().enumerate() {
            if !t.commutes_with(row)? {
                return Err(Error::NonCommutingPair { i, j: rows.len() + k });
            }
        }
        rows.push(t.clone());
        signs.push(if *sign >= 0 { 1 } else { -1 });
    }
    let m = rows_to_bitmatrix(&rows, n);
    let r = f2::rank(&m);
    if rows.len() != n || r != n {
        return Err(Error::RankDeficient { expected: n, found: r });
    }
    let destab = compute_destabilizers(&rows, n)?;
    Ok(GroundStateSpec { n, rows, signs, destab })
}

/// Destabilizer rows from the Smith normal form `P CM_gs Q = [I | 0]`:
/// `CM_dgs = [(Q21 P)^T | (Q11 P)^T]`, satisfying
/// `CM_dgs L CM_gs^T = I mod 2`.
pub fn compute_destabilizers(rows: &[PauliTerm], n: usize) -> Result<Vec<PauliTerm>> {
    let m = rows_to_bitmatrix(rows, n);
    if m.nrows() != n {
        return Err(Error::RankDeficient { expected: n, found: m.nrows() });
    }
    let (p, q) = f2::smith_normal_form(&m)?;
    let mut q11 = BitMatrix::zeros(n, n);
    let mut q21 = BitMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            q11.set(r, c, q.get(r, c));
            q21.set(r, c, q.get(n + r, c));
        }
    }
    let left = q21.multiply(&p).transpose();
    let right = q11.multiply(&p).transpose();
    let mut dgs = BitMatrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            dgs.set(r, c, left.get(r, c));
            dgs.set(r, n + c, right.get(r, c));
        }
    }
    let destab = bitmatrix_to_rows(&dgs, n);
    debug_assert!(destabilizer_identity_holds(rows, &destab));
    Ok(destab)
}

/// `[dg_i, g_j] = 0` for `i != j` and `[dg_i, g_i] != 0`.
pub fn destabilizer_identity_holds(rows: &[PauliTerm], destab: &[PauliTerm]) -> bool {
    rows.len() == destab.len()
        && destab.iter().enumerate().all(|(i, d)| {
            rows.iter()
                .enumerate()
                .all(|(j, g)| d.commutes_with(g).map(|c| c == (i != j)).unwrap_or(false))
        })
}

/// Decomposition of a commuting Pauli string over the signed stabilizer set:
/// `P = sign * prod_i g_i^(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabDecomposition {
    pub exponents: Vec<bool>,
    pub sign: i8,
}

/// Decompose a string with prefactor +1 over the spec's signed generators.
///
/// The exponents come from commutation with the destabilizer rows; the sign
/// from explicitly multiplying the selected signed generators and comparing
/// the accumulated phase with `P`.
pub fn stabilizer_decompose(p: &PauliTerm, gs: &GroundStateSpec) -> Result<StabDecomposition> {
    if let Some(index) = gs.first_violation(p)? {
        return Err(Error::NonCommutingStabilizer { index });
    }
    let exponents: Vec<bool> = gs
        .destab
        .iter()
        .map(|d| p.commutes_with(d).map(|c| !c))
        .collect::<Result<_>>()?;

    // multiply out the selected signed generators
    let n = gs.n;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = PauliTerm::identity(n);
    let mut phase = one;
    for (i, &e) in exponents.iter().enumerate() {
        if !e {
            continue;
        }
        phase *= Complex64::new(f64::from(gs.signs[i]), 0.0) * phase_f(&acc, &gs.rows[i])?;
        let sites: Vec<(usize, char)> = (0..n)
            .filter_map(|s| {
                let xb = acc.x_bit(s) ^ gs.rows[i].x_bit(s);
                let zb = acc.z_bit(s) ^ gs.rows[i].z_bit(s);
                match (xb, zb) {
                    (false, false) => None,
                    (true, false) => Some((s, 'X')),
                    (true, true) => Some((s, 'Y')),
                    (false, true) => Some((s, 'Z')),
                }
            })
            .collect();
        acc = PauliTerm::from_sites(n, &sites)?;
    }
    if &acc != p {
        return Err(Error::InvalidInput(
            "string is not in the stabilizer group (decomposition mismatch)".into(),
        ));
    }
    // the product of commuting Hermitian strings is Hermitian: phase is +-1
    debug_assert!(phase.im.abs() < 1e-12);
    let sign = if phase.re > 0.0 { 1 } else { -1 };
    Ok(StabDecomposition { exponents, sign })
}

/// Which H0 terms a string anticommutes with, and the resulting gap.
#[derive(Clone, Debug)]
pub struct ExcitationProfile {
    pub flipped: Vec<bool>,
    pub delta_e: f64,
}

/// `Delta E = sum over flipped terms of 2 h_j`.
pub fn excitation_profile(p: &PauliTerm, h: &StabilizerHamiltonian) -> Result<ExcitationProfile> {
    let as_sum = PauliSum::from_terms(h.nqubits(), &[(Complex64::new(1.0, 0.0), p.clone())]);
    let cm = as_sum.commutation_matrix(h.terms())?;
    let flipped: Vec<bool> = (0..h.num_terms()).map(|j| cm.entry(0, j)).collect();
    let delta_e = flipped
        .iter()
        .zip(h.weights())
        .filter(|(f, _)| **f)
        .map(|(_, w)| 2.0 * w)
        .sum();
    Ok(ExcitationProfile { flipped, delta_e })
}

/// Basis of all Pauli rows commuting with every given stabilizer row, as a
/// bit matrix in `[x | z]` layout.
pub fn centralizer_basis(stab_rows: &BitMatrix) -> BitMatrix {
    let n2 = stab_rows.ncols();
    assert!(n2 % 2 == 0);
    let n = n2 / 2;
    // rows of (CM * L): swap the x and z halves
    let mut swapped = BitMatrix::zeros(stab_rows.nrows(), n2);
    for r in 0..stab_rows.nrows() {
        for c in 0..n {
            swapped.set(r, c, stab_rows.get(r, n + c));
            swapped.set(r, n + c, stab_rows.get(r, c));
        }
    }
    f2::nullspace(&swapped)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn chain_h0(n: usize) -> StabilizerHamiltonian {
        // periodic Ising bonds, unit weights
        let terms: Vec<(Complex64, PauliTerm)> = (0..n)
            .map(|j| {
                (c(-1.0), PauliTerm::from_sites(n, &[(j, 'Z'), ((j + 1) % n, 'Z')]).unwrap())
            })
            .collect();
        build_stabilizer_hamiltonian(&PauliSum::from_terms(n, &terms)).unwrap()
    }

    #[test]
    fn tfim_ring_rank() {
        // four periodic bonds are rank 3
        let h = chain_h0(4);
        assert_eq!(h.num_terms(), 4);
        assert_eq!(h.num_generators(), 3);
    }

    #[test]
    fn noncommuting_terms_rejected() {
        let terms = PauliSum::from_terms(
            1,
            &[
                (c(-1.0), PauliTerm::from_letters("X").unwrap()),
                (c(-1.0), PauliTerm::from_letters("Z").unwrap()),
            ],
        );
        assert!(matches!(
            build_stabilizer_hamiltonian(&terms),
            Err(Error::NonCommutingPair { .. })
        ));
    }

    #[test]
    fn positive_coefficient_rejected() {
        let terms = PauliSum::from_terms(1, &[(c(1.0), PauliTerm::from_letters("Z").unwrap())]);
        assert!(matches!(
            build_stabilizer_hamiltonian(&terms),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn all_up_chain_spec_and_destabilizers() {
        let n = 5;
        let h = chain_h0(n);
        let zn = PauliTerm::single(n, n - 1, 'Z').unwrap();
        let gs = complete_ground_state(&h, &[(1, zn)]).unwrap();
        assert_eq!(gs.rows().len(), n);
        assert!(destabilizer_identity_holds(gs.rows(), gs.destabilizers()));
    }

    #[test]
    fn single_qubit_destabilizer() {
        let rows = vec![PauliTerm::from_letters("Z").unwrap()];
        let destab = compute_destabilizers(&rows, 1).unwrap();
        let letters = destab[0].letters();
        assert!(letters == "X" || letters == "Y", "got {letters}");
    }

    #[test]
    fn decompose_all_up_chain() {
        // Z_j = prod_{i=j..N} g_i with sign +1 for the all-up chain
        let n = 5;
        let h = chain_h0(n);
        let zn = PauliTerm::single(n, n - 1, 'Z').unwrap();
        let gs = complete_ground_state(&h, &[(1, zn.clone())]).unwrap();
        for j in 0..n {
            let p = PauliTerm::single(n, j, 'Z').unwrap();
            let d = stabilizer_decompose(&p, &gs).unwrap();
            assert_eq!(d.sign, 1, "site {j}");
        }
        // all-down chain flips the sign of every Z_j
        let gs_down = complete_ground_state(&h, &[(-1, zn)]).unwrap();
        for j in 0..n {
            let p = PauliTerm::single(n, j, 'Z').unwrap();
            let d = stabilizer_decompose(&p, &gs_down).unwrap();
            assert_eq!(d.sign, -1, "site {j}");
        }
    }

    #[test]
    fn decompose_identity_is_trivial() {
        let n = 4;
        let h = chain_h0(n);
        let gs =
            complete_ground_state(&h, &[(1, PauliTerm::single(n, n - 1, 'Z').unwrap())]).unwrap();
        let d = stabilizer_decompose(&PauliTerm::identity(n), &gs).unwrap();
        assert!(d.exponents.iter().all(|&e| !e));
        assert_eq!(d.sign, 1);
    }

    #[test]
    fn decompose_rejects_anticommuting() {
        let n = 4;
        let h = chain_h0(n);
        let gs =
            complete_ground_state(&h, &[(1, PauliTerm::single(n, n - 1, 'Z').unwrap())]).unwrap();
        let p = PauliTerm::single(n, 0, 'X').unwrap();
        assert!(matches!(
            stabilizer_decompose(&p, &gs),
            Err(Error::NonCommutingStabilizer { .. })
        ));
    }

    #[test]
    fn excitation_profile_tfim() {
        let n = 6;
        let h = chain_h0(n);
        let p = PauliTerm::single(n, 2, 'X').unwrap();
        let prof = excitation_profile(&p, &h).unwrap();
        assert_eq!(prof.flipped.iter().filter(|&&f| f).count(), 2);
        assert!((prof.delta_e - 4.0).abs() < 1e-15);

        let commuting = PauliTerm::single(n, 2, 'Z').unwrap();
        let prof = excitation_profile(&commuting, &h).unwrap();
        assert_eq!(prof.delta_e, 0.0);
        assert!(prof.flipped.iter().all(|&f| !f));
    }

    #[test]
    fn centralizer_dimensions() {
        // stab {Z} on one qubit: centralizer spans {I, Z} -> dimension 1
        let rows = rows_to_bitmatrix(&[PauliTerm::from_letters("Z").unwrap()], 1);
        assert_eq!(centralizer_basis(&rows).nrows(), 1);
        // empty set: everything commutes
        let empty = BitMatrix::zeros(0, 4);
        assert_eq!(centralizer_basis(&empty).nrows(), 4);
    }

    #[test]
    fn centralizer_of_full_rank_set_has_dimension_n() {
        let n = 5;
        let h = chain_h0(n);
        let gs =
            complete_ground_state(&h, &[(1, PauliTerm::single(n, n - 1, 'Z').unwrap())]).unwrap();
        assert_eq!(centralizer_basis(&gs.stab_bitmatrix()).nrows(), n);
    }

    #[test]
    fn overcomplete_rejected() {
        let n = 3;
        let h = chain_h0(n);
        let extra: Vec<SignedTerm> = vec![
            (1, PauliTerm::single(n, 2, 'Z').unwrap()),
            (1, PauliTerm::single(n, 1, 'Z').unwrap()),
        ];
        assert!(matches!(
            complete_ground_state(&h, &extra),
            Err(Error::OverComplete { .. })
        ));
    }

    #[test]
    fn spec_text_has_sign_column() {
        let n = 3;
        let h = chain_h0(n);
        let gs =
            complete_ground_state(&h, &[(-1, PauliTerm::single(n, n - 1, 'Z').unwrap())]).unwrap();
        let text = gs.to_text();
        assert!(text.lines().count() == n);
        assert!(text.lines().last().unwrap().starts_with("-1 "));
    }
}
