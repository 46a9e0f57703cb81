//! Translation-invariant operators stored as one representative per orbit.
//!
//! A `TISum` denotes the orbit sum of its representative: every distinct
//! translate of each representative row appears exactly once in the denoted
//! operator. Arithmetic uses the one-sided trick: a product of two orbit sums
//! is the orbit sum of `rep_1 * expand_full(2)`, with stabilizer-subgroup
//! multiplicities keeping wrap-around strings counted correctly.

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use num_complex::Complex64;
use std::sync::Arc;

/// Commuting qubit-index permutations, one per lattice direction, together
/// with their orders. The group elements are all composed powers.
#[derive(Debug, PartialEq, Eq)]
pub struct TranslationGroup {
    n: usize,
    generators: Vec<Vec<u32>>,
    dims: Vec<usize>,
    elements: Vec<Vec<u32>>,
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // (a ∘ b)(i) = a[b[i]]
    b.iter().map(|&i| a[i as usize]).collect()
}

impl TranslationGroup {
    pub fn new(n: usize, generators: Vec<Vec<u32>>, dims: Vec<usize>) -> Result<Arc<Self>> {
        if generators.len() != dims.len() {
            return Err(Error::InvalidInput("one orbit size per generator required".into()));
        }
        for g in &generators {
            if g.len() != n {
                return Err(Error::InvalidInput("permutation length must equal qubit count".into()));
            }
            let mut seen = vec![false; n];
            for &i in g {
                if i as usize >= n || seen[i as usize] {
                    return Err(Error::InvalidInput("generator is not a bijection".into()));
                }
                seen[i as usize] = true;
            }
        }
        let identity: Vec<u32> = (0..n as u32).collect();
        for (g, &d) in generators.iter().zip(&dims) {
            let mut acc = identity.clone();
            for _ in 0..d {
                acc = compose(g, &acc);
            }
            if acc != identity {
                return Err(Error::InvalidInput(
                    "generator order does not match its orbit size".into(),
                ));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators.iter().skip(i + 1) {
                if compose(a, b) != compose(b, a) {
                    return Err(Error::InvalidInput("generators must commute".into()));
                }
            }
        }

        let mut elements = vec![identity.clone()];
        for (g, &d) in generators.iter().zip(&dims) {
            let mut next = Vec::with_capacity(elements.len() * d);
            for e in &elements {
                let mut acc = e.clone();
                for _ in 0..d {
                    next.push(acc.clone());
                    acc = compose(g, &acc);
                }
            }
            elements = next;
        }
        Ok(Arc::new(TranslationGroup { n, generators, dims, elements }))
    }

    /// Cyclic shift on a ring of `n` qubits.
    pub fn cyclic(n: usize) -> Arc<Self> {
        let shift: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        Self::new(n, vec![shift], vec![n]).expect("cyclic shift is valid")
    }

    pub fn nqubits(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn apply(&self, perm_index: usize, t: &PauliTerm) -> PauliTerm {
        translate_term(t, &self.elements[perm_index])
    }
}

pub fn translate_term(t: &PauliTerm, perm: &[u32]) -> PauliTerm {
    let n = t.nqubits();
    let mut sites = Vec::new();
    for s in 0..n {
        let (xb, zb) = (t.x_bit(s), t.z_bit(s));
        if xb || zb {
            let dest = perm[s] as usize;
            let letter = match (xb, zb) {
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
                (false, false) => unreachable!(),
            };
            sites.push((dest, letter));
        }
    }
    PauliTerm::from_sites(n, &sites).expect("permutation stays in range")
}

fn row_key(t: &PauliTerm) -> (Vec<u64>, Vec<u64>) {
    (t.x_words().to_vec(), t.z_words().to_vec())
}

/// Translation-invariant operator: canonical representative plus group.
#[derive(Clone, Debug)]
pub struct TISum {
    rep: PauliSum,
    group: Arc<TranslationGroup>,
}

impl TISum {
    /// Wrap a representative; every row is translated to the minimal image of
    /// its orbit, so equal orbits merge.
    pub fn new(rep: PauliSum, group: Arc<TranslationGroup>) -> Result<Self> {
        if rep.nqubits() != group.nqubits() {
            return Err(Error::SizeMismatch { left: rep.nqubits(), right: group.nqubits() });
        }
        let n = rep.nqubits();
        let mut terms: Vec<(Complex64, PauliTerm)> = Vec::with_capacity(rep.len());
        for (c, t) in rep.terms() {
            let (min_term, _) = minimal_image(&t, &group);
            terms.push((c, min_term));
        }
        Ok(TISum { rep: PauliSum::from_terms(n, &terms), group })
    }

    pub fn zero(group: Arc<TranslationGroup>) -> Self {
        let n = group.nqubits();
        TISum { rep: PauliSum::zero(n), group }
    }

    pub fn rep(&self) -> &PauliSum {
        &self.rep
    }

    pub fn group(&self) -> &Arc<TranslationGroup> {
        &self.group
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    fn check_group(&self, other: &TISum) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TISum) -> Result<TISum> {
        self.check_group(other)?;
        Ok(TISum { rep: self.rep.add(&other.rep)?, group: Arc::clone(&self.group) })
    }

    pub fn scale(&self, factor: Complex64) -> TISum {
        TISum { rep: self.rep.scale(factor), group: Arc::clone(&self.group) }
    }

    /// Orbit sum of the product: `rep_1 * expand_full(other)`, reweighted by
    /// the stabilizer-size ratio of output vs input rows.
    pub fn multiply(&self, other: &TISum) -> Result<TISum> {
        self.one_sided(other, |row, full| row.multiply(full))
    }

    pub fn commutator(&self, other: &TISum) -> Result<TISum> {
        self.one_sided(other, |row, full| row.commutator(full))
    }

    fn one_sided<F>(&self, other: &TISum, op: F) -> Result<TISum>
    where
        F: Fn(&PauliSum, &PauliSum) -> Result<PauliSum>,
    {
        self.check_group(other)?;
        let n = self.rep.nqubits();
        let full_other = other.expand_full();
        let mut terms: Vec<(Complex64, PauliTerm)> = Vec::new();
        for (c, t) in self.rep.terms() {
            let stab_in = stabilizer_size(&t, &self.group);
            let single = PauliSum::from_terms(n, &[(c / stab_in as f64, t)]);
            let prod = op(&single, &full_other)?;
            for (d, q) in prod.terms() {
                let (min_q, stab_out) = minimal_image(&q, &self.group);
                terms.push((d * stab_out as f64, min_q));
            }
        }
        Ok(TISum { rep: PauliSum::from_terms(n, &terms), group: Arc::clone(&self.group) })
    }

    /// Materialize the denoted operator: every distinct translate of every
    /// representative row, coefficients unchanged.
    pub fn expand_full(&self) -> PauliSum {
        let n = self.rep.nqubits();
        let mut terms: Vec<(Complex64, PauliTerm)> = Vec::new();
        for (c, t) in self.rep.terms() {
            let mut images: Vec<(Vec<u64>, Vec<u64>)> = Vec::with_capacity(self.group.order());
            let mut distinct: Vec<PauliTerm> = Vec::new();
            for perm in self.group.elements() {
                let img = translate_term(&t, perm);
                let key = row_key(&img);
                if !images.contains(&key) {
                    images.push(key);
                    distinct.push(img);
                }
            }
            for img in distinct {
                terms.push((c, img));
            }
        }
        PauliSum::from_terms(n, &terms)
    }
}

fn minimal_image(t: &PauliTerm, group: &TranslationGroup) -> (PauliTerm, usize) {
    let mut min = t.clone();
    let mut min_key = row_key(t);
    let original_key = min_key.clone();
    let mut stab = 0usize;
    for perm in group.elements() {
        let img = translate_term(t, perm);
        let key = row_key(&img);
        if key == original_key {
            stab += 1;
        }
        if key < min_key {
            min_key = key;
            min = img;
        }
    }
    (min, stab)
}

/// Number of group elements fixing the row.
pub fn stabilizer_size(t: &PauliTerm, group: &TranslationGroup) -> usize {
    let original = row_key(t);
    group
        .elements()
        .iter()
        .filter(|perm| row_key(&translate_term(t, perm)) == original)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(n: usize, site: usize, letter: char, w: f64) -> PauliSum {
        PauliSum::from_terms(
            n,
            &[(c(w), PauliTerm::single(n, site, letter).unwrap())],
        )
    }

    #[test]
    fn cyclic_orbit_of_x() {
        let g = TranslationGroup::cyclic(3);
        let ti = TISum::new(single(3, 0, 'X', 1.0), Arc::clone(&g)).unwrap();
        let full = ti.expand_full();
        assert_eq!(full.len(), 3);
        for (coeff, _) in full.terms() {
            assert_eq!(coeff, c(1.0));
        }
    }

    #[test]
    fn full_orbit_symmetric_string_is_itself() {
        // all-X string is invariant under every translation
        let n = 4;
        let g = TranslationGroup::cyclic(n);
        let allx = PauliSum::from_terms(n, &[(c(1.0), PauliTerm::from_letters("XXXX").unwrap())]);
        let ti = TISum::new(allx.clone(), Arc::clone(&g)).unwrap();
        assert_eq!(ti.expand_full(), allx);
    }

    #[test]
    fn bond_orbit_on_ring() {
        let n = 4;
        let g = TranslationGroup::cyclic(n);
        let bond = PauliSum::from_terms(
            n,
            &[(c(1.0), PauliTerm::from_sites(n, &[(0, 'Z'), (1, 'Z')]).unwrap())],
        );
        let full = TISum::new(bond, Arc::clone(&g)).unwrap().expand_full();
        assert_eq!(full.len(), 4);
    }

    #[test]
    fn add_matches_full_expansion() {
        let n = 6;
        let g = TranslationGroup::cyclic(n);
        let a = TISum::new(single(n, 0, 'X', 0.5), Arc::clone(&g)).unwrap();
        let b = TISum::new(single(n, 0, 'Z', -2.0), Arc::clone(&g)).unwrap();
        let sum = a.add(&b).unwrap();
        let direct = a.expand_full().add(&b.expand_full()).unwrap();
        assert_eq!(sum.expand_full(), direct);
    }

    #[test]
    fn add_cancels() {
        let n = 5;
        let g = TranslationGroup::cyclic(n);
        let a = TISum::new(single(n, 2, 'Y', 1.0), Arc::clone(&g)).unwrap();
        let minus = a.scale(c(-1.0));
        assert!(a.add(&minus).unwrap().is_empty());
    }

    #[test]
    fn multiply_matches_full_expansion() {
        let n = 6;
        let g = TranslationGroup::cyclic(n);
        let a = TISum::new(single(n, 0, 'X', 1.0), Arc::clone(&g)).unwrap();
        let b = TISum::new(single(n, 0, 'Z', 1.0), Arc::clone(&g)).unwrap();
        let prod = a.multiply(&b).unwrap();
        let direct = a.expand_full().multiply(&b.expand_full()).unwrap();
        assert_eq!(prod.expand_full(), direct);
    }

    #[test]
    fn multiply_identity_rep() {
        let n = 6;
        let g = TranslationGroup::cyclic(n);
        // the identity orbit has stabilizer size |G|: its orbit sum is I itself
        let id = TISum::new(PauliSum::identity(n), Arc::clone(&g)).unwrap();
        let b = TISum::new(single(n, 0, 'Z', 2.0), Arc::clone(&g)).unwrap();
        let prod = id.multiply(&b).unwrap();
        // the 1/|Stab| bookkeeping leaves ulp-level roundoff
        let diff = prod.expand_full().sub(&b.expand_full()).unwrap();
        let worst = diff.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "residual {worst}");
    }

    #[test]
    fn commutator_matches_full_expansion_tfim() {
        // [-h sum X, -sum ZZ] on an 8-ring
        let n = 8;
        let g = TranslationGroup::cyclic(n);
        let h1 = TISum::new(single(n, 0, 'X', -0.3), Arc::clone(&g)).unwrap();
        let h0 = TISum::new(
            PauliSum::from_terms(
                n,
                &[(c(-1.0), PauliTerm::from_sites(n, &[(0, 'Z'), (1, 'Z')]).unwrap())],
            ),
            Arc::clone(&g),
        )
        .unwrap();
        let comm = h1.commutator(&h0).unwrap();
        let direct = h1.expand_full().commutator(&h0.expand_full()).unwrap();
        assert_eq!(comm.expand_full(), direct);
    }

    #[test]
    fn commutator_with_self_is_zero() {
        let n = 5;
        let g = TranslationGroup::cyclic(n);
        let a = TISum::new(single(n, 0, 'X', 1.0), Arc::clone(&g)).unwrap();
        assert!(a.commutator(&a).unwrap().is_empty());
    }

    #[test]
    fn group_mismatch_rejected() {
        let a = TISum::new(single(4, 0, 'X', 1.0), TranslationGroup::cyclic(4)).unwrap();
        let b = TISum::new(single(4, 0, 'X', 1.0), {
            // same qubit count, different group structure
            let shift2: Vec<u32> = (0..4u32).map(|i| (i + 2) % 4).collect();
            TranslationGroup::new(4, vec![shift2], vec![2]).unwrap()
        })
        .unwrap();
        assert!(matches!(a.add(&b), Err(Error::GroupMismatch)));
    }

    #[test]
    fn two_dimensional_group() {
        // 2x2 torus with one qubit per cell
        let (lx, ly) = (2usize, 2usize);
        let n = lx * ly;
        let idx = |x: usize, y: usize| (y * lx + x) as u32;
        let tx: Vec<u32> = (0..n).map(|i| idx((i % lx + 1) % lx, i / lx)).collect();
        let ty: Vec<u32> = (0..n).map(|i| idx(i % lx, (i / lx + 1) % ly)).collect();
        let g = TranslationGroup::new(n, vec![tx, ty], vec![lx, ly]).unwrap();
        assert_eq!(g.order(), 4);
        let ti = TISum::new(single(n, 0, 'Z', 1.0), Arc::clone(&g)).unwrap();
        assert_eq!(ti.expand_full().len(), 4);
    }
}
