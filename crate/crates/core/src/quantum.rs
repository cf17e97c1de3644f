//! CSS quantum polar codes.
//!
//! A code is a pair of information sets `A_X`, `A_Z` over the rows of `E`.
//! X stabilizers are the rows of `E` in `A_X^c`; Z checks measure `(eE)` on
//! `A_Z^c`. The CSS condition is `A_X^c` and `A_Z^c` being disjoint, and
//! the logical rows are `A_X ∩ A_Z`.
//!
//! X-type noise is decoded with the classical code whose information set is
//! `A_Z`. Because `E^T = J E J` for the index reversal `J`, Z-type noise is
//! the X-type problem of [`QuantumPolarCode::mirrored`] applied to the
//! reversed error.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitBlock, BitVector};
use crate::construction::{rank_rows, ClassicalPolarCode, ConstructionError, ConstructionSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("K_X + K_Z = {sum} must exceed N = {len}")]
    NoLogicalQubits { sum: usize, len: usize },
    #[error("K_X = {k_x}, K_Z = {k_z} out of range for N = {len}")]
    Dimensions { k_x: usize, k_z: usize, len: usize },
    #[error("a symmetric code needs 1 <= K <= N with K of the same parity as N = {len}, got K = {k}")]
    SymmetricK { k: usize, len: usize },
    #[error("Q1 with information index {index} requires K_X = {k_x}, K_Z = {k_z}")]
    Q1Dimensions { index: usize, k_x: usize, k_z: usize },
    #[error("frozen sets intersect at row {0}; the CSS condition fails")]
    Css(usize),
    #[error("error pattern has length {got}, code length is {expected}")]
    Length { expected: usize, got: usize },
    #[error("noise and correction have different syndromes")]
    SyndromeMismatch,
}

/// Value of `(eE)` on the logical rows, ascending row order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub BitVector);

impl ClassLabel {
    pub fn zero(k: usize) -> Self {
        Self(BitVector::zeros(k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn bits(&self) -> &BitVector {
        &self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::ops::BitXor for &ClassLabel {
    type Output = ClassLabel;

    fn bitxor(self, rhs: &ClassLabel) -> ClassLabel {
        ClassLabel(&self.0 ^ &rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPolarCode {
    n: usize,
    info_x: Vec<usize>,
    info_z: Vec<usize>,
    frozen_x: Vec<usize>,
    frozen_z: Vec<usize>,
    logical: Vec<usize>,
    construction: Option<ConstructionSpec>,
    x_noise_code: ClassicalPolarCode,
}

/// True iff no row is frozen in both bases.
pub fn css_condition_holds(frozen_x: &[usize], frozen_z: &[usize]) -> bool {
    first_shared(frozen_x, frozen_z).is_none()
}

fn first_shared(a: &[usize], b: &[usize]) -> Option<usize> {
    let set: std::collections::HashSet<usize> = a.iter().copied().collect();
    let mut shared: Vec<usize> = b.iter().copied().filter(|i| set.contains(i)).collect();
    shared.sort_unstable();
    shared.first().copied()
}

fn complement(len: usize, set: &[usize]) -> Vec<usize> {
    let mut mark = vec![false; len];
    for &i in set {
        mark[i] = true;
    }
    (0..len).filter(|&i| !mark[i]).collect()
}

impl QuantumPolarCode {
    /// A code from explicit information sets. Fails if the CSS condition does
    /// not hold or there are no logical rows.
    pub fn from_info_sets(
        n: usize,
        info_x: &[usize],
        info_z: &[usize],
    ) -> Result<Self, QuantumError> {
        let x_noise_code = ClassicalPolarCode::from_info_set(n, info_z)?;
        let x_code = ClassicalPolarCode::from_info_set(n, info_x)?;
        let len = 1usize << n;
        let info_x = x_code.info_set().to_vec();
        let info_z = x_noise_code.info_set().to_vec();
        let frozen_x = x_code.frozen_set().to_vec();
        let frozen_z = x_noise_code.frozen_set().to_vec();
        if let Some(i) = first_shared(&frozen_x, &frozen_z) {
            return Err(QuantumError::Css(i));
        }
        if info_x.len() + info_z.len() <= len {
            return Err(QuantumError::NoLogicalQubits {
                sum: info_x.len() + info_z.len(),
                len,
            });
        }
        let logical = info_x
            .iter()
            .copied()
            .filter(|i| !x_noise_code.is_frozen(*i))
            .collect();
        Ok(Self {
            n,
            info_x,
            info_z,
            frozen_x,
            frozen_z,
            logical,
            construction: None,
            x_noise_code,
        })
    }

    pub fn log_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k_x(&self) -> usize {
        self.info_x.len()
    }

    pub fn k_z(&self) -> usize {
        self.info_z.len()
    }

    /// Number of logical qubits, `K_X + K_Z - N`.
    pub fn k(&self) -> usize {
        self.logical.len()
    }

    pub fn info_x(&self) -> &[usize] {
        &self.info_x
    }

    pub fn info_z(&self) -> &[usize] {
        &self.info_z
    }

    pub fn frozen_x(&self) -> &[usize] {
        &self.frozen_x
    }

    pub fn frozen_z(&self) -> &[usize] {
        &self.frozen_z
    }

    /// Logical rows `A_X ∩ A_Z`, ascending.
    pub fn logical(&self) -> &[usize] {
        &self.logical
    }

    pub fn construction(&self) -> Option<&ConstructionSpec> {
        self.construction.as_ref()
    }

    /// Classical code (information set `A_Z`) that decodes X-type noise.
    pub fn x_noise_code(&self) -> &ClassicalPolarCode {
        &self.x_noise_code
    }

    pub fn verify_css(&self) -> bool {
        css_condition_holds(&self.frozen_x, &self.frozen_z)
    }

    fn check_len(&self, e: &BitBlock) -> Result<(), QuantumError> {
        if e.len() != self.len() {
            return Err(QuantumError::Length {
                expected: self.len(),
                got: e.len(),
            });
        }
        Ok(())
    }

    /// `(eE)` on `A_Z^c`.
    pub fn x_syndrome(&self, e: &BitBlock) -> Result<BitVector, QuantumError> {
        self.check_len(e)?;
        Ok(e.transformed().gather(&self.frozen_z))
    }

    /// `(eE)` on the logical rows.
    pub fn class_label(&self, e: &BitBlock) -> Result<ClassLabel, QuantumError> {
        self.check_len(e)?;
        Ok(self.label_of_transform(&e.transformed()))
    }

    /// Label from an already transformed pattern `u = eE`.
    pub fn label_of_transform(&self, u: &BitBlock) -> ClassLabel {
        ClassLabel(u.gather(&self.logical))
    }

    /// Syndrome and label with one transform.
    pub fn syndrome_and_label(&self, e: &BitBlock) -> Result<(BitVector, ClassLabel), QuantumError> {
        self.check_len(e)?;
        let u = e.transformed();
        Ok((u.gather(&self.frozen_z), self.label_of_transform(&u)))
    }

    /// Whether `e` is an X stabilizer.
    pub fn is_x_stabilizer(&self, e: &BitBlock) -> Result<bool, QuantumError> {
        let (s, label) = self.syndrome_and_label(e)?;
        Ok(s.is_zero() && label.is_zero())
    }

    /// Whether correcting noise `noise` by `correction` leaves a logical
    /// operator behind.
    pub fn logical_x_error(
        &self,
        noise: &BitBlock,
        correction: &BitBlock,
    ) -> Result<bool, QuantumError> {
        self.check_len(noise)?;
        self.check_len(correction)?;
        let (s, label) = self.syndrome_and_label(&(noise ^ correction))?;
        if !s.is_zero() {
            return Err(QuantumError::SyndromeMismatch);
        }
        Ok(!label.is_zero())
    }

    /// Rows of `E` in `A_X^c`, generators of the X stabilizer group.
    pub fn x_stabilizer_generators(&self) -> Vec<BitBlock> {
        self.rows(&self.frozen_x)
    }

    /// Rows of `E` at the logical positions.
    pub fn logical_rows(&self) -> Vec<BitBlock> {
        self.rows(&self.logical)
    }

    fn rows(&self, indices: &[usize]) -> Vec<BitBlock> {
        indices
            .iter()
            .map(|&i| BitBlock::unit(self.len(), i).expect("valid length").transformed())
            .collect()
    }

    /// The code whose X-type problem is this code's Z-type problem:
    /// `A_X' = rev(A_Z)`, `A_Z' = rev(A_X)`.
    pub fn mirrored(&self) -> QuantumPolarCode {
        let last = self.len() - 1;
        let rev = |s: &[usize]| s.iter().map(|&i| last - i).collect::<Vec<_>>();
        let mut m = Self::from_info_sets(self.n, &rev(&self.info_z), &rev(&self.info_x))
            .expect("mirror of a valid code is valid");
        m.construction = self.construction.clone();
        m
    }

    /// Z checks: `e_z E^T` on `A_X^c`, reported in ascending `A_X^c` order.
    pub fn z_syndrome(&self, e: &BitBlock) -> Result<BitVector, QuantumError> {
        self.check_len(e)?;
        let t = e.reversed().transformed().reversed();
        Ok(t.gather(&self.frozen_x))
    }

    /// `e_z E^T` on the logical rows.
    pub fn z_class_label(&self, e: &BitBlock) -> Result<ClassLabel, QuantumError> {
        self.check_len(e)?;
        let t = e.reversed().transformed().reversed();
        Ok(ClassLabel(t.gather(&self.logical)))
    }

    /// Rows of `E^T` in `A_Z^c`, generators of the Z stabilizer group.
    pub fn z_stabilizer_generators(&self) -> Vec<BitBlock> {
        self.frozen_z
            .iter()
            .map(|&i| {
                BitBlock::unit(self.len(), i)
                    .expect("valid length")
                    .reversed()
                    .transformed()
                    .reversed()
            })
            .collect()
    }

    pub fn description(&self) -> QpcDescription {
        QpcDescription {
            n: self.n,
            k_x: self.k_x(),
            k_z: self.k_z(),
            construction: self.construction.clone(),
            frozen_x: self.frozen_x.clone(),
            frozen_z: self.frozen_z.clone(),
            logical: self.logical.clone(),
        }
    }
}

/// Builds a quantum polar code from a row ordering.
///
/// For score constructions `A_Z` is the top `K_Z` rows and `A_X^c` the top
/// `N - K_X` rows. For Q1 with index `i`, `K_X = i + 1` and `K_Z = N - i`
/// are forced: rows `0..i` are frozen in Z and rows `i+1..N` in X.
pub fn build_qpc(
    n: usize,
    k_x: usize,
    k_z: usize,
    spec: &ConstructionSpec,
) -> Result<QuantumPolarCode, QuantumError> {
    spec.validate(n)?;
    let len = 1usize << n;
    if k_x > len || k_z > len {
        return Err(QuantumError::Dimensions { k_x, k_z, len });
    }
    if k_x + k_z <= len {
        return Err(QuantumError::NoLogicalQubits { sum: k_x + k_z, len });
    }
    let (info_x, info_z) = match spec {
        ConstructionSpec::Q1 { q1_info_index: i } => {
            let (want_x, want_z) = (i + 1, len - i);
            if (k_x, k_z) != (want_x, want_z) {
                return Err(QuantumError::Q1Dimensions {
                    index: *i,
                    k_x: want_x,
                    k_z: want_z,
                });
            }
            ((0..=*i).collect::<Vec<_>>(), (*i..len).collect::<Vec<_>>())
        }
        _ => {
            let order = rank_rows(n, spec)?;
            let info_z = order[..k_z].to_vec();
            let info_x = order[len - k_x..].to_vec();
            (info_x, info_z)
        }
    };
    let mut code = QuantumPolarCode::from_info_sets(n, &info_x, &info_z)?;
    code.construction = Some(spec.clone());
    Ok(code)
}

/// Symmetric code with `K_X = K_Z = (N + K) / 2`.
pub fn build_symmetric_qpc(
    n: usize,
    k: usize,
    spec: &ConstructionSpec,
) -> Result<QuantumPolarCode, QuantumError> {
    let len = 1usize << n;
    if k == 0 || k > len || (len + k) % 2 != 0 {
        return Err(QuantumError::SymmetricK { k, len });
    }
    let half = (len + k) / 2;
    build_qpc(n, half, half, spec)
}

/// The single-logical-qubit code at row `i`.
pub fn build_q1(n: usize, i: usize) -> Result<QuantumPolarCode, QuantumError> {
    build_qpc(n, i + 1, (1 << n) - i, &ConstructionSpec::q1(i))
}

/// Serialized quantum code; index lists ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpcDescription {
    pub n: usize,
    #[serde(rename = "K_X")]
    pub k_x: usize,
    #[serde(rename = "K_Z")]
    pub k_z: usize,
    pub construction: Option<ConstructionSpec>,
    pub frozen_x: Vec<usize>,
    pub frozen_z: Vec<usize>,
    pub logical: Vec<usize>,
}

impl QpcDescription {
    /// Rebuilds the code from its frozen sets.
    pub fn to_code(&self) -> Result<QuantumPolarCode, QuantumError> {
        let len = 1usize << self.n;
        let mut code = QuantumPolarCode::from_info_sets(
            self.n,
            &complement(len, &self.frozen_x),
            &complement(len, &self.frozen_z),
        )?;
        code.construction = self.construction.clone();
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::transform_row;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn span(rows: &[BitBlock], len: usize) -> HashSet<BitBlock> {
        let mut out = HashSet::new();
        for m in 0..1u64 << rows.len() {
            let mut acc = BitBlock::zeros(len).unwrap();
            for (j, r) in rows.iter().enumerate() {
                if m >> j & 1 == 1 {
                    acc ^= r;
                }
            }
            out.insert(acc);
        }
        out
    }

    fn block_from_u64(w: u64, len: usize) -> BitBlock {
        BitBlock::new(BitVector::from_u64(w, len)).unwrap()
    }

    fn random_block(rng: &mut ChaCha8Rng, len: usize) -> BitBlock {
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        BitBlock::new(BitVector::from_bools(&bits)).unwrap()
    }

    #[test]
    fn small_table_entries() {
        let cases = [
            (6, ConstructionSpec::pw(), vec![26, 37]),
            (7, ConstructionSpec::hpw(), vec![29, 98]),
            (6, ConstructionSpec::rm(), vec![28, 35]),
        ];
        for (n, spec, want) in cases {
            let half = ((1 << n) + 2) / 2;
            let code = build_qpc(n, half, half, &spec).unwrap();
            assert_eq!(code.logical(), want.as_slice());
            assert_eq!(code.k(), 2);
            assert!(code.verify_css());
        }
    }

    #[test]
    fn dimension_errors() {
        let pw = ConstructionSpec::pw();
        assert!(matches!(
            build_qpc(4, 8, 8, &pw),
            Err(QuantumError::NoLogicalQubits { sum: 16, len: 16 })
        ));
        assert!(matches!(build_qpc(4, 17, 8, &pw), Err(QuantumError::Dimensions { .. })));
        assert!(matches!(
            build_qpc(4, 6, 12, &ConstructionSpec::q1(4)),
            Err(QuantumError::Q1Dimensions { index: 4, k_x: 5, k_z: 12 })
        ));
        assert!(matches!(build_symmetric_qpc(4, 3, &pw), Err(QuantumError::SymmetricK { k: 3, len: 16 })));
    }

    #[test]
    fn shared_frozen_row_violates_css() {
        // both bases freeze row 0
        let info: Vec<usize> = (1..16).collect();
        assert!(matches!(
            QuantumPolarCode::from_info_sets(4, &info, &info),
            Err(QuantumError::Css(0))
        ));
        assert!(!css_condition_holds(&[0, 3], &[3, 5]));
        assert!(css_condition_holds(&[0, 3], &[1, 5]));
    }

    #[test]
    fn q1_codes_freeze_prefix_and_suffix() {
        for n in 2..=8 {
            let len = 1 << n;
            for i in 1..len - 1 {
                let code = build_q1(n, i).unwrap();
                assert!(code.verify_css());
                assert_eq!(code.logical(), &[i]);
                assert_eq!(code.frozen_z(), (0..i).collect::<Vec<_>>().as_slice());
                assert_eq!(code.frozen_x(), (i + 1..len).collect::<Vec<_>>().as_slice());
            }
        }
    }

    #[test]
    fn css_sweep_over_score_constructions() {
        for n in 4..=11 {
            let len = 1usize << n;
            for spec in [ConstructionSpec::pw(), ConstructionSpec::hpw(), ConstructionSpec::rm()] {
                for k in (2..=64.min(len / 4)).step_by(2) {
                    let code = build_symmetric_qpc(n, k, &spec).unwrap();
                    assert!(code.verify_css(), "n={n} k={k} {spec:?}");
                    assert_eq!(code.k(), k);
                }
            }
        }
    }

    #[test]
    fn toy_syndrome_example() {
        let code = QuantumPolarCode::from_info_sets(2, &[0, 1, 2, 3], &[2, 3]).unwrap();
        let e = BitBlock::from_symbols(&[0, 0, 0, 1]).unwrap();
        assert_eq!(code.x_syndrome(&e).unwrap().to_string(), "11");
        assert!(code.x_syndrome(&BitBlock::zeros(4).unwrap()).unwrap().is_zero());
        assert!(matches!(
            code.x_syndrome(&BitBlock::zeros(8).unwrap()),
            Err(QuantumError::Length { expected: 4, got: 8 })
        ));
    }

    #[test]
    fn stabilizers_and_logicals() {
        let code = build_symmetric_qpc(6, 4, &ConstructionSpec::pw()).unwrap();
        for g in code.x_stabilizer_generators() {
            assert!(code.x_syndrome(&g).unwrap().is_zero());
            assert!(code.class_label(&g).unwrap().is_zero());
        }
        let z = BitBlock::zeros(64).unwrap();
        assert!(code.class_label(&z).unwrap().is_zero());
        for (pos, row) in code.logical_rows().iter().enumerate() {
            let label = code.class_label(row).unwrap();
            assert_eq!(label.bits().support(), vec![pos]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = code.x_stabilizer_generators();
        let logicals = code.logical_rows();
        for _ in 0..50 {
            let noise = random_block(&mut rng, 64);
            assert!(!code.logical_x_error(&noise, &noise).unwrap());
            let g = &gens[rng.gen_range(0..gens.len())];
            assert!(!code.logical_x_error(&noise, &(&noise ^ g)).unwrap());
            let l = &logicals[rng.gen_range(0..logicals.len())];
            assert!(code.logical_x_error(&noise, &(&noise ^ l)).unwrap());
            let mut other = noise.clone();
            other.flip(rng.gen_range(0..64));
            if code.x_syndrome(&other).unwrap() != code.x_syndrome(&noise).unwrap() {
                assert!(matches!(
                    code.logical_x_error(&noise, &other),
                    Err(QuantumError::SyndromeMismatch)
                ));
            }
        }
    }

    // Exhaustive at N = 16: the butterfly predicates against explicit spans.
    #[test]
    fn coset_enumeration_oracle_at_sixteen() {
        let code = build_symmetric_qpc(4, 2, &ConstructionSpec::pw()).unwrap();
        let len = 16;
        let stabilizers = span(&code.x_stabilizer_generators(), len);
        assert_eq!(stabilizers.len(), 1 << (len - code.k_x()));
        let z_rows: Vec<BitBlock> = code.info_z().iter().map(|&i| transform_row(len, i).unwrap()).collect();
        let checks_commute = span(&z_rows, len);
        let logicals = code.logical_rows();
        for w in 0..1u64 << len {
            let e = block_from_u64(w, len);
            let (s, label) = code.syndrome_and_label(&e).unwrap();
            assert_eq!(s.is_zero(), checks_commute.contains(&e));
            assert_eq!(s.is_zero() && label.is_zero(), stabilizers.contains(&e));
            if s.is_zero() {
                // which coset c_a + C_X^perp holds e
                let found: Vec<u64> = (0..1u64 << logicals.len())
                    .filter(|a| {
                        let mut f = e.clone();
                        for (j, l) in logicals.iter().enumerate() {
                            if a >> j & 1 == 1 {
                                f ^= l;
                            }
                        }
                        stabilizers.contains(&f)
                    })
                    .collect();
                assert_eq!(found.len(), 1);
                let expect = BitVector::from_u64(found[0], logicals.len());
                assert_eq!(label.bits(), &expect);
            }
        }
    }

    #[test]
    fn label_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = build_symmetric_qpc(8, 16, &ConstructionSpec::hpw()).unwrap();
        for _ in 0..200 {
            let e = random_block(&mut rng, 256);
            let f = random_block(&mut rng, 256);
            let sum = code.class_label(&(&e ^ &f)).unwrap();
            assert_eq!(sum, &code.class_label(&e).unwrap() ^ &code.class_label(&f).unwrap());
        }
    }

    fn dense_transpose_product(e: &BitBlock) -> BitBlock {
        // (e E^T)_i = <e, row i of E>
        let len = e.len();
        let mut out = BitBlock::zeros(len).unwrap();
        for i in 0..len {
            let row = transform_row(len, i).unwrap();
            let dot = e.iter().zip(row.iter()).filter(|(a, b)| *a && *b).count() % 2;
            out.set(i, dot == 1);
        }
        out
    }

    #[test]
    fn z_checks_match_transpose_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = build_symmetric_qpc(6, 6, &ConstructionSpec::rm()).unwrap();
        for _ in 0..100 {
            let e = random_block(&mut rng, 64);
            let t = dense_transpose_product(&e);
            assert_eq!(code.z_syndrome(&e).unwrap(), t.gather(code.frozen_x()));
            assert_eq!(code.z_class_label(&e).unwrap().bits(), &t.gather(code.logical()));
        }
        for g in code.z_stabilizer_generators() {
            assert!(code.z_syndrome(&g).unwrap().is_zero());
            assert!(code.z_class_label(&g).unwrap().is_zero());
            // Z stabilizers commute with X stabilizers
            for x in code.x_stabilizer_generators() {
                assert_eq!(g.iter().zip(x.iter()).filter(|(a, b)| *a && *b).count() % 2, 0);
            }
        }
    }

    #[test]
    fn mirrored_code_solves_the_z_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = build_qpc(6, 40, 30, &ConstructionSpec::hpw()).unwrap();
        let m = code.mirrored();
        assert_eq!((m.k_x(), m.k_z()), (30, 40));
        assert_eq!(m.mirrored(), code);
        for _ in 0..100 {
            let e = random_block(&mut rng, 64);
            let mut direct: Vec<bool> = code.z_syndrome(&e).unwrap().iter().collect();
            let mut via: Vec<bool> = m.x_syndrome(&e.reversed()).unwrap().iter().collect();
            // mirrored frozen rows run in the opposite order
            via.reverse();
            assert_eq!(direct, via);
            direct = code.z_class_label(&e).unwrap().bits().iter().collect();
            via = m.class_label(&e.reversed()).unwrap().bits().iter().collect();
            via.reverse();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn symmetric_score_codes_are_self_mirrored() {
        for n in 4..=10 {
            for spec in [ConstructionSpec::pw(), ConstructionSpec::hpw(), ConstructionSpec::rm()] {
                let code = build_symmetric_qpc(n, 2, &spec).unwrap();
                let m = code.mirrored();
                assert_eq!(m.info_x(), code.info_x());
                assert_eq!(m.info_z(), code.info_z());
            }
        }
        let q = build_q1(5, 9).unwrap();
        assert_eq!(q.mirrored().logical(), &[22]);
    }

    #[test]
    fn description_roundtrip() {
        let code = build_symmetric_qpc(5, 4, &ConstructionSpec::pw()).unwrap();
        let json = serde_json::to_string(&code.description()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["n", "K_X", "K_Z", "construction", "frozen_x", "frozen_z", "logical"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["construction"]["kind"], "pw");
        let back: QpcDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_code().unwrap(), code);
    }
}
