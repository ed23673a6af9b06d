//! Permutation-group combinatorics: value partitions, stabilizers `fix(x)`,
//! orbit/stabilizer dimensions, symmetrization and local-symmetry probes.
//!
//! Indices are 0-based in memory and 1-based in serialized form.

use itertools::Itertools;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default cap on enumerated group elements (10!).
pub const DEFAULT_ENUMERATION_CAP: u64 = 3_628_800;

/// Ordered partition of `{0..n}` into index blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for &i in blocks.iter().flatten() {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("blocks do not partition 0..{n}")));
            }
            seen[i] = true;
        }
        if blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput("empty block".into()));
        }
        Ok(Partition { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Index of the block containing `i`.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&i))
    }

    /// Blocks are runs of consecutive indices in increasing order.
    pub fn is_contiguous(&self) -> bool {
        let mut next = 0;
        for b in &self.blocks {
            for &i in b {
                if i != next {
                    return false;
                }
                next += 1;
            }
        }
        true
    }

    /// 1-based nested arrays for serialization.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }
}

/// Groups indices whose values chain within `grouping_tol` after sorting
/// nonincreasingly. Blocks are listed by decreasing value; each block lists
/// its indices in increasing order.
pub fn partition_of(x: &[f64], grouping_tol: f64) -> Partition {
    partition_by(x, |a, b| b.partial_cmp(a).expect("finite values"), |a, b| (a - b).abs() <= grouping_tol)
}

/// Exact-equality partition for totally ordered values (rationals).
pub fn partition_exact<T: Ord>(x: &[T]) -> Partition {
    partition_by(x, |a, b| b.cmp(a), |a, b| a == b)
}

fn partition_by<T>(
    x: &[T],
    desc: impl Fn(&T, &T) -> std::cmp::Ordering,
    same: impl Fn(&T, &T) -> bool,
) -> Partition {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| desc(&x[i], &x[j]));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && same(&x[order[k - 1]], &x[i]) {
            blocks.last_mut().expect("nonempty").push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    Partition { blocks }
}

/// A (possibly signed) permutation acting by `(σx)_i = signs_i · x_{image(i)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermutationElement {
    image: Vec<usize>,
    signs: Option<Vec<i8>>,
}

impl PermutationElement {
    pub fn new(image: Vec<usize>, signs: Option<Vec<i8>>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput("image is not a bijection".into()));
            }
            seen[i] = true;
        }
        if let Some(s) = &signs {
            if s.len() != n || s.iter().any(|v| *v != 1 && *v != -1) {
                return Err(Error::InvalidInput("signs must be ±1 with one entry per index".into()));
            }
        }
        Ok(PermutationElement { image, signs })
    }

    pub fn identity(n: usize) -> Self {
        PermutationElement { image: (0..n).collect(), signs: None }
    }

    /// Builds from a 1-based image array.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidInput("1-based image contains 0".into()));
        }
        PermutationElement::new(image.iter().map(|i| i - 1).collect(), None)
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn signs(&self) -> Option<&[i8]> {
        self.signs.as_deref()
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j) && self.signs.as_ref().is_none_or(|s| s.iter().all(|v| *v == 1))
    }

    fn sign(&self, i: usize) -> i8 {
        self.signs.as_ref().map_or(1, |s| s[i])
    }

    /// `σx` for any type with negation.
    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Clone + std::ops::Neg<Output = T>,
    {
        assert_eq!(x.len(), self.n(), "permutation length mismatch");
        self.image
            .iter()
            .enumerate()
            .map(|(i, &j)| if self.sign(i) < 0 { -x[j].clone() } else { x[j].clone() })
            .collect()
    }

    /// Composition `(self ∘ other)x = self(other(x))`.
    pub fn compose(&self, other: &PermutationElement) -> PermutationElement {
        assert_eq!(self.n(), other.n());
        // (σ(τx))_i = s_i (τx)_{σ(i)} = s_i t_{σ(i)} x_{τ(σ(i))}
        let image = self.image.iter().map(|&j| other.image[j]).collect();
        let signs = if self.signs.is_none() && other.signs.is_none() {
            None
        } else {
            Some(self.image.iter().enumerate().map(|(i, &j)| self.sign(i) * other.sign(j)).collect())
        };
        PermutationElement { image, signs }
    }

    pub fn inverse(&self) -> PermutationElement {
        let n = self.n();
        let mut image = vec![0; n];
        let mut signs = vec![1i8; n];
        for (i, &j) in self.image.iter().enumerate() {
            image[j] = i;
            signs[j] = self.sign(i);
        }
        PermutationElement { image, signs: self.signs.as_ref().map(|_| signs) }
    }
}

/// Sorts nonincreasingly, stable in the original index. Returns `(σx, σ)`.
pub fn sort_desc(x: &[f64]) -> (Vec<f64>, PermutationElement) {
    let mut image: Vec<usize> = (0..x.len()).collect();
    image.sort_by(|&i, &j| x[j].partial_cmp(&x[i]).expect("finite values"));
    let sorted = image.iter().map(|&i| x[i]).collect();
    (sorted, PermutationElement { image, signs: None })
}

/// The stabilizer of a vector: `Π Sym(I_ℓ)` over the value blocks, extended
/// by sign flips on the zero block in absolute mode.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerDescriptor {
    pub partition: Partition,
    pub absolute: bool,
    /// Block index of the (near-)zero values, absolute mode only.
    pub zero_block: Option<usize>,
    /// Sign of each coordinate of the reference vector, absolute mode only.
    reference_signs: Vec<i8>,
}

impl StabilizerDescriptor {
    pub fn order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for b in self.partition.blocks() {
            for k in 2..=b.len() {
                order *= BigUint::from(k);
            }
        }
        if let Some(z) = self.zero_block {
            order <<= self.partition.blocks()[z].len();
        }
        order
    }

    /// Enumerates every element; errors when the order exceeds `cap`.
    pub fn elements(&self, cap: u64) -> Result<Vec<PermutationElement>> {
        let order = self.order();
        if order > BigUint::from(cap) {
            return Err(Error::EnumerationCap { order: order.to_string(), cap });
        }
        let n = self.partition.n();
        let per_block: Vec<Vec<Vec<usize>>> = self
            .partition
            .blocks()
            .iter()
            .map(|b| b.iter().copied().permutations(b.len()).collect())
            .collect();
        let mut out = Vec::new();
        for choice in cartesian(&per_block) {
            let mut image = vec![0usize; n];
            for (block, perm) in self.partition.blocks().iter().zip(&choice) {
                for (&i, &j) in block.iter().zip(perm.iter()) {
                    image[i] = j;
                }
            }
            if !self.absolute {
                out.push(PermutationElement { image, signs: None });
                continue;
            }
            // Nonzero coordinates: the sign is forced by σx = x.
            let base: Vec<i8> = (0..n).map(|i| self.reference_signs[i] * self.reference_signs[image[i]]).collect();
            match self.zero_block {
                None => out.push(PermutationElement { image, signs: Some(base) }),
                Some(z) => {
                    let zero = &self.partition.blocks()[z];
                    for mask in 0u64..(1u64 << zero.len()) {
                        let mut signs = base.clone();
                        for (bit, &i) in zero.iter().enumerate() {
                            signs[i] = if mask >> bit & 1 == 1 { -1 } else { 1 };
                        }
                        out.push(PermutationElement { image: image.clone(), signs: Some(signs) });
                    }
                }
            }
        }
        Ok(out)
    }
}

// Every choice of one entry per list (odometer order).
fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<T>| {
                list.iter().map(move |item| {
                    let mut next = prefix.clone();
                    next.push(item.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// `fix(x)` at `grouping_tol`. In absolute mode the partition is taken on
/// `|x|`, and signs are adjusted so that `σx = x` holds.
pub fn fix_group(x: &[f64], grouping_tol: f64, absolute: bool) -> StabilizerDescriptor {
    if !absolute {
        return StabilizerDescriptor {
            partition: partition_of(x, grouping_tol),
            absolute,
            zero_block: None,
            reference_signs: vec![1; x.len()],
        };
    }
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let partition = partition_of(&abs, grouping_tol);
    let zero_block = partition.blocks().iter().position(|b| abs[b[0]] <= grouping_tol);
    let reference_signs = x.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect();
    StabilizerDescriptor { partition, absolute, zero_block, reference_signs }
}

/// Dimension `Σ_{i<j} |I_i||I_j|` of the orbit `λ⁻¹(x)`.
pub fn orbit_dim(p: &Partition) -> usize {
    let sizes = p.block_sizes();
    let mut total = 0;
    for i in 0..sizes.len() {
        for j in (i + 1)..sizes.len() {
            total += sizes[i] * sizes[j];
        }
    }
    total
}

/// Dimension `Σ_ℓ |I_ℓ|(|I_ℓ|−1)/2` of the stabilizer `Oⁿ_X`.
pub fn stabilizer_dim(p: &Partition) -> usize {
    p.block_sizes().iter().map(|k| k * (k.saturating_sub(1)) / 2).sum()
}

/// Which group `sym_membership` ranges over.
#[derive(Clone, Debug)]
pub enum SymMode {
    /// All of `Σⁿ`.
    Full,
    /// Signed permutations `{±1}ⁿ ⋊ Σⁿ`.
    FullSigned,
    /// The given stabilizer.
    Fix(StabilizerDescriptor),
}

/// Elements of the group selected by `mode` for dimension `n`.
pub fn group_elements(n: usize, mode: &SymMode, cap: u64) -> Result<Vec<PermutationElement>> {
    match mode {
        SymMode::Full => {
            let d = StabilizerDescriptor {
                partition: Partition { blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] } },
                absolute: false,
                zero_block: None,
                reference_signs: vec![1; n],
            };
            d.elements(cap)
        }
        SymMode::FullSigned => {
            let d = StabilizerDescriptor {
                partition: Partition { blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] } },
                absolute: true,
                zero_block: if n == 0 { None } else { Some(0) },
                reference_signs: vec![1; n],
            };
            d.elements(cap)
        }
        SymMode::Fix(d) => d.elements(cap),
    }
}

/// Tests `x ∈ M^sym` (or its restriction to a stabilizer) and returns a
/// witness `σ` with `σx ∈ M`.
pub fn sym_membership<T>(
    set: impl Fn(&[T]) -> bool,
    x: &[T],
    mode: &SymMode,
    cap: u64,
) -> Result<Option<PermutationElement>>
where
    T: Clone + std::ops::Neg<Output = T>,
{
    for sigma in group_elements(x.len(), mode, cap)? {
        if set(&sigma.apply(x)) {
            return Ok(Some(sigma));
        }
    }
    Ok(None)
}

/// Outcome of [`local_symmetry_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub pass: bool,
    pub max_deviation: f64,
    pub trials: usize,
    pub seed: u64,
    /// Worst offender `(x, σ)` when the probe fails.
    pub witness: Option<(Vec<f64>, PermutationElement)>,
}

/// Samples `trials` points in `B(x̄, radius)` and checks `f(σx) = f(x)` for
/// every `σ ∈ fix(x̄)` (exact value equality grouping).
pub fn local_symmetry_probe(
    f: impl Fn(&[f64]) -> f64,
    x_bar: &[f64],
    radius: f64,
    trials: usize,
    seed: u64,
) -> Result<SymmetryReport> {
    if radius <= 0.0 {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let group = fix_group(x_bar, 0.0, false).elements(DEFAULT_ENUMERATION_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut witness = None;
    for _ in 0..trials {
        let x = sample_ball(x_bar, radius, &mut rng);
        let fx = f(&x);
        for sigma in &group {
            let dev = (f(&sigma.apply(&x)) - fx).abs();
            let thresh = 1e-10 * (1.0 + fx.abs());
            if dev > thresh {
                pass = false;
            }
            if dev > worst {
                worst = dev;
                if dev > thresh {
                    witness = Some((x.clone(), sigma.clone()));
                }
            }
        }
    }
    Ok(SymmetryReport { pass, max_deviation: worst, trials, seed, witness })
}

/// Uniform sample from the Euclidean ball `B(center, radius)`.
pub fn sample_ball(center: &[f64], radius: f64, rng: &mut impl Rng) -> Vec<f64> {
    let n = center.len();
    let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let r = radius * rng.random::<f64>().powf(1.0 / n.max(1) as f64);
    center.iter().zip(&dir).map(|(c, d)| c + r * d / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_examples() {
        assert_eq!(partition_of(&[3.0, 1.0, 1.0], 0.0).blocks(), &[vec![0], vec![1, 2]]);
        assert_eq!(partition_of(&[5.0, 5.0, 5.0], 0.0).blocks(), &[vec![0, 1, 2]]);
        assert_eq!(partition_of(&[1.0, 1.0 + 1e-12, 0.0], 1e-9).blocks(), &[vec![0, 1], vec![2]]);
        // Chaining: 0, 0.6e-9, 1.2e-9 all merge at 1e-9 even though the ends differ by more.
        assert_eq!(partition_of(&[0.0, 0.6e-9, 1.2e-9], 1e-9).blocks().len(), 1);
        assert_eq!(partition_of(&[], 0.0).blocks().len(), 0);
    }

    #[test]
    fn fix_group_orders() {
        let d = fix_group(&[2.0, 2.0, 0.0], 0.0, false);
        assert_eq!(d.partition.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(d.order(), BigUint::from(2u32));
        assert_eq!(fix_group(&[1.0, 2.0, 3.0], 0.0, false).order(), BigUint::from(1u32));
        let d = fix_group(&[1.0, 0.0, 0.0], 0.0, true);
        assert_eq!(d.order(), BigUint::from(8u32));
        let els = d.elements(DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(els.len(), 8);
        let x = [1.0, 0.0, 0.0];
        for e in &els {
            assert_eq!(e.apply(&x), x.to_vec());
        }
    }

    #[test]
    fn absolute_stabilizer_of_mixed_signs() {
        // (1, −1) is fixed by the swap combined with both sign flips.
        let d = fix_group(&[1.0, -1.0], 0.0, true);
        let els = d.elements(100).unwrap();
        assert_eq!(els.len(), 2);
        for e in &els {
            assert_eq!(e.apply(&[1.0, -1.0]), vec![1.0, -1.0]);
        }
    }

    #[test]
    fn enumeration_cap() {
        let d = fix_group(&[0.0; 5], 0.0, false);
        assert!(matches!(d.elements(100), Err(Error::EnumerationCap { .. })));
        assert_eq!(d.elements(120).unwrap().len(), 120);
    }

    #[test]
    fn sort_desc_examples() {
        let (s, p) = sort_desc(&[1.0, 3.0, 2.0]);
        assert_eq!(s, vec![3.0, 2.0, 1.0]);
        assert_eq!(p.to_one_based(), vec![2, 3, 1]);
        assert!(sort_desc(&[3.0, 2.0, 1.0]).1.is_identity());
        assert!(sort_desc(&[1.0, 1.0]).1.is_identity());
    }

    #[test]
    fn dimension_formulas() {
        let singles = Partition::singletons(3);
        assert_eq!(orbit_dim(&singles), 3);
        assert_eq!(stabilizer_dim(&singles), 0);
        let whole = Partition::new(vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(orbit_dim(&whole), 0);
        assert_eq!(stabilizer_dim(&whole), 3);
        let p = Partition::new(vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(orbit_dim(&p), 2);
        assert_eq!(stabilizer_dim(&p), 1);
    }

    #[test]
    fn signed_composition_and_inverse() {
        let a = PermutationElement::new(vec![2, 0, 1], Some(vec![1, -1, 1])).unwrap();
        let b = PermutationElement::new(vec![1, 2, 0], Some(vec![-1, 1, 1])).unwrap();
        let x = [1.0, 2.0, 3.0];
        assert_eq!(a.compose(&b).apply(&x), a.apply(&b.apply(&x)));
        assert_eq!(a.inverse().apply(&a.apply(&x)), x.to_vec());
        assert!(PermutationElement::new(vec![0, 0], None).is_err());
    }

    #[test]
    fn membership_examples() {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]);
        let w = sym_membership(sorted, &[1.0, 3.0], &SymMode::Full, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(w.unwrap().to_one_based(), vec![2, 1]);
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0);
        assert!(sym_membership(positive, &[-1.0, 2.0], &SymMode::Full, DEFAULT_ENUMERATION_CAP).unwrap().is_none());
        assert!(sym_membership(positive, &[-1.0, 2.0], &SymMode::FullSigned, DEFAULT_ENUMERATION_CAP).unwrap().is_some());
        assert!(sym_membership(sorted, &[0.0; 11], &SymMode::Full, DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn local_symmetry_examples() {
        let l1 = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let r = local_symmetry_probe(l1, &[1.0, 1.0, 0.0], 0.1, 50, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_deviation, 0.0);
        let first = |x: &[f64]| x[0];
        let r = local_symmetry_probe(first, &[1.0, 1.0], 0.1, 20, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness.unwrap().1.to_one_based(), vec![2, 1]);
    }

    #[test]
    fn local_symmetry_only_near_the_point() {
        // max(x₁, x₂, x₃ + 10): closed under swapping coordinates 1 and 2 only.
        let f = |x: &[f64]| x[0].max(x[1]).max(x[2] + 10.0);
        let r = local_symmetry_probe(f, &[5.0, 5.0, 0.0], 0.5, 100, 3).unwrap();
        assert!(r.pass);
        let far = [1.0, 2.0, 30.0];
        let swap13 = PermutationElement::new(vec![2, 1, 0], None).unwrap();
        assert!((f(&swap13.apply(&far)) - f(&far)).abs() > 1.0);
    }

    proptest::proptest! {
        #[test]
        fn orbit_plus_stabilizer_is_dim_on(sizes in proptest::collection::vec(1usize..5, 1..6)) {
            let mut blocks = Vec::new();
            let mut next = 0;
            for s in &sizes {
                blocks.push((next..next + s).collect::<Vec<_>>());
                next += s;
            }
            let p = Partition::new(blocks).unwrap();
            let n = p.n();
            proptest::prop_assert_eq!(orbit_dim(&p) + stabilizer_dim(&p), n * (n - 1) / 2);
        }

        #[test]
        fn block_sizes_invariant_under_permutation(
            x in proptest::collection::vec(-3i32..3, 1..7),
            seed in 0u64..1000,
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut image: Vec<usize> = (0..x.len()).collect();
            for i in (1..image.len()).rev() {
                let j = rng.random_range(0..=i);
                image.swap(i, j);
            }
            let sigma = PermutationElement::new(image, None).unwrap();
            let mut a = partition_of(&x, 0.0).block_sizes();
            let mut b = partition_of(&sigma.apply(&x), 0.0).block_sizes();
            a.sort_unstable();
            b.sort_unstable();
            proptest::prop_assert_eq!(a, b);
            let (sorted, _) = sort_desc(&x);
            proptest::prop_assert!(fix_group(&sorted, 0.0, false).partition.is_contiguous());
            let in_set = |v: &[f64]| v[0] >= v[v.len() - 1] && v[0] > 0.0;
            let m1 = sym_membership(in_set, &x, &SymMode::Full, DEFAULT_ENUMERATION_CAP).unwrap().is_some();
            let m2 = sym_membership(in_set, &sigma.apply(&x), &SymMode::Full, DEFAULT_ENUMERATION_CAP).unwrap().is_some();
            proptest::prop_assert_eq!(m1, m2);
        }
    }
}
