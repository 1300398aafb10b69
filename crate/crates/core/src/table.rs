//! Dense tables of pseudo-Boolean functions and the clone closure
//! operations over them.
//!
//! A `FunctionTable` holds all `2^k` values of a function
//! `{0,1}^k -> R`.  The index convention is fixed crate-wide: the
//! assignment `(x_1, ..., x_k)` maps to `sum_i x_i * 2^(k-i)`, so `x_1`
//! is the most significant bit.  `k = 0` gives a single-entry table (a
//! nullary constant).

use crate::{Error, Result, MAX_ARITY};

/// Whether a table is certified entrywise non-negative.  Fourier
/// images routinely carry negative entries, so they are `Signed`;
/// clone elements must be `NonNegative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signedness {
    NonNegative,
    Signed,
}

/// Index of the assignment `(x_1, ..., x_k)`; `x_1` is the MSB.
pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Bit of argument position `pos` (0-based, so position 0 is `x_1`)
/// inside a table index.
pub fn bit_at(index: usize, pos: usize, arity: usize) -> bool {
    debug_assert!(pos < arity);
    (index >> (arity - 1 - pos)) & 1 == 1
}

/// The assignment tuple encoded by `index`.
pub fn bits_of(index: usize, arity: usize) -> Vec<bool> {
    (0..arity).map(|pos| bit_at(index, pos, arity)).collect()
}

/// A symmetric function given by its value on each Hamming weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpec {
    arity: usize,
    weights: Vec<f64>,
}

impl SymmetricSpec {
    /// `weights[i]` is the value on inputs of Hamming weight `i`, so a
    /// spec for arity `k` has `k + 1` weights.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::LengthMismatch {
                arity: 0,
                expected: 1,
                got: 0,
            });
        }
        let arity = weights.len() - 1;
        if arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_ARITY,
            });
        }
        for (index, w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(SymmetricSpec { arity, weights })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Partition of the argument positions `{0, ..., k-1}` into the
/// classes forced equal by a function's support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgPartition {
    arity: usize,
    blocks: Vec<Vec<usize>>,
}

impl ArgPartition {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Blocks in increasing order of their smallest member; members
    /// sorted within each block.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// One slot of a 2-pinning template: a constant, or one of the two
/// surviving variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinSlot {
    Zero,
    One,
    X,
    Y,
}

/// Parses templates like `"xy00"` (characters `0`, `1`, `x`, `y`).
pub fn parse_template(s: &str) -> Result<Vec<PinSlot>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(PinSlot::Zero),
            '1' => Ok(PinSlot::One),
            'x' => Ok(PinSlot::X),
            'y' => Ok(PinSlot::Y),
            other => Err(Error::BadTemplate(format!(
                "unexpected character {other:?}"
            ))),
        })
        .collect()
}

/// Dense table of a pseudo-Boolean function.  Immutable after
/// construction; every operation returns a fresh table.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    arity: usize,
    values: Vec<f64>,
    signedness: Signedness,
}

fn check_shape(arity: usize, values: &[f64]) -> Result<()> {
    if arity > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity,
            max: MAX_ARITY,
        });
    }
    let expected = 1usize << arity;
    if values.len() != expected {
        return Err(Error::LengthMismatch {
            arity,
            expected,
            got: values.len(),
        });
    }
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
    }
    Ok(())
}

impl FunctionTable {
    /// A table certified non-negative; rejects any negative entry.
    pub fn non_negative(arity: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(arity, &values)?;
        for (index, &value) in values.iter().enumerate() {
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        Ok(FunctionTable {
            arity,
            values,
            signedness: Signedness::NonNegative,
        })
    }

    /// A table allowed to carry entries of either sign.
    pub fn signed(arity: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(arity, &values)?;
        Ok(FunctionTable {
            arity,
            values,
            signedness: Signedness::Signed,
        })
    }

    pub fn with_signedness(arity: usize, values: Vec<f64>, signedness: Signedness) -> Result<Self> {
        match signedness {
            Signedness::NonNegative => Self::non_negative(arity, values),
            Signedness::Signed => Self::signed(arity, values),
        }
    }

    /// Expands a symmetric spec: `table[x] = weights[wt(x)]`.  The
    /// result is `NonNegative` exactly when all weights are.
    pub fn from_symmetric(spec: &SymmetricSpec) -> Self {
        let arity = spec.arity();
        let values: Vec<f64> = (0..1usize << arity)
            .map(|idx| spec.weights()[idx.count_ones() as usize])
            .collect();
        let signedness = if spec.weights().iter().all(|&w| w >= 0.0) {
            Signedness::NonNegative
        } else {
            Signedness::Signed
        };
        FunctionTable {
            arity,
            values,
            signedness,
        }
    }

    /// Shorthand for symmetric tables in tests and gadgets.
    pub fn symmetric(weights: &[f64]) -> Result<Self> {
        Ok(Self::from_symmetric(&SymmetricSpec::new(weights.to_vec())?))
    }

    /// Nullary constant.
    pub fn constant(c: f64) -> Result<Self> {
        if c >= 0.0 {
            Self::non_negative(0, vec![c])
        } else {
            Self::signed(0, vec![c])
        }
    }

    pub fn all_ones(arity: usize) -> Result<Self> {
        Self::non_negative(arity, vec![1.0; 1 << arity])
    }

    pub fn zeros(arity: usize) -> Result<Self> {
        Self::non_negative(arity, vec![0.0; 1 << arity])
    }

    /// The binary equality function `[1, 0, 1]`.
    pub fn equality() -> Self {
        FunctionTable {
            arity: 2,
            values: vec![1.0, 0.0, 0.0, 1.0],
            signedness: Signedness::NonNegative,
        }
    }

    /// The binary disequality function `[0, 1, 0]`.
    pub fn xor() -> Self {
        FunctionTable {
            arity: 2,
            values: vec![0.0, 1.0, 1.0, 0.0],
            signedness: Signedness::NonNegative,
        }
    }

    /// The unary point mass on `bit`.
    pub fn delta(bit: bool) -> Self {
        let values = if bit { vec![0.0, 1.0] } else { vec![1.0, 0.0] };
        FunctionTable {
            arity: 1,
            values,
            signedness: Signedness::NonNegative,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn signedness(&self) -> Signedness {
        self.signedness
    }

    pub fn is_signed(&self) -> bool {
        self.signedness == Signedness::Signed
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Value on the assignment `x`; checks the arity.
    pub fn eval(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: x.len(),
            });
        }
        Ok(self.values[index_of(x)])
    }

    fn combined_signedness(&self, other: &Self) -> Signedness {
        if self.is_signed() || other.is_signed() {
            Signedness::Signed
        } else {
            Signedness::NonNegative
        }
    }

    /// `result(x_1, ..., x_k) = f(x_{perm[0]+1}, ..., x_{perm[k-1]+1})`:
    /// the `j`-th argument of `f` reads variable `perm[j]` (0-based).
    pub fn permute_args(&self, perm: &[usize]) -> Result<Self> {
        let k = self.arity;
        if perm.len() != k {
            return Err(Error::InvalidPermutation);
        }
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::InvalidPermutation);
            }
            seen[p] = true;
        }
        let mut values = vec![0.0; self.values.len()];
        for (idx, slot) in values.iter_mut().enumerate() {
            let mut src = 0usize;
            for (j, &p) in perm.iter().enumerate() {
                if bit_at(idx, p, k) {
                    src |= 1 << (k - 1 - j);
                }
            }
            *slot = self.values[src];
        }
        Ok(FunctionTable {
            arity: k,
            values,
            signedness: self.signedness,
        })
    }

    /// Appends a fictitious argument: `g(x, z) = f(x)`.
    pub fn add_fictitious(&self) -> Result<Self> {
        if self.arity + 1 > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity: self.arity + 1,
                max: MAX_ARITY,
            });
        }
        let mut values = Vec::with_capacity(self.values.len() * 2);
        for &v in &self.values {
            values.push(v);
            values.push(v);
        }
        Ok(FunctionTable {
            arity: self.arity + 1,
            values,
            signedness: self.signedness,
        })
    }

    /// Sums out the last argument: `g(x) = f(x, 0) + f(x, 1)`.
    pub fn sum_out_last(&self) -> Result<Self> {
        if self.arity == 0 {
            return Err(Error::Precondition(
                "cannot sum out an argument of a nullary function".into(),
            ));
        }
        let values: Vec<f64> = self.values.chunks_exact(2).map(|c| c[0] + c[1]).collect();
        Ok(FunctionTable {
            arity: self.arity - 1,
            values,
            signedness: self.signedness,
        })
    }

    /// Pointwise product of two tables of equal arity.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(FunctionTable {
            arity: self.arity,
            values,
            signedness: self.combined_signedness(other),
        })
    }

    /// `result(x) = f(bitwise complement of x)`.
    pub fn complement(&self) -> Self {
        let mask = self.values.len() - 1;
        let values: Vec<f64> = (0..self.values.len())
            .map(|idx| self.values[!idx & mask])
            .collect();
        FunctionTable {
            arity: self.arity,
            values,
            signedness: self.signedness,
        }
    }

    /// Maximum absolute entrywise difference.
    pub fn linf_distance(&self, other: &Self) -> Result<f64> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Entrywise multiple; a non-negative table rejects negative `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if self.signedness == Signedness::NonNegative && c < 0.0 {
            return Err(Error::Precondition(format!(
                "scale factor {c} is negative on a non-negative table"
            )));
        }
        if !c.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(FunctionTable {
            arity: self.arity,
            values: self.values.iter().map(|v| v * c).collect(),
            signedness: self.signedness,
        })
    }

    /// Fixes argument `pos` (0-based) to `bit`, dropping one arity.
    pub fn pin(&self, pos: usize, bit: bool) -> Result<Self> {
        if pos >= self.arity {
            return Err(Error::Precondition(format!(
                "pin position {pos} out of range for arity {}",
                self.arity
            )));
        }
        let k = self.arity;
        let values: Vec<f64> = (0..1usize << (k - 1))
            .map(|idx| {
                let high = idx >> (k - 1 - pos);
                let low = idx & ((1 << (k - 1 - pos)) - 1);
                let src = (high << (k - pos)) | (usize::from(bit) << (k - 1 - pos)) | low;
                self.values[src]
            })
            .collect();
        Ok(FunctionTable {
            arity: k - 1,
            values,
            signedness: self.signedness,
        })
    }

    /// Binary restriction `g(x, y) = f(z_1, ..., z_k)` where the
    /// template fixes every slot to a constant except one `x` and one
    /// `y` occurrence.
    pub fn two_pinning(&self, template: &[PinSlot]) -> Result<Self> {
        if template.len() != self.arity {
            return Err(Error::BadTemplate(format!(
                "template length {} does not match arity {}",
                template.len(),
                self.arity
            )));
        }
        let x_count = template.iter().filter(|s| **s == PinSlot::X).count();
        let y_count = template.iter().filter(|s| **s == PinSlot::Y).count();
        if x_count != 1 || y_count != 1 {
            return Err(Error::BadTemplate(
                "template must contain x exactly once and y exactly once".into(),
            ));
        }
        let mut values = vec![0.0; 4];
        for (g_idx, slot) in values.iter_mut().enumerate() {
            let x = g_idx & 2 != 0;
            let y = g_idx & 1 != 0;
            let assignment: Vec<bool> = template
                .iter()
                .map(|s| match s {
                    PinSlot::Zero => false,
                    PinSlot::One => true,
                    PinSlot::X => x,
                    PinSlot::Y => y,
                })
                .collect();
            *slot = self.values[index_of(&assignment)];
        }
        Ok(FunctionTable {
            arity: 2,
            values,
            signedness: self.signedness,
        })
    }

    /// True iff every entry is strictly positive.
    pub fn is_permissive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// The forced-equality partition: positions `i` and `j` share a
    /// block iff `f(x) = 0` (within `tol`) whenever `x_i != x_j`.  The
    /// all-zero function vacuously merges everything into one block.
    pub fn equiv_relation(&self, tol: f64) -> ArgPartition {
        let k = self.arity;
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for i in 0..k {
            for j in i + 1..k {
                let related = (0..self.values.len()).all(|idx| {
                    bit_at(idx, i, k) == bit_at(idx, j, k) || self.values[idx].abs() <= tol
                });
                if related {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[rj.max(ri)] = rj.min(ri);
                    }
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut root_block = vec![usize::MAX; k];
        for v in 0..k {
            let r = find(&mut parent, v);
            if root_block[r] == usize::MAX {
                root_block[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[root_block[r]].push(v);
        }
        ArgPartition { arity: k, blocks }
    }

    /// Collapses each forced-equality block to a single argument.
    pub fn tilde(&self, tol: f64) -> Self {
        let partition = self.equiv_relation(tol);
        self.collapse_blocks(&partition)
    }

    /// `tilde` against an explicit partition (shared with the
    /// membership predicates so witnesses can name the block).
    pub fn collapse_blocks(&self, partition: &ArgPartition) -> Self {
        let k = self.arity;
        let ell = partition.block_count();
        let values: Vec<f64> = (0..1usize << ell)
            .map(|idx| {
                let mut src = 0usize;
                for (j, block) in partition.blocks().iter().enumerate() {
                    if bit_at(idx, j, ell) {
                        for &i in block {
                            src |= 1 << (k - 1 - i);
                        }
                    }
                }
                self.values[src]
            })
            .collect();
        FunctionTable {
            arity: ell,
            values,
            signedness: self.signedness,
        }
    }

    /// Entrywise power with a non-negative integer exponent.
    pub fn powi(&self, exponent: u32) -> Self {
        FunctionTable {
            arity: self.arity,
            values: self
                .values
                .iter()
                .map(|v| v.powi(exponent as i32))
                .collect(),
            signedness: self.signedness,
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.arity == other.arity && self.linf_distance(other).unwrap() <= tol
    }
}
