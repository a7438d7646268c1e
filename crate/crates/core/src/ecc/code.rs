use super::gf2::{BitMatrix, BitVector};
use super::EccError;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Largest `k` for which minimum distance is computed by enumeration.
pub const EXACT_DISTANCE_MAX_K: usize = 20;
/// Largest `n - k` eligible for a syndrome table.
pub const SYNDROME_MAX_REDUNDANCY: usize = 24;
/// Largest `k` decoded by exhaustive codeword search.
pub const EXHAUSTIVE_MAX_K: usize = 20;
/// Maximum number of error patterns stored in a syndrome table.
const SYNDROME_TABLE_CAP: usize = 1 << 21;
/// Default iteration budget for information-set decoding.
pub const DEFAULT_INFO_SET_ITERATIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderStrategy {
    SyndromeTable,
    ExhaustiveCodeword,
    Majority,
    Hadamard,
    InfoSetProbabilistic { iterations: usize },
}

impl DecoderStrategy {
    /// Whether every word within the packing radius is guaranteed to decode.
    pub fn is_guaranteed(self) -> bool {
        !matches!(self, DecoderStrategy::InfoSetProbabilistic { .. })
    }
}

/// Successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: Vec<bool>,
    /// Hamming distance between the received word and the chosen codeword.
    pub corrections: usize,
    /// `false` when the strategy gives no bounded-distance guarantee.
    pub guaranteed: bool,
}

/// Binary linear `[n, k, d]` code. Immutable once built.
#[derive(Clone)]
pub struct LinearCode {
    name: String,
    n: usize,
    k: usize,
    d: usize,
    d_verified: bool,
    generator: BitMatrix,
    parity_check: BitMatrix,
    strategy: DecoderStrategy,
    /// Columns where the generator restricted to them is invertible.
    info_set: Vec<usize>,
    info_inverse: BitMatrix,
    syndromes: Option<Arc<HashMap<BitVector, BitVector>>>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearCode")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("d", &self.d)
            .field("d_verified", &self.d_verified)
            .field("strategy", &self.strategy)
            .finish()
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{},{},{}]", self.name, self.n, self.k, self.d)
    }
}

impl LinearCode {
    /// Builds a code from generator rows.
    ///
    /// `declared_d` is checked against the enumerated minimum distance when
    /// `k <= EXACT_DISTANCE_MAX_K`; above that it is trusted and required.
    /// `strategy` of `None` selects a decoder automatically.
    pub fn from_generator(
        name: impl Into<String>,
        generator: BitMatrix,
        declared_d: Option<usize>,
        strategy: Option<DecoderStrategy>,
    ) -> Result<Self, EccError> {
        Self::build(name.into(), generator, None, declared_d, strategy)
    }

    /// Like [`from_generator`](Self::from_generator) with a supplied parity-check matrix.
    pub fn with_parity_check(
        name: impl Into<String>,
        generator: BitMatrix,
        parity_check: BitMatrix,
        declared_d: Option<usize>,
    ) -> Result<Self, EccError> {
        Self::build(name.into(), generator, Some(parity_check), declared_d, None)
    }

    fn build(
        name: String,
        generator: BitMatrix,
        parity_check: Option<BitMatrix>,
        declared_d: Option<usize>,
        strategy: Option<DecoderStrategy>,
    ) -> Result<Self, EccError> {
        let n = generator.n_cols();
        let k = generator.n_rows();
        if n == 0 || k == 0 {
            return Err(EccError::InvalidCode(format!("{name}: empty generator")));
        }
        if k > n {
            return Err(EccError::InvalidCode(format!("{name}: k={k} exceeds n={n}")));
        }
        let ech = generator.echelon();
        if ech.pivots.len() != k {
            return Err(EccError::InvalidCode(format!(
                "{name}: generator rows are linearly dependent (rank {} < {k})",
                ech.pivots.len()
            )));
        }
        let parity_check = match parity_check {
            Some(h) => {
                if h.n_cols() != n || h.n_rows() != n - k || h.rank() != n - k {
                    return Err(EccError::InvalidCode(format!(
                        "{name}: parity-check matrix must have full rank n-k={} and {n} columns",
                        n - k
                    )));
                }
                h
            }
            None => generator.null_space(),
        };
        if !generator.orthogonal_to(&parity_check) {
            return Err(EccError::InvalidCode(format!(
                "{name}: generator * parity_check^T != 0"
            )));
        }
        let info_set = ech.pivots.clone();
        let info_inverse = generator
            .select_columns(&info_set)
            .inverse()
            .expect("pivot columns of a full-rank generator are invertible");

        let (d, d_verified) = if k <= EXACT_DISTANCE_MAX_K {
            let exact = minimum_distance(&generator);
            if let Some(dd) = declared_d {
                if exact < dd {
                    return Err(EccError::InvalidCode(format!(
                        "{name}: declared d={dd} but a codeword of weight {exact} exists"
                    )));
                }
            }
            (exact, true)
        } else {
            match declared_d {
                Some(dd) if dd >= 1 => (dd, false),
                _ => {
                    return Err(EccError::InvalidCode(format!(
                        "{name}: k={k} is too large to enumerate; declare the minimum distance"
                    )))
                }
            }
        };

        let mut code = LinearCode {
            name,
            n,
            k,
            d,
            d_verified,
            generator,
            parity_check,
            strategy: DecoderStrategy::ExhaustiveCodeword,
            info_set,
            info_inverse,
            syndromes: None,
        };
        code.strategy = strategy.unwrap_or_else(|| code.auto_strategy());
        if code.strategy == DecoderStrategy::SyndromeTable {
            code.syndromes = Some(Arc::new(code.build_syndrome_table().ok_or_else(|| {
                EccError::InvalidCode(format!(
                    "{}: syndrome table would exceed {SYNDROME_TABLE_CAP} entries",
                    code.name
                ))
            })?));
        }
        Ok(code)
    }

    fn auto_strategy(&self) -> DecoderStrategy {
        let t = self.correctable();
        if self.n - self.k <= SYNDROME_MAX_REDUNDANCY && patterns_up_to(self.n, t) <= SYNDROME_TABLE_CAP {
            DecoderStrategy::SyndromeTable
        } else if self.k <= EXHAUSTIVE_MAX_K {
            DecoderStrategy::ExhaustiveCodeword
        } else {
            DecoderStrategy::InfoSetProbabilistic {
                iterations: DEFAULT_INFO_SET_ITERATIONS,
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Whether `d` was computed by enumeration rather than declared.
    pub fn d_verified(&self) -> bool {
        self.d_verified
    }

    /// `floor((d - 1) / 2)`.
    pub fn correctable(&self) -> usize {
        self.d.saturating_sub(1) / 2
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    pub fn strategy(&self) -> DecoderStrategy {
        self.strategy
    }

    pub(crate) fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `message * G`.
    pub fn encode(&self, message: &[bool]) -> Result<Vec<bool>, EccError> {
        if message.len() != self.k {
            return Err(EccError::LengthMismatch {
                expected: self.k,
                found: message.len(),
            });
        }
        Ok(self.encode_vec(&BitVector::from_bools(message)).to_bools())
    }

    pub(crate) fn encode_vec(&self, message: &BitVector) -> BitVector {
        self.generator.left_mul(message)
    }

    /// `H * word^T`.
    pub fn syndrome(&self, word: &[bool]) -> Result<Vec<bool>, EccError> {
        if word.len() != self.n {
            return Err(EccError::LengthMismatch {
                expected: self.n,
                found: word.len(),
            });
        }
        Ok(self
            .parity_check
            .mul_transposed(&BitVector::from_bools(word))
            .to_bools())
    }

    /// Message of a codeword, read through the information set.
    fn message_of(&self, codeword: &BitVector) -> BitVector {
        self.info_inverse.left_mul(&codeword.select(&self.info_set))
    }

    pub fn decode(&self, received: &[bool]) -> Result<Decoded, EccError> {
        if received.len() != self.n {
            return Err(EccError::LengthMismatch {
                expected: self.n,
                found: received.len(),
            });
        }
        let r = BitVector::from_bools(received);
        let (codeword, guaranteed) = match self.strategy {
            DecoderStrategy::SyndromeTable => (self.decode_syndrome(&r)?, true),
            DecoderStrategy::ExhaustiveCodeword => (self.decode_exhaustive(&r), true),
            DecoderStrategy::Majority => (self.decode_majority(&r)?, true),
            DecoderStrategy::Hadamard => (self.decode_hadamard(&r)?, true),
            DecoderStrategy::InfoSetProbabilistic { iterations } => {
                (self.decode_info_set(&r, iterations), false)
            }
        };
        let corrections = codeword.distance(&r);
        Ok(Decoded {
            message: self.message_of(&codeword).to_bools(),
            corrections,
            guaranteed,
        })
    }

    fn build_syndrome_table(&self) -> Option<HashMap<BitVector, BitVector>> {
        let target = 1usize.checked_shl((self.n - self.k) as u32).unwrap_or(usize::MAX);
        let t = self.correctable();
        let mut table = HashMap::new();
        let mut stored = 0usize;
        for w in 0..=self.n {
            // beyond the packing radius only keep going while the table is small
            if w > t && patterns_up_to(self.n, w) > SYNDROME_TABLE_CAP {
                break;
            }
            let mut positions: Vec<usize> = (0..w).collect();
            loop {
                let mut e = BitVector::zeros(self.n);
                for &p in &positions {
                    e.set(p, true);
                }
                let s = self.parity_check.mul_transposed(&e);
                table.entry(s).or_insert(e);
                stored += 1;
                if stored > SYNDROME_TABLE_CAP && w <= t {
                    return None;
                }
                if table.len() == target || !next_combination(&mut positions, self.n) {
                    break;
                }
            }
            if table.len() == target {
                break;
            }
        }
        Some(table)
    }

    fn decode_syndrome(&self, r: &BitVector) -> Result<BitVector, EccError> {
        let table = self.syndromes.as_ref().expect("syndrome table built with strategy");
        let s = self.parity_check.mul_transposed(r);
        table
            .get(&s)
            .map(|e| r.xor(e))
            .ok_or(EccError::DecodeFailure)
    }

    fn decode_exhaustive(&self, r: &BitVector) -> BitVector {
        // Gray-code walk over all messages
        let mut cw = BitVector::zeros(self.n);
        let mut best = cw.clone();
        let mut best_d = r.distance(&cw);
        for i in 1u64..(1u64 << self.k) {
            let bit = i.trailing_zeros() as usize;
            cw.xor_assign(self.generator.row(bit));
            let d = r.distance(&cw);
            if d < best_d {
                best_d = d;
                best = cw.clone();
                if d == 0 {
                    break;
                }
            }
        }
        best
    }

    fn decode_majority(&self, r: &BitVector) -> Result<BitVector, EccError> {
        if self.k != 1 {
            return Err(EccError::InvalidCode("majority decoding needs k = 1".into()));
        }
        let row = self.generator.row(0);
        let support = row.weight();
        let ones = row.ones().filter(|&i| r.get(i)).count();
        if 2 * ones == support {
            return Err(EccError::DecodeFailure);
        }
        Ok(if 2 * ones > support {
            row.clone()
        } else {
            BitVector::zeros(self.n)
        })
    }

    /// First-order Reed-Muller: generator row 0 is all ones, row `i >= 1`
    /// is bit `i - 1` of the position index.
    fn decode_hadamard(&self, r: &BitVector) -> Result<BitVector, EccError> {
        let m = self.k - 1;
        if self.n != 1 << m {
            return Err(EccError::InvalidCode("Hadamard decoding needs n = 2^(k-1)".into()));
        }
        let mut f: Vec<i64> = (0..self.n).map(|j| if r.get(j) { -1 } else { 1 }).collect();
        let mut h = 1;
        while h < self.n {
            for i in (0..self.n).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (f[j], f[j + h]);
                    f[j] = a + b;
                    f[j + h] = a - b;
                }
            }
            h *= 2;
        }
        let (u, &val) = f
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.abs().cmp(&b.abs()).then(ib.cmp(ia)))
            .expect("non-empty");
        if f.iter().enumerate().any(|(i, v)| i != u && v.abs() == val.abs()) {
            return Err(EccError::DecodeFailure);
        }
        let mut msg = BitVector::zeros(self.k);
        msg.set(0, val < 0);
        for i in 0..m {
            msg.set(i + 1, (u >> i) & 1 == 1);
        }
        Ok(self.encode_vec(&msg))
    }

    fn decode_info_set(&self, r: &BitVector, iterations: usize) -> BitVector {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1f05_e7de_c0de);
        let mut best = self.encode_vec(&self.message_of(r));
        let mut best_d = best.distance(r);
        let t = self.correctable();
        for _ in 0..iterations {
            if best_d <= t {
                break;
            }
            let cols = sample(&mut rng, self.n, self.k).into_vec();
            let Some(inv) = self.generator.select_columns(&cols).inverse() else {
                continue;
            };
            let cand = self.encode_vec(&inv.left_mul(&r.select(&cols)));
            let d = cand.distance(r);
            if d < best_d {
                best_d = d;
                best = cand;
            }
        }
        best
    }
}

/// Minimum nonzero codeword weight by Gray-code enumeration.
pub fn minimum_distance(generator: &BitMatrix) -> usize {
    let k = generator.n_rows();
    let mut cw = BitVector::zeros(generator.n_cols());
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << k) {
        cw.xor_assign(generator.row(i.trailing_zeros() as usize));
        best = best.min(cw.weight());
    }
    best
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Number of binary words of length `n` with weight at most `w`.
pub fn patterns_up_to(n: usize, w: usize) -> usize {
    (0..=w.min(n)).fold(0usize, |acc, i| acc.saturating_add(binomial(n, i)))
}

/// Advances `c` to the next `k`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
