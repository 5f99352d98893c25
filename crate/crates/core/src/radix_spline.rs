//! One-pass learned model over a sorted `f64` array.
//!
//! The model has two parts: an error-bounded spline through (key, position)
//! pairs built with a greedy corridor, and a radix table that maps the high
//! bits of a key to the range of spline points worth examining. A lookup
//! consults the radix table, binary-searches the few candidate spline points
//! and interpolates between the two that bracket the key.
//!
//! Keys are floats. The radix table works on [`MappedKey`], an order-preserving
//! reinterpretation of the IEEE-754 bits as `u64`; the spline itself
//! interpolates on the float keys so evenly spaced data stays linear across
//! binades.
//!
//! For every key present at build time, `|estimate(k) - first_position(k)| <= max_error`.

use crate::error::{Error, Result};

/// Default spline error, in positions.
pub const DEFAULT_MAX_ERROR: usize = 32;
/// Default upper bound on radix bits.
pub const DEFAULT_RADIX_BITS: u32 = 18;

const SIGN_BIT: u64 = 1 << 63;

/// Order-isomorphic `u64` image of a finite `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MappedKey(pub u64);

impl MappedKey {
    /// Inverse of [`map_key`]. Negative zero maps back to positive zero.
    pub fn to_f64(self) -> f64 {
        let bits = if self.0 & SIGN_BIT != 0 {
            self.0 ^ SIGN_BIT
        } else {
            !self.0
        };
        f64::from_bits(bits)
    }
}

#[inline]
fn map_finite(k: f64) -> u64 {
    // -0.0 == 0.0 as floats, so both must share one image.
    let k = if k == 0.0 { 0.0 } else { k };
    let bits = k.to_bits();
    if bits & SIGN_BIT == 0 {
        bits | SIGN_BIT
    } else {
        !bits
    }
}

/// Maps a finite float to an unsigned integer with the same ordering.
pub fn map_key(k: f64) -> Result<MappedKey> {
    if k.is_finite() {
        Ok(MappedKey(map_finite(k)))
    } else {
        Err(Error::InvalidKey(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineConfig {
    pub max_error: usize,
    /// Upper bound on radix bits. The table never uses more bits than the
    /// key range needs, nor more than `ceil(log2(n)) - 3` (one slot per eight
    /// keys, at least one bit), so small partitions do not carry a
    /// 2^18-entry table each.
    pub radix_bits: u32,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            max_error: DEFAULT_MAX_ERROR,
            radix_bits: DEFAULT_RADIX_BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplinePoint {
    pub key: f64,
    pub position: usize,
}

impl SplinePoint {
    pub fn mapped(&self) -> MappedKey {
        MappedKey(map_finite(self.key))
    }
}

#[derive(Debug, Clone)]
pub struct RadixSplineModel {
    spline: Vec<SplinePoint>,
    radix_table: Vec<u32>,
    radix_bits: u32,
    shift: u32,
    max_error: usize,
    min_key: f64,
    max_key: f64,
    min_mapped: u64,
    n: usize,
}

fn bit_len(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Streaming builder: feed keys in non-decreasing order with [`add_key`](Self::add_key).
///
/// Each key is looked at once. Spline points and radix-table entries are
/// emitted as the corridor collapses.
#[derive(Debug)]
pub struct RadixSplineBuilder {
    config: SplineConfig,
    min_key: f64,
    max_key: f64,
    min_mapped: u64,
    num_keys: usize,
    radix_bits: u32,
    shift: u32,
    spline: Vec<SplinePoint>,
    table: Vec<u32>,
    last_prefix: usize,
    /// Last distinct key seen and its first position; the next spline point candidate.
    prev: Option<SplinePoint>,
    /// Admissible slope range from the current base (last spline point).
    corridor: Option<(f64, f64)>,
    count: usize,
}

impl RadixSplineBuilder {
    pub fn new(min_key: f64, max_key: f64, num_keys: usize, config: SplineConfig) -> Result<Self> {
        let min_mapped = map_key(min_key)?.0;
        let max_mapped = map_key(max_key)?.0;
        if num_keys == 0 {
            return Err(Error::EmptyInput);
        }
        if max_mapped < min_mapped {
            return Err(Error::Unsorted {
                position: num_keys - 1,
            });
        }
        if !(max_key - min_key).is_finite() {
            return Err(Error::InvalidParameter(format!(
                "key range [{min_key}, {max_key}] overflows f64"
            )));
        }
        let range_bits = bit_len(max_mapped - min_mapped);
        let size_bits = (usize::BITS - (num_keys.max(2) - 1).leading_zeros()).saturating_sub(3);
        // At least one bit whenever the range is non-zero, so the shift stays below 64.
        let radix_bits = config.radix_bits.min(size_bits).max(1).min(range_bits);
        let shift = range_bits - radix_bits;
        Ok(Self {
            config,
            min_key,
            max_key,
            min_mapped,
            num_keys,
            radix_bits,
            shift,
            spline: Vec::new(),
            table: vec![0; (1usize << radix_bits) + 1],
            last_prefix: 0,
            prev: None,
            corridor: None,
            count: 0,
        })
    }

    #[inline]
    fn prefix(&self, key: f64) -> usize {
        ((map_finite(key) - self.min_mapped) >> self.shift) as usize
    }

    fn push_spline_point(&mut self, sp: SplinePoint) {
        let index = self.spline.len() as u32;
        let prefix = self.prefix(sp.key);
        if self.spline.is_empty() {
            self.table[0] = 0;
        }
        for slot in self.table[self.last_prefix + 1..=prefix].iter_mut() {
            *slot = index;
        }
        self.last_prefix = self.last_prefix.max(prefix);
        self.spline.push(sp);
    }

    pub fn add_key(&mut self, key: f64) -> Result<()> {
        let position = self.count;
        if !key.is_finite() {
            return Err(Error::InvalidKey(key));
        }
        if position >= self.num_keys {
            return Err(Error::InvalidParameter(format!(
                "more than the declared {} keys",
                self.num_keys
            )));
        }
        if let Some(prev) = self.prev {
            if key < prev.key {
                return Err(Error::Unsorted { position });
            }
        }
        if key < self.min_key || key > self.max_key {
            return Err(Error::InvalidParameter(format!(
                "key {key} outside declared range [{}, {}]",
                self.min_key, self.max_key
            )));
        }
        self.count += 1;

        let Some(prev) = self.prev else {
            let first = SplinePoint { key, position };
            self.push_spline_point(first);
            self.prev = Some(first);
            return Ok(());
        };
        if key == prev.key {
            return Ok(());
        }

        let err = self.config.max_error as f64;
        let base = *self.spline.last().expect("base spline point");
        let dx = key - base.key;
        let dy = position as f64 - base.position as f64;
        match self.corridor {
            None => self.corridor = Some(((dy - err) / dx, (dy + err) / dx)),
            Some((lo, hi)) => {
                let slope = dy / dx;
                if slope < lo || slope > hi {
                    self.push_spline_point(prev);
                    let dx = key - prev.key;
                    let dy = position as f64 - prev.position as f64;
                    self.corridor = Some(((dy - err) / dx, (dy + err) / dx));
                } else {
                    self.corridor = Some((lo.max((dy - err) / dx), hi.min((dy + err) / dx)));
                }
            }
        }
        self.prev = Some(SplinePoint { key, position });
        Ok(())
    }

    pub fn finish(mut self) -> Result<RadixSplineModel> {
        let Some(prev) = self.prev else {
            return Err(Error::EmptyInput);
        };
        if self.count != self.num_keys {
            return Err(Error::InvalidParameter(format!(
                "declared {} keys but received {}",
                self.num_keys, self.count
            )));
        }
        if prev.key != self.max_key {
            return Err(Error::InvalidParameter(format!(
                "last key {} differs from declared maximum {}",
                prev.key, self.max_key
            )));
        }
        if self.spline.last().map(|s| s.key) != Some(prev.key) {
            self.push_spline_point(prev);
        }
        let end = self.spline.len() as u32;
        for slot in self.table[self.last_prefix + 1..].iter_mut() {
            *slot = end;
        }
        Ok(RadixSplineModel {
            spline: self.spline,
            radix_table: self.table,
            radix_bits: self.radix_bits,
            shift: self.shift,
            max_error: self.config.max_error,
            min_key: self.min_key,
            max_key: self.max_key,
            min_mapped: self.min_mapped,
            n: self.num_keys,
        })
    }
}

impl RadixSplineModel {
    /// Builds a model over `keys`, which must be non-empty, finite and non-decreasing.
    pub fn build(keys: &[f64], config: SplineConfig) -> Result<Self> {
        let (Some(&min), Some(&max)) = (keys.first(), keys.last()) else {
            return Err(Error::EmptyInput);
        };
        Self::build_from_iter(min, max, keys.len(), keys.iter().copied(), config)
    }

    /// Builds from a key stream whose extremes and length are known up front.
    pub fn build_from_iter<I>(
        min_key: f64,
        max_key: f64,
        num_keys: usize,
        keys: I,
        config: SplineConfig,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = f64>,
    {
        let mut builder = RadixSplineBuilder::new(min_key, max_key, num_keys, config)?;
        for k in keys {
            builder.add_key(k)?;
        }
        builder.finish()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn max_error(&self) -> usize {
        self.max_error
    }

    pub fn radix_bits(&self) -> u32 {
        self.radix_bits
    }

    pub fn spline_points(&self) -> &[SplinePoint] {
        &self.spline
    }

    pub fn radix_table(&self) -> &[u32] {
        &self.radix_table
    }

    pub fn min_key(&self) -> f64 {
        self.min_key
    }

    pub fn max_key(&self) -> f64 {
        self.max_key
    }

    /// Analytic footprint: spline points, radix table and the fixed header.
    pub fn size_bytes(&self) -> usize {
        self.spline.len() * std::mem::size_of::<SplinePoint>()
            + self.radix_table.len() * std::mem::size_of::<u32>()
            + std::mem::size_of::<Self>()
    }

    /// Predicted position of `k`, clamped to `[0, n - 1]`.
    pub fn estimate(&self, k: f64) -> Result<usize> {
        if k.is_nan() {
            return Err(Error::InvalidKey(k));
        }
        Ok(self.estimate_unchecked(k))
    }

    #[inline]
    pub(crate) fn estimate_unchecked(&self, k: f64) -> usize {
        if k <= self.min_key {
            return 0;
        }
        if k >= self.max_key {
            // Exact hit on the maximum returns its first occurrence.
            return if k == self.max_key {
                self.spline[self.spline.len() - 1].position
            } else {
                self.n - 1
            };
        }
        let prefix = ((map_finite(k) - self.min_mapped) >> self.shift) as usize;
        let begin = self.radix_table[prefix] as usize;
        let end = (self.radix_table[prefix + 1] as usize + 1).min(self.spline.len());
        // First spline point with key >= k; min_key < k < max_key keeps it in 1..len.
        let idx = begin + self.spline[begin..end].partition_point(|s| s.key < k);
        let right = self.spline[idx];
        if right.key == k {
            return right.position;
        }
        let left = self.spline[idx - 1];
        let slope = (right.position - left.position) as f64 / (right.key - left.key);
        let predicted = left.position as f64 + (k - left.key) * slope;
        (predicted.round() as usize).min(self.n - 1)
    }

    /// Lower bound of `k` in `keys`, the array this model was built on.
    pub fn search_lower_bound(&self, keys: &[f64], k: f64) -> Result<usize> {
        debug_assert_eq!(keys.len(), self.n);
        self.search_lower_bound_by(|i| keys[i], k)
    }

    /// Like [`search_lower_bound`](Self::search_lower_bound) with keys read through an accessor.
    ///
    /// Binary-searches the window `estimate ± max_error`; if the answer lies
    /// outside it (possible for probes between keys next to long runs of
    /// duplicates) the search widens exponentially, so the result always equals
    /// the textbook lower bound.
    pub fn search_lower_bound_by<F>(&self, key_at: F, k: f64) -> Result<usize>
    where
        F: Fn(usize) -> f64,
    {
        if k.is_nan() {
            return Err(Error::InvalidKey(k));
        }
        Ok(self.lower_bound_unchecked(&key_at, k))
    }

    #[inline]
    pub(crate) fn lower_bound_unchecked<F>(&self, key_at: &F, k: f64) -> usize
    where
        F: Fn(usize) -> f64,
    {
        let n = self.n;
        let est = self.estimate_unchecked(k);
        let lo = est.saturating_sub(self.max_error);
        let hi = (est + self.max_error + 1).min(n);
        let found = lower_bound_in(key_at, lo, hi, k);
        if found == lo && lo > 0 && key_at(lo - 1) >= k {
            // Answer is left of the window.
            let mut step = 1;
            let mut right = lo - 1;
            loop {
                let left = right.saturating_sub(step);
                if left == 0 || key_at(left - 1) < k {
                    return lower_bound_in(key_at, left, right, k);
                }
                right = left - 1;
                step *= 2;
            }
        }
        if found == hi && hi < n {
            let mut step = 1;
            let mut left = hi;
            loop {
                let right = (left + step).min(n);
                if right == n || key_at(right - 1) >= k {
                    return lower_bound_in(key_at, left, right, k);
                }
                left = right;
                step *= 2;
            }
        }
        found
    }
}

/// First index in `[lo, hi)` whose key is `>= k`, or `hi`.
#[inline]
fn lower_bound_in<F>(key_at: &F, mut lo: usize, mut hi: usize, k: f64) -> usize
where
    F: Fn(usize) -> f64,
{
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if key_at(mid) < k {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
