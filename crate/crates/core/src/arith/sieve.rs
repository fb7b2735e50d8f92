//! Dense tables of arithmetic functions over `1..=N`.
//!
//! Tables are built with a linear sieve and can be written to a small binary
//! cache file:
//!
//! ```text
//! offset  size  field
//! 0       8     magic  b"CRSIEVE1"
//! 8       1     kind   0 = mobius, 1 = jordan, 2 = smallest prime factor
//! 9       4     k      u32 LE (0 unless jordan)
//! 13      8     N      u64 LE
//! 21      8*N   values i64 LE, for n = 1..=N
//! ```

use std::fmt;
use std::io::{Read, Write};

use serde::Serialize;

use super::factor::{required_bits, FactoredInteger};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 8] = b"CRSIEVE1";

/// Default allowance for sieve memory: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "kebab-case")]
pub enum SieveKind {
    Mobius,
    Jordan(u32),
    SmallestPrimeFactor,
}

impl SieveKind {
    fn tag(self) -> (u8, u32) {
        match self {
            SieveKind::Mobius => (0, 0),
            SieveKind::Jordan(k) => (1, k),
            SieveKind::SmallestPrimeFactor => (2, 0),
        }
    }

    fn from_tag(tag: u8, k: u32) -> Result<Self> {
        match (tag, k) {
            (0, 0) => Ok(SieveKind::Mobius),
            (1, k) if k >= 1 => Ok(SieveKind::Jordan(k)),
            (2, 0) => Ok(SieveKind::SmallestPrimeFactor),
            _ => Err(Error::CacheFormat(format!(
                "unknown kind tag {tag} with k = {k}"
            ))),
        }
    }
}

impl fmt::Display for SieveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SieveKind::Mobius => write!(f, "mobius"),
            SieveKind::Jordan(k) => write!(f, "jordan({k})"),
            SieveKind::SmallestPrimeFactor => write!(f, "smallest-prime-factor"),
        }
    }
}

/// Immutable table of one arithmetic function on `1..=limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveTable {
    kind: SieveKind,
    limit: u64,
    // values[0] is unused padding so that values[n] is f(n).
    values: Vec<i128>,
}

impl SieveTable {
    /// Builds the table in linear time, within the default memory budget.
    pub fn build(kind: SieveKind, limit: u64) -> Result<Self> {
        Self::build_with_budget(kind, limit, DEFAULT_MEMORY_BUDGET)
    }

    pub fn build_with_budget(kind: SieveKind, limit: u64, budget: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Zero);
        }
        if limit >= u32::MAX as u64 {
            return Err(Error::InputTooLarge {
                value: limit as u128,
                max: u32::MAX as u128 - 1,
            });
        }
        let requested = Self::bytes_needed(limit);
        if requested > budget {
            return Err(Error::MemoryBudget {
                requested,
                allowed: budget,
            });
        }
        if let SieveKind::Jordan(k) = kind {
            if k == 0 {
                return Err(Error::invalid("jordan sieve: k must be positive"));
            }
            // J_k(n) < n^k, so this bounds every entry.
            if (limit as i128).checked_pow(k).is_none() {
                return Err(Error::Overflow {
                    what: format!("jordan({k}) sieve up to {limit}"),
                    required_bits: required_bits(limit, k),
                });
            }
        }

        let n = limit as usize;
        let spf = smallest_prime_factors(n);
        let mut values = vec![0i128; n + 1];
        values[1] = 1;
        match kind {
            SieveKind::Mobius => {
                for i in 2..=n {
                    let p = spf[i] as usize;
                    let j = i / p;
                    values[i] = if j % p == 0 { 0 } else { -values[j] };
                }
            }
            SieveKind::Jordan(k) => {
                for i in 2..=n {
                    let p = spf[i] as usize;
                    let j = i / p;
                    let pk = (p as i128).pow(k);
                    values[i] = values[j] * if j % p == 0 { pk } else { pk - 1 };
                }
            }
            SieveKind::SmallestPrimeFactor => {
                for i in 2..=n {
                    values[i] = spf[i] as i128;
                }
            }
        }
        Ok(Self {
            kind,
            limit,
            values,
        })
    }

    /// Bytes a table of this size occupies, including construction scratch.
    pub fn bytes_needed(limit: u64) -> u64 {
        (limit + 1).saturating_mul(16 + 4)
    }

    pub fn kind(&self) -> SieveKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `f(n)` for `1 <= n <= limit`.
    #[inline]
    pub fn get(&self, n: u64) -> i128 {
        assert!(
            n >= 1 && n <= self.limit,
            "sieve index {n} outside 1..={}",
            self.limit
        );
        self.values[n as usize]
    }

    /// The entries for `n = 1..=limit`.
    pub fn values(&self) -> &[i128] {
        &self.values[1..]
    }

    /// Factorizes `n <= limit` by repeated smallest-prime-factor lookups.
    /// Only available on smallest-prime-factor tables.
    pub fn factorize(&self, n: u64) -> Result<FactoredInteger> {
        if self.kind != SieveKind::SmallestPrimeFactor {
            return Err(Error::invalid(format!(
                "cannot factor with a {} table",
                self.kind
            )));
        }
        if n == 0 {
            return Err(Error::Zero);
        }
        if n > self.limit {
            return Err(Error::InputTooLarge {
                value: n as u128,
                max: self.limit as u128,
            });
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut rest = n;
        while rest > 1 {
            let p = self.values[rest as usize] as u64;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(FactoredInteger::from_parts_unchecked(n, factors))
    }

    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        let (tag, k) = self.kind.tag();
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&[tag])?;
        w.write_all(&k.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        for (i, &v) in self.values().iter().enumerate() {
            let v = i64::try_from(v).map_err(|_| Error::Overflow {
                what: format!("cache entry {} of {} table", i + 1, self.kind),
                required_bits: 128 - v.leading_zeros() + 1,
            })?;
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cache file back, checking the header and the table invariants.
    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic bytes".into()));
        }
        let mut tag = [0u8; 1];
        let mut k = [0u8; 4];
        let mut limit = [0u8; 8];
        r.read_exact(&mut tag)?;
        r.read_exact(&mut k)?;
        r.read_exact(&mut limit)?;
        let kind = SieveKind::from_tag(tag[0], u32::from_le_bytes(k))?;
        let limit = u64::from_le_bytes(limit);
        if limit == 0 || limit >= u32::MAX as u64 {
            return Err(Error::CacheFormat(format!("implausible limit {limit}")));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() as u64 != limit * 8 {
            return Err(Error::CacheFormat(format!(
                "expected {} value bytes, found {}",
                limit * 8,
                bytes.len()
            )));
        }
        let mut values = Vec::with_capacity(limit as usize + 1);
        values.push(0);
        values.extend(
            bytes
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()) as i128),
        );
        let table = Self {
            kind,
            limit,
            values,
        };
        table.check_invariants()?;
        Ok(table)
    }

    fn check_invariants(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::CacheFormat(msg.into()));
        match self.kind {
            SieveKind::Mobius => {
                if self.values[1] != 1 {
                    return bad("mobius(1) != 1");
                }
                if self.values().iter().any(|v| !(-1..=1).contains(v)) {
                    return bad("mobius entry outside {-1, 0, 1}");
                }
            }
            SieveKind::Jordan(_) => {
                if self.values[1] != 1 {
                    return bad("jordan(1) != 1");
                }
                if self.values().iter().any(|&v| v <= 0) {
                    return bad("non-positive jordan entry");
                }
            }
            SieveKind::SmallestPrimeFactor => {
                let ok = self.values()[1..]
                    .iter()
                    .zip(2u64..)
                    .all(|(&p, n)| p >= 2 && n % p as u64 == 0);
                if !ok {
                    return bad("entry does not divide its index");
                }
            }
        }
        Ok(())
    }
}

/// Linear sieve; `spf[n]` is the least prime dividing `n` (`spf[1] = 1`).
fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    if n >= 1 {
        spf[1] = 1;
    }
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let lp = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > lp || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, jordan, mobius};

    #[test]
    fn small_tables() {
        let j1 = SieveTable::build(SieveKind::Jordan(1), 10).unwrap();
        assert_eq!(j1.values(), &[1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        let mu = SieveTable::build(SieveKind::Mobius, 6).unwrap();
        assert_eq!(mu.values(), &[1, -1, -1, 0, -1, 1]);
        for k in 1..=5 {
            assert_eq!(
                SieveTable::build(SieveKind::Jordan(k), 1).unwrap().values(),
                &[1]
            );
        }
    }

    #[test]
    fn matches_pointwise_exhaustively() {
        let limit = 10_000;
        let mu = SieveTable::build(SieveKind::Mobius, limit).unwrap();
        let spf = SieveTable::build(SieveKind::SmallestPrimeFactor, limit).unwrap();
        let jordans: Vec<_> = (1..=4)
            .map(|k| SieveTable::build(SieveKind::Jordan(k), limit).unwrap())
            .collect();
        for n in 1..=limit {
            let f = factorize(n).unwrap();
            assert_eq!(mu.get(n), mobius(&f) as i128);
            assert_eq!(spf.factorize(n).unwrap(), f);
            for (k, table) in (1..).zip(&jordans) {
                assert_eq!(table.get(n), jordan(k, &f).unwrap() as i128, "J_{k}({n})");
            }
        }
    }

    #[test]
    fn rejects_overflow_and_budget() {
        assert!(matches!(
            SieveTable::build(SieveKind::Jordan(8), 100_000),
            Err(Error::Overflow { .. })
        ));
        assert!(matches!(
            SieveTable::build_with_budget(SieveKind::Mobius, 1_000_000, 1_000),
            Err(Error::MemoryBudget { allowed: 1_000, .. })
        ));
        assert!(SieveTable::build(SieveKind::Mobius, 0).is_err());
        let mu = SieveTable::build(SieveKind::Mobius, 10).unwrap();
        assert!(mu.factorize(6).is_err());
    }

    #[test]
    fn cache_roundtrip() {
        for kind in [
            SieveKind::Mobius,
            SieveKind::Jordan(3),
            SieveKind::SmallestPrimeFactor,
        ] {
            let table = SieveTable::build(kind, 5_000).unwrap();
            let mut buf = Vec::new();
            table.write_cache(&mut buf).unwrap();
            assert_eq!(buf.len(), 21 + 8 * 5_000);
            assert_eq!(&buf[..8], CACHE_MAGIC);
            assert_eq!(SieveTable::read_cache(&buf[..]).unwrap(), table);
        }
    }

    #[test]
    fn cache_rejects_corruption() {
        let table = SieveTable::build(SieveKind::Mobius, 100).unwrap();
        let mut buf = Vec::new();
        table.write_cache(&mut buf).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(SieveTable::read_cache(&bad_magic[..]).is_err());

        let truncated = &buf[..buf.len() - 3];
        assert!(SieveTable::read_cache(truncated).is_err());

        let mut bad_value = buf.clone();
        bad_value[21 + 8 * 5] = 7; // mobius(6) := 7
        assert!(matches!(
            SieveTable::read_cache(&bad_value[..]),
            Err(Error::CacheFormat(_))
        ));
    }

    #[test]
    fn wide_entries_refuse_to_cache() {
        let table = SieveTable::build(SieveKind::Jordan(4), 100_000).unwrap();
        let mut buf = Vec::new();
        assert!(matches!(
            table.write_cache(&mut buf),
            Err(Error::Overflow { .. })
        ));
    }
}
