//! Number-theoretic kernels: factorization, linear sieve, Euler phi,
//! divisor count, prime-power count, the divisor-sum weight
//! `F(q) = sum_{r|q} log2(r)/r`, the Hardy-Ramanujan support filter,
//! `D_l` weight classes, and zeta constants with certified enclosures.

use crate::fx::FxI;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::io::{Read, Write};
use std::sync::OnceLock;

/// q together with its prime factorization, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInt {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn phi(&self) -> u64 {
        let mut out = self.value;
        for (p, _) in &self.factors {
            out = out / p * (p - 1);
        }
        out
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| (e + 1) as u64).product()
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// All divisors, sorted ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = out.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                out.extend(prev.iter().map(|d| d * pe));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Trial-division factorization.
pub fn factor(q: u64) -> FactoredInt {
    assert!(q >= 1, "factor requires q >= 1");
    let mut factors = Vec::new();
    let mut x = q;
    let mut p = 2u64;
    while p * p <= x {
        if x % p == 0 {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if x > 1 {
        factors.push((x, 1));
    }
    FactoredInt { value: q, factors }
}

pub fn euler_phi(q: u64) -> u64 {
    factor(q).phi()
}

pub fn divisor_count(q: u64) -> u64 {
    factor(q).divisor_count()
}

pub fn big_omega(q: u64) -> u32 {
    factor(q).big_omega()
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Linear sieve of phi, d, Omega, and smallest prime factor up to `limit`.
pub struct SieveTable {
    pub limit: u64,
    pub phi: Vec<u64>,
    pub d: Vec<u32>,
    pub omega: Vec<u8>,
    pub spf: Vec<u32>,
}

const SIEVE_MAGIC: &[u8; 9] = b"MDLSIEVE1";

impl SieveTable {
    pub fn build(limit: u64) -> SieveTable {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        let mut phi = vec![0u64; n + 1];
        let mut d = vec![0u32; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut exp = vec![0u8; n + 1]; // exponent of spf
        if n >= 1 {
            phi[1] = 1;
            d[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                phi[i] = i as u64 - 1;
                d[i] = 2;
                omega[i] = 1;
                exp[i] = 1;
            }
            for &p in &primes {
                let ip = i * p as usize;
                if p > spf[i] || ip > n {
                    break;
                }
                spf[ip] = p;
                omega[ip] = omega[i] + 1;
                if spf[i] == p {
                    exp[ip] = exp[i] + 1;
                    phi[ip] = phi[i] * p as u64;
                    d[ip] = d[i] / (exp[i] as u32 + 1) * (exp[i] as u32 + 2);
                } else {
                    exp[ip] = 1;
                    phi[ip] = phi[i] * (p as u64 - 1);
                    d[ip] = d[i] * 2;
                }
            }
        }
        SieveTable { limit, phi, d, omega, spf }
    }

    pub fn factor(&self, q: u64) -> FactoredInt {
        assert!(q >= 1);
        if q > self.limit {
            return factor(q);
        }
        let mut factors = Vec::new();
        let mut x = q as usize;
        while x > 1 {
            let p = self.spf[x] as u64;
            let mut e = 0;
            while x as u64 % p == 0 {
                x /= p as usize;
                e += 1;
            }
            factors.push((p, e));
        }
        FactoredInt { value: q, factors }
    }

    pub fn phi_of(&self, q: u64) -> u64 {
        if q <= self.limit {
            self.phi[q as usize]
        } else {
            euler_phi(q)
        }
    }

    pub fn d_of(&self, q: u64) -> u64 {
        if q <= self.limit {
            self.d[q as usize] as u64
        } else {
            divisor_count(q)
        }
    }

    pub fn omega_of(&self, q: u64) -> u32 {
        if q <= self.limit {
            self.omega[q as usize] as u32
        } else {
            big_omega(q)
        }
    }

    /// Flat little-endian binary cache: magic, limit, then the four arrays
    /// widened to u64.
    pub fn write_cache<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(SIEVE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        for v in &self.phi {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in &self.d {
            w.write_all(&(*v as u64).to_le_bytes())?;
        }
        for v in &self.omega {
            w.write_all(&(*v as u64).to_le_bytes())?;
        }
        for v in &self.spf {
            w.write_all(&(*v as u64).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(r: &mut R) -> std::io::Result<SieveTable> {
        let mut magic = [0u8; 9];
        r.read_exact(&mut magic)?;
        if &magic != SIEVE_MAGIC {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "bad sieve cache magic",
            ));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let limit = u64::from_le_bytes(b8);
        let n = limit as usize + 1;
        let mut read_u64s = |count: usize| -> std::io::Result<Vec<u64>> {
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let mut b = [0u8; 8];
                r.read_exact(&mut b)?;
                out.push(u64::from_le_bytes(b));
            }
            Ok(out)
        };
        let phi = read_u64s(n)?;
        let d = read_u64s(n)?.into_iter().map(|v| v as u32).collect();
        let omega = read_u64s(n)?.into_iter().map(|v| v as u8).collect();
        let spf = read_u64s(n)?.into_iter().map(|v| v as u32).collect();
        Ok(SieveTable { limit, phi, d, omega, spf })
    }
}

/// Shared default sieve (limit 10^6), built on first use.
pub fn default_sieve() -> &'static SieveTable {
    static SIEVE: OnceLock<SieveTable> = OnceLock::new();
    SIEVE.get_or_init(|| SieveTable::build(1_000_000))
}

// ---------------------------------------------------------------------------
// F(q) = sum_{r|q} log2(r)/r in fixed point at scale 2^-96.
// ---------------------------------------------------------------------------

/// Certified absolute error of a single `log2(r)/r` table entry, in units of
/// 2^-96. Budget: prime logs carry <= 2 ulp, a composite ln is a sum of at
/// most 40 prime logs, the ln2 reciprocal another ~16 ulp after scaling, and
/// division by r only shrinks the error. 512 ulp = 2^-87 is a generous cover.
pub const W_ERR_ULPS: u128 = 512;

/// F(q) as a fixed-point value at scale 2^-96 with absolute error
/// `<= d(q) * W_ERR_ULPS * 2^-96` (far inside the contract `d(q) * 2^-50`).
#[derive(Clone, Copy, Debug)]
pub struct Fq {
    pub val: u128,
    pub err: u128,
}

impl Fq {
    pub fn lo_ratio(&self) -> BigRational {
        let den = BigInt::one() << 96u32;
        BigRational::new(BigInt::from(self.val.saturating_sub(self.err)), den)
    }

    pub fn hi_ratio(&self) -> BigRational {
        let den = BigInt::one() << 96u32;
        BigRational::new(BigInt::from(self.val + self.err), den)
    }
}

/// floor(a*b / 2^96); requires a*b < 2^224 (true for all table entries).
fn mul_shift_96(a: u128, b: u128) -> u128 {
    const M64: u128 = (1u128 << 64) - 1;
    let (ah, al) = (a >> 64, a & M64);
    let (bh, bl) = (b >> 64, b & M64);
    let ll = al * bl;
    let m1 = ah * bl;
    let m2 = al * bh;
    let hh = ah * bh;
    // 64-bit limbs of the 256-bit product
    let limb1 = (ll >> 64) + (m1 & M64) + (m2 & M64);
    let limb2 = (m1 >> 64) + (m2 >> 64) + (hh & M64) + (limb1 >> 64);
    let limb3 = (hh >> 64) + (limb2 >> 64);
    let p1 = limb1 & M64;
    let p2 = limb2 & M64;
    debug_assert!(limb3 < 1 << 32, "mul_shift_96 overflow");
    // bits 96.. of the product
    (p1 >> 32) | (p2 << 32) | (limb3 << 96)
}

/// ln(n) table at scale 2^-96 built multiplicatively over the sieve.
fn build_ln_table(sieve: &SieveTable, limit: u64) -> Vec<u128> {
    let n = limit as usize;
    let mut ln = vec![0u128; n + 1];
    for i in 2..=n {
        let p = sieve.spf[i] as usize;
        if p == i {
            // fresh prime: certified fx enclosure, take the midpoint
            let e = FxI::from_int(i as i64, 112).ln().round_to(96);
            let mid = (&e.lo + &e.hi) >> 1;
            ln[i] = mid.to_u128().expect("ln fits u128");
        } else {
            ln[i] = ln[p] + ln[i / p];
        }
    }
    ln
}

/// Table of F(q) for all q <= limit, plus divisor counts for error bounds.
pub struct FTable {
    pub limit: u64,
    vals: Vec<u128>,
    dcounts: Vec<u32>,
}

impl FTable {
    pub fn build(limit: u64) -> FTable {
        let sieve = if limit <= default_sieve().limit {
            None
        } else {
            Some(SieveTable::build(limit))
        };
        let sieve = sieve.as_ref().unwrap_or_else(|| default_sieve());
        let ln = build_ln_table(sieve, limit);
        let inv_ln2_96: u128 = {
            let e = crate::fx::inv_ln2(112).round_to(96);
            let mid = (&e.lo + &e.hi) >> 1;
            mid.to_u128().unwrap()
        };
        let n = limit as usize;
        let mut vals = vec![0u128; n + 1];
        for r in 2..=n {
            // w_r = log2(r)/r = ln(r)*inv_ln2 / r at scale 2^-96
            let log2r = mul_shift_96(ln[r], inv_ln2_96);
            let w = log2r / r as u128;
            let mut m = r;
            while m <= n {
                vals[m] += w;
                m += r;
            }
        }
        let dcounts = (0..=n).map(|q| if q == 0 { 0 } else { sieve.d_of(q as u64) as u32 }).collect();
        FTable { limit, vals, dcounts }
    }

    pub fn f(&self, q: u64) -> Fq {
        assert!(q >= 1 && q <= self.limit);
        Fq {
            val: self.vals[q as usize],
            err: self.dcounts[q as usize] as u128 * W_ERR_ULPS,
        }
    }
}

/// Certified F(q) without a table (divisor enumeration + fx logs).
pub fn f_certified(q: u64) -> Fq {
    let fi = factor(q);
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for r in fi.divisors() {
        if r == 1 {
            continue;
        }
        let l = FxI::from_int(r as i64, 128).log2();
        let (a, b) = l.to_ratio_bounds();
        let rr = BigInt::from(r);
        lo += a / BigRational::from_integer(rr.clone());
        hi += b / BigRational::from_integer(rr);
    }
    let scale = BigRational::new(BigInt::one() << 96u32, BigInt::one());
    let lo_s = (&lo * &scale).floor().to_integer().to_u128().unwrap_or(0);
    let hi_s = (&hi * &scale).ceil().to_integer().to_u128().unwrap_or(u128::MAX);
    let val = (lo_s + hi_s) / 2;
    Fq { val, err: (hi_s - lo_s) / 2 + 1 }
}

/// Outcome of a certified threshold count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailCount {
    pub above: u64,
    pub indeterminate: u64,
}

/// Exact count of q <= limit with F(q) > threshold; entries whose certified
/// interval straddles the threshold are reported separately.
pub fn f_tail_count(table: &FTable, q_max: u64, threshold: &BigRational) -> TailCount {
    assert!(q_max >= 16 && q_max <= table.limit);
    let mut above = 0u64;
    let mut indeterminate = 0u64;
    // threshold at scale 2^-96, floor and ceil
    let scaled = threshold * BigRational::new(BigInt::one() << 96u32, BigInt::one());
    let thr_floor = scaled.floor().to_integer();
    let thr_is_int = scaled.is_integer();
    let _ = thr_is_int;
    for q in 1..=q_max {
        let f = table.f(q);
        let lo = BigInt::from(f.val.saturating_sub(f.err));
        let hi = BigInt::from(f.val + f.err);
        // An integer at scale 2^-96 exceeds the threshold iff it exceeds its
        // floor at the same scale, whether or not the threshold is on-grid.
        if lo > thr_floor {
            above += 1;
        } else if !(hi <= thr_floor) {
            indeterminate += 1;
        }
    }
    TailCount { above, indeterminate }
}

// ---------------------------------------------------------------------------
// Hardy-Ramanujan support filter.
// ---------------------------------------------------------------------------

/// Per-Omega thresholds for the support condition
/// `Omega(q) <= (log2 q)^(1/2+eps)`, which is equivalent to
/// `q >= 2^(Omega^(1/(1/2+eps)))`. Thresholds are certified integers.
pub struct OmegaThresholds {
    pub eps: BigRational,
    /// min_q[w] = smallest q satisfying the filter when Omega(q) = w,
    /// or None when that q exceeds u64.
    pub min_q: Vec<Option<u64>>,
}

impl OmegaThresholds {
    pub fn build(eps: &BigRational, max_omega: u32) -> Result<OmegaThresholds> {
        if !eps.is_positive() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        // exponent = 1/(1/2+eps) = 2*den/(den+2*num) for eps = num/den
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let expo = (half + eps).recip();
        let a = expo.numer().to_u32().ok_or_else(|| {
            Error::InvalidParameter("epsilon exponent too large".into())
        })?;
        let b = expo.denom().to_u32().ok_or_else(|| {
            Error::InvalidParameter("epsilon exponent too large".into())
        })?;
        let mut min_q = vec![Some(1u64); 1]; // Omega=0 always passes
        for w in 1..=max_omega {
            // t = 2^(w^(a/b)); filter true iff q >= t (inclusive at exact powers)
            let wa = BigInt::from(w).pow(a);
            let root = wa.nth_root(b);
            if num_traits::Pow::pow(&root, b) == wa {
                let k = root.to_u64().unwrap();
                min_q.push(if k >= 64 { None } else { Some(1u64 << k) });
                continue;
            }
            // w^(a/b) is irrational, so t is never an integer; escalate until
            // the enclosure of t pins down floor(t), then ceil(t) = floor+1.
            let e = BigRational::new(wa.clone(), BigInt::one());
            let b_inv = BigRational::new(BigInt::one(), BigInt::from(b));
            let t: Option<Option<u64>> = crate::fx::escalate(96, 4096, |bits| {
                let r = FxI::from_ratio(&e, bits).pow_ratio(&b_inv).exp2();
                if r.lo.bits() as i64 - bits as i64 > 66 {
                    // threshold certainly beyond u64: the filter fails for all q
                    return Some(None);
                }
                let lo_int = &r.lo >> bits;
                let hi_int = &r.hi >> bits;
                if lo_int == hi_int {
                    Some(lo_int.to_u64().map(|v| v + 1))
                } else {
                    None
                }
            });
            match t {
                Some(v) => min_q.push(v),
                None => {
                    return Err(Error::IndeterminateAtPrecision(format!(
                        "omega threshold for w={w}"
                    )))
                }
            }
        }
        Ok(OmegaThresholds { eps: eps.clone(), min_q })
    }

    /// Filter decision for a given q and Omega(q).
    pub fn passes(&self, q: u64, omega: u32) -> bool {
        if omega == 0 {
            return true;
        }
        match self.min_q.get(omega as usize) {
            Some(Some(t)) => q >= *t,
            Some(None) => false,
            None => false, // beyond table: threshold is astronomically large
        }
    }
}

/// Single-q support filter: true iff Omega(q) <= (log2 q)^(1/2+eps).
pub fn omega_support_filter(q: u64, eps: &BigRational) -> Result<bool> {
    if q < 3 {
        return Err(Error::InvalidParameter("omega_support_filter requires q >= 3".into()));
    }
    let w = big_omega(q);
    let thr = OmegaThresholds::build(eps, w.max(1))?;
    Ok(thr.passes(q, w))
}

// ---------------------------------------------------------------------------
// D_l weight classes.
// ---------------------------------------------------------------------------

/// Index l with q/phi(q) in [2^l, 2^(l+1)); half-open so the classes partition.
pub fn dl_index(q: u64) -> u32 {
    assert!(q >= 1);
    let phi = euler_phi(q);
    let mut l = 0u32;
    // 2^l <= q/phi < 2^(l+1)
    while (phi << (l + 1)) <= q {
        l += 1;
    }
    l
}

// ---------------------------------------------------------------------------
// Zeta constants via Euler-Maclaurin.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ZetaConstants {
    pub k: u32,
    /// Enclosure of zeta(2).
    pub zeta2: (BigRational, BigRational),
    /// Enclosure of zeta(K-1) when K >= 4.
    pub zeta_k_minus_1: Option<(BigRational, BigRational)>,
    /// Enclosure of -zeta'(1 + 1/K) (natural-log series).
    pub neg_zeta_prime: (BigRational, BigRational),
    /// Rational C with  sum_{r>=1} log2(r)/r^(1+1/K) <= C*K^2, i.e.
    /// C >= -zeta'(1+1/K) / (K^2 ln 2). This is the constant used by the
    /// F-moment bound, which is stated for base-2 logarithms.
    pub c_moment: BigRational,
}

/// Enclosure of zeta(s) for rational s > 1 by Euler-Maclaurin with one
/// Bernoulli correction: remainder bounded by s*N^(-s-1)/12.
fn zeta_em(s: &BigRational, n_terms: u64, bits: u32) -> (BigRational, BigRational) {
    let mut sum = FxI::zero(bits);
    for n in 1..=n_terms {
        let nf = FxI::from_int(n as i64, bits);
        let term = nf.pow_ratio(&-s.clone()).round_to(bits);
        sum = sum.add(&term);
    }
    let nf = FxI::from_int(n_terms as i64, bits);
    let one = BigRational::one();
    // integral tail: N^(1-s)/(s-1)
    let tail_int = nf
        .pow_ratio(&(&one - s))
        .mul_ratio(&(s - &one).recip());
    // -f(N)/2
    let half_term = nf.pow_ratio(&-s.clone()).mul_ratio(&BigRational::new(
        BigInt::from(-1),
        BigInt::from(2),
    ));
    // -f'(N)/12 = s*N^(-s-1)/12
    let fp = nf
        .pow_ratio(&(-s.clone() - &one))
        .mul_ratio(&(s / BigRational::from_integer(BigInt::from(12))));
    let mut total = sum.add(&tail_int).add(&half_term).add(&fp);
    // remainder bound
    let rem = fp.clone(); // same magnitude bound: s*N^(-s-1)/12
    total = FxI {
        lo: &total.lo - &rem.hi,
        hi: &total.hi + &rem.hi,
        bits,
    };
    total.to_ratio_bounds()
}

/// Enclosure of -zeta'(s) = sum_{n>=2} ln(n) n^(-s) for rational s > 1,
/// Euler-Maclaurin with one Bernoulli correction; remainder bounded by
/// N^(-s-1)(s ln N + 1)/12.
fn neg_zeta_prime_em(s: &BigRational, n_terms: u64, bits: u32) -> (BigRational, BigRational) {
    let mut sum = FxI::zero(bits);
    for n in 2..=n_terms {
        let nf = FxI::from_int(n as i64, bits);
        let term = nf.ln().mul(&nf.pow_ratio(&-s.clone())).round_to(bits);
        sum = sum.add(&term);
    }
    let nf = FxI::from_int(n_terms as i64, bits);
    let ln_n = nf.ln();
    let one = BigRational::one();
    let sm1 = s - &one;
    // integral: N^(1-s) (ln N/(s-1) + 1/(s-1)^2)
    let n_pow = nf.pow_ratio(&(&one - s));
    let tail_int = n_pow.mul(&ln_n.mul_ratio(&sm1.clone().recip()).add(&FxI::from_ratio(
        &(&sm1 * &sm1).recip(),
        bits,
    )));
    // -f(N)/2 = -ln N * N^(-s)/2
    let half_term = nf
        .pow_ratio(&-s.clone())
        .mul(&ln_n)
        .mul_ratio(&BigRational::new(BigInt::from(-1), BigInt::from(2)));
    // -f'(N)/12 with f'(x) = x^(-s-1)(1 - s ln x):  -f'(N)/12 = N^(-s-1)(s ln N - 1)/12
    let n_pow_s1 = nf.pow_ratio(&(-s.clone() - &one));
    let s_lnn = ln_n.mul_ratio(s);
    let fp = n_pow_s1
        .mul(&s_lnn.sub(&FxI::from_int(1, bits)))
        .mul_ratio(&BigRational::new(BigInt::one(), BigInt::from(12)));
    let mut total = sum.add(&tail_int).add(&half_term).add(&fp);
    // remainder bound: N^(-s-1)(s ln N + 1)/12
    let rem = n_pow_s1
        .mul(&s_lnn.add(&FxI::from_int(1, bits)))
        .mul_ratio(&BigRational::new(BigInt::one(), BigInt::from(12)));
    total = FxI {
        lo: &total.lo - &rem.hi,
        hi: &total.hi + &rem.hi,
        bits,
    };
    total.to_ratio_bounds()
}

/// Certified constants: zeta(2), zeta(K-1) for K >= 4, and the moment
/// constant C; every enclosure has width <= 1e-10.
pub fn zeta_constants(k: u32) -> Result<ZetaConstants> {
    if k < 2 {
        return Err(Error::InvalidParameter("zeta_constants requires K >= 2".into()));
    }
    let bits = 160;
    let two = BigRational::from_integer(BigInt::from(2));
    let zeta2 = zeta_em(&two, 3000, bits);
    let zeta_k_minus_1 = if k >= 4 {
        let s = BigRational::from_integer(BigInt::from(k - 1));
        Some(zeta_em(&s, 3000, bits))
    } else {
        None
    };
    let s = BigRational::one() + BigRational::new(BigInt::one(), BigInt::from(k));
    // N chosen so that N^(-s-1)(s ln N + 1)/12 <= 1e-11 for K <= 16.
    let n_terms = match k {
        2 => 40_000,
        3 => 60_000,
        _ => 120_000,
    };
    let nzp = neg_zeta_prime_em(&s, n_terms, bits);
    let width = &nzp.1 - &nzp.0;
    let tol = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(10));
    if width > tol {
        return Err(Error::IndeterminateAtPrecision(format!(
            "zeta'(1+1/{k}) enclosure too wide: {width}"
        )));
    }
    // C = upper(-zeta'(s)) / (K^2 * lower(ln 2))
    let ln2_lo = crate::fx::ln2(bits).to_ratio_bounds().0;
    let k2 = BigRational::from_integer(BigInt::from(k as u64 * k as u64));
    let c_moment = &nzp.1 / (&k2 * &ln2_lo);
    Ok(ZetaConstants { k, zeta2, zeta_k_minus_1, neg_zeta_prime: nzp, c_moment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn rat_dec(s: &str) -> BigRational {
        let neg = s.starts_with('-');
        let dot = s.find('.').unwrap();
        let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
        let frac_len = s.len() - dot - 1;
        let n = BigInt::from_str(&digits).unwrap();
        let d = BigInt::from(10u32).pow(frac_len as u32);
        let r = BigRational::new(n, d);
        if neg { -r } else { r }
    }

    #[test]
    fn factor_basic() {
        assert_eq!(factor(1).factors, vec![]);
        assert_eq!(factor(12).factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factor(97).factors, vec![(97, 1)]);
    }

    #[test]
    fn phi_d_omega_values() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(big_omega(12), 3);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(divisor_count(1), 1);
        assert_eq!(big_omega(1), 0);
    }

    #[test]
    fn sieve_matches_direct() {
        let s = SieveTable::build(3000);
        for q in 1..=3000u64 {
            let f = factor(q);
            assert_eq!(s.phi[q as usize], f.phi(), "phi({q})");
            assert_eq!(s.d[q as usize] as u64, f.divisor_count(), "d({q})");
            assert_eq!(s.omega[q as usize] as u32, f.big_omega(), "Omega({q})");
            assert_eq!(s.factor(q), f);
        }
    }

    #[test]
    fn phi_divisor_sum_identity() {
        // sum_{d|q} phi(d) = q
        let s = SieveTable::build(10_000);
        for q in 1..=10_000u64 {
            let total: u64 = s.factor(q).divisors().iter().map(|&d| s.phi[d as usize]).sum();
            assert_eq!(total, q);
        }
    }

    #[test]
    fn d_le_2_pow_omega() {
        let s = SieveTable::build(20_000);
        for q in 1..=20_000usize
        {
            assert!(s.d[q] as u64 <= 1u64 << s.omega[q].min(63), "q={q}");
        }
    }

    #[test]
    fn sieve_cache_roundtrip() {
        let s = SieveTable::build(500);
        let mut buf = Vec::new();
        s.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..9], SIEVE_MAGIC);
        let t = SieveTable::read_cache(&mut buf.as_slice()).unwrap();
        assert_eq!(t.limit, 500);
        assert_eq!(t.phi, s.phi);
        assert_eq!(t.d, s.d);
        assert_eq!(t.omega, s.omega);
        assert_eq!(t.spf, s.spf);
    }

    #[test]
    fn f_trivial_values() {
        let t = FTable::build(100);
        let f1 = t.f(1);
        assert_eq!(f1.val, 0);
        // F(2) = 1/2 exactly
        let f2 = t.f(2);
        let half = 1u128 << 95;
        assert!(f2.val.abs_diff(half) <= f2.err, "F(2)={} err={}", f2.val, f2.err);
    }

    #[test]
    fn f6_oracle() {
        // independent path: divisor enumeration with 128-bit fx logs
        let t = FTable::build(10);
        let table = t.f(6);
        let oracle = f_certified(6);
        assert!(
            table.val.abs_diff(oracle.val) <= table.err + oracle.err,
            "table {} vs oracle {}",
            table.val,
            oracle.val
        );
        // ~ 1.45915
        let approx = rat_dec("1.45915");
        let tol = rat_dec("0.00001");
        let v = BigRational::new(BigInt::from(table.val), BigInt::one() << 96u32);
        assert!((v - approx).abs() < tol);
    }

    #[test]
    fn f_monotone_under_divisibility() {
        // F(r) <= F(q) when r | q (within certified error)
        let t = FTable::build(2000);
        for q in [12u64, 60, 360, 1980, 1024] {
            for r in factor(q).divisors() {
                let fr = t.f(r);
                let fq = t.f(q);
                assert!(fr.val <= fq.val + fr.err + fq.err, "F({r}) > F({q})");
            }
        }
    }

    #[test]
    fn f_tail_counts() {
        let t = FTable::build(10_000);
        let zero = BigRational::zero();
        let c = f_tail_count(&t, 100, &zero);
        assert_eq!(c.above, 99, "only F(1)=0");
        assert_eq!(c.indeterminate, 0);
        let ten = BigRational::from_integer(BigInt::from(10));
        let c10 = f_tail_count(&t, 10, &ten);
        assert_eq!(c10.above, 0);
    }

    #[test]
    fn omega_filter_examples() {
        let eps = BigRational::new(BigInt::one(), BigInt::from(10));
        // q = 2^20: Omega=20 > 20^0.6
        assert!(!omega_support_filter(1 << 20, &eps).unwrap());
        // primes pass
        assert!(omega_support_filter(5, &eps).unwrap());
        assert!(omega_support_filter(9973, &eps).unwrap());
        // q=16: Omega=4 > 4^0.6=2.297
        assert!(!omega_support_filter(16, &eps).unwrap());
    }

    #[test]
    fn dl_index_examples() {
        assert_eq!(dl_index(1), 0);
        assert_eq!(dl_index(2), 1); // ratio exactly 2 -> half-open assigns l=1
        assert_eq!(dl_index(15), 0); // 15/8 < 2
        // partition: every q has exactly one l and it matches the inequality
        for q in 1..=2000u64 {
            let l = dl_index(q);
            let phi = euler_phi(q);
            assert!((phi << l) <= q && q < (phi << (l + 1)));
        }
    }

    #[test]
    fn zeta2_and_zeta3_digits() {
        let z = zeta_constants(4).unwrap();
        let z2_truth = rat_dec("1.64493406684822643647241516664602518921894990120679");
        assert!(z.zeta2.0 <= z2_truth && z2_truth <= z.zeta2.1);
        let z3 = z.zeta_k_minus_1.unwrap();
        let z3_truth = rat_dec("1.20205690315959428539973816151144999076498629234049");
        assert!(z3.0 <= z3_truth && z3_truth <= z3.1);
    }

    #[test]
    fn neg_zeta_prime_bracket_oracle() {
        // coarse independent bracket: partial sum + monotone integral tail
        let z = zeta_constants(2).unwrap();
        let s = BigRational::new(BigInt::from(3), BigInt::from(2));
        let bits = 96;
        let mut partial = FxI::zero(bits);
        let n_max = 4000u64;
        for n in 2..=n_max {
            let nf = FxI::from_int(n as i64, bits);
            partial = partial.add(&nf.ln().mul(&nf.pow_ratio(&-s.clone())));
        }
        // tail in [int_(N+1)^inf, int_N^inf], f decreasing for n >= 8
        let tail_at = |n: u64| {
            let nf = FxI::from_int(n as i64, bits);
            let one = BigRational::one();
            nf.pow_ratio(&(&one - &s)).mul(
                &nf.ln()
                    .mul_ratio(&(&s - &one).recip())
                    .add(&FxI::from_ratio(&((&s - &one) * (&s - &one)).recip(), bits)),
            )
        };
        let lo_bracket = partial.add(&tail_at(n_max + 1)).to_ratio_bounds().0;
        let hi_bracket = partial.add(&tail_at(n_max)).to_ratio_bounds().1;
        assert!(z.neg_zeta_prime.0 >= lo_bracket, "E-M below bracket");
        assert!(z.neg_zeta_prime.1 <= hi_bracket, "E-M above bracket");
        // spec's quoted magnitude
        let lo = rat_dec("3.93");
        let hi = rat_dec("3.94");
        assert!(z.neg_zeta_prime.0 > lo && z.neg_zeta_prime.1 < hi);
    }

    #[test]
    fn c_moment_dominates_partial_sums() {
        // sum_{r<=Q} log2(r)/r^(1+1/K) <= C*K^2 for a desk-scale Q
        for k in [2u32, 3, 4] {
            let z = zeta_constants(k).unwrap();
            let s = BigRational::one() + BigRational::new(BigInt::one(), BigInt::from(k));
            let bits = 96;
            let mut sum = FxI::zero(bits);
            for r in 2..=2000u64 {
                let rf = FxI::from_int(r as i64, bits);
                sum = sum.add(&rf.log2().mul(&rf.pow_ratio(&-s.clone())));
            }
            let ck2 = &z.c_moment * BigRational::from_integer(BigInt::from(k as u64 * k as u64));
            assert!(sum.to_ratio_bounds().1 < ck2, "K={k}");
        }
    }
}
