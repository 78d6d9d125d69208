//! Dyadic fixed-point interval arithmetic.
//!
//! Values are enclosures `[lo, hi] / 2^bits` with `BigInt` mantissas. Every
//! operation rounds outward, so any value produced here is a certified
//! enclosure of the exact real result. This is the engine behind all
//! transcendental evaluations in the crate (log2, exp, rational powers,
//! zeta constants); everything downstream that needs exactness stays in
//! `BigRational`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

/// Interval `[lo, hi] / 2^bits`, `lo <= hi`.
#[derive(Clone, Debug)]
pub struct FxI {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity already.
    x >> s
}

fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    -((-x) >> s)
}

fn div_dir(a: &BigInt, b: &BigInt, up: bool) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut a, mut b) = (a.clone(), b.clone());
    if b.sign() == Sign::Minus {
        a = -a;
        b = -b;
    }
    if up {
        (a + (&b - BigInt::one())).div_floor(&b)
    } else {
        a.div_floor(&b)
    }
}

impl FxI {
    pub fn point(m: BigInt, bits: u32) -> Self {
        FxI { lo: m.clone(), hi: m, bits }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        let m = BigInt::from(n) << bits;
        Self::point(m, bits)
    }

    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let scaled = r.numer() << bits;
        let lo = div_dir(&scaled, r.denom(), false);
        let hi = div_dir(&scaled, r.denom(), true);
        FxI { lo, hi, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self::point(BigInt::zero(), bits)
    }

    pub fn to_ratio_bounds(&self) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.bits;
        (
            BigRational::new(self.lo.clone(), den.clone()),
            BigRational::new(self.hi.clone(), den),
        )
    }

    /// Midpoint as a rational (not an enclosure).
    pub fn midpoint(&self) -> BigRational {
        let den = BigInt::one() << (self.bits + 1);
        BigRational::new(&self.lo + &self.hi, den)
    }

    pub fn width(&self) -> BigRational {
        let den = BigInt::one() << self.bits;
        BigRational::new(&self.hi - &self.lo, den)
    }

    pub fn add(&self, o: &FxI) -> FxI {
        debug_assert_eq!(self.bits, o.bits);
        FxI { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, bits: self.bits }
    }

    pub fn sub(&self, o: &FxI) -> FxI {
        debug_assert_eq!(self.bits, o.bits);
        FxI { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, bits: self.bits }
    }

    pub fn neg(&self) -> FxI {
        FxI { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn abs(&self) -> FxI {
        if self.lo.sign() != Sign::Minus {
            self.clone()
        } else if self.hi.sign() != Sign::Plus {
            self.neg()
        } else {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            FxI { lo: BigInt::zero(), hi: m, bits: self.bits }
        }
    }

    pub fn mul(&self, o: &FxI) -> FxI {
        debug_assert_eq!(self.bits, o.bits);
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap();
        let hi = cands.iter().max().unwrap();
        FxI {
            lo: shr_floor(lo, self.bits),
            hi: shr_ceil(hi, self.bits),
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> FxI {
        if k.sign() == Sign::Minus {
            FxI { lo: &self.hi * k, hi: &self.lo * k, bits: self.bits }
        } else {
            FxI { lo: &self.lo * k, hi: &self.hi * k, bits: self.bits }
        }
    }

    pub fn mul_ratio(&self, r: &BigRational) -> FxI {
        self.mul(&FxI::from_ratio(r, self.bits))
    }

    /// Requires 0 to lie strictly outside `o`.
    pub fn div(&self, o: &FxI) -> FxI {
        debug_assert_eq!(self.bits, o.bits);
        assert!(
            o.lo.sign() == Sign::Plus || o.hi.sign() == Sign::Minus,
            "division by interval containing zero"
        );
        let num_lo = &self.lo << self.bits;
        let num_hi = &self.hi << self.bits;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&num_lo, &num_hi] {
            for d in [&o.lo, &o.hi] {
                let down = div_dir(n, d, false);
                let up = div_dir(n, d, true);
                lo = Some(match lo {
                    None => down,
                    Some(x) => std::cmp::min(x, down),
                });
                hi = Some(match hi {
                    None => up,
                    Some(x) => std::cmp::max(x, up),
                });
            }
        }
        FxI { lo: lo.unwrap(), hi: hi.unwrap(), bits: self.bits }
    }

    pub fn recip(&self) -> FxI {
        FxI::from_int(1, self.bits).div(self)
    }

    /// Scale by 2^k (exact for k >= 0, outward otherwise).
    pub fn shl(&self, k: i64) -> FxI {
        if k >= 0 {
            FxI { lo: &self.lo << k as u32, hi: &self.hi << k as u32, bits: self.bits }
        } else {
            let s = (-k) as u32;
            FxI { lo: shr_floor(&self.lo, s), hi: shr_ceil(&self.hi, s), bits: self.bits }
        }
    }

    pub fn round_to(&self, bits: u32) -> FxI {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Less => {
                let s = self.bits - bits;
                FxI { lo: shr_floor(&self.lo, s), hi: shr_ceil(&self.hi, s), bits }
            }
            Ordering::Greater => {
                let s = bits - self.bits;
                FxI { lo: &self.lo << s, hi: &self.hi << s, bits }
            }
        }
    }

    pub fn cmp_ratio(&self, r: &BigRational) -> Option<Ordering> {
        let lhs_hi = &self.hi * r.denom();
        let lhs_lo = &self.lo * r.denom();
        let rhs = r.numer() << self.bits;
        if lhs_hi < rhs {
            Some(Ordering::Less)
        } else if lhs_lo > rhs {
            Some(Ordering::Greater)
        } else if lhs_lo == rhs && lhs_hi == rhs {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified `self < o`; `None` when the intervals overlap.
    pub fn lt(&self, o: &FxI) -> Option<bool> {
        debug_assert_eq!(self.bits, o.bits);
        if self.hi < o.lo {
            Some(true)
        } else if self.lo >= o.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Natural logarithm; requires `lo > 0`.
    pub fn ln(&self) -> FxI {
        assert!(self.lo.sign() == Sign::Plus, "ln of non-positive interval");
        let lo = ln_point(&self.lo, self.bits).lo;
        let hi = ln_point(&self.hi, self.bits).hi;
        FxI { lo, hi, bits: self.bits }
    }

    pub fn exp(&self) -> FxI {
        let lo = exp_point(&self.lo, self.bits).lo;
        let hi = exp_point(&self.hi, self.bits).hi;
        FxI { lo, hi, bits: self.bits }
    }

    pub fn log2(&self) -> FxI {
        self.ln().mul(&inv_ln2(self.bits))
    }

    pub fn exp2(&self) -> FxI {
        self.mul(&ln2(self.bits)).exp()
    }

    /// `self^e` for rational `e`; requires `lo > 0`.
    pub fn pow_ratio(&self, e: &BigRational) -> FxI {
        self.log2().mul_ratio(e).exp2()
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, e: u32) -> FxI {
        let mut acc = FxI::from_int(1, self.bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

static LN2_CACHE: RwLock<Option<HashMap<u32, (BigInt, BigInt)>>> = RwLock::new(None);

/// Enclosure of ln 2 at the given precision: 2*atanh(1/3).
pub fn ln2(bits: u32) -> FxI {
    {
        let guard = LN2_CACHE.read().unwrap();
        if let Some(map) = guard.as_ref() {
            if let Some((lo, hi)) = map.get(&bits) {
                return FxI { lo: lo.clone(), hi: hi.clone(), bits };
            }
        }
    }
    let wb = bits + 16;
    let w = FxI::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(3)), wb);
    let s = atanh_series(&w, wb);
    let r = s.mul_int(&BigInt::from(2)).round_to(bits);
    let mut guard = LN2_CACHE.write().unwrap();
    guard
        .get_or_insert_with(HashMap::new)
        .insert(bits, (r.lo.clone(), r.hi.clone()));
    r
}

pub fn inv_ln2(bits: u32) -> FxI {
    ln2(bits + 8).recip().round_to(bits)
}

/// atanh series sum_{j>=0} w^(2j+1)/(2j+1) with certified tail; needs |w| <= 1/3.
fn atanh_series(w: &FxI, wb: u32) -> FxI {
    let w2 = w.mul(w);
    let mut term = w.clone();
    let mut sum = FxI::zero(wb);
    let mut j: u32 = 0;
    loop {
        let k = BigInt::from(2 * j + 1);
        let contrib = FxI {
            lo: div_dir(&term.lo, &k, false),
            hi: div_dir(&term.hi, &k, true),
            bits: wb,
        };
        sum = sum.add(&contrib);
        // Remaining tail <= |term|*w^2/(1-w^2) <= 2*|term|*w^2 for w^2 <= 1/9.
        let t_abs = term.abs();
        let next_bound = shr_ceil(&(&t_abs.hi * &w2.hi), wb) * BigInt::from(2) + BigInt::from(2);
        if next_bound <= BigInt::from(4) {
            sum = FxI { lo: &sum.lo - &next_bound, hi: &sum.hi + &next_bound, bits: wb };
            break;
        }
        assert!(j <= 4 * wb, "atanh series failed to converge");
        term = term.mul(&w2);
        j += 1;
    }
    sum
}

/// Enclosure of ln(m / 2^bits), m > 0.
fn ln_point(m: &BigInt, bits: u32) -> FxI {
    assert!(m.sign() == Sign::Plus, "ln of non-positive value");
    let wb = bits + 16;
    // v = 2^k * z with z = m/2^(bits+k); start with k = bitlen - bits so z in [1/2, 1),
    // then decrement k when z < 2/3 so z lands in [2/3, 4/3).
    let mut k: i64 = m.bits() as i64 - bits as i64;
    // z < 2/3  <=>  3m < 2 * 2^(bits+k), and bits + k = m.bits() >= 1 here.
    if m * BigInt::from(3) < BigInt::from(2) << m.bits() {
        k -= 1;
    }
    let e = bits as i64 + k; // = m.bits() or m.bits()-1, always >= 0
    debug_assert!(e >= 0);
    let p = BigInt::one() << e as u32;
    let num = (m - &p) << wb;
    let den = m + &p;
    let w = FxI {
        lo: div_dir(&num, &den, false),
        hi: div_dir(&num, &den, true),
        bits: wb,
    };
    let s = atanh_series(&w, wb);
    let atanh2 = s.mul_int(&BigInt::from(2));
    let res = atanh2.add(&ln2(wb).mul_int(&BigInt::from(k)));
    res.round_to(bits)
}

/// Enclosure of exp(m / 2^bits).
fn exp_point(m: &BigInt, bits: u32) -> FxI {
    let wb = bits + 24;
    let l2 = ln2(wb);
    // n = round(v/ln2) approximately; any n with |v - n*ln2| <= ~1.05 works.
    let n_est = {
        let den = &l2.lo >> (wb - bits);
        let num = (m << 1) + &den;
        num.div_floor(&(&den << 1))
    };
    let x = FxI::point(m << (wb - bits), wb);
    let r = x.sub(&l2.mul_int(&n_est));
    let mut term = FxI::from_int(1, wb);
    let mut sum = FxI::from_int(1, wb);
    let mut k: u32 = 1;
    loop {
        term = term.mul(&r);
        let kb = BigInt::from(k);
        term = FxI {
            lo: div_dir(&term.lo, &kb, false),
            hi: div_dir(&term.hi, &kb, true),
            bits: wb,
        };
        sum = sum.add(&term);
        let t_abs = term.abs();
        // For k >= 2 the term ratio is <= |r|/3 <= 0.4, so tail <= |term|.
        if k >= 2 && t_abs.hi <= BigInt::from(2) {
            let pad = &t_abs.hi + BigInt::from(2);
            sum = FxI { lo: &sum.lo - &pad, hi: &sum.hi + &pad, bits: wb };
            break;
        }
        assert!(k <= 4 * wb, "exp series failed to converge");
        k += 1;
    }
    let n_i64 = n_est.to_i64().expect("exp range reduction overflow");
    sum.shl(n_i64).round_to(bits)
}

/// Escalating-precision evaluation: doubles `bits` until `f` returns `Some`
/// or the cap is reached.
pub fn escalate<T>(start_bits: u32, cap_bits: u32, mut f: impl FnMut(u32) -> Option<T>) -> Option<T> {
    let mut bits = start_bits;
    loop {
        if let Some(v) = f(bits) {
            return Some(v);
        }
        if bits >= cap_bits {
            return None;
        }
        bits = (bits * 2).min(cap_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        let neg = s.starts_with('-');
        if let Some(dot) = s.find('.') {
            let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
            let frac_len = s.len() - dot - 1;
            let n = BigInt::from_str(&digits).unwrap();
            let d = BigInt::from(10u32).pow(frac_len as u32);
            let r = BigRational::new(n, d);
            if neg { -r } else { r }
        } else {
            BigRational::from_integer(BigInt::from_str(s).unwrap())
        }
    }

    fn pow10(e: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(10u32).pow(e))
    }

    fn assert_encloses(i: &FxI, truth: &str, width_digits: u32) {
        let t = rat(truth);
        let (lo, hi) = i.to_ratio_bounds();
        // the decimal string is itself truncated; allow 1 ulp of the string
        let frac_len = truth.split('.').nth(1).map(|s| s.len()).unwrap_or(0) as u32;
        let slop = pow10(frac_len);
        assert!(lo <= &t + &slop, "lo {} > truth {}", lo, t);
        assert!(hi >= &t - &slop, "hi {} < truth {}", hi, t);
        assert!(i.width() < pow10(width_digits), "width {} >= 10^-{}", i.width(), width_digits);
    }

    #[test]
    fn ln2_digits() {
        let v = ln2(256);
        assert_encloses(&v, "0.6931471805599453094172321214581765680755001343602552", 40);
    }

    #[test]
    fn ln_small_and_large() {
        let x = FxI::from_int(10, 192);
        assert_encloses(&x.ln(), "2.302585092994045684017991454684364207601101488628772976", 40);
        let y = FxI::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(7)), 192);
        assert_encloses(&y.ln(), "-1.945910149055313305102352460950660664976591928248966763", 40);
    }

    #[test]
    fn exp_values() {
        let x = FxI::from_int(1, 192);
        assert_encloses(&x.exp(), "2.718281828459045235360287471352662497757247093699959574", 40);
        let y = FxI::from_int(-3, 192);
        assert_encloses(&y.exp(), "0.049787068367863942979342415650061776631699592188423215", 40);
        let z = FxI::from_int(20, 192);
        assert_encloses(&z.exp(), "485165195.40979027796910683054154055870219265403726205", 25);
    }

    #[test]
    fn log2_and_pow() {
        let x = FxI::from_int(100, 192);
        assert_encloses(&x.log2(), "6.6438561897747246957406388589787803517296627860491612241", 40);
        let p = x.pow_ratio(&BigRational::new(BigInt::from(3), BigInt::from(5)));
        assert_encloses(&p, "15.848931924611134852021013733915070732708644276633479", 35);
    }

    #[test]
    fn exp2_integer_is_tight() {
        let x = FxI::from_int(10, 128);
        let v = x.exp2();
        let (lo, hi) = v.to_ratio_bounds();
        assert!(lo <= rat("1024") && rat("1024") <= hi);
        assert!(v.width() < rat("0.000000000000000001"));
    }

    #[test]
    fn interval_div_signs() {
        let a = FxI::from_int(-6, 64);
        let b = FxI::from_int(4, 64);
        let q = a.div(&b);
        let (lo, hi) = q.to_ratio_bounds();
        let t = rat("-1.5");
        assert!(lo <= t && t <= hi);
        assert!(q.width() < rat("0.000001"));
    }

    #[test]
    fn escalate_reaches_cap() {
        let r = escalate(32, 128, |b| if b >= 100 { Some(b) } else { None });
        assert_eq!(r, Some(128));
        let none = escalate::<u32>(32, 64, |_| None);
        assert!(none.is_none());
    }
}
