//! Domain value primitives: 256-bit unsigned integers with checked
//! arithmetic, 20-byte addresses, and the state digest used in traces.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

/// Wei per ether.
pub fn wei_per_ether() -> BigUint {
    BigUint::from(10u32).pow(18)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithError {
    /// Result does not fit in 256 bits, or an unsigned subtraction went
    /// below zero.
    Overflow,
    DivisionByZero,
}

impl core::fmt::Display for ArithError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ArithError::Overflow => write!(f, "arithmetic overflow"),
            ArithError::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

/// Unsigned 256-bit integer. All arithmetic is checked; wrapping is a
/// runtime error, never silent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Uint(BigUint);

impl Uint {
    pub const BITS: u64 = 256;

    pub fn zero() -> Self {
        Uint(BigUint::default())
    }

    pub fn from_u64(v: u64) -> Self {
        Uint(BigUint::from(v))
    }

    /// `n` whole ether, in wei.
    pub fn ether(n: u64) -> Self {
        Uint(BigUint::from(n) * wei_per_ether())
    }

    pub fn is_zero(&self) -> bool {
        self.0 == BigUint::default()
    }

    fn fit(v: BigUint) -> Result<Self, ArithError> {
        if v.bits() > Self::BITS {
            Err(ArithError::Overflow)
        } else {
            Ok(Uint(v))
        }
    }

    pub fn checked_add(&self, rhs: &Uint) -> Result<Uint, ArithError> {
        Self::fit(&self.0 + &rhs.0)
    }

    pub fn checked_sub(&self, rhs: &Uint) -> Result<Uint, ArithError> {
        if rhs.0 > self.0 {
            Err(ArithError::Overflow)
        } else {
            Ok(Uint(&self.0 - &rhs.0))
        }
    }

    pub fn checked_mul(&self, rhs: &Uint) -> Result<Uint, ArithError> {
        Self::fit(&self.0 * &rhs.0)
    }

    pub fn checked_div(&self, rhs: &Uint) -> Result<Uint, ArithError> {
        if rhs.is_zero() {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(Uint(&self.0 / &rhs.0))
        }
    }

    /// Parse a decimal string (underscores allowed), rejecting values above
    /// 2^256 - 1.
    pub fn from_decimal(text: &str) -> Option<Uint> {
        let cleaned: String = text.chars().filter(|c| *c != '_').collect();
        if cleaned.is_empty() || !cleaned.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let v = BigUint::parse_bytes(cleaned.as_bytes(), 10)?;
        Self::fit(v).ok()
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    /// Big-endian bytes without leading zeros; used for canonical hashing.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        self.0.to_bytes_be()
    }

    /// Render in ether when the value is a whole-or-fractional multiple that
    /// prints exactly, e.g. `6 ether` or `0.5 ether`.
    pub fn render_ether(&self) -> String {
        let unit = wei_per_ether();
        let whole = &self.0 / &unit;
        let frac = &self.0 % &unit;
        if frac == BigUint::default() {
            alloc::format!("{} ether", whole.to_str_radix(10))
        } else {
            let mut digits = alloc::format!("{:0>18}", frac.to_str_radix(10));
            while digits.ends_with('0') {
                digits.pop();
            }
            alloc::format!("{}.{} ether", whole.to_str_radix(10), digits)
        }
    }
}

impl core::fmt::Display for Uint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl Serialize for Uint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

/// Opaque 20-byte account identifier, rendered as 0x-prefixed lowercase hex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub [u8; 20]);

impl Address {
    pub const ZERO: Address = Address([0u8; 20]);

    /// Deterministic address of the `n`-th deployed contract (1-based).
    pub fn contract(n: u64) -> Address {
        let mut bytes = [0u8; 20];
        bytes[12..20].copy_from_slice(&n.to_be_bytes());
        Address(bytes)
    }

    /// Deterministic address of the `n`-th declared wallet (1-based).
    /// Wallets live in a distinct 0xee… range so deployment counters start
    /// at 0x…01 regardless of how many wallets a scenario declares.
    pub fn wallet(n: u64) -> Address {
        let mut bytes = [0u8; 20];
        bytes[0] = 0xee;
        bytes[12..20].copy_from_slice(&n.to_be_bytes());
        Address(bytes)
    }

    pub fn from_hex(text: &str) -> Option<Address> {
        let hex = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X"))?;
        if hex.len() != 40 {
            return None;
        }
        let mut bytes = [0u8; 20];
        for (i, chunk) in hex.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16)?;
            let lo = (chunk[1] as char).to_digit(16)?;
            bytes[i] = (hi * 16 + lo) as u8;
        }
        Some(Address(bytes))
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(42);
        out.push_str("0x");
        for b in self.0 {
            let _ = core::fmt::Write::write_fmt(&mut out, format_args!("{:02x}", b));
        }
        out
    }
}

impl core::fmt::Display for Address {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

/// 64-bit FNV-1a over a byte stream; the digest carried by firing records.
#[derive(Debug, Clone, Copy)]
pub struct Fnv1a64(u64);

impl Fnv1a64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;

    pub fn new() -> Self {
        Fnv1a64(Self::OFFSET)
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }

    pub fn finish_hex(&self) -> String {
        alloc::format!("{:016x}", self.0)
    }
}

impl Default for Fnv1a64 {
    fn default() -> Self {
        Self::new()
    }
}
