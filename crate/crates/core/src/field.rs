//! Arithmetic in GF(2^t) via log/antilog tables, and the bit representation
//! used to move between q-ary symbols and binary vectors.

use std::fmt;

/// A field element, stored as an integer in `[0, q)`.
pub type Symbol = u16;

/// A symbol expanded to its `t` bits, little-endian (index 0 = constant
/// coefficient). Entries are 0 or 1.
pub type SymbolBits = Vec<Symbol>;

/// Primitive polynomials over GF(2), one per extension degree `t = 1..=16`.
/// Bit `i` is the coefficient of `x^i`.
const PRIMITIVE_POLYS: [u32; 16] = [
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b10011,             // x^4 + x + 1
    0b100101,            // x^5 + x^2 + 1
    0b1000011,           // x^6 + x + 1
    0b10001001,          // x^7 + x^3 + 1
    0b100011101,         // x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,        // x^9 + x^4 + 1
    0b10000001001,       // x^10 + x^3 + 1
    0b100000000101,      // x^11 + x^2 + 1
    0b1000001010011,     // x^12 + x^6 + x^4 + x + 1
    0b10000000011011,    // x^13 + x^4 + x^3 + x + 1
    0b100010001000011,   // x^14 + x^10 + x^6 + x + 1
    0b1000000000000011,  // x^15 + x + 1
    0b10001000000001011, // x^16 + x^12 + x^3 + x + 1
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Extension degrees above 16 are rejected; desk scale never needs them.
    UnsupportedDegree(u32),
    /// The polynomial is not primitive over GF(2) (the order of x is below q-1).
    NotPrimitive(u32),
    BadPolyDegree { poly: u32, t: u32 },
    SymbolOutOfRange { symbol: u32, q: usize },
    BitLengthMismatch { expected: usize, got: usize },
    NonBinaryBit(Symbol),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::UnsupportedDegree(t) => write!(f, "unsupported extension degree t={t} (max 16)"),
            FieldError::NotPrimitive(p) => write!(f, "polynomial {p:#x} is not primitive over GF(2)"),
            FieldError::BadPolyDegree { poly, t } => {
                write!(f, "polynomial {poly:#x} does not have degree {t}")
            }
            FieldError::SymbolOutOfRange { symbol, q } => {
                write!(f, "symbol {symbol} out of range for field of size {q}")
            }
            FieldError::BitLengthMismatch { expected, got } => {
                write!(f, "bit vector length {got}, expected {expected}")
            }
            FieldError::NonBinaryBit(b) => write!(f, "bit vector entry {b} is not 0 or 1"),
        }
    }
}

impl std::error::Error for FieldError {}

/// Arithmetic context for GF(2^t).
///
/// All tables are built at construction; the context is immutable afterwards
/// and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFContext {
    t: u32,
    q: usize,
    primitive_poly: u32,
    /// `antilog[i] = x^i` for `i in 0..q-1`.
    antilog: Vec<Symbol>,
    /// `log[a] = i` with `x^i = a`, for `a in 1..q`; `log[0]` is unused.
    log: Vec<u16>,
}

impl GFContext {
    /// Builds GF(2^t) with the built-in primitive polynomial for `t <= 16`.
    pub fn new(t: u32) -> Result<GFContext, FieldError> {
        if t == 0 || t > 16 {
            return Err(FieldError::UnsupportedDegree(t));
        }
        GFContext::with_poly(t, PRIMITIVE_POLYS[(t - 1) as usize])
    }

    /// Builds GF(2^t) from an explicit degree-`t` polynomial, verifying at
    /// construction that the multiplicative order of x equals q-1 (which
    /// makes the polynomial primitive, and the quotient ring a field).
    pub fn with_poly(t: u32, poly: u32) -> Result<GFContext, FieldError> {
        if t == 0 || t > 16 {
            return Err(FieldError::UnsupportedDegree(t));
        }
        if 32 - poly.leading_zeros() != t + 1 {
            return Err(FieldError::BadPolyDegree { poly, t });
        }
        let q = 1usize << t;
        let mut antilog = vec![0 as Symbol; q - 1];
        let mut log = vec![0u16; q];
        let mut acc: u32 = 1;
        for i in 0..q - 1 {
            if acc == 1 && i > 0 {
                // x has order i < q-1: not primitive
                return Err(FieldError::NotPrimitive(poly));
            }
            antilog[i] = acc as Symbol;
            log[acc as usize] = i as u16;
            // multiply by x, reduce mod poly
            acc <<= 1;
            if acc >> t != 0 {
                acc ^= poly;
            }
        }
        if acc != 1 {
            return Err(FieldError::NotPrimitive(poly));
        }
        Ok(GFContext { t, q, primitive_poly: poly, antilog, log })
    }

    /// GF(2), the prime field.
    pub fn binary() -> GFContext {
        GFContext::new(1).expect("GF(2) always constructs")
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// `x^i` (exponent reduced mod q-1).
    pub fn alpha_pow(&self, i: usize) -> Symbol {
        self.antilog[i % (self.q - 1)]
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!((a as usize) < self.q && (b as usize) < self.q);
        a ^ b
    }

    /// Subtraction coincides with addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, b)
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!((a as usize) < self.q && (b as usize) < self.q);
        if a == 0 || b == 0 {
            return 0;
        }
        let i = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.antilog[i % (self.q - 1)]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Symbol {
        assert!(a != 0, "zero has no inverse in GF({})", self.q);
        let i = self.log[a as usize] as usize;
        self.antilog[(self.q - 1 - i) % (self.q - 1)]
    }

    #[inline]
    pub fn div(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Symbol, e: usize) -> Symbol {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let i = self.log[a as usize] as usize;
        self.antilog[(i * e) % (self.q - 1)]
    }

    /// Little-endian bit expansion of a symbol: bit 0 is the constant
    /// coefficient of the polynomial representation.
    pub fn to_bits(&self, a: Symbol) -> SymbolBits {
        debug_assert!((a as usize) < self.q);
        (0..self.t).map(|i| (a >> i) & 1).collect()
    }

    /// Inverse of [`to_bits`](Self::to_bits); rejects wrong lengths and
    /// non-binary entries.
    pub fn from_bits(&self, bits: &[Symbol]) -> Result<Symbol, FieldError> {
        if bits.len() != self.t as usize {
            return Err(FieldError::BitLengthMismatch { expected: self.t as usize, got: bits.len() });
        }
        let mut a: Symbol = 0;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(FieldError::NonBinaryBit(b));
            }
            a |= b << i;
        }
        Ok(a)
    }
}

/// Expands a symbol vector to its concatenated bit representation.
pub fn symbols_to_bits(ctx: &GFContext, symbols: &[Symbol]) -> Vec<Symbol> {
    let t = ctx.t() as usize;
    let mut bits = Vec::with_capacity(symbols.len() * t);
    for &s in symbols {
        for i in 0..t {
            bits.push((s >> i) & 1);
        }
    }
    bits
}

/// Packs a concatenated bit vector back into symbols. Length must be a
/// multiple of `t`.
pub fn bits_to_symbols(ctx: &GFContext, bits: &[Symbol]) -> Result<Vec<Symbol>, FieldError> {
    let t = ctx.t() as usize;
    if !bits.len().is_multiple_of(t) {
        return Err(FieldError::BitLengthMismatch {
            expected: bits.len().next_multiple_of(t),
            got: bits.len(),
        });
    }
    bits.chunks(t).map(|c| ctx.from_bits(c)).collect()
}
