//! 24-bit CRCs for transport-block and code-block error detection.
//!
//! The register is initialised to zero and the remainder is emitted without
//! a final XOR, most significant coefficient first.

use crate::{Bit, Error, Result};

/// Number of parity bits appended by every polynomial in this module.
pub const CRC_LEN: usize = 24;

/// A degree-24 generator polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcPolynomial {
    /// Full generator including the `x^24` term, bit `i` = coefficient of `x^i`.
    generator: u32,
    name: &'static str,
}

/// Transport-block CRC, `x^24 + x^23 + x^18 + x^17 + x^14 + x^11 + x^10 + x^7 + x^6 + x^5 + x^4 + x^3 + x + 1`.
pub const CRC24A: CrcPolynomial = CrcPolynomial {
    generator: 0x186_4CFB,
    name: "CRC24A",
};

/// Code-block CRC, `x^24 + x^23 + x^6 + x^5 + x + 1`.
pub const CRC24B: CrcPolynomial = CrcPolynomial {
    generator: 0x180_0063,
    name: "CRC24B",
};

impl CrcPolynomial {
    /// Builds a polynomial from its 25 coefficients, highest degree first.
    pub fn from_coefficients(coefficients: &[Bit], name: &'static str) -> Result<Self> {
        if coefficients.len() != CRC_LEN + 1 {
            return Err(Error::MalformedInput(format!(
                "a degree-24 generator has 25 coefficients, got {}",
                coefficients.len()
            )));
        }
        if coefficients[0] != 1 || coefficients[CRC_LEN] != 1 {
            return Err(Error::MalformedInput(
                "leading and constant coefficients must be 1".into(),
            ));
        }
        let generator = coefficients
            .iter()
            .fold(0u32, |acc, &c| (acc << 1) | u32::from(c & 1));
        Ok(Self { generator, name })
    }

    /// Coefficients, highest degree first.
    pub fn coefficients(&self) -> [Bit; CRC_LEN + 1] {
        let mut out = [0; CRC_LEN + 1];
        for (i, c) in out.iter_mut().enumerate() {
            *c = ((self.generator >> (CRC_LEN - i)) & 1) as Bit;
        }
        out
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Looks a polynomial up by its label (`CRC24A` / `CRC24B`).
    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "CRC24A" => Some(CRC24A),
            "CRC24B" => Some(CRC24B),
            _ => None,
        }
    }

    fn low_bits(&self) -> u32 {
        self.generator & 0xFF_FFFF
    }
}

fn remainder(message: &[Bit], poly: CrcPolynomial) -> u32 {
    let low = poly.low_bits();
    message.iter().fold(0u32, |reg, &bit| {
        let feedback = ((reg >> 23) ^ u32::from(bit)) & 1;
        let shifted = (reg << 1) & 0xFF_FFFF;
        if feedback == 1 {
            shifted ^ low
        } else {
            shifted
        }
    })
}

/// Remainder of `message * x^24` modulo `poly`, as 24 bits, MSB first.
pub fn crc24_compute(message: &[Bit], poly: CrcPolynomial) -> [Bit; CRC_LEN] {
    let reg = remainder(message, poly);
    let mut out = [0; CRC_LEN];
    for (i, b) in out.iter_mut().enumerate() {
        *b = ((reg >> (CRC_LEN - 1 - i)) & 1) as Bit;
    }
    out
}

/// Returns `message ∥ crc24_compute(message)`.
pub fn crc24_attach(message: &[Bit], poly: CrcPolynomial) -> Vec<Bit> {
    let mut out = Vec::with_capacity(message.len() + CRC_LEN);
    out.extend_from_slice(message);
    out.extend_from_slice(&crc24_compute(message, poly));
    out
}

/// True iff the trailing 24 bits are the CRC of everything before them.
pub fn crc24_check(message_with_crc: &[Bit], poly: CrcPolynomial) -> Result<bool> {
    if message_with_crc.len() <= CRC_LEN {
        return Err(Error::MalformedInput(format!(
            "CRC check needs at least {} bits, got {}",
            CRC_LEN + 1,
            message_with_crc.len()
        )));
    }
    Ok(crc24_passes(message_with_crc, poly))
}

/// Infallible variant of [`crc24_check`] for callers that already know the
/// length; running the whole word through the register leaves zero iff the
/// check passes.
pub(crate) fn crc24_passes(message_with_crc: &[Bit], poly: CrcPolynomial) -> bool {
    remainder(message_with_crc, poly) == 0
}
