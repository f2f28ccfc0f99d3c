use serde::{Deserialize, Serialize};

use crate::Bit;

/// Recursive systematic convolutional code with one feedback and one
/// feedforward polynomial, given in octal-style integers whose most
/// significant bit is the `D^0` coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisSpec {
    pub memory: usize,
    pub feedback: u32,
    pub feedforward: u32,
}

/// The LTE constituent code, `(1, 15/13)` octal, 8 states.
pub const LTE_TRELLIS_SPEC: TrellisSpec = TrellisSpec {
    memory: 3,
    feedback: 0o13,
    feedforward: 0o15,
};

/// Precomputed state-transition tables for a [`TrellisSpec`].
///
/// State bit `i` holds the register cell written `i + 1` steps ago.
#[derive(Debug, Clone)]
pub struct Trellis {
    spec: TrellisSpec,
    next: Vec<[usize; 2]>,
    parity: Vec<[Bit; 2]>,
    /// Input that drives the feedback bit to zero from each state.
    tail_input: Vec<Bit>,
}

impl Trellis {
    pub fn new(spec: TrellisSpec) -> Self {
        let m = spec.memory;
        let states = 1usize << m;
        let tap = |poly: u32, i: usize| -> u32 { (poly >> (m - i)) & 1 };
        let mut next = Vec::with_capacity(states);
        let mut parity = Vec::with_capacity(states);
        let mut tail_input = Vec::with_capacity(states);
        for s in 0..states {
            let cell = |i: usize| ((s >> (i - 1)) & 1) as u32;
            let fb: u32 = (1..=m)
                .map(|i| tap(spec.feedback, i) & cell(i))
                .fold(0, |a, b| a ^ b);
            let ff_reg: u32 = (1..=m)
                .map(|i| tap(spec.feedforward, i) & cell(i))
                .fold(0, |a, b| a ^ b);
            let mut n = [0usize; 2];
            let mut p = [0 as Bit; 2];
            for u in 0..2u32 {
                let a = u ^ fb;
                n[u as usize] = ((s << 1) | a as usize) & (states - 1);
                p[u as usize] = ((tap(spec.feedforward, 0) & a) ^ ff_reg) as Bit;
            }
            next.push(n);
            parity.push(p);
            tail_input.push(fb as Bit);
        }
        Self {
            spec,
            next,
            parity,
            tail_input,
        }
    }

    pub fn lte() -> Self {
        Self::new(LTE_TRELLIS_SPEC)
    }

    pub fn spec(&self) -> &TrellisSpec {
        &self.spec
    }

    pub fn memory(&self) -> usize {
        self.spec.memory
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    #[inline]
    pub fn next_state(&self, state: usize, input: Bit) -> usize {
        self.next[state][input as usize]
    }

    #[inline]
    pub fn parity(&self, state: usize, input: Bit) -> Bit {
        self.parity[state][input as usize]
    }

    #[inline]
    pub fn tail_input(&self, state: usize) -> Bit {
        self.tail_input[state]
    }
}
