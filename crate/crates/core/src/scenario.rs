//! Measurement scenario: Alice with two dichotomic inputs, Bob with `n`
//! dichotomic inputs whose compatibility graph is an `n`-cycle.
//!
//! Correlators are laid out in a fixed order,
//!
//! ```text
//! <A_x> | <B_y> | <A_x B_y> | <B_y1 B_y2> | <A_x B_y1 B_y2>
//!   2   |   n   |    2n     |      n      |       2n
//! ```
//!
//! with `x` major in the bipartite blocks. For `n = 4` this is the column
//! order of the bundled inequality table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of Alice inputs. Fixed for every scenario in this crate.
pub const ALICE_INPUTS: usize = 2;

/// An ordered pair of compatible Bob inputs `(y1, y2)`, with `y1` the cycle
/// predecessor of `y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context(pub usize, pub usize);

impl Context {
    pub fn contains(&self, y: usize) -> bool {
        self.0 == y || self.1 == y
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    bob_inputs: usize,
    contexts: Vec<Context>,
}

impl Scenario {
    /// Builds the scenario whose Bob compatibility graph is the cycle
    /// `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n_bob: usize) -> Result<Self> {
        if n_bob < 3 {
            return Err(Error::InvalidScenario(format!(
                "a compatibility cycle needs at least 3 Bob inputs, got {n_bob}"
            )));
        }
        let contexts = (0..n_bob).map(|y| Context(y, (y + 1) % n_bob)).collect();
        Ok(Scenario { bob_inputs: n_bob, contexts })
    }

    /// The four-cycle scenario `C = [(0,1), (1,2), (2,3), (3,0)]`.
    pub fn square() -> Self {
        Self::cycle(4).expect("4 >= 3")
    }

    pub fn alice_inputs(&self) -> usize {
        ALICE_INPUTS
    }

    pub fn bob_inputs(&self) -> usize {
        self.bob_inputs
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    /// Length of a correlator vector: `2 + 6n`.
    pub fn dimension(&self) -> usize {
        ALICE_INPUTS + self.bob_inputs * (1 + ALICE_INPUTS + 1 + ALICE_INPUTS)
    }

    /// Indices of the contexts that contain Bob input `y`.
    pub fn contexts_of(&self, y: usize) -> Vec<usize> {
        self.contexts.iter().enumerate().filter(|(_, c)| c.contains(y)).map(|(i, _)| i).collect()
    }

    pub fn pos_a(&self, x: usize) -> usize {
        debug_assert!(x < ALICE_INPUTS);
        x
    }

    pub fn pos_b(&self, y: usize) -> usize {
        debug_assert!(y < self.bob_inputs);
        ALICE_INPUTS + y
    }

    pub fn pos_ab(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < ALICE_INPUTS && y < self.bob_inputs);
        ALICE_INPUTS + self.bob_inputs + x * self.bob_inputs + y
    }

    pub fn pos_bb(&self, ctx: usize) -> usize {
        debug_assert!(ctx < self.contexts.len());
        ALICE_INPUTS + 3 * self.bob_inputs + ctx
    }

    pub fn pos_abb(&self, x: usize, ctx: usize) -> usize {
        debug_assert!(x < ALICE_INPUTS && ctx < self.contexts.len());
        ALICE_INPUTS + 4 * self.bob_inputs + x * self.contexts.len() + ctx
    }

    pub fn position(&self, idx: CorrelatorIndex) -> Option<usize> {
        let n = self.bob_inputs;
        let m = self.contexts.len();
        let ok_x = |x: usize| x < ALICE_INPUTS;
        match idx {
            CorrelatorIndex::A { x } if ok_x(x) => Some(self.pos_a(x)),
            CorrelatorIndex::B { y } if y < n => Some(self.pos_b(y)),
            CorrelatorIndex::AB { x, y } if ok_x(x) && y < n => Some(self.pos_ab(x, y)),
            CorrelatorIndex::BB { ctx } if ctx < m => Some(self.pos_bb(ctx)),
            CorrelatorIndex::ABB { x, ctx } if ok_x(x) && ctx < m => Some(self.pos_abb(x, ctx)),
            _ => None,
        }
    }

    pub fn index_at(&self, pos: usize) -> Option<CorrelatorIndex> {
        let n = self.bob_inputs;
        let m = self.contexts.len();
        let mut p = pos;
        if p < ALICE_INPUTS {
            return Some(CorrelatorIndex::A { x: p });
        }
        p -= ALICE_INPUTS;
        if p < n {
            return Some(CorrelatorIndex::B { y: p });
        }
        p -= n;
        if p < ALICE_INPUTS * n {
            return Some(CorrelatorIndex::AB { x: p / n, y: p % n });
        }
        p -= ALICE_INPUTS * n;
        if p < m {
            return Some(CorrelatorIndex::BB { ctx: p });
        }
        p -= m;
        if p < ALICE_INPUTS * m {
            return Some(CorrelatorIndex::ABB { x: p / m, ctx: p % m });
        }
        None
    }

    /// All correlator indices in canonical order.
    pub fn indices(&self) -> Vec<CorrelatorIndex> {
        (0..self.dimension()).map(|p| self.index_at(p).expect("in range")).collect()
    }

    /// Column labels such as `A0`, `B2`, `A1B3`, `B3B0`, `A0B0B1`.
    pub fn labels(&self) -> Vec<String> {
        self.indices().into_iter().map(|i| self.label(i)).collect()
    }

    pub fn label(&self, idx: CorrelatorIndex) -> String {
        match idx {
            CorrelatorIndex::A { x } => format!("A{x}"),
            CorrelatorIndex::B { y } => format!("B{y}"),
            CorrelatorIndex::AB { x, y } => format!("A{x}B{y}"),
            CorrelatorIndex::BB { ctx } => {
                let Context(y1, y2) = self.contexts[ctx];
                format!("B{y1}B{y2}")
            }
            CorrelatorIndex::ABB { x, ctx } => {
                let Context(y1, y2) = self.contexts[ctx];
                format!("A{x}B{y1}B{y2}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelatorKind {
    A,
    B,
    BB,
    AB,
    ABB,
}

/// One entry of a correlator vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelatorIndex {
    A { x: usize },
    B { y: usize },
    AB { x: usize, y: usize },
    BB { ctx: usize },
    ABB { x: usize, ctx: usize },
}

impl CorrelatorIndex {
    pub fn kind(&self) -> CorrelatorKind {
        match self {
            CorrelatorIndex::A { .. } => CorrelatorKind::A,
            CorrelatorIndex::B { .. } => CorrelatorKind::B,
            CorrelatorIndex::AB { .. } => CorrelatorKind::AB,
            CorrelatorIndex::BB { .. } => CorrelatorKind::BB,
            CorrelatorIndex::ABB { .. } => CorrelatorKind::ABB,
        }
    }

    pub fn alice_input(&self) -> Option<usize> {
        match *self {
            CorrelatorIndex::A { x } | CorrelatorIndex::AB { x, .. } | CorrelatorIndex::ABB { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn bob_input(&self) -> Option<usize> {
        match *self {
            CorrelatorIndex::B { y } | CorrelatorIndex::AB { y, .. } => Some(y),
            _ => None,
        }
    }

    pub fn context(&self) -> Option<usize> {
        match *self {
            CorrelatorIndex::BB { ctx } | CorrelatorIndex::ABB { ctx, .. } => Some(ctx),
            _ => None,
        }
    }
}

impl fmt::Display for CorrelatorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelatorIndex::A { x } => write!(f, "<A{x}>"),
            CorrelatorIndex::B { y } => write!(f, "<B{y}>"),
            CorrelatorIndex::AB { x, y } => write!(f, "<A{x}B{y}>"),
            CorrelatorIndex::BB { ctx } => write!(f, "<B[ctx {ctx}]>"),
            CorrelatorIndex::ABB { x, ctx } => write!(f, "<A{x}B[ctx {ctx}]>"),
        }
    }
}
