//! Explicit colorings of Grassmann graphs `J_q(n, m)` over finite fields,
//! with the machinery to verify them exhaustively at desk scale.

pub mod colorings;
pub mod gfarith;
pub mod graphs;
pub mod oracle;
pub mod projlinalg;
pub mod reports;
pub mod spreads;
