//! Reduction compiler from Vertex Cover to planar Minimum Shared Edges,
//! with exact oracles for checking the construction at small scale.

pub mod graph;
pub mod gadgets;
pub mod oracles;
pub mod random;
pub mod reduction;
