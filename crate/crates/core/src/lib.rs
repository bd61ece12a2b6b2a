//! Möbius function, embeddings and intervals of the permutation containment
//! poset.
//!
//! Permutations are compared by pattern containment: `σ ≤ π` when some
//! subsequence of `π` is order-isomorphic to `σ`. The crate computes `μ(σ, π)`
//! along several independent routes, counts (normal) embeddings, builds and
//! exports intervals, and generates the `π_n`, `κ_n`, `π_{n,k}` families.

pub mod embeddings;
pub mod error;
pub mod families;
pub mod mobius;
pub mod perm;
pub mod poset;
pub mod verify;

pub use embeddings::{
    contains, count_embeddings, count_normal_embeddings, enumerate_embeddings, EmbeddingImage,
};
pub use error::{Error, Result};
pub use families::FamilySpec;
pub use mobius::{MobiusCache, Strategy};
pub use perm::{Permutation, Symmetry, TbWord};
pub use poset::{build_interval, Interval, IntervalPoset};
