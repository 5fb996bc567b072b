//! Exact computations in the Hall algebra of the Kronecker quiver.
//!
//! The crate builds, over `Q(v)`, the twisted generic composition algebra of
//! the Kronecker quiver together with its integral PBW basis, the
//! bar-invariant monomial basis, and the canonical basis obtained from the
//! two by triangular completion.  A finite-field oracle computes Hall numbers
//! by direct submodule enumeration and validates every structure constant the
//! symbolic side produces.  Cyclic-quiver tubes, an inner product with its
//! Gram matrices, and the symmetric-function dictionary for the imaginary
//! part round out the toolkit.
//!
//! Start with [`element::AlgebraElement`] for symbolic computation, or the
//! `examples/` directory for end-to-end walkthroughs.

pub mod cache;
pub mod canonical;
pub mod element;
pub mod error;
pub mod gf;
pub mod inner;
pub mod interp;
pub mod kronecker;
pub mod linalg;
pub mod oracle;
pub mod laurent;
pub mod partitions;
pub mod quantum;
pub mod ratfun;
pub mod shorthand;
pub mod straighten;
pub mod symfunc;
pub mod tube;
pub mod verify;

pub use error::{HallError, Result};
