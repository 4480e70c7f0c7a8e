//! Concrete double categories over finite sets: spans, relations, and
//! set-valued matrices, plus deliberately broken wrappers used to prove the
//! checkers can detect violations.

pub mod mutants;
pub mod rel;
pub mod span;
pub mod vmat;

pub use mutants::{AssociatorTwist, DiagonalTwist, UnitPureBreaker};
pub use rel::RelDouble;
pub use span::SpanDouble;
pub use vmat::{VMatCellFamily, VMatDouble, VMatrix};
