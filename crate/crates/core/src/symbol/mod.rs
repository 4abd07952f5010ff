//! Canonical term algebra and the symbol recursions.

pub mod context;
pub mod expr;
pub mod recursion;
pub mod taylor;

pub use context::SymbolCtx;
pub use expr::{SymbolExpr, SymbolTerm, Variant};
pub use recursion::{
    build_operator_data, dtn_symbols, leibniz_compose, resolvent_symbols, theta_m1_parts,
    DtnSymbols, OperatorData, R3Groups, ResolventSymbols,
};
