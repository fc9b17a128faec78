//! Finite-index machinery: presentations, coset enumeration, low-index
//! subgroups and the separability constructions built on them.

mod low_index;
mod separability;
mod table;
mod todd_coxeter;

pub use low_index::{low_index, low_index_with_budget, DEFAULT_NODE_BUDGET};
pub use separability::{
    engulf, hall_witness, intersection_table, power_lemma_check, profinite_closure,
    relative_index, residual_core, Closure, EngulfResult, PowerLemmaReport, ResidualCore,
    DEFAULT_ORBIT_BUDGET,
};
pub(crate) use separability::ball;
pub use table::{CosetTable, Presentation};
pub use todd_coxeter::coset_enumerate;
