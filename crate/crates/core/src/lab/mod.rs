//! Executable versions of the constructions: pinball regions, the
//! residual-finiteness and separability replays, and non-engulfed stages.

mod experiments;
mod nonengulfed;
mod pinball;

pub use experiments::{
    engulfing_witness, resfin_experiment, subgpsep_experiment, EngulfingWitness, HallEntry,
    Machinery, ResfinCertificate, SubgpsepCertificate, SubgpsepOptions, MIN_TRACES,
    POWER_LEMMA_BOUND,
};
pub use nonengulfed::{
    nonengulfed_experiment, nonengulfed_stage, normal_family, NonEngulfedOptions,
    NonEngulfedStage, IMAGE_LIMIT,
};
pub use pinball::{
    build_b, discontinuity_threshold, pinball_trace, proper_discontinuity_set, AlternatingWord,
    BCertificate, Block, PairLetter, PinballRegions, PinballTrace, ProperDiscontinuity, Region,
};
