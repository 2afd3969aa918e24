pub mod eidostate;
pub mod engine;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod macrostate;
pub mod oracle;
pub mod quantum;
pub mod state;

pub use eidostate::{Eidostate, Process, ProcessType};
pub use entropy::{ExactEntropy, EntropySum, Precision};
pub use error::{Error, Result};
pub use macrostate::{AtomDef, Fault, MacroModel};
pub use oracle::{ModelOracle, StateEquivalence};
pub use quantum::{QAtom, QuantumModel};
pub use state::{AtomId, StateExpr};
pub use engine::{
    classify, DemonPlan, IrreversibilityEstimate, LandauerVerdict, ProbabilityReport,
};
pub use harness::{run_axiom_suite, run_theorem_suite, CounterexampleRecord, SuiteConfig, SuiteReport};
