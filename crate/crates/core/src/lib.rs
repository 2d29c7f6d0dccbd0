//! Effective Heisenberg-picture observables for unstable oscillating
//! two-state systems such as neutral kaons and B mesons.
//!
//! Time is measured in units of the inverse mass splitting (`dm = 1`), and
//! widths are rescaled accordingly. The state space of one particle is the
//! surviving block `{K_S, K_L}` plus a two-dimensional final (decayed)
//! block, ordered `(S, L, f_L, f_S)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`], [`params`], [`basis`]: complex matrices, presets and basis changes.
//! * [`evolution`]: closed-form decay, a Lindblad integrator and joint probabilities.
//! * [`effective`]: the effective observable, its spectrum and CP corrections.
//! * [`uncertainty`]: entropic bounds and the characteristic times.
//! * [`bell`]: CHSH witnesses, their eigenvalue bounds and time scans.

pub mod basis;
pub mod bell;
pub mod effective;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod params;
pub mod uncertainty;

pub use basis::{basis_convert, cp_basis_data, Basis, CpBasisData, Quasispin, StateVector};
pub use bell::{
    bell_bounds, bell_operator, chsh_value, cp_bell_test, scan_bell, BellReport, BellRow,
    BellSetting, ChshValue, CpBellReport, TimePolicy,
};
pub use effective::{
    bipartite_expectation, bloch_vector, cp_eigenvectors, effective_operator,
    effective_operator_cp, expectation, spectral, EigenPair, ObservableMatrix,
};
pub use error::{Error, Result};
pub use evolution::{
    evolve_bipartite, evolve_single_closed, joint_probabilities, lindblad_integrate,
    lindblad_integrate_bipartite, singlet_state, BipartiteGenerator, DensityMatrix, JointOutcome,
    Layout,
};
pub use linalg::{hermitian_eigen, CMatrix, CVector, SpectralDecomp};
pub use params::{bmeson_defaults, kaon_defaults, MesonParams};
pub use uncertainty::{
    binary_entropy, bipartite_mu_bound, complementary_time, cp_overlap_ks,
    delta_for_equal_times, eigen_overlap, misid_time, mu_bound, robertson_check,
    UncertaintyReport,
};
