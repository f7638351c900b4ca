//! Z-pinch equilibria: pressure profiles, force balance, axis expansion,
//! pointwise stability criteria and admissibility.
//!
//! The equilibrium has `u = 0`, `B = (0, B_θ(r), 0)` and `p = p(r)` inside
//! the plasma `0 ≤ r ≤ r₀`, with the force balance
//! `(p + B_θ²/2)′ = −B_θ²/r`, closed by `B_θ² = −(2/r²)∫₀^r s² p′ ds`. The
//! current is `J_z = (1/r)(r B_θ)′ = −p′/B_θ`, the density
//! `ρ = (p/A)^{1/γ}`, and the vacuum field `B̂_θ = B_θ(r₀) r₀ / r`.

mod admissibility;
mod axis;
mod criteria;
mod grid;
mod profile;
mod state;

pub use admissibility::{check_admissibility, AdmissibilityReport};
pub use axis::{taylor_axis_coefficients, AxisExpansion};
pub use criteria::{
    interchange_criterion_scan, interchange_value, sausage_criterion_scan,
    sausage_mean_value_witness, sausage_value, CriterionReport, Verdict,
};
pub use grid::{Clustering, GridSpec};
pub use profile::{PressureProfile, PressureSample, ProfileKind};
pub(crate) use state::first_derivative_weights;
pub use state::{build_equilibrium, BuildOptions, EquilibriumState, PointState};
