use serde::{Deserialize, Serialize};

/// Tolerance record attached to every certified verdict.
///
/// All decision thresholds operate on unit-normalized inputs (the predicates
/// rescale x and y to norm one before deciding), so the absolute and relative
/// readings coincide on the quantities they gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute zero threshold on unit-scale quantities.
    pub eps_zero: f64,
    /// Relative eigenvalue clustering / attainment window.
    pub eps_eig: f64,
    /// Relative self-adjointness defect accepted before symmetrization.
    pub tol_sa: f64,
    /// A witness state certifies Holds when its defining values are within
    /// this distance of their targets.
    pub witness_tol: f64,
    /// A Fails verdict requires the certified distance from the decision
    /// boundary to exceed this margin. Kept far above `witness_tol` so the
    /// state route and the norm-minimization route can never certify
    /// opposite answers on the same pair.
    pub fail_margin: f64,
    /// Norm-minimization route: certified Fails requires a norm drop of at
    /// least this much below |x|.
    pub drop_fail: f64,
    /// Norm-minimization route: certified Holds requires (measured drop +
    /// optimizer gap) below this.
    pub drop_hold: f64,
    /// Bisection tolerance for witness extraction paths.
    pub bisect_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_zero: 1e-9,
            eps_eig: 1e-9,
            tol_sa: 1e-8,
            witness_tol: 1e-9,
            fail_margin: 1e-4,
            drop_fail: 1e-7,
            drop_hold: 1e-11,
            bisect_tol: 1e-10,
        }
    }
}

impl Tolerances {
    /// Override the witness threshold, keeping the other windows consistent.
    pub fn with_witness_tol(mut self, tol: f64) -> Self {
        self.witness_tol = tol;
        self
    }
}
