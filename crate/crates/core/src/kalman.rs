//! Constant-velocity Kalman filter over `[u, v, s, r, u', v', s']`.
//!
//! Position, area and aspect ratio are observed directly; `u`, `v` and `s`
//! each carry a per-frame velocity while the aspect ratio has none. The frame
//! interval is fixed at one.

use crate::geometry::{BBox, GeometryError, Observation};
use crate::linalg::Matrix;
use thiserror::Error;

pub const STATE_DIM: usize = 7;
pub const MEAS_DIM: usize = 4;

/// Floor applied to area and aspect ratio when a state is turned into a box.
pub const MIN_SHAPE: f64 = 1e-6;

pub type Covariance = Matrix<STATE_DIM, STATE_DIM>;
pub type MeasurementMatrix = Matrix<MEAS_DIM, MEAS_DIM>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KalmanError {
    #[error("innovation covariance is not positive definite")]
    SingularInnovation,
    #[error("invalid filter parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub [f64; STATE_DIM]);

impl StateVector {
    pub fn u(&self) -> f64 {
        self.0[0]
    }
    pub fn v(&self) -> f64 {
        self.0[1]
    }
    pub fn s(&self) -> f64 {
        self.0[2]
    }
    pub fn r(&self) -> f64 {
        self.0[3]
    }
    pub fn velocity(&self) -> [f64; 3] {
        [self.0[4], self.0[5], self.0[6]]
    }

    pub fn observation(&self) -> [f64; MEAS_DIM] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Box implied by the position part of the state. Area and aspect ratio
    /// are floored at [`MIN_SHAPE`] so a drifting estimate still converts.
    pub fn to_box(&self) -> Result<BBox, GeometryError> {
        let o = Observation {
            u: self.u(),
            v: self.v(),
            s: self.s().max(MIN_SHAPE),
            r: self.r().max(MIN_SHAPE),
        };
        crate::geometry::observation_to_box(&o)
    }
}

/// Noise model of the filter. The transition and observation matrices are
/// fixed by the motion model; see [`transition`] and [`FilterParams::innovation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub process_noise: Covariance,
    pub measurement_noise: MeasurementMatrix,
    pub initial_covariance: Covariance,
}

pub const DEFAULT_PROCESS_NOISE: [f64; STATE_DIM] = [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4];
pub const DEFAULT_MEASUREMENT_NOISE: [f64; MEAS_DIM] = [1.0, 1.0, 10.0, 10.0];
pub const DEFAULT_INITIAL_COVARIANCE: [f64; STATE_DIM] = [10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4];

impl Default for FilterParams {
    fn default() -> Self {
        Self::from_diagonals(
            &DEFAULT_PROCESS_NOISE,
            &DEFAULT_MEASUREMENT_NOISE,
            &DEFAULT_INITIAL_COVARIANCE,
        )
        .expect("default noise diagonals are valid")
    }
}

impl FilterParams {
    pub fn from_diagonals(
        q: &[f64; STATE_DIM],
        r: &[f64; MEAS_DIM],
        p0: &[f64; STATE_DIM],
    ) -> Result<Self, KalmanError> {
        let params = Self {
            process_noise: Matrix::from_diagonal(q),
            measurement_noise: Matrix::from_diagonal(r),
            initial_covariance: Matrix::from_diagonal(p0),
        };
        params.validate()?;
        Ok(params)
    }

    /// Q and P0 must be symmetric with a nonnegative diagonal; R must be
    /// positive definite so the innovation is always invertible.
    pub fn validate(&self) -> Result<(), KalmanError> {
        let check = |name: &str, finite: bool, asym: f64, diag: &[f64]| {
            if !finite {
                return Err(KalmanError::InvalidParams(format!("{name} has non-finite entries")));
            }
            if asym > 1e-9 {
                return Err(KalmanError::InvalidParams(format!("{name} is not symmetric")));
            }
            if diag.iter().any(|d| *d < 0.0) {
                return Err(KalmanError::InvalidParams(format!("{name} has a negative diagonal")));
            }
            Ok(())
        };
        let q = &self.process_noise;
        check("Q", q.is_finite(), q.max_asymmetry(), &q.diagonal())?;
        let p = &self.initial_covariance;
        check("P0", p.is_finite(), p.max_asymmetry(), &p.diagonal())?;
        let r = &self.measurement_noise;
        check("R", r.is_finite(), r.max_asymmetry(), &r.diagonal())?;
        if r.spd_inverse().is_none() {
            return Err(KalmanError::InvalidParams("R must be positive definite".into()));
        }
        Ok(())
    }

    /// The observation matrix H: selects the first four state entries.
    pub fn innovation() -> Matrix<MEAS_DIM, STATE_DIM> {
        let mut h = Matrix::zeros();
        for i in 0..MEAS_DIM {
            h[(i, i)] = 1.0;
        }
        h
    }
}

/// The constant-velocity transition matrix F for a one-frame step.
pub fn transition() -> Covariance {
    let mut f = Matrix::identity();
    f[(0, 4)] = 1.0;
    f[(1, 5)] = 1.0;
    f[(2, 6)] = 1.0;
    f
}

/// Starts a filter at the observed box with zero velocity.
pub fn init_filter(obs: &Observation, params: &FilterParams) -> (StateVector, Covariance) {
    let state = StateVector([obs.u, obs.v, obs.s, obs.r, 0.0, 0.0, 0.0]);
    (state, params.initial_covariance)
}

/// One-frame constant-velocity prediction of mean and covariance.
pub fn predict(state: &StateVector, cov: &Covariance, params: &FilterParams) -> (StateVector, Covariance) {
    let mut x = state.0;
    if x[2] + x[6] <= 0.0 {
        x[6] = 0.0;
    }
    x[0] += x[4];
    x[1] += x[5];
    x[2] += x[6];

    let f = transition();
    let mut p = f * *cov * f.transpose() + params.process_noise;
    p.symmetrize();
    (StateVector(x), p)
}

/// Kalman correction with an observed box.
pub fn update(
    state: &StateVector,
    cov: &Covariance,
    obs: &Observation,
    params: &FilterParams,
) -> Result<(StateVector, Covariance), KalmanError> {
    // H selects the leading 4x4 block, so H P H^T and P H^T are slices of P.
    let mut s = params.measurement_noise;
    for i in 0..MEAS_DIM {
        for j in 0..MEAS_DIM {
            s[(i, j)] += cov[(i, j)];
        }
    }
    let s_inv = s.spd_inverse().ok_or(KalmanError::SingularInnovation)?;

    let mut pht = Matrix::<STATE_DIM, MEAS_DIM>::zeros();
    for i in 0..STATE_DIM {
        for j in 0..MEAS_DIM {
            pht[(i, j)] = cov[(i, j)];
        }
    }
    let gain = pht * s_inv;

    let z = obs.as_array();
    let predicted = state.observation();
    let residual: [f64; MEAS_DIM] = std::array::from_fn(|i| z[i] - predicted[i]);
    let correction = gain.mul_vec(&residual);
    let mut x = state.0;
    for (xi, ci) in x.iter_mut().zip(correction.iter()) {
        *xi += ci;
    }

    // (I - K H) P = P - K (H P)
    let hp = pht.transpose();
    let mut p = *cov - gain * hp;
    p.symmetrize();
    Ok((StateVector(x), p))
}

/// Mean and covariance of one target, advanced in place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxFilter {
    pub state: StateVector,
    pub cov: Covariance,
}

impl BoxFilter {
    pub fn new(obs: &Observation, params: &FilterParams) -> Self {
        let (state, cov) = init_filter(obs, params);
        Self { state, cov }
    }

    pub fn predict(&mut self, params: &FilterParams) {
        let (state, cov) = predict(&self.state, &self.cov, params);
        self.state = state;
        self.cov = cov;
    }

    pub fn update(&mut self, obs: &Observation, params: &FilterParams) -> Result<(), KalmanError> {
        let (state, cov) = update(&self.state, &self.cov, obs, params)?;
        self.state = state;
        self.cov = cov;
        Ok(())
    }

    pub fn to_box(&self) -> Result<BBox, GeometryError> {
        self.state.to_box()
    }
}
