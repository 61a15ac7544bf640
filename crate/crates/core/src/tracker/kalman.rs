//! Constant-velocity Kalman filter over box centers.
//!
//! State vector is `(cx, cy, vx, vy)`. The transition adds velocity to
//! position each tick with identity velocity dynamics; measurements are
//! box centers. Process noise is isotropic (`Q * I4`), measurement noise
//! likewise (`R * I2`), so the x and y axes evolve independently.

use nalgebra::{Matrix2, Matrix4, Matrix4x2, Matrix2x4, Vector2, Vector4};

use super::TrackerConfig;

/// Scale applied to the process uncertainty for the velocity variance of a
/// freshly spawned track: position is known to measurement accuracy, velocity
/// is not known at all.
pub const INITIAL_VELOCITY_VARIANCE_FACTOR: f64 = 10.0;

/// Gaussian belief over `(cx, cy, vx, vy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

impl KalmanState {
    /// Belief for a track spawned from a single detection at `(cx, cy)`:
    /// zero velocity, covariance `diag(R, R, Q*10, Q*10)`.
    pub fn new_initial(cx: f64, cy: f64, config: &TrackerConfig) -> Self {
        let r = config.measurement_uncertainty;
        let qv = config.process_uncertainty * INITIAL_VELOCITY_VARIANCE_FACTOR;
        Self {
            mean: Vector4::new(cx, cy, 0.0, 0.0),
            covariance: Matrix4::from_diagonal(&Vector4::new(r, r, qv, qv)),
        }
    }

    /// Predicted measurement, i.e. the position components of the mean.
    pub fn position(&self) -> (f64, f64) {
        (self.mean[0], self.mean[1])
    }
}

fn transition() -> Matrix4<f64> {
    #[rustfmt::skip]
    let f = Matrix4::new(
        1.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    );
    f
}

fn measurement_matrix() -> Matrix2x4<f64> {
    #[rustfmt::skip]
    let h = Matrix2x4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    );
    h
}

/// Time update: advance one tick under the constant-velocity model and
/// inflate the covariance by `Q * I4`.
pub fn predict(state: &KalmanState, config: &TrackerConfig) -> KalmanState {
    let f = transition();
    let q = Matrix4::identity() * config.process_uncertainty;
    KalmanState {
        mean: f * state.mean,
        covariance: f * state.covariance * f.transpose() + q,
    }
}

/// Measurement update against an observed box center.
///
/// Uses the Joseph-form covariance update and re-symmetrizes the result, so
/// the covariance stays symmetric positive semi-definite under long
/// predict/update chains.
pub fn update(state: &KalmanState, measurement: (f64, f64), config: &TrackerConfig) -> KalmanState {
    let h = measurement_matrix();
    let r = Matrix2::identity() * config.measurement_uncertainty;
    let z = Vector2::new(measurement.0, measurement.1);

    let innovation = z - h * state.mean;
    let s = h * state.covariance * h.transpose() + r;
    let s_inv = s
        .try_inverse()
        .expect("innovation covariance is positive definite (R > 0)");
    let k: Matrix4x2<f64> = state.covariance * h.transpose() * s_inv;

    let mean = state.mean + k * innovation;
    let ikh = Matrix4::identity() - k * h;
    let covariance = ikh * state.covariance * ikh.transpose() + k * r * k.transpose();
    // Guard against drift from accumulated rounding: keep it exactly symmetric.
    let covariance = (covariance + covariance.transpose()) * 0.5;

    KalmanState { mean, covariance }
}
