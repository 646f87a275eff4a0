//! Coordinated-turn prediction and box-measurement Kalman update.

use nalgebra::{SMatrix, SVector};

use super::{
    fuse_class, idx, Component, DynamicState, GdpfConfig, GdpfError, Measurement, StateCovariance,
    StateVector, MEAS_DIM, STATE_DIM,
};

type MeasMatrix = SMatrix<f64, MEAS_DIM, STATE_DIM>;

/// `(sin(wT)/w, (1 - cos(wT))/w)`, with the series limit near zero.
fn turn_terms(omega: f64, dt: f64, threshold: f64) -> (f64, f64) {
    if omega.abs() < threshold {
        (dt, 0.5 * omega * dt * dt)
    } else {
        let half = 0.5 * omega * dt;
        // 1 - cos(x) = 2 sin^2(x / 2) avoids cancellation for small x
        ((omega * dt).sin() / omega, 2.0 * half.sin().powi(2) / omega)
    }
}

/// Propagates the state through the coordinated-turn model for `dt`.
fn propagate(x: &StateVector, dt: f64, threshold: f64) -> StateVector {
    let (vx, vy, w) = (x[idx::VX], x[idx::VY], x[idx::OMEGA]);
    let (s_w, c_w) = turn_terms(w, dt, threshold);
    let (s, c) = ((w * dt).sin(), (w * dt).cos());
    let mut out = *x;
    out[idx::X] = x[idx::X] + vx * s_w - vy * c_w;
    out[idx::Y] = x[idx::Y] + vx * c_w + vy * s_w;
    out[idx::VX] = vx * c - vy * s;
    out[idx::VY] = vx * s + vy * c;
    out
}

/// Jacobian of the coordinated-turn transition at `x`.
pub fn transition_jacobian(x: &StateVector, dt: f64, threshold: f64) -> StateCovariance {
    let (vx, vy, w) = (x[idx::VX], x[idx::VY], x[idx::OMEGA]);
    let (s_w, c_w) = turn_terms(w, dt, threshold);
    let (s, c) = ((w * dt).sin(), (w * dt).cos());
    let mut f = StateCovariance::identity();
    f[(idx::X, idx::VX)] = s_w;
    f[(idx::X, idx::VY)] = -c_w;
    f[(idx::Y, idx::VX)] = c_w;
    f[(idx::Y, idx::VY)] = s_w;
    f[(idx::VX, idx::VX)] = c;
    f[(idx::VX, idx::VY)] = -s;
    f[(idx::VY, idx::VX)] = s;
    f[(idx::VY, idx::VY)] = c;
    let (dx_dw, dy_dw) = if w.abs() < threshold {
        (-0.5 * vy * dt * dt, 0.5 * vx * dt * dt)
    } else {
        (
            (vx * dt * c - vy * dt * s) / w - (vx * s_w - vy * c_w) / w,
            (vx * dt * s + vy * dt * c) / w - (vx * c_w + vy * s_w) / w,
        )
    };
    f[(idx::X, idx::OMEGA)] = dx_dw;
    f[(idx::Y, idx::OMEGA)] = dy_dw;
    f[(idx::VX, idx::OMEGA)] = -dt * (vx * s + vy * c);
    f[(idx::VY, idx::OMEGA)] = dt * (vx * c - vy * s);
    f
}

/// Diagonal additive process noise `Q(dt) = diag(q) dt`.
pub fn process_noise(dt: f64, cfg: &GdpfConfig) -> StateCovariance {
    let q = [
        cfg.q_position,
        cfg.q_position,
        cfg.q_position,
        cfg.q_velocity,
        cfg.q_velocity,
        cfg.q_turn_rate,
        cfg.q_dimension,
        cfg.q_dimension,
        cfg.q_dimension,
    ];
    StateCovariance::from_diagonal(&SVector::<f64, STATE_DIM>::from(q)) * dt
}

fn symmetrize(p: &mut StateCovariance) {
    *p = 0.5 * (*p + p.transpose());
}

/// EKF time update over `dt` seconds.
pub fn predict(c: &Component, dt: f64, cfg: &GdpfConfig) -> Component {
    assert!(dt > 0.0, "prediction interval must be positive");
    let mut out = c.clone();
    let f = transition_jacobian(&c.state.0, dt, cfg.omega_linear_threshold);
    out.state = DynamicState(propagate(&c.state.0, dt, cfg.omega_linear_threshold));
    out.cov = f * c.cov * f.transpose() + process_noise(dt, cfg);
    symmetrize(&mut out.cov);
    out
}

fn measurement_matrix() -> MeasMatrix {
    let mut h = MeasMatrix::zeros();
    for (row, col) in idx::MEASURED.iter().enumerate() {
        h[(row, *col)] = 1.0;
    }
    h
}

fn measurement_noise(cfg: &GdpfConfig) -> SMatrix<f64, MEAS_DIM, MEAS_DIM> {
    let (p, d) = (cfg.meas_std_position.powi(2), cfg.meas_std_dimension.powi(2));
    SMatrix::<f64, MEAS_DIM, MEAS_DIM>::from_diagonal(&SVector::<f64, MEAS_DIM>::from([
        p, p, p, d, d, d,
    ]))
}

fn measurement_vector(y: &Measurement) -> SVector<f64, MEAS_DIM> {
    let (c, d) = (y.bbox.center, y.bbox.dims);
    SVector::<f64, MEAS_DIM>::from([c[0], c[1], c[2], d[0], d[1], d[2]])
}

fn initial_covariance(cfg: &GdpfConfig) -> StateCovariance {
    let (p, d) = (cfg.meas_std_position.powi(2), cfg.meas_std_dimension.powi(2));
    let v = cfg.init_std_velocity.powi(2);
    let w = cfg.init_std_turn_rate.powi(2);
    let k = cfg.init_cov_inflation;
    StateCovariance::from_diagonal(&SVector::<f64, STATE_DIM>::from([
        k * p,
        k * p,
        k * p,
        v,
        v,
        w,
        k * d,
        k * d,
        k * d,
    ]))
}

fn initial_state(y: &Measurement, cfg: &GdpfConfig) -> StateVector {
    let (c, d) = (y.bbox.center, y.bbox.dims);
    StateVector::from([
        c[0],
        c[1],
        c[2],
        0.0,
        0.0,
        0.0,
        d[0].max(cfg.min_dimension),
        d[1].max(cfg.min_dimension),
        d[2].max(cfg.min_dimension),
    ])
}

/// Base-measure draw for a new component: state from the measurement box,
/// zero motion, inflated diagonal covariance.
pub fn init_component(id: u64, y: &Measurement, cfg: &GdpfConfig) -> Component {
    let mut c = Component::new(
        id,
        DynamicState(initial_state(y, cfg)),
        initial_covariance(cfg),
        cfg.existence_init,
        y.class_proposal.clone(),
        cfg.seed,
    );
    c.accumulate(&y.points, cfg.max_accumulated_points);
    c.last_associated_box = Some(y.bbox);
    c
}

/// Kalman update with the box measurement `y`; also accumulates its points
/// and fuses its class proposal.
///
/// If the innovation covariance is not positive definite the component's
/// state and covariance are re-initialized from `y` and the error is
/// returned; the component is still usable afterwards.
pub fn update(c: &mut Component, y: &Measurement, cfg: &GdpfConfig) -> Result<(), GdpfError> {
    let h = measurement_matrix();
    let r = measurement_noise(cfg);
    let s = h * c.cov * h.transpose() + r;
    let result = match s.cholesky() {
        Some(chol) => {
            let pht = c.cov * h.transpose();
            // K = P H^T S^-1, solved as S K^T = H P
            let k = chol.solve(&pht.transpose()).transpose();
            let innovation = measurement_vector(y) - h * c.state.0;
            c.state.0 += k * innovation;
            let i_kh = StateCovariance::identity() - k * h;
            c.cov = i_kh * c.cov * i_kh.transpose() + k * r * k.transpose();
            symmetrize(&mut c.cov);
            Ok(())
        }
        None => {
            c.state = DynamicState(initial_state(y, cfg));
            c.cov = initial_covariance(cfg);
            Err(GdpfError::NonPositiveInnovationCovariance(c.id))
        }
    };
    for i in [idx::L, idx::W, idx::H] {
        c.state.0[i] = c.state.0[i].max(cfg.min_dimension);
    }
    c.accumulate(&y.points, cfg.max_accumulated_points);
    c.class_scores = fuse_class(&c.class_scores, &y.class_proposal, cfg.class_fusion_weight);
    c.last_associated_box = Some(y.bbox);
    result
}
