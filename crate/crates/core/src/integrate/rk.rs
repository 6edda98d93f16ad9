//! Dormand–Prince 5(4) stepper on a fixed-size state.

pub(crate) const DIM: usize = 4;
pub(crate) type State = [f64; DIM];

// Stage abscissae are not needed: the field is autonomous.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error weights: fifth-order minus embedded fourth-order solution.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..DIM {
            out[i] += h * coef * k[i];
        }
    }
    out
}

pub(crate) struct Step {
    pub y: State,
    pub err: State,
    /// Field at the new state (first stage of the next step).
    pub f_new: State,
}

/// One Dormand–Prince step of size `h` from `y` with `f0 = field(y)`.
pub(crate) fn dopri_step<F: Fn(&State) -> State>(field: &F, y: &State, f0: &State, h: f64) -> Step {
    let k1 = *f0;
    let k2 = field(&axpy(y, &[(A21, &k1)], h));
    let k3 = field(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = field(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
    let k5 = field(&axpy(
        y,
        &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        h,
    ));
    let k6 = field(&axpy(
        y,
        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        h,
    ));
    let y_new = axpy(
        y,
        &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        h,
    );
    let k7 = field(&y_new);
    let mut err = [0.0; DIM];
    for i in 0..DIM {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Step {
        y: y_new,
        err,
        f_new: k7,
    }
}

/// Scaled RMS error norm; a step is acceptable when this is at most one.
pub(crate) fn error_norm(y0: &State, y1: &State, err: &State, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..DIM {
        let scale = atol + rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / DIM as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifth_order_on_a_rotation() {
        // y' = (-y1, y0, 0, 1): exact solution is a rotation.
        let field = |y: &State| [-y[1], y[0], 0.0, 1.0];
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0, 0.0, 0.0, 0.0];
            let mut f = field(&y);
            for _ in 0..n {
                let st = dopri_step(&field, &y, &f, h);
                y = st.y;
                f = st.f_new;
            }
            ((y[0] - 1f64.cos()).powi(2) + (y[1] - 1f64.sin()).powi(2)).sqrt()
        };
        let ratio = run(8) / run(16);
        assert!(ratio > 25.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn error_estimate_vanishes_for_polynomials_of_low_degree() {
        let field = |y: &State| [1.0, 2.0 * y[3], 0.0, 1.0];
        let y = [0.0; DIM];
        let st = dopri_step(&field, &y, &field(&y), 0.5);
        assert!(st.err.iter().all(|e| e.abs() < 1e-15));
        assert!((st.y[1] - 0.25).abs() < 1e-15);
    }
}
