//! Adaptive Dormand–Prince 5(4) integrator with dense output.
//!
//! Embedded error control with a PI step controller; samples inside an
//! accepted step are produced from the standard fourth-order interpolant, so
//! emitting many sample times costs no extra derivative evaluations. The
//! rate systems fed through here are moderately stiff (spectral radius up to
//! ~gamma N^2 / 2), which an explicit pair handles by tracking its stability
//! boundary — many small steps, but each one is O(N), so the inner loops are
//! written over exact-length slices to keep them vectorizable.

/// Step-size underflow: the controller could not advance past `t`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StepUnderflow {
    pub t: f64,
}

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
// fifth-order weights (also the last stage's row: FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights: fifth minus embedded fourth order
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: u64 = 100_000_000;

/// Magnitudes below this are flushed to exact zeros after each accepted
/// step: populations this far underflowed never matter again, and letting
/// them coast through the subnormal range costs an order of magnitude in
/// throughput.
const STATE_FLUSH: f64 = 1e-300;

pub(crate) struct Dopri5<'a, F> {
    f: &'a F,
    rtol: f64,
    atol: f64,
    n: usize,
}

impl<'a, F: Fn(f64, &[f64], &mut [f64])> Dopri5<'a, F> {
    pub fn new(f: &'a F, dim: usize, rtol: f64, atol: f64) -> Self {
        Dopri5 {
            f,
            rtol,
            atol,
            n: dim,
        }
    }

    /// Integrate `y' = f(t, y)` from `(0, y0)` to `t_end`, emitting the state
    /// at each of the (sorted, in-range) `sample_times`.
    pub fn solve(
        &self,
        y0: &[f64],
        t_end: f64,
        sample_times: &[f64],
    ) -> Result<Vec<Vec<f64>>, StepUnderflow> {
        let n = self.n;
        debug_assert_eq!(y0.len(), n);
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(sample_times.len());
        let mut next_sample = 0;
        while next_sample < sample_times.len() && sample_times[next_sample] <= 0.0 {
            out.push(y0.to_vec());
            next_sample += 1;
        }
        if next_sample >= sample_times.len() && t_end <= 0.0 {
            return Ok(out);
        }

        let mut t = 0.0;
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut k5 = vec![0.0; n];
        let mut k6 = vec![0.0; n];
        let mut k7 = vec![0.0; n];
        let mut y_next = vec![0.0; n];
        let mut y_stage = vec![0.0; n];
        let mut cont = vec![0.0; 5 * n];

        (self.f)(t, &y, &mut k1);
        let mut h = self.initial_step(&y, &k1, t_end);
        let mut fac_old: f64 = 1e-4;
        let mut just_rejected = false;
        let mut steps: u64 = 0;

        while t < t_end {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(StepUnderflow { t });
            }
            let mut last = false;
            if t + h >= t_end {
                h = t_end - t;
                last = true;
            }
            if t + h == t {
                return Err(StepUnderflow { t });
            }

            {
                // exact-length views so the stage loops vectorize
                let y = &y[..n];
                let ys = &mut y_stage[..n];
                let yn = &mut y_next[..n];
                let k1 = &mut k1[..n];
                let k2 = &mut k2[..n];
                let k3 = &mut k3[..n];
                let k4 = &mut k4[..n];
                let k5 = &mut k5[..n];
                let k6 = &mut k6[..n];
                let k7 = &mut k7[..n];

                for i in 0..n {
                    ys[i] = y[i] + h * A21 * k1[i];
                }
                (self.f)(t + h / 5.0, ys, k2);
                for i in 0..n {
                    ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
                }
                (self.f)(t + 3.0 * h / 10.0, ys, k3);
                for i in 0..n {
                    ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
                }
                (self.f)(t + 4.0 * h / 5.0, ys, k4);
                for i in 0..n {
                    ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
                }
                (self.f)(t + 8.0 * h / 9.0, ys, k5);
                for i in 0..n {
                    ys[i] = y[i]
                        + h * (A61 * k1[i]
                            + A62 * k2[i]
                            + A63 * k3[i]
                            + A64 * k4[i]
                            + A65 * k5[i]);
                }
                (self.f)(t + h, ys, k6);
                // fifth-order solution, then FSAL stage at (t + h, y_next)
                for i in 0..n {
                    yn[i] = y[i]
                        + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
                }
                (self.f)(t + h, yn, k7);
            }

            // scaled error norm
            let mut err_sq = 0.0;
            {
                let y = &y[..n];
                let yn = &y_next[..n];
                let k1 = &k1[..n];
                let k3 = &k3[..n];
                let k4 = &k4[..n];
                let k5 = &k5[..n];
                let k6 = &k6[..n];
                let k7 = &k7[..n];
                for i in 0..n {
                    let e = h
                        * (E1 * k1[i]
                            + E3 * k3[i]
                            + E4 * k4[i]
                            + E5 * k5[i]
                            + E6 * k6[i]
                            + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(yn[i].abs());
                    err_sq += (e / sc) * (e / sc);
                }
            }
            let err = (err_sq / n as f64).sqrt();

            if err <= 1.0 {
                // accepted: serve sample times inside (t, t + h]
                let t_new = if last { t_end } else { t + h };
                if next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                    dense_coefficients(&y, &y_next, &k1, &k3, &k4, &k5, &k6, &k7, h, &mut cont);
                    while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                        let theta = ((sample_times[next_sample] - t) / h).min(1.0);
                        out.push(interpolate(&cont, n, theta));
                        next_sample += 1;
                    }
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_next);
                for v in y.iter_mut() {
                    if v.abs() < STATE_FLUSH {
                        *v = 0.0;
                    }
                }
                std::mem::swap(&mut k1, &mut k7); // FSAL
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * fac_old.powf(BETA) * err.powf(-EXPO))
                        .clamp(FAC_MIN, if just_rejected { 1.0 } else { FAC_MAX })
                };
                fac_old = err.max(1e-4);
                h *= fac;
                just_rejected = false;
            } else {
                h *= (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
                just_rejected = true;
            }
        }
        debug_assert_eq!(next_sample, sample_times.len());
        Ok(out)
    }

    /// Hairer-style automatic initial step guess.
    fn initial_step(&self, y0: &[f64], f0: &[f64], t_end: f64) -> f64 {
        let n = self.n;
        let sc = |i: usize| self.atol + self.rtol * y0[i].abs();
        let d0 = (0..n).map(|i| (y0[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
        let d1 = (0..n).map(|i| (f0[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * t_end
        } else {
            0.01 * (d0 / d1)
        };
        let h0 = h0.min(t_end);
        // one Euler probe to estimate the second derivative scale
        let y1: Vec<f64> = (0..n).map(|i| y0[i] + h0 * f0[i]).collect();
        let mut f1 = vec![0.0; n];
        (self.f)(h0, &y1, &mut f1);
        let d2 = (0..n)
            .map(|i| ((f1[i] - f0[i]) / sc(i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / (n as f64).sqrt()
            / h0;
        let d_max = d1.max(d2);
        let h1 = if d_max <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * t_end)
        } else {
            (0.01 / d_max).powf(0.2)
        };
        (100.0 * h0).min(h1).min(t_end)
    }
}

#[allow(clippy::too_many_arguments)]
fn dense_coefficients(
    y0: &[f64],
    y1: &[f64],
    k1: &[f64],
    k3: &[f64],
    k4: &[f64],
    k5: &[f64],
    k6: &[f64],
    k7: &[f64],
    h: f64,
    cont: &mut [f64],
) {
    let n = y0.len();
    for i in 0..n {
        let ydiff = y1[i] - y0[i];
        let bspl = h * k1[i] - ydiff;
        cont[i] = y0[i];
        cont[n + i] = ydiff;
        cont[2 * n + i] = bspl;
        cont[3 * n + i] = ydiff - h * k7[i] - bspl;
        cont[4 * n + i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
}

fn interpolate(cont: &[f64], n: usize, theta: f64) -> Vec<f64> {
    let theta1 = 1.0 - theta;
    (0..n)
        .map(|i| {
            cont[i]
                + theta
                    * (cont[n + i]
                        + theta1
                            * (cont[2 * n + i]
                                + theta * (cont[3 * n + i] + theta1 * cont[4 * n + i])))
        })
        .collect()
}
