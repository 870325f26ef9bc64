use rand::Rng;

use crate::augmented::{AugmentedVector, CVec};
use crate::error::Result;
use crate::improper::Sampler;
use crate::linear::model::WidelyLinearModel;

/// States `x_0 … x_{H−1}` and the matching measurements `y_0 … y_{H−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<CVec>,
    pub measurements: Vec<CVec>,
}

/// Draws a trajectory of the augmented model with improper Gaussian `x₀`, `w_t`, `n_t`.
pub fn simulate_linear<R: Rng + ?Sized>(model: &WidelyLinearModel, horizon: usize, rng: &mut R) -> Result<Trajectory> {
    model.validate()?;
    let init = Sampler::new(&model.initial_stats())?;
    let driving = Sampler::new(&model.driving_noise_stats())?;
    let noise = Sampler::new(&model.measurement_noise_stats())?;

    let mut states = Vec::with_capacity(horizon);
    let mut measurements = Vec::with_capacity(horizon);
    let mut x = AugmentedVector::new(init.draw(rng));
    for t in 0..horizon {
        if t > 0 {
            let w = AugmentedVector::new(driving.draw(rng));
            let next = model.a.apply(&x)?.top() + model.b.apply(&w)?.top();
            x = AugmentedVector::new(next);
        }
        let y = model.c.apply(&x)?.top() + noise.draw(rng);
        states.push(x.top().clone());
        measurements.push(y);
    }
    Ok(Trajectory { states, measurements })
}
