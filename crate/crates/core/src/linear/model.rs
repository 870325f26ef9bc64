use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::augmented::{
    augmented_to_real_matrix, max_abs_c, real_matrix_to_augmented, AugmentedMatrix, CMat, CVec,
    RMat, RVec, TransformMode,
};
use crate::error::{Error, Result};
use crate::improper::SecondOrderStats;

/// Augmented complex state-space model
///
/// ```text
/// x̄_t = Ā x̄_{t−1} + B̄ w̄_{t−1}
/// ȳ_t = C̄ x̄_t + n̄_t
/// ```
///
/// with augmented noise covariances `Q̄`, `R̄`, driving/measurement cross
/// covariance `S̄` and initial covariance `Π̄₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct WidelyLinearModel {
    pub a: AugmentedMatrix,
    pub b: AugmentedMatrix,
    pub c: AugmentedMatrix,
    pub q: AugmentedMatrix,
    pub r: AugmentedMatrix,
    pub s: AugmentedMatrix,
    pub pi0: AugmentedMatrix,
    pub mean0: CVec,
}

impl WidelyLinearModel {
    /// Validates dimensions and PSD-ness; `S̄` starts at zero and the initial mean at zero.
    pub fn new(
        a: AugmentedMatrix,
        b: AugmentedMatrix,
        c: AugmentedMatrix,
        q: AugmentedMatrix,
        r: AugmentedMatrix,
        pi0: AugmentedMatrix,
    ) -> Result<Self> {
        let n = a.rows();
        let p = b.cols();
        let m = c.rows();
        let s = AugmentedMatrix::zeros(p, m);
        let model = Self {
            a,
            b,
            c,
            q,
            r,
            s,
            pi0,
            mean0: CVec::zeros(n),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_cross_covariance(mut self, s: AugmentedMatrix) -> Result<Self> {
        self.s = s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_initial_mean(mut self, mean0: CVec) -> Result<Self> {
        self.mean0 = mean0;
        self.validate()?;
        Ok(self)
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn noise_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn measurement_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, p, m) = (self.state_dim(), self.noise_dim(), self.measurement_dim());
        let shapes = [
            ("A", &self.a, (n, n)),
            ("B", &self.b, (n, p)),
            ("C", &self.c, (m, n)),
            ("Q", &self.q, (p, p)),
            ("R", &self.r, (m, m)),
            ("S", &self.s, (p, m)),
            ("Pi0", &self.pi0, (n, n)),
        ];
        for (name, mat, want) in shapes {
            if (mat.rows(), mat.cols()) != want {
                return Err(Error::Dimension(format!(
                    "{name} blocks are {}x{}, expected {}x{}",
                    mat.rows(),
                    mat.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        if n == 0 || m == 0 {
            return Err(Error::Dimension("state and measurement dimensions must be positive".into()));
        }
        if self.mean0.len() != n {
            return Err(Error::Dimension(format!("initial mean has length {}, expected {n}", self.mean0.len())));
        }
        for (name, cov) in [("Q", &self.q), ("R", &self.r), ("Pi0", &self.pi0)] {
            SecondOrderStats::from_augmented(cov)
                .validate()
                .map_err(|e| Error::Consistency(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    /// Ensures the recursion this crate implements applies (no driving/measurement cross term).
    pub fn require_zero_cross_covariance(&self) -> Result<()> {
        if !self.s.is_zero(0.0) {
            return Err(Error::UnsupportedFeature(
                "nonzero driving/measurement cross-covariance S".into(),
            ));
        }
        Ok(())
    }

    /// True when `A2 = B2 = C2 = 0`, i.e. the model never touches conjugates.
    pub fn is_strictly_linear(&self) -> bool {
        [&self.a, &self.b, &self.c]
            .iter()
            .all(|m| max_abs_c(m.m2()) <= 1e-12 * max_abs_c(m.m1()).max(1.0))
    }

    pub fn driving_noise_stats(&self) -> SecondOrderStats {
        SecondOrderStats::from_augmented(&self.q)
    }

    pub fn measurement_noise_stats(&self) -> SecondOrderStats {
        SecondOrderStats::from_augmented(&self.r)
    }

    pub fn initial_stats(&self) -> SecondOrderStats {
        let mut s = SecondOrderStats::from_augmented(&self.pi0);
        s.mean = self.mean0.clone();
        s
    }

    /// The dual-channel real model this augmented model is equivalent to.
    pub fn to_real(&self) -> Result<RealModel> {
        Ok(RealModel {
            e: augmented_to_real_matrix(&self.a, TransformMode::System)?,
            f: augmented_to_real_matrix(&self.b, TransformMode::System)?,
            g: augmented_to_real_matrix(&self.c, TransformMode::System)?,
            q: augmented_to_real_matrix(&self.q, TransformMode::Covariance)?,
            r: augmented_to_real_matrix(&self.r, TransformMode::Covariance)?,
            pi0: augmented_to_real_matrix(&self.pi0, TransformMode::Covariance)?,
            mean0: self.initial_stats().composite_mean(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: ModelJson = serde_json::from_str(s)?;
        json.into_model()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelJson::from_model(self))?)
    }
}

/// Dual-channel real model `z_t = E z_{t−1} + F ω_{t−1}`, `ψ_t = G z_t + η_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealModel {
    pub e: RMat,
    pub f: RMat,
    pub g: RMat,
    pub q: RMat,
    pub r: RMat,
    pub pi0: RMat,
    pub mean0: RVec,
}

impl RealModel {
    pub fn state_dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn measurement_dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.e.nrows();
        let p = self.f.ncols();
        let m = self.g.nrows();
        let shapes = [
            ("E", self.e.shape(), (n, n)),
            ("F", self.f.shape(), (n, p)),
            ("G", self.g.shape(), (m, n)),
            ("Q", self.q.shape(), (p, p)),
            ("R", self.r.shape(), (m, m)),
            ("Pi0", self.pi0.shape(), (n, n)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::Dimension(format!("{name} is {got:?}, expected {want:?}")));
            }
        }
        if self.mean0.len() != n {
            return Err(Error::Dimension("initial mean length".into()));
        }
        Ok(())
    }
}

/// Builds the augmented model of a dual-channel real model: `Ā = ½ T E Tᴴ`
/// (likewise `B̄`, `C̄`) and covariance-mode transforms for the noises.
pub fn model_from_real(e: &RMat, f: &RMat, g: &RMat, q: &RMat, r: &RMat, pi0: &RMat) -> Result<WidelyLinearModel> {
    if e.nrows() != f.nrows() || g.ncols() != e.ncols() || q.nrows() != f.ncols() {
        return Err(Error::Dimension("composite matrices have inconsistent shapes".into()));
    }
    WidelyLinearModel::new(
        real_matrix_to_augmented(e, TransformMode::System)?,
        real_matrix_to_augmented(f, TransformMode::System)?,
        real_matrix_to_augmented(g, TransformMode::System)?,
        real_matrix_to_augmented(q, TransformMode::Covariance)?,
        real_matrix_to_augmented(r, TransformMode::Covariance)?,
        real_matrix_to_augmented(pi0, TransformMode::Covariance)?,
    )
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// JSON layout of a model: complex entries as `[re, im]`, matrices as lists of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ModelJson {
    n: usize,
    m: usize,
    A1: JsonMatrix,
    A2: JsonMatrix,
    B1: JsonMatrix,
    B2: JsonMatrix,
    C1: JsonMatrix,
    C2: JsonMatrix,
    Q: JsonMatrix,
    Qtilde: JsonMatrix,
    R: JsonMatrix,
    Rtilde: JsonMatrix,
    Pi0: JsonMatrix,
    Pi0tilde: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean0: Option<Vec<[f64; 2]>>,
}

fn to_json_matrix(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| [m[(i, k)].re, m[(i, k)].im]).collect())
        .collect()
}

fn from_json_matrix(name: &str, rows: &JsonMatrix) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!("{name} has ragged rows")));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, k| Complex64::new(rows[i][k][0], rows[i][k][1])))
}

impl ModelJson {
    fn from_model(model: &WidelyLinearModel) -> Self {
        let mean0 = if model.mean0.iter().all(|z| z.norm() == 0.0) {
            None
        } else {
            Some(model.mean0.iter().map(|z| [z.re, z.im]).collect())
        };
        Self {
            n: model.state_dim(),
            m: model.measurement_dim(),
            A1: to_json_matrix(model.a.m1()),
            A2: to_json_matrix(model.a.m2()),
            B1: to_json_matrix(model.b.m1()),
            B2: to_json_matrix(model.b.m2()),
            C1: to_json_matrix(model.c.m1()),
            C2: to_json_matrix(model.c.m2()),
            Q: to_json_matrix(model.q.m1()),
            Qtilde: to_json_matrix(model.q.m2()),
            R: to_json_matrix(model.r.m1()),
            Rtilde: to_json_matrix(model.r.m2()),
            Pi0: to_json_matrix(model.pi0.m1()),
            Pi0tilde: to_json_matrix(model.pi0.m2()),
            mean0,
        }
    }

    fn into_model(self) -> Result<WidelyLinearModel> {
        let pair = |n1: &str, m1: &JsonMatrix, n2: &str, m2: &JsonMatrix| -> Result<AugmentedMatrix> {
            AugmentedMatrix::new(from_json_matrix(n1, m1)?, from_json_matrix(n2, m2)?)
        };
        let model = WidelyLinearModel::new(
            pair("A1", &self.A1, "A2", &self.A2)?,
            pair("B1", &self.B1, "B2", &self.B2)?,
            pair("C1", &self.C1, "C2", &self.C2)?,
            pair("Q", &self.Q, "Qtilde", &self.Qtilde)?,
            pair("R", &self.R, "Rtilde", &self.Rtilde)?,
            pair("Pi0", &self.Pi0, "Pi0tilde", &self.Pi0tilde)?,
        )?;
        if model.state_dim() != self.n || model.measurement_dim() != self.m {
            return Err(Error::Dimension(format!(
                "declared n={}, m={} but matrices give n={}, m={}",
                self.n,
                self.m,
                model.state_dim(),
                model.measurement_dim()
            )));
        }
        match self.mean0 {
            Some(mean) => model.with_initial_mean(CVec::from_iterator(
                mean.len(),
                mean.iter().map(|z| Complex64::new(z[0], z[1])),
            )),
            None => Ok(model),
        }
    }
}
