//! Model parameters, admissibility, and the drift/diffusion/initial-data
//! function descriptors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pointwise scalar function descriptor for b, σ and the variation weight φ.
#[derive(Clone, Debug, PartialEq)]
pub enum FnSpec<T: Scalar> {
    Zero,
    Constant(T),
    /// u ↦ scale·u
    Linear(T),
    /// u ↦ base + amp·sin(u)
    Sine {
        base: T,
        amp: T,
    },
    /// Piecewise-linear table, clamped outside the knots.
    Table {
        xs: Vec<T>,
        ys: Vec<T>,
    },
}

impl<T: Scalar> FnSpec<T> {
    pub fn eval(&self, u: T) -> T {
        match self {
            FnSpec::Zero => T::zero(),
            FnSpec::Constant(c) => *c,
            FnSpec::Linear(s) => *s * u,
            FnSpec::Sine { base, amp } => *base + *amp * u.sin(),
            FnSpec::Table { xs, ys } => {
                if u <= xs[0] {
                    return ys[0];
                }
                if u >= xs[xs.len() - 1] {
                    return ys[ys.len() - 1];
                }
                let j = xs.partition_point(|&x| x <= u).min(xs.len() - 1);
                let (x0, x1) = (xs[j - 1], xs[j]);
                let (y0, y1) = (ys[j - 1], ys[j]);
                y0 + (y1 - y0) * (u - x0) / (x1 - x0)
            }
        }
    }

    /// Lipschitz constant of the descriptor.
    pub fn lipschitz(&self) -> T {
        match self {
            FnSpec::Zero | FnSpec::Constant(_) => T::zero(),
            FnSpec::Linear(s) => s.abs(),
            FnSpec::Sine { amp, .. } => amp.abs(),
            FnSpec::Table { xs, ys } => {
                let mut l = T::zero();
                for j in 1..xs.len() {
                    let slope = ((ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1])).abs();
                    if slope > l {
                        l = slope;
                    }
                }
                l
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FnSpec::Zero) || matches!(self, FnSpec::Constant(c) if c.is_zero())
    }

    /// Some(c) when the descriptor is constant.
    pub fn constant_value(&self) -> Option<T> {
        match self {
            FnSpec::Zero => Some(T::zero()),
            FnSpec::Constant(c) => Some(*c),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let FnSpec::Table { xs, ys } = self {
            if xs.len() < 2 || xs.len() != ys.len() {
                return Err(Error::Config(
                    "table descriptor needs matching xs/ys with at least two knots".into(),
                ));
            }
            if xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(
                    "table knots must be strictly increasing".into(),
                ));
            }
            if ys.iter().any(|y| !y.is_finite()) {
                return Err(Error::Config("table values must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Initial-data descriptor for u_0.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec<T: Scalar> {
    Zero,
    Constant(T),
    /// Smooth bump amplitude·exp(−‖x‖²/(2·width²)) centred in the box.
    Bump {
        amplitude: T,
        width: T,
    },
    /// Stationary Gaussian field with Hölder exponent `exponent`
    /// (Matérn-type spectrum), synthesized from the member stream.
    Holder {
        exponent: T,
    },
}

/// Parameters of the equation ∂u/∂t = −(−Δ)^{α/2} u + b(u) + σ(u) Ḟ.
#[derive(Clone, Debug)]
pub struct ModelParams<T: Scalar> {
    pub alpha: T,
    pub gamma: T,
    pub dim: usize,
    pub drift: FnSpec<T>,
    pub diffusion: FnSpec<T>,
    pub lip_drift: T,
    pub lip_diffusion: T,
    pub init: InitSpec<T>,
    /// Hölder exponent η₀ of the initial data, in ((α−d+γ)/α, 1].
    pub init_holder: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Linear-equation defaults: b = 0, σ = 1, u₀ = 0.
    pub fn new(alpha: T, gamma: T, dim: usize) -> Self {
        let drift = FnSpec::Zero;
        let diffusion = FnSpec::Constant(T::one());
        ModelParams {
            alpha,
            gamma,
            dim,
            lip_drift: drift.lipschitz(),
            lip_diffusion: diffusion.lipschitz(),
            drift,
            diffusion,
            init: InitSpec::Zero,
            init_holder: T::one(),
        }
    }

    pub fn with_drift(mut self, drift: FnSpec<T>) -> Self {
        self.lip_drift = drift.lipschitz();
        self.drift = drift;
        self
    }

    pub fn with_diffusion(mut self, diffusion: FnSpec<T>) -> Self {
        self.lip_diffusion = diffusion.lipschitz();
        self.diffusion = diffusion;
        self
    }

    pub fn with_init(mut self, init: InitSpec<T>) -> Self {
        if let InitSpec::Holder { exponent } = init {
            self.init_holder = exponent;
        }
        self.init = init;
        self
    }

    /// Admissibility: α ∈ (1,2], γ ∈ ((d−α)₊, d), finite nonnegative Lipschitz
    /// constants, η₀ ∈ ((α−d+γ)/α, 1].
    pub fn validate(&self) -> Result<()> {
        let one = T::one();
        let two = T::real(2.0);
        if !(self.alpha > one && self.alpha <= two) {
            return Err(Error::ParameterDomain(format!(
                "alpha = {} violates alpha ∈ (1, 2]",
                self.alpha
            )));
        }
        if self.dim == 0 || self.dim > 2 {
            return Err(Error::ParameterDomain(format!(
                "dim = {} not supported (d ∈ {{1, 2}})",
                self.dim
            )));
        }
        let d = T::usize(self.dim);
        let lower = (d - self.alpha).max(T::zero());
        if !(self.gamma > lower && self.gamma < d) {
            return Err(Error::ParameterDomain(format!(
                "gamma = {} violates gamma ∈ ((d−alpha)₊, d) = ({}, {})",
                self.gamma, lower, d
            )));
        }
        let h = self.hurst_unchecked();
        if !(h > T::zero() && h < T::one()) {
            return Err(Error::ParameterDomain(format!(
                "derived Hurst index H = {h} outside (0, 1)"
            )));
        }
        let h_t = h / self.alpha;
        if !(h_t > T::zero() && h_t < T::real(0.5)) {
            return Err(Error::ParameterDomain(format!(
                "derived temporal index H/alpha = {h_t} outside (0, 1/2)"
            )));
        }
        for (name, l) in [
            ("lip_drift", self.lip_drift),
            ("lip_diffusion", self.lip_diffusion),
        ] {
            if !(l.is_finite() && l >= T::zero()) {
                return Err(Error::ParameterDomain(format!(
                    "{name} = {l} must be finite and nonnegative"
                )));
            }
        }
        let eta_min = (self.alpha - d + self.gamma) / self.alpha;
        if !(self.init_holder > eta_min && self.init_holder <= T::one()) {
            return Err(Error::ParameterDomain(format!(
                "init_holder = {} violates η₀ ∈ ({}, 1]",
                self.init_holder, eta_min
            )));
        }
        self.drift.validate()?;
        self.diffusion.validate()?;
        Ok(())
    }

    #[inline]
    fn hurst_unchecked(&self) -> T {
        (self.alpha - T::usize(self.dim) + self.gamma) / T::real(2.0)
    }

    /// Spatial Hurst index H = (α − d + γ)/2.
    pub fn hurst(&self) -> Result<T> {
        self.validate()?;
        Ok(self.hurst_unchecked())
    }
}
