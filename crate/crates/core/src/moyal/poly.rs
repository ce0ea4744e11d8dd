use crate::error::{Error, Result};

/// Real polynomial `Σ c_k q^k`; `coeffs[k]` multiplies `q^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zeros are dropped so the last stored coefficient is nonzero.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("polynomial coefficients must be finite".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Polynomial { coeffs })
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Exact derivative of the given order.
    pub fn derivative(&self, order: usize) -> Polynomial {
        if order >= self.coeffs.len() {
            return Polynomial::zero();
        }
        let coeffs = (order..self.coeffs.len())
            .map(|k| {
                let falling: f64 = ((k - order + 1)..=k).map(|j| j as f64).product();
                falling * self.coeffs[k]
            })
            .collect();
        Polynomial { coeffs }
    }
}

/// Same as [`Polynomial::derivative`].
pub fn poly_derivative(poly: &Polynomial, order: usize) -> Polynomial {
    poly.derivative(order)
}

/// `H = p²/2m + U(q)` with polynomial `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub mass: f64,
    pub potential: Polynomial,
    pub label: String,
}

impl HamiltonianSpec {
    pub fn new(mass: f64, potential: Polynomial, label: impl Into<String>) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive (got {mass})")));
        }
        Ok(HamiltonianSpec { mass, potential, label: label.into() })
    }

    pub fn free(mass: f64) -> Self {
        HamiltonianSpec { mass, potential: Polynomial::zero(), label: "free".into() }
    }

    /// `U = ½ m ω² q²`.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        HamiltonianSpec {
            mass,
            potential: Polynomial { coeffs: vec![0.0, 0.0, 0.5 * mass * omega * omega] },
            label: "harmonic".into(),
        }
    }

    /// Largest `ℓ` with a nonvanishing `U^{(2ℓ+1)}`; `None` when `U' ≡ 0`.
    pub fn max_moyal_index(&self) -> Option<usize> {
        match self.potential.degree() {
            Some(d) if d >= 1 => Some((d - 1) / 2),
            _ => None,
        }
    }
}

/// Caldeira–Leggett high-temperature environment: `2γ ∂_p(pW) + D ∂²_p W`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OpenSystemSpec {
    pub gamma: f64,
    pub diffusion: f64,
}

impl OpenSystemSpec {
    pub fn new(gamma: f64, diffusion: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) || !(diffusion >= 0.0 && diffusion.is_finite()) {
            return Err(Error::Config(format!(
                "open-system rates must be nonnegative (gamma = {gamma}, D = {diffusion})"
            )));
        }
        Ok(OpenSystemSpec { gamma, diffusion })
    }

    pub fn closed() -> Self {
        OpenSystemSpec::default()
    }

    pub fn is_closed(&self) -> bool {
        self.gamma == 0.0 && self.diffusion == 0.0
    }
}
