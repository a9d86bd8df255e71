use super::AgingError;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;

/// Material and operating constants of the BTI lifetime model.
///
/// `material_constant` is in clock cycles times V^γ, so the scale parameter
/// `α` and every aging quantity derived from it are measured against the
/// memory clock. The default value is the one produced by calibrating the
/// default configuration to a two-year baseline MTTF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgingParams {
    pub material_constant: f64,
    pub voltage_exponent: f64,
    pub activation_energy_ev: f64,
    pub boltzmann: f64,
    pub temperature_k: f64,
    pub weibull_beta: f64,
    /// Transistor threshold voltage, used to form the overdrive voltage.
    pub vth: f64,
    /// Feed the operating voltage into `α` instead of the overdrive voltage.
    pub use_operating_voltage: bool,
}

impl AgingParams {
    /// Calibrated material constant for the default configuration
    /// (2-year baseline MTTF at 300 K, β = 2, γ = 6, Ea = 0.1 eV).
    pub const DEFAULT_MATERIAL_CONSTANT: f64 = 73.631_850_222_717_55;

    pub fn validate(&self) -> Result<(), AgingError> {
        let positive = [
            ("material_constant", self.material_constant),
            ("voltage_exponent", self.voltage_exponent),
            ("activation_energy_ev", self.activation_energy_ev),
            ("boltzmann", self.boltzmann),
            ("temperature_k", self.temperature_k),
            ("weibull_beta", self.weibull_beta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(AgingError::InvalidParam {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        if !(0.7..=1.0).contains(&self.vth) {
            return Err(AgingError::InvalidParam {
                name: "vth",
                reason: format!("must lie in [0.7, 1.0] V, got {}", self.vth),
            });
        }
        Ok(())
    }

    /// `e^{Ea / (K T)}`.
    pub fn thermal_factor(&self) -> f64 {
        (self.activation_energy_ev / (self.boltzmann * self.temperature_k)).exp()
    }

    /// Voltage handed to `α` for a block operating at `operating` volts, or
    /// `None` when the block is below threshold and does not age.
    pub fn stress_voltage(&self, operating: f64) -> Option<f64> {
        let v = if self.use_operating_voltage {
            operating
        } else {
            operating - self.vth
        };
        (operating > self.vth && v > 0.0).then_some(v)
    }

    pub fn with_material_constant(mut self, a: f64) -> Self {
        self.material_constant = a;
        self
    }

    pub fn with_temperature(mut self, kelvin: f64) -> Self {
        self.temperature_k = kelvin;
        self
    }
}

impl Default for AgingParams {
    fn default() -> Self {
        Self {
            material_constant: Self::DEFAULT_MATERIAL_CONSTANT,
            voltage_exponent: 6.0,
            activation_energy_ev: 0.1,
            boltzmann: BOLTZMANN_EV_PER_K,
            temperature_k: 300.0,
            weibull_beta: 2.0,
            vth: 0.85,
            use_operating_voltage: false,
        }
    }
}
