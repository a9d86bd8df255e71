use std::fmt;
use std::str::FromStr;

use super::MemoryError;

/// Logic blocks of a bank's peripheral circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    /// Write pulse shaper.
    Ps,
    /// Verify logic.
    Vr,
    /// Sense amplifier.
    Sa,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Ps, Block::Vr, Block::Sa];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Block::Ps => "PS",
            Block::Vr => "VR",
            Block::Sa => "SA",
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Block {
    type Err = MemoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PS" => Ok(Block::Ps),
            "VR" | "VF" => Ok(Block::Vr),
            "SA" => Ok(Block::Sa),
            _ => Err(MemoryError::UnknownBlock(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Read,
    Write,
    Idle,
    DeStress,
}

/// Operating voltage of each block in each mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageTable {
    /// `[PS, VR, SA]` during a read.
    pub read: [f64; 3],
    /// `[PS, VR, SA]` during a write (program and verify).
    pub write: [f64; 3],
    pub idle: [f64; 3],
    /// Supply during de-stress; must sit below the threshold voltage.
    pub destress: f64,
}

impl Default for VoltageTable {
    fn default() -> Self {
        Self {
            read: [1.2, 1.2, 2.85],
            write: [3.7, 2.85, 1.2],
            idle: [1.2, 1.2, 1.2],
            destress: 0.0,
        }
    }
}

impl VoltageTable {
    pub fn operating(&self, block: Block, mode: Mode) -> f64 {
        let i = block.index();
        match mode {
            Mode::Read => self.read[i],
            Mode::Write => self.write[i],
            Mode::Idle => self.idle[i],
            Mode::DeStress => self.destress,
        }
    }

    pub fn validate(&self, vth: f64) -> Result<(), MemoryError> {
        for v in self.read.iter().chain(&self.write).chain(&self.idle) {
            if !(v.is_finite() && *v > 0.0) {
                return Err(MemoryError::InvalidVoltage(format!(
                    "operating voltages must be positive, got {v}"
                )));
            }
        }
        if !(self.destress >= 0.0 && self.destress < vth) {
            return Err(MemoryError::InvalidVoltage(format!(
                "de-stress voltage {} must be below Vth = {vth}",
                self.destress
            )));
        }
        Ok(())
    }
}
