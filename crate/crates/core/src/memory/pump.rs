use std::fmt;

use super::{Architecture, Block, MemoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PumpState {
    Active,
    Discharged,
}

/// State of the read and write charge pumps. The read pump supplies the
/// sense amplifier and the verify logic, the write pump the pulse shaper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PumpControl {
    pub read_pump: PumpState,
    pub write_pump: PumpState,
}

impl PumpControl {
    pub const ALL_ACTIVE: PumpControl = PumpControl::new(PumpState::Active, PumpState::Active);
    pub const ALL_DISCHARGED: PumpControl =
        PumpControl::new(PumpState::Discharged, PumpState::Discharged);
    pub const READ_DISCHARGED: PumpControl =
        PumpControl::new(PumpState::Discharged, PumpState::Active);
    pub const WRITE_DISCHARGED: PumpControl =
        PumpControl::new(PumpState::Active, PumpState::Discharged);

    pub const fn new(read_pump: PumpState, write_pump: PumpState) -> Self {
        Self {
            read_pump,
            write_pump,
        }
    }

    /// Whether `block` is de-stressed under this pump setting.
    pub fn destresses(&self, block: Block) -> bool {
        match block {
            Block::Ps => self.write_pump == PumpState::Discharged,
            Block::Vr | Block::Sa => self.read_pump == PumpState::Discharged,
        }
    }

    /// `[PS, VR, SA]` de-stress flags.
    pub fn actions(&self) -> [bool; 3] {
        Block::ALL.map(|b| self.destresses(b))
    }

    /// Smallest row whose de-stress set covers every block in `blocks`.
    pub fn covering(blocks: impl IntoIterator<Item = Block>) -> Self {
        let mut row = Self::ALL_ACTIVE;
        for b in blocks {
            match b {
                Block::Ps => row.write_pump = PumpState::Discharged,
                Block::Vr | Block::Sa => row.read_pump = PumpState::Discharged,
            }
        }
        row
    }

    pub fn permitted(&self, arch: Architecture) -> Result<(), MemoryError> {
        match arch {
            Architecture::Decoupled => Ok(()),
            Architecture::Coupled if self.read_pump == self.write_pump => Ok(()),
            Architecture::Coupled => Err(MemoryError::PumpRowNotPermitted(*self)),
        }
    }
}

impl fmt::Display for PumpControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |p: PumpState| match p {
            PumpState::Active => "Active",
            PumpState::Discharged => "Discharged",
        };
        write!(f, "({}, {})", s(self.read_pump), s(self.write_pump))
    }
}
