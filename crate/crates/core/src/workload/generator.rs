use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use super::{OpKind, TraceRecord, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Alternating R, W, R, W, ... to uniformly random lines.
    Microbenchmark,
    /// Kind drawn per request with probability `read_fraction` of a read.
    UniformRandom,
    ReadHeavy,
    WriteHeavy,
    /// Repeating list of phases, each with its own read fraction.
    Scripted,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Microbenchmark,
        GeneratorKind::UniformRandom,
        GeneratorKind::ReadHeavy,
        GeneratorKind::WriteHeavy,
        GeneratorKind::Scripted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Microbenchmark => "microbenchmark",
            GeneratorKind::UniformRandom => "uniform",
            GeneratorKind::ReadHeavy => "read-heavy",
            GeneratorKind::WriteHeavy => "write-heavy",
            GeneratorKind::Scripted => "scripted",
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = GeneratorKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown generator {s:?}, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterArrival {
    Fixed(u64),
    /// Geometric gaps on {0, 1, 2, ...} with the given mean.
    Geometric(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub requests: u64,
    pub read_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub request_count: u64,
    pub inter_arrival: InterArrival,
    pub seed: u64,
    pub read_fraction: f64,
    /// Phases for [`GeneratorKind::Scripted`], repeated until the request
    /// count is reached.
    pub phases: Vec<Phase>,
    pub capacity_bytes: u64,
    pub line_bytes: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            kind: GeneratorKind::Microbenchmark,
            request_count: 10_000,
            inter_arrival: InterArrival::Fixed(1),
            seed: 1,
            read_fraction: 0.5,
            phases: Vec::new(),
            capacity_bytes: 128 << 30,
            line_bytes: 64,
        }
    }
}

impl GeneratorSpec {
    pub const READ_HEAVY_FRACTION: f64 = 0.9;
    pub const WRITE_HEAVY_FRACTION: f64 = 0.3;

    pub fn microbenchmark(request_count: u64, seed: u64) -> Self {
        Self {
            request_count,
            seed,
            ..Self::default()
        }
    }

    /// Alternating read-dominated and balanced phases, about 27% writes
    /// overall, arriving faster than the memory can serve them.
    pub fn mixed(request_count: u64, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::Scripted,
            request_count,
            seed,
            inter_arrival: InterArrival::Geometric(4.0),
            phases: vec![
                Phase {
                    requests: 2_000,
                    read_fraction: 0.95,
                },
                Phase {
                    requests: 2_000,
                    read_fraction: 0.5,
                },
            ],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |m: String| Err(WorkloadError::InvalidSpec(m));
        if self.request_count < 1 {
            return bad("request_count must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.read_fraction) {
            return bad(format!(
                "read_fraction must be in [0, 1], got {}",
                self.read_fraction
            ));
        }
        if self.line_bytes == 0 || self.capacity_bytes < self.line_bytes {
            return bad("capacity must hold at least one line".into());
        }
        if let InterArrival::Geometric(mean) = self.inter_arrival {
            if !(mean >= 0.0 && mean.is_finite()) {
                return bad(format!("mean inter-arrival must be >= 0, got {mean}"));
            }
        }
        if self.kind == GeneratorKind::Scripted {
            if self.phases.is_empty() || self.phases.iter().all(|p| p.requests == 0) {
                return bad("scripted workload needs a phase with requests".into());
            }
            if let Some(p) = self
                .phases
                .iter()
                .find(|p| !(0.0..=1.0).contains(&p.read_fraction))
            {
                return bad(format!(
                    "phase read_fraction must be in [0, 1], got {}",
                    p.read_fraction
                ));
            }
        }
        Ok(())
    }
}

struct Gaps {
    fixed: u64,
    geometric: Option<Geometric>,
}

impl Gaps {
    fn new(ia: InterArrival) -> Self {
        match ia {
            InterArrival::Fixed(n) => Self {
                fixed: n,
                geometric: None,
            },
            InterArrival::Geometric(mean) => Self {
                fixed: 0,
                geometric: Some(Geometric::new(1.0 / (1.0 + mean)).expect("p in (0, 1]")),
            },
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match &self.geometric {
            Some(g) => g.sample(rng),
            None => self.fixed,
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Vec<TraceRecord>, WorkloadError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gaps = Gaps::new(spec.inter_arrival);
    let lines = spec.capacity_bytes / spec.line_bytes;
    let mut phase_iter = spec.phases.iter().filter(|p| p.requests > 0).cycle();
    let mut phase: Option<(f64, u64)> = None;

    let mut out = Vec::with_capacity(spec.request_count as usize);
    let mut cycle = 0u64;
    for i in 0..spec.request_count {
        if i > 0 {
            cycle += gaps.sample(&mut rng);
        }
        let read_fraction = match spec.kind {
            GeneratorKind::Microbenchmark => None,
            GeneratorKind::UniformRandom => Some(spec.read_fraction),
            GeneratorKind::ReadHeavy => Some(GeneratorSpec::READ_HEAVY_FRACTION),
            GeneratorKind::WriteHeavy => Some(GeneratorSpec::WRITE_HEAVY_FRACTION),
            GeneratorKind::Scripted => {
                let (f, left) = match phase {
                    Some((f, left)) if left > 0 => (f, left),
                    _ => {
                        let p = phase_iter.next().expect("validated phases");
                        (p.read_fraction, p.requests)
                    }
                };
                phase = Some((f, left - 1));
                Some(f)
            }
        };
        let kind = match read_fraction {
            None if i % 2 == 0 => OpKind::Read,
            None => OpKind::Write,
            Some(f) if rng.gen_bool(f) => OpKind::Read,
            Some(_) => OpKind::Write,
        };
        let address = rng.gen_range(0..lines) * spec.line_bytes;
        out.push(TraceRecord::new(cycle, kind, address));
    }
    Ok(out)
}
