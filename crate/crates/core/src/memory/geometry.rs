use super::MemoryError;

/// Channel/rank/bank/partition hierarchy and its address interleave.
///
/// Addresses are split mixed-radix from the least significant end as
/// `column : channel : bank : rank : partition : row`, so consecutive lines
/// spread over channels and banks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryGeometry {
    pub channels: u64,
    pub ranks_per_channel: u64,
    pub banks_per_rank: u64,
    pub partitions_per_bank: u64,
    pub capacity_bytes: u64,
    /// Bytes per access; the low address bits select a byte within it.
    pub line_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodedAddress {
    pub channel: u64,
    pub rank: u64,
    pub bank: u64,
    pub partition: u64,
    pub row: u64,
    pub column: u64,
}

impl Default for MemoryGeometry {
    fn default() -> Self {
        Self {
            channels: 2,
            ranks_per_channel: 1,
            banks_per_rank: 8,
            partitions_per_bank: 64,
            capacity_bytes: 128 << 30,
            line_bytes: 64,
        }
    }
}

impl MemoryGeometry {
    pub fn validate(&self) -> Result<(), MemoryError> {
        let counts = [
            ("channels", self.channels),
            ("ranks_per_channel", self.ranks_per_channel),
            ("banks_per_rank", self.banks_per_rank),
            ("partitions_per_bank", self.partitions_per_bank),
            ("line_bytes", self.line_bytes),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(MemoryError::InvalidGeometry(format!("{name} must be >= 1")));
            }
        }
        let stripe = self.stripe_bytes();
        if self.capacity_bytes == 0 || !self.capacity_bytes.is_multiple_of(stripe) {
            return Err(MemoryError::InvalidGeometry(format!(
                "capacity {} must be a positive multiple of {stripe} bytes",
                self.capacity_bytes
            )));
        }
        Ok(())
    }

    pub fn total_banks(&self) -> usize {
        (self.channels * self.ranks_per_channel * self.banks_per_rank) as usize
    }

    pub fn rows_per_partition(&self) -> u64 {
        self.capacity_bytes / self.stripe_bytes()
    }

    fn stripe_bytes(&self) -> u64 {
        self.line_bytes
            * self.channels
            * self.banks_per_rank
            * self.ranks_per_channel
            * self.partitions_per_bank
    }

    pub fn decode(&self, addr: u64) -> Result<DecodedAddress, MemoryError> {
        if addr >= self.capacity_bytes {
            return Err(MemoryError::AddressOutOfRange {
                addr,
                capacity: self.capacity_bytes,
            });
        }
        let mut a = addr;
        let mut take = |radix: u64| {
            let v = a % radix;
            a /= radix;
            v
        };
        let column = take(self.line_bytes);
        let channel = take(self.channels);
        let bank = take(self.banks_per_rank);
        let rank = take(self.ranks_per_channel);
        let partition = take(self.partitions_per_bank);
        Ok(DecodedAddress {
            channel,
            rank,
            bank,
            partition,
            row: a,
            column,
        })
    }

    pub fn encode(&self, d: &DecodedAddress) -> u64 {
        let mut a = d.row;
        a = a * self.partitions_per_bank + d.partition;
        a = a * self.ranks_per_channel + d.rank;
        a = a * self.banks_per_rank + d.bank;
        a = a * self.channels + d.channel;
        a * self.line_bytes + d.column
    }

    /// Flat bank index in `0..total_banks()`.
    pub fn bank_index(&self, d: &DecodedAddress) -> usize {
        ((d.channel * self.ranks_per_channel + d.rank) * self.banks_per_rank + d.bank) as usize
    }
}
