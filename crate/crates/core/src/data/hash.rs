use sha2::{Digest, Sha256};

/// A borrowed cell value used for hashing and equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Cat(&'a str),
    Num(f64),
}

impl Cell<'_> {
    /// Continuous values are rendered at 12 significant digits so that values
    /// agreeing to that precision compare (and hash) equal.
    pub fn canonical(&self) -> String {
        match *self {
            Cell::Cat(s) => format!("c{s}"),
            Cell::Num(v) => {
                let v = if v == 0.0 { 0.0 } else { v };
                format!("n{v:.11e}")
            }
        }
    }

    pub fn canonical_eq(&self, other: &Cell<'_>) -> bool {
        match (self, other) {
            (Cell::Cat(a), Cell::Cat(b)) => a == b,
            (Cell::Num(_), Cell::Num(_)) => self.canonical() == other.canonical(),
            _ => false,
        }
    }
}

/// First 8 bytes (big endian) of the SHA-256 of the row's canonical rendering.
pub fn canonical_row_hash(row: &[Cell<'_>]) -> u64 {
    let mut h = Sha256::new();
    for cell in row {
        h.update(cell.canonical().as_bytes());
        h.update([0x1f]);
    }
    let digest = h.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
}
