//! Binary MPS files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `CMPS` |
//! | 4 | `u32` length `H` of the JSON header |
//! | `H` | UTF-8 JSON `{"version":1,"n":N,"bond_dims":[χ_0..χ_N],"center":c,"seed":s}` (`seed` may be null) |
//! | rest | site tensors in order; site `i` holds `χ_i·2·χ_{i+1}` entries `A[a][s][b]`, `b` fastest, each as `f64` real then `f64` imaginary |
//!
//! The payload must end exactly at the end of the input.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::MpsState;
use crate::numeric::{ComplexMatrix, C64};

pub const MAGIC: &[u8; 4] = b"CMPS";
pub const FORMAT_VERSION: u32 = 1;
const MAX_HEADER: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpsHeader {
    pub version: u32,
    pub n: usize,
    pub bond_dims: Vec<usize>,
    pub center: usize,
    pub seed: Option<u64>,
}

pub fn encode_mps(mps: &MpsState, seed: Option<u64>) -> Vec<u8> {
    let header = MpsHeader {
        version: FORMAT_VERSION,
        n: mps.num_sites(),
        bond_dims: mps.bond_dims().to_vec(),
        center: mps.center(),
        seed,
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(8 + json.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for t in mps.tensors() {
        for a in 0..t.nrows() {
            for c in 0..t.ncols() {
                let z = t[(a, c)];
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn decode_mps(bytes: &[u8]) -> Result<(MpsState, MpsHeader)> {
    if bytes.len() < 8 {
        return Err(parse_err(format!("{} bytes is shorter than the fixed prelude", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(parse_err("bad magic (expected CMPS)"));
    }
    let hlen = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    if hlen > MAX_HEADER || hlen > bytes.len() - 8 {
        return Err(parse_err(format!("header length {hlen} exceeds the input")));
    }
    let header: MpsHeader =
        serde_json::from_slice(&bytes[8..8 + hlen]).map_err(|e| parse_err(format!("header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Unsupported(format!("MPS format version {}", header.version)));
    }
    let n = header.n;
    if n == 0 || header.bond_dims.len() != n + 1 {
        return Err(parse_err(format!("{} bond dimensions for {n} sites", header.bond_dims.len())));
    }
    if header.bond_dims[0] != 1 || header.bond_dims[n] != 1 || header.bond_dims.contains(&0) {
        return Err(parse_err("boundary bonds must be 1 and all bonds positive"));
    }
    let payload = &bytes[8 + hlen..];
    let mut expected: usize = 0;
    for w in header.bond_dims.windows(2) {
        let entries = w[0]
            .checked_mul(2)
            .and_then(|x| x.checked_mul(w[1]))
            .and_then(|x| x.checked_mul(16))
            .ok_or_else(|| parse_err("tensor size overflows"))?;
        expected = expected.checked_add(entries).ok_or_else(|| parse_err("payload size overflows"))?;
        if expected > payload.len() {
            return Err(parse_err(format!("payload has {} bytes, bond dimensions need more", payload.len())));
        }
    }
    if expected != payload.len() {
        return Err(parse_err(format!("payload has {} bytes, expected {expected}", payload.len())));
    }
    let mut chunks = payload.chunks_exact(16).map(|c| {
        C64::new(
            f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
            f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
        )
    });
    let mut tensors = Vec::with_capacity(n);
    for w in header.bond_dims.windows(2) {
        let (l, r) = (w[0], w[1]);
        let data: Vec<C64> = chunks.by_ref().take(l * 2 * r).collect();
        tensors.push(ComplexMatrix::from_row_slice(l, 2 * r, &data));
    }
    let mps = MpsState::from_tensors(tensors, header.center)?;
    Ok((mps, header))
}

pub fn write_mps(path: &Path, mps: &MpsState, seed: Option<u64>) -> Result<()> {
    std::fs::write(path, encode_mps(mps, seed))?;
    Ok(())
}

pub fn read_mps(path: &Path) -> Result<(MpsState, MpsHeader)> {
    decode_mps(&std::fs::read(path)?)
}
