#![no_main]

use cliffmps::io::{decode_mps, encode_mps};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((mps, header)) = decode_mps(data) {
        // accepted inputs re-encode to the same bytes
        assert_eq!(encode_mps(&mps, header.seed).len(), data.len());
    }
});
