// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::decode_block_encoding;

// Header JSON, a zero byte, then the matrix bytes.
fuzz_target!(|data: &[u8]| {
    let Some(cut) = data.iter().position(|&b| b == 0) else { return };
    let Ok(header) = std::str::from_utf8(&data[..cut]) else { return };
    let _ = decode_block_encoding(header, &data[cut + 1..]);
});
