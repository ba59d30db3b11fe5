// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::{decode_matrix, encode_matrix};

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let (rows, cols) = (data[0] as usize % 17, data[1] as usize % 17);
    if let Ok(m) = decode_matrix(&data[2..], rows, cols) {
        assert_eq!(encode_matrix(&m), &data[2..]);
    }
});
