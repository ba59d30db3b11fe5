// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::assembly_from_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = assembly_from_json(s);
    }
});
