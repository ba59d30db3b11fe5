// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::{phases_from_json, phases_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(phi) = phases_from_json(s) {
        assert!(phases_from_json(&phases_to_json(&phi).unwrap()).is_ok());
    }
});
