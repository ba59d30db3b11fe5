// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::{polynomial_from_json, polynomial_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = polynomial_from_json(s) {
        let back = polynomial_from_json(&polynomial_to_json(&p).unwrap()).unwrap();
        assert_eq!(back.degree(), p.degree());
    }
});
