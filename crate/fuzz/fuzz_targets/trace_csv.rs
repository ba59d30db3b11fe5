// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use qcg_core::io::read_trace_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_trace_csv(data);
});
