// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

pub mod budget;
pub mod controllability;
pub mod optimize;
pub mod simulate;
pub mod sweep;
