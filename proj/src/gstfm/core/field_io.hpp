/*
 * Copyright 2026 The gstfm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gstfm/core/lattice_field.hpp"

namespace gstfm {

/// csv: header `ell,s1,s2,t,value`, one row per lattice value, one-based
/// coordinates; the lattice shape is the maximum of each index column.
/// stf: ASCII line `STF1 n S1 S2 T\n` followed by little-endian float64
/// values in storage order.
enum class FieldFormat { csv, stf };

FieldFormat parse_field_format(const std::string& name);
/// Guess from the extension: .csv -> csv, anything else -> stf.
FieldFormat format_from_path(const std::filesystem::path& path);

LatticeField load_field(std::istream& in, FieldFormat format);
LatticeField load_field(const std::filesystem::path& path, FieldFormat format);

void store_field(std::ostream& out, const LatticeField& field, FieldFormat format);
void store_field(const std::filesystem::path& path, const LatticeField& field, FieldFormat format);

} // namespace gstfm
