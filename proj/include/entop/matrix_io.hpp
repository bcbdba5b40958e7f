// Copyright 2026 The entop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "entop/opalg.hpp"
#include "entop/tomography.hpp"

namespace entop {

struct LabeledMatrix {
  ComplexMatrix matrix;
  std::vector<std::string> labels;
};

/// Computational basis labels in H/V notation: "HH", "HV", "VH", "VV", ...
std::vector<std::string> polarization_labels(std::size_t nQubits);

/// Square matrix as CSV: header "block,row,<labels>", then one "re" row and
/// one "im" row block, values printed with 17 significant digits.
std::string emit_matrix_csv(const ComplexMatrix& m, const std::vector<std::string>& labels);
LabeledMatrix parse_matrix_csv(const std::string& text);

/// Header "setting_label,count,exposure".
std::string emit_counts_csv(const std::vector<CountRecord>& counts);
std::vector<CountRecord> parse_counts_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace entop
