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

#include <string_view>

#include "entop/operators.hpp"

namespace entop {

/// Parses the operator mini-language (grammar in docs/FORMATS.md), e.g.
///
///   "1*[Z,Z] + exp(i*pi/2)*[X,X]"
///   "[P0,I] + [P1,U[0,1;1,0]]"
///   "SWAP"
///
/// and returns the normalised superposition. Throws ParseError with the byte
/// offset of the offending token.
BranchSuperposition parse_operator_spec(std::string_view text);

/// Evaluates a stand-alone complex expression such as "exp(i*pi/4)/sqrt(2)".
Complex parse_complex_expression(std::string_view text);

}  // namespace entop
