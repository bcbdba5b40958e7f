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

#include "entop/opalg.hpp"

namespace entop {

struct ProcessMatrix;

/// <psi|rho|psi>, the fidelity to a pure target.
double state_fidelity(const ComplexMatrix& rho, const ComplexVector& psi);

/// Squared Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2. Some
/// texts call the unsquared trace the fidelity; this library never does.
double uhlmann_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Uhlmann fidelity between two unit-trace process matrices expressed in the
/// same Pauli basis. Throws BasisMismatch otherwise.
double process_fidelity(const ProcessMatrix& chiExp, const ProcessMatrix& chiIdeal);

/// Wootters concurrence of a two-qubit state; the spin flip conjugates in the
/// computational (H/V) basis. Throws WrongDimension for non-4x4 input.
double concurrence(const ComplexMatrix& rho);

/// Tr(rho^2).
double purity(const ComplexMatrix& rho);

}  // namespace entop
