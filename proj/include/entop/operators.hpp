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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "entop/opalg.hpp"

namespace entop {

/// A single-qubit operator acting on one party. Projectors and other
/// non-unitary maps are allowed.
struct LocalOperator {
  std::optional<std::string> label;
  ComplexMatrix matrix;
};

namespace local {
LocalOperator I();
LocalOperator X();
LocalOperator Y();
LocalOperator Z();
/// |0><0| (|H><H|) and |1><1| (|V><V|).
LocalOperator P0();
LocalOperator P1();
/// Jones matrix of a half-wave plate with fast axis at `theta` radians from H:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]. H(0) = Z and H(pi/4) = X exactly.
LocalOperator half_wave_plate(double theta);
/// Jones matrix of a quarter-wave plate at `theta`, global phase chosen so
/// Q(0) = diag(1, i).
LocalOperator quarter_wave_plate(double theta);
/// Wraps an explicit 2x2 matrix; throws InvalidArgument for other shapes.
LocalOperator custom(ComplexMatrix m, std::optional<std::string> label = {});
}  // namespace local

struct BranchTerm {
  Complex coefficient;                // magnitude and phase of the branch
  std::vector<LocalOperator> factors;  // one per party, party 0 first
};

/// A coherent sum of M product operators over N qubit parties.
struct BranchSuperposition {
  std::size_t parties = 0;
  std::vector<BranchTerm> terms;

  std::size_t dimension() const { return std::size_t{1} << parties; }
};

/// Validates the terms and rescales every coefficient by one positive constant
/// so that sum |c_k|^2 = 1. Throws EmptyTermList, MismatchedParties, or
/// InvalidArgument (all-zero coefficients, non-2x2 factor).
BranchSuperposition build_superposition(std::vector<BranchTerm> terms);

/// sum_k c_k (x)_j factor_{k,j}, party 0 as the most significant qubit.
ComplexMatrix to_matrix(const BranchSuperposition& s);

struct StateAction {
  ComplexVector state;  // normalised O|psi>
  double weight = 0.0;  // |O psi|^2
};

/// Applies the (generally non-trace-preserving) operator to a normalised ket.
/// Throws Annihilated when |O psi|^2 < 1e-14.
StateAction apply_to_state(const ComplexMatrix& o, const ComplexVector& psi);
StateAction apply_to_state(const BranchSuperposition& s,
                           const ComplexVector& psi);

struct SchmidtDecomposition {
  std::vector<double> coefficients;        // descending, non-negative
  std::vector<ComplexMatrix> leftFactors;  // dimA x dimA, unit HS norm
  std::vector<ComplexMatrix> rightFactors;  // dimB x dimB, unit HS norm
  std::size_t dimA = 0;
  std::size_t dimB = 0;

  /// sum_k c_k L_k (x) R_k
  ComplexMatrix reconstruct() const;
};

/// Operator-Schmidt decomposition across the A|B cut via SVD of the realigned
/// operator. Factors carry SVD gauge freedom (phases, rotations inside
/// degenerate subspaces); only coefficients and the reconstruction are unique.
SchmidtDecomposition schmidt_decompose(const ComplexMatrix& o,
                                       std::size_t dimA, std::size_t dimB);

/// Number of coefficients above tol * max coefficient.
std::size_t schmidt_number(const SchmidtDecomposition& d, double tol = 1e-9);

bool is_unitary(const ComplexMatrix& o, double tol = kHermitianTol);

/// sqrt(1-p) I(x)I + i sqrt(p) X(x)X: every Schmidt-number-2 two-qubit
/// unitary is locally equivalent to one of these. Requires 0 <= p <= 1.
BranchSuperposition schmidt2_unitary(double p);

/// exp(-i theta X(x)X) = cos(theta) I - i sin(theta) X(x)X.
ComplexMatrix ising_xx(double theta);

/// (1/sqrt2)(|0><0| (x) I + |1><1| (x) U); proportional to controlled-U.
BranchSuperposition controlled_unitary(const LocalOperator& u);

/// (1/sqrt2)(|00><00| + |11><11|).
BranchSuperposition entanglement_filter();

/// (1/2)(II + XX + YY + ZZ), exactly the SWAP permutation.
BranchSuperposition swap_operator();

/// (1/sqrt2)(III + XXX): |HHH> -> GHZ.
BranchSuperposition ghz_operator();

/// (1/sqrt3)(IIX + IXI + XII): |HHH> -> W.
BranchSuperposition w_operator();

/// (1/2)(P0 P0 I + P0 P1 I + P1 P0 I + P1 P1 U); Toffoli/2 for U = X.
BranchSuperposition ccu(const LocalOperator& u);

/// Product ket from a token string over {H, V, D, A, R, L} (also 0/1 for
/// H/V), party 0 first. Throws ParseError on unknown tokens.
ComplexVector product_ket(const std::string& tokens);

/// Single-qubit polarisation ket for one token character.
ComplexVector polarization_ket(char token);

}  // namespace entop
