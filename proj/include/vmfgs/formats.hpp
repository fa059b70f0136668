#pragma once

#include <Eigen/Dense>
#include <string>

#include "vmfgs/hamiltonian.hpp"

namespace vmfgs {

/// Dense Hamiltonian file: {"dim": d, "re": [[...]], "im": [[...]]}.
/// "im" may be omitted for real symmetric matrices. Hermiticity is
/// validated on load.
ComplexHermitian loadHamiltonianJson(const std::string& path);
void saveHamiltonianJson(const ComplexHermitian& H, const std::string& path);

/// Pauli-sum text: one term per line, `<coefficient> <string over {I,X,Y,Z}>`
/// (e.g. `0.5 XZ`). Blank lines and `#` comments are skipped; all strings
/// must share one length n_q, and the result is the dense 2^{n_q} matrix.
ComplexHermitian loadPauliFile(const std::string& path);

/// Expand parsed Pauli terms; exposed for tests.
Eigen::MatrixXcd pauliTermMatrix(const std::string& opString);

/// Dispatch on content: a leading '{' means dense JSON, anything else is
/// parsed as a Pauli-sum file.
ComplexHermitian loadHamiltonian(const std::string& path);

/// Complex state file: {"re": [...], "im": [...]} ("im" optional).
Eigen::VectorXcd loadComplexVectorJson(const std::string& path);

/// Whitespace-separated reals, e.g. a mean direction for sample-vmf.
Eigen::VectorXd loadRealVector(const std::string& path);

}  // namespace vmfgs
