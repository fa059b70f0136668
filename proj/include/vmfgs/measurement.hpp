#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "vmfgs/hamiltonian.hpp"

namespace vmfgs {

/// Two-outcome probabilities of the ancilla measurement,
///   p(x) = (1 + (-1)^x sum_n cos(eps_n t + phase) |<h_n|psi>|^2) / 2.
/// At phase = 0 the success probability reduces to (1 + psi^T W psi) / 2
/// and is maximized by the ground state.
struct OutcomeProbabilities {
    double p0 = 0.0;
    double p1 = 0.0;
};

OutcomeProbabilities outcomeProbability(const ScaledHamiltonian& scaled,
                                        const Eigen::VectorXcd& psi, double phase = 0.0);

/// Same measurement for a state given in the real embedding.
OutcomeProbabilities outcomeProbability(const ScaledHamiltonian& scaled,
                                        const RealStateVector& psi, double phase = 0.0);

struct OutcomeTally {
    long long successes = 0;  // x = 0 counts
    long long failures = 0;   // x = 1 counts

    long long shots() const { return successes + failures; }
    double successRate() const {
        return shots() > 0 ? static_cast<double>(successes) / static_cast<double>(shots()) : 0.0;
    }
};

/// Bernoulli realization of the success probability; deterministic per seed.
OutcomeTally sampleOutcomes(double p0, long long shots, std::uint64_t seed);

}  // namespace vmfgs
