#include "vmfgs/measurement.hpp"

#include <cmath>

#include "vmfgs/rng.hpp"

namespace vmfgs {

namespace {

OutcomeProbabilities fromOverlaps(const ScaledHamiltonian& scaled,
                                  const Eigen::VectorXd& overlapSquares, double phase) {
    const Eigen::VectorXd phases = scaled.phases();
    double shifted = 0.0;
    for (int n = 0; n < scaled.dim(); ++n)
        shifted += std::cos(phases[n] + phase) * overlapSquares[n];
    OutcomeProbabilities out;
    out.p0 = 0.5 * (1.0 + shifted);
    out.p1 = 0.5 * (1.0 - shifted);
    return out;
}

}  // namespace

OutcomeProbabilities outcomeProbability(const ScaledHamiltonian& scaled,
                                        const Eigen::VectorXcd& psi, double phase) {
    if (psi.size() != scaled.dim())
        throw DimensionMismatchError("state dimension does not match the Hamiltonian");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw NonUnitStateError("measurement requires a unit state");
    Eigen::VectorXd overlapSquares(scaled.dim());
    for (int n = 0; n < scaled.dim(); ++n) {
        const std::complex<double> amp = scaled.spectrum.eigenvectors.col(n).dot(psi);
        overlapSquares[n] = std::norm(amp);
    }
    return fromOverlaps(scaled, overlapSquares, phase);
}

OutcomeProbabilities outcomeProbability(const ScaledHamiltonian& scaled,
                                        const RealStateVector& psi, double phase) {
    if (psi.size() != 2 * scaled.dim())
        throw DimensionMismatchError("real state dimension does not match the Hamiltonian");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw NonUnitStateError("measurement requires a unit state");
    // |<h_n|psi>|^2 = (h_n . psi)^2 + (h_n^s . psi)^2 in the real embedding.
    Eigen::VectorXd overlapSquares(scaled.dim());
    for (int n = 0; n < scaled.dim(); ++n) {
        const auto [h, hS] = realEmbed(scaled.spectrum.eigenvectors.col(n));
        const double re = h.dot(psi);
        const double im = hS.dot(psi);
        overlapSquares[n] = re * re + im * im;
    }
    return fromOverlaps(scaled, overlapSquares, phase);
}

OutcomeTally sampleOutcomes(double p0, long long shots, std::uint64_t seed) {
    if (p0 < 0.0 || p0 > 1.0)
        throw ProbabilityRangeError("success probability must lie in [0, 1]");
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    Rng rng(seed);
    OutcomeTally tally;
    for (long long i = 0; i < shots; ++i) {
        if (rng.bernoulli(p0))
            ++tally.successes;
        else
            ++tally.failures;
    }
    return tally;
}

}  // namespace vmfgs
