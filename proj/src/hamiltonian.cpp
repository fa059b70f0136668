#include "vmfgs/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace vmfgs {

ComplexHermitian::ComplexHermitian(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
        throw DimensionMismatchError("Hamiltonian must be a square matrix with d >= 1");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTol * scale)
        throw NonHermitianError("matrix is not Hermitian within tolerance");
    // Symmetrize the representation so downstream arithmetic sees an exactly
    // Hermitian matrix regardless of sub-tolerance input noise.
    entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
}

SpectralDecomposition eigendecompose(const ComplexHermitian& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.entries());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("Hermitian eigendecomposition failed to converge");
    // Eigen returns ascending eigenvalues with orthonormal columns already.
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

ScaledHamiltonian scaleToWindow(const SpectralDecomposition& spectrum, const Window& window,
                                const std::optional<std::pair<double, double>>& boundsOverride) {
    const double epsMin = spectrum.eigenvalues.minCoeff();
    const double epsMax = spectrum.eigenvalues.maxCoeff();

    double lambdaMin = epsMin;
    double lambdaMax = epsMax;
    if (boundsOverride) {
        lambdaMin = boundsOverride->first;
        lambdaMax = boundsOverride->second;
        if (!(lambdaMin < lambdaMax))
            throw WindowError("bounds override requires lambda_min < lambda_max");
        if (epsMin < lambdaMin || epsMax > lambdaMax)
            throw WindowError("spectrum exceeds the supplied bounds");
    }

    ScaledHamiltonian scaled{spectrum, 1.0, 0.0, 1.0, window, false};
    if (lambdaMax == lambdaMin) {
        // Constant Hamiltonian: no spread to stretch. Park every phase at
        // window.lo and flag the result.
        scaled.affineScale = 1.0;
        scaled.affineShift = window.lo - lambdaMin;
        scaled.degenerate = true;
        return scaled;
    }

    scaled.affineScale = (window.hi - window.lo) / (lambdaMax - lambdaMin);
    scaled.affineShift = window.lo - scaled.affineScale * lambdaMin;
    return scaled;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> realEmbed(const Eigen::VectorXcd& v) {
    const auto d = v.size();
    Eigen::VectorXd h(2 * d), hS(2 * d);
    for (Eigen::Index k = 0; k < d; ++k) {
        h[2 * k] = v[k].real();
        h[2 * k + 1] = v[k].imag();
        hS[2 * k] = -v[k].imag();
        hS[2 * k + 1] = v[k].real();
    }
    return {h, hS};
}

Eigen::VectorXd complexToReal(const Eigen::VectorXcd& v) {
    return realEmbed(v).first;
}

Eigen::VectorXcd realToComplex(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0)
        throw DimensionMismatchError("real embedding must have even length");
    Eigen::VectorXcd out(v.size() / 2);
    for (Eigen::Index k = 0; k < out.size(); ++k)
        out[k] = std::complex<double>(v[2 * k], v[2 * k + 1]);
    return out;
}

WMatrix buildW(const ScaledHamiltonian& scaled, bool strictBound) {
    const int d = scaled.dim();
    const int p = 2 * d;
    const Eigen::VectorXd phases = scaled.phases();

    WMatrix W;
    W.p = p;
    W.entries = Eigen::MatrixXd::Zero(p, p);
    W.cosines.resize(d);
    W.groundProjector = Eigen::MatrixXd::Zero(p, p);

    // Ground degeneracy is decided on the unscaled spectrum: every level
    // within kGroundDegeneracyTol of eps_0 joins the ground eigenspace.
    const double eps0 = scaled.spectrum.eigenvalues.minCoeff();
    for (int n = 0; n < d; ++n) {
        const double c = std::cos(phases[n]);
        W.cosines[n] = c;
        // The -1e-12 slack absorbs one-ulp overshoot of the window edge by
        // the affine map; anything beyond that is a real violation.
        if (strictBound && c < -1e-12)
            throw WindowError(
                "negative cosine in strict-bound mode; keep the window inside (0, pi/2] "
                "or disable strict mode");
        const auto [h, hS] = realEmbed(scaled.spectrum.eigenvectors.col(n));
        const Eigen::MatrixXd plane = h * h.transpose() + hS * hS.transpose();
        W.entries += c * plane;
        if (scaled.spectrum.eigenvalues[n] - eps0 <= kGroundDegeneracyTol)
            W.groundProjector += plane;
    }
    W.groundCosine = std::cos(phases.minCoeff());
    // Force exact symmetry against rounding in the rank-1 accumulation.
    W.entries = 0.5 * (W.entries + W.entries.transpose().eval());
    return W;
}

double fidelity(const RealStateVector& psi, const WMatrix& W) {
    if (psi.size() != W.p)
        throw DimensionMismatchError("state dimension does not match W");
    return psi.dot(W.groundProjector * psi);
}

}  // namespace vmfgs
