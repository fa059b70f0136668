#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "vmfgs/errors.hpp"

namespace vmfgs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kGroundDegeneracyTol = 1e-9;

/// A state vector in the real embedding: the complex amplitudes interleaved
/// as (re_1, im_1, re_2, im_2, ...). Unit norm is a caller obligation checked
/// at the API boundaries that consume states.
using RealStateVector = Eigen::VectorXd;

/// Target interval for the scaled phases eps_n * t. The ground-state search
/// is provably convergent for windows inside (0, pi/2], where every cosine
/// stays non-negative; (pi/2, pi] is allowed but the spectral bound
/// ||W psi|| <= c0 can fail there, so buildW treats it as permissive mode.
struct Window {
    double lo;
    double hi;

    Window(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo > 0.0) || !(hi <= kPi) || !(lo < hi))
            throw WindowError("window must lie in (0, pi] with lo < hi");
    }

    bool withinConvergentRange() const { return hi <= kPi / 2.0 + 1e-15; }

    static Window standard() { return Window(0.1, kPi / 2.0); }
};

/// Complex Hermitian matrix; Hermiticity is enforced at construction to
/// kHermitianTol (absolute, relative to the largest entry).
class ComplexHermitian {
public:
    explicit ComplexHermitian(Eigen::MatrixXcd entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const { return entries_; }

private:
    Eigen::MatrixXcd entries_;
};

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // column n pairs with eigenvalues[n]

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// Spectrum mapped into a phase window by the affine map
/// eps -> (a * eps + b) * t with a > 0 and t fixed to 1, so eigenvalue order
/// (and hence the ground state) is preserved. `degenerate` marks a constant
/// Hamiltonian (zero-width spectrum), for which every phase sits at
/// window.lo and there is nothing to learn.
struct ScaledHamiltonian {
    SpectralDecomposition spectrum;
    double affineScale = 1.0;  // a > 0
    double affineShift = 0.0;  // b
    double time = 1.0;         // t
    Window window = Window::standard();
    bool degenerate = false;

    int dim() const { return spectrum.dim(); }

    /// Scaled phases (a * eps_n + b) * t, ascending.
    Eigen::VectorXd phases() const {
        return (affineScale * spectrum.eigenvalues.array() + affineShift) * time;
    }
};

/// Real symmetric 2d x 2d quadratic form W with
/// psi^T W psi = sum_n cos(eps_n t) |<h_n|psi>|^2 for every unit psi in the
/// real embedding. `groundProjector` projects onto the eigenspace of the
/// ground cosine c0 (all levels within kGroundDegeneracyTol of eps_0).
struct WMatrix {
    int p = 0;                       // ambient real dimension, 2d
    Eigen::MatrixXd entries;         // p x p symmetric
    Eigen::VectorXd cosines;         // cos(eps_n t), one per level, by ascending eps
    double groundCosine = 0.0;       // c0 = cos(eps_0 t)
    Eigen::MatrixXd groundProjector; // p x p, rank 2 * (ground multiplicity)

    double trace() const { return entries.trace(); }
};

/// Hermitian eigendecomposition: ascending eigenvalues, orthonormal
/// eigenvectors. Throws ConvergenceError if the iterative solve fails.
SpectralDecomposition eigendecompose(const ComplexHermitian& H);

/// Affine-map the spectrum into `window`: the smallest eigenvalue lands on
/// window.lo, the largest on window.hi (or the override bounds do, when
/// given). A zero-width spectrum cannot be stretched; it comes back flagged
/// `degenerate` with every phase at window.lo instead of dividing by zero.
ScaledHamiltonian scaleToWindow(
    const SpectralDecomposition& spectrum, const Window& window,
    const std::optional<std::pair<double, double>>& boundsOverride = std::nullopt);

/// Real embedding of a complex vector v: h interleaves (re, im) pairs and
/// hS is the embedding of i*v, so h^T hS = 0 exactly and
/// |<v|x>|^2 = (h^T x)^2 + (hS^T x)^2 for any real-embedded x.
std::pair<Eigen::VectorXd, Eigen::VectorXd> realEmbed(const Eigen::VectorXcd& v);

/// Interleave a complex vector into its real embedding.
Eigen::VectorXd complexToReal(const Eigen::VectorXcd& v);

/// Inverse of complexToReal.
Eigen::VectorXcd realToComplex(const Eigen::VectorXd& v);

/// Assemble W = sum_n c_n [h_n h_n^T + h_n^s (h_n^s)^T] from the scaled
/// spectrum. With strictBound (the default), any negative cosine is a
/// WindowError: the spectral bound ||W psi|| <= c0 that the convergence
/// proof rests on needs c0 >= |c_n| for all n. Pass strictBound = false to
/// build W anyway (permissive mode).
WMatrix buildW(const ScaledHamiltonian& scaled, bool strictBound = true);

/// Overlap of a unit state with the ground eigenspace: psi^T P0 psi.
/// Equals 1 exactly on the ground 2-plane {h0, h0^s} and is invariant under
/// the global-phase rotation psi -> cos(g) h0 + sin(g) h0^s.
double fidelity(const RealStateVector& psi, const WMatrix& W);

}  // namespace vmfgs
