#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "vmfgs/errors.hpp"
#include "vmfgs/hamiltonian.hpp"
#include "vmfgs/rng.hpp"

namespace vmfgs {

/// Concentration ceiling shared by the kappa estimator and the stopping
/// rule, so capping the estimate and terminating the iteration coincide.
inline constexpr double kDefaultKappaMax = 700.0;

/// Ratios of modified Bessel functions of the first kind at order nu = p/2:
///   A = I_nu / I_{nu-1},  B = I_{nu+1} / I_{nu-1},  D = I_{nu+2} / I_{nu-1}.
/// These are the only Bessel quantities the moment formulas need, and they
/// are evaluated as ratios throughout -- raw Bessel values overflow long
/// before the working regime (kappa up to 700 at p up to 2048) is reached.
/// aOverK and bOverK carry A/kappa and B/kappa with their finite k->0
/// limits (1/p and 0) built in.
struct BesselRatios {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
    double aOverK = 0.0;
    double bOverK = 0.0;
};

/// Evaluate the ratio triple by the Gauss continued fraction for
/// r_nu = I_nu / I_{nu-1} (modified Lentz, truncation 1e-15), then chain
/// A = r_{nu}, B = r_{nu+1} A, D = r_{nu+2} r_{nu+1} A downward from a
/// single fraction at the highest order. kappa below 1e-6 switches to the
/// small-argument series.
BesselRatios besselRatios(int p, double kappa);

/// The ratio I_nu / I_{nu-1} itself, exposed for diagnostics and tests.
double besselRatio(double nu, double kappa);

/// log I_nu(kappa) for nu = m/2 (m >= 0 integer), computed in the log
/// domain via the ratio chain so it stays finite for kappa up to 1e4.
double logBesselI(int twiceNu, double kappa);

/// von Mises-Fisher distribution on the unit sphere S^{p-1}:
/// p(psi | mu, kappa) = C_p(kappa) exp(kappa mu^T psi). kappa = 0 is the
/// uniform distribution.
class VonMisesFisher {
public:
    VonMisesFisher(Eigen::VectorXd mu, double kappa);

    const Eigen::VectorXd& mu() const { return mu_; }
    double kappa() const { return kappa_; }
    int p() const { return static_cast<int>(mu_.size()); }

private:
    Eigen::VectorXd mu_;
    double kappa_;
};

double logDensity(const VonMisesFisher& dist, const RealStateVector& psi);

/// First moment E[psi] = A_p(kappa) mu.
Eigen::VectorXd meanResultant(const VonMisesFisher& dist);

/// E[psi^T W psi] = (A/k) Tr W + B mu^T W mu.
double quadraticMoment(const VonMisesFisher& dist, const WMatrix& W);

/// E[(psi^T W psi) psi] = (2B/k) W mu + ((B/k) Tr W + D mu^T W mu) mu.
Eigen::VectorXd cubicContraction(const VonMisesFisher& dist, const WMatrix& W);

/// Concentration estimate k = R (p - R^2) / (1 - R^2), capped at `cap`
/// (R -> 1 sends the estimate to infinity). R must be non-negative;
/// R >= 1 returns the cap.
double estimateKappa(double resultant, int p, double cap = kDefaultKappaMax);

struct MeanEstimate {
    Eigen::VectorXd mu;
    double resultant = 0.0;
    bool zeroResultant = false;  // antipodal cancellation: mu is arbitrary
};

/// Maximum likelihood mean direction: mu = psi_bar / ||psi_bar||,
/// R = ||psi_bar||. Samples must be unit within 1e-9.
MeanEstimate mleMean(const std::vector<Eigen::VectorXd>& samples);

/// Inverse-CDF sampler for the marginal cosine t = mu^T psi of a vMF
/// draw, rejection-free. The density is handled in the colatitude
/// variable theta = acos(t), where exp(k cos theta) sin^{p-2}(theta) is
/// smooth for every p >= 2; the cumulative integral is tabulated once on
/// adaptive Chebyshev panels and each draw inverts it by bisection to
/// 1e-12.
class VmfCosineSampler {
public:
    VmfCosineSampler(int p, double kappa);

    /// Monotone map from u in [0, 1) to a cosine in [-1, 1].
    double cosine(double u) const;

private:
    struct Panel {
        double lo = 0.0;
        double hi = 0.0;
        double cumBefore = 0.0;               // mass in all earlier panels
        double mass = 0.0;                    // mass of this panel
        std::vector<double> antiderivative;   // Chebyshev series on [-1, 1]
    };

    double scaledDensity(double theta) const;  // exp(g(theta) - gMax)
    void buildPanel(double lo, double hi, int depth);

    int p_;
    double kappa_;
    double gMax_ = 0.0;
    double total_ = 0.0;
    std::vector<Panel> panels_;
    std::vector<double> cumulative_;  // partial sums aligned with panels_
};

/// Draw n unit vectors from the distribution. Deterministic in
/// (dist, n, seed); concurrent callers should derive distinct seeds.
std::vector<Eigen::VectorXd> sample(const VonMisesFisher& dist, int n, std::uint64_t seed);

/// Streaming variant: draws one sample per call against a caller-owned Rng
/// and a prebuilt cosine table, for the Monte-Carlo heavy paths.
Eigen::VectorXd sampleOne(const VonMisesFisher& dist, const VmfCosineSampler& marginal, Rng& rng);

}  // namespace vmfgs
