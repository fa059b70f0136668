#include "vmfgs/vmf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vmfgs {

namespace {

constexpr double kSeriesKappaThreshold = 1e-6;
constexpr double kLentzTol = 1e-15;
constexpr int kChebNodes = 17;

/// Clenshaw evaluation of sum_k c[k] T_k(x).
double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        const double t = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = t;
    }
    return x * b1 - b2 + c[0];
}

/// log I_0(kappa): power series below 20, asymptotic expansion above
/// (the crossover keeps both branches under 1e-13 relative error).
double logBesselI0(double kappa) {
    if (kappa <= 20.0) {
        const double q = 0.25 * kappa * kappa;
        double term = 1.0, sum = 1.0;
        for (int m = 1; m < 200; ++m) {
            term *= q / (static_cast<double>(m) * m);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::log(sum);
    }
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < 60; ++j) {
        const double next = term * (2.0 * j - 1.0) * (2.0 * j - 1.0) / (8.0 * j * kappa);
        if (next >= term) break;  // asymptotic series started diverging
        term = next;
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return kappa - 0.5 * std::log(2.0 * kPi * kappa) + std::log(sum);
}

}  // namespace

double besselRatio(double nu, double kappa) {
    if (!(kappa > 0.0))
        throw std::invalid_argument("besselRatio requires kappa > 0");
    // Gauss continued fraction r_nu = 1 / (2 nu / k + 1 / (2 (nu+1) / k + ...)),
    // evaluated by modified Lentz. Convergence sets in once the partial
    // denominators 2 (nu + j) / k exceed 1, hence the iteration budget.
    const double tiny = 1e-300;
    const long maxIter = 500 + static_cast<long>(3.0 * (kappa + nu));
    double f = tiny, C = tiny, D = 0.0;
    for (long j = 1; j <= maxIter; ++j) {
        const double bj = 2.0 * (nu + static_cast<double>(j) - 1.0) / kappa;
        D = bj + D;
        if (D == 0.0) D = tiny;
        C = bj + 1.0 / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < kLentzTol) return f;
    }
    throw ConvergenceError("Bessel ratio continued fraction did not converge");
}

BesselRatios besselRatios(int p, double kappa) {
    if (p < 2) throw std::invalid_argument("besselRatios requires p >= 2");
    if (kappa < 0.0) throw std::invalid_argument("besselRatios requires kappa >= 0");

    BesselRatios r;
    const double dp = static_cast<double>(p);
    if (kappa == 0.0) {
        r.aOverK = 1.0 / dp;
        return r;
    }
    if (kappa < kSeriesKappaThreshold) {
        // Small-argument series; B and D take their recurrence-limit forms.
        // This keeps A/k well-conditioned for the first update step at
        // kappa_init = 0.001-scale concentrations and below.
        const double k2 = kappa * kappa;
        r.aOverK = (1.0 / dp) * (1.0 - k2 / (dp * (dp + 2.0)));
        r.a = kappa * r.aOverK;
        r.bOverK = kappa / (dp * (dp + 2.0));
        r.b = kappa * r.bOverK;
        r.d = k2 * kappa / (dp * (dp + 2.0) * (dp + 4.0));
        return r;
    }

    // One continued fraction at the top order, then the stable downward
    // recurrence r_{nu-1} = 1 / (2 (nu-1) / k + r_nu).
    const double nu = dp / 2.0;
    const double rTop = besselRatio(nu + 2.0, kappa);             // I_{nu+2} / I_{nu+1}
    const double rMid = 1.0 / (2.0 * (nu + 1.0) / kappa + rTop);  // I_{nu+1} / I_nu
    const double rA = 1.0 / (2.0 * nu / kappa + rMid);            // I_nu / I_{nu-1}
    r.a = rA;
    r.b = rMid * rA;
    r.d = rTop * rMid * rA;
    r.aOverK = r.a / kappa;
    r.bOverK = r.b / kappa;
    return r;
}

double logBesselI(int twiceNu, double kappa) {
    if (twiceNu < 0) throw std::invalid_argument("logBesselI requires order >= 0");
    if (kappa < 0.0) throw std::invalid_argument("logBesselI requires kappa >= 0");
    if (kappa == 0.0)
        return twiceNu == 0 ? 0.0 : -std::numeric_limits<double>::infinity();

    const double nu = twiceNu / 2.0;
    if (kappa <= 20.0) {
        // Series in log form: I_nu(k) = (k/2)^nu / Gamma(nu+1) * S with
        // S = sum_m prod_{i<=m} (k^2/4) / (i (nu+i)). Works for any order,
        // down to denormal kappa.
        const double q = 0.25 * kappa * kappa;
        double term = 1.0, sum = 1.0;
        for (int m = 1; m < 300; ++m) {
            term *= q / (static_cast<double>(m) * (nu + static_cast<double>(m)));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return nu * std::log(0.5 * kappa) - std::lgamma(nu + 1.0) + std::log(sum);
    }

    int steps;
    double base;
    if (twiceNu % 2 == 0) {
        steps = twiceNu / 2;
        base = logBesselI0(kappa);
    } else {
        // I_{1/2}(k) = sqrt(2 / (pi k)) sinh k, in log form.
        steps = (twiceNu - 1) / 2;
        base = 0.5 * (std::log(2.0 / (kPi * kappa))) + kappa + std::log1p(-std::exp(-2.0 * kappa)) -
               std::log(2.0);
    }
    if (steps == 0) return base;

    // Ratio chain downward from one continued fraction at the top order.
    double ratio = besselRatio(nu, kappa);
    double acc = std::log(ratio);
    for (int s = 1; s < steps; ++s) {
        const double order = nu - static_cast<double>(s);
        ratio = 1.0 / (2.0 * order / kappa + ratio);
        acc += std::log(ratio);
    }
    return base + acc;
}

VonMisesFisher::VonMisesFisher(Eigen::VectorXd mu, double kappa)
    : mu_(std::move(mu)), kappa_(kappa) {
    if (mu_.size() < 2)
        throw std::invalid_argument("vMF requires ambient dimension p >= 2");
    if (kappa_ < 0.0)
        throw std::invalid_argument("vMF concentration must be non-negative");
    const double norm = mu_.norm();
    if (std::abs(norm - 1.0) > 1e-12)
        throw NonUnitStateError("vMF mean direction must be a unit vector");
    mu_ /= norm;
}

double logDensity(const VonMisesFisher& dist, const RealStateVector& psi) {
    if (psi.size() != dist.p())
        throw DimensionMismatchError("state dimension does not match the distribution");
    const double p = static_cast<double>(dist.p());
    if (dist.kappa() == 0.0) {
        // Uniform density: 1 / area(S^{p-1}).
        return std::lgamma(p / 2.0) - std::log(2.0) - (p / 2.0) * std::log(kPi);
    }
    const double logC = (p / 2.0 - 1.0) * std::log(dist.kappa()) -
                        (p / 2.0) * std::log(2.0 * kPi) -
                        logBesselI(dist.p() - 2, dist.kappa());
    return logC + dist.kappa() * dist.mu().dot(psi);
}

Eigen::VectorXd meanResultant(const VonMisesFisher& dist) {
    return besselRatios(dist.p(), dist.kappa()).a * dist.mu();
}

double quadraticMoment(const VonMisesFisher& dist, const WMatrix& W) {
    if (W.p != dist.p())
        throw DimensionMismatchError("W dimension does not match the distribution");
    const BesselRatios r = besselRatios(dist.p(), dist.kappa());
    return r.aOverK * W.trace() + r.b * dist.mu().dot(W.entries * dist.mu());
}

Eigen::VectorXd cubicContraction(const VonMisesFisher& dist, const WMatrix& W) {
    if (W.p != dist.p())
        throw DimensionMismatchError("W dimension does not match the distribution");
    const BesselRatios r = besselRatios(dist.p(), dist.kappa());
    const Eigen::VectorXd wMu = W.entries * dist.mu();
    return 2.0 * r.bOverK * wMu +
           (r.bOverK * W.trace() + r.d * dist.mu().dot(wMu)) * dist.mu();
}

double estimateKappa(double resultant, int p, double cap) {
    if (resultant < 0.0)
        throw ResultantRangeError("resultant length must be non-negative");
    if (resultant >= 1.0) return cap;
    const double r2 = resultant * resultant;
    const double estimate = resultant * (static_cast<double>(p) - r2) / (1.0 - r2);
    return std::min(estimate, cap);
}

MeanEstimate mleMean(const std::vector<Eigen::VectorXd>& samples) {
    if (samples.empty()) throw EmptySampleError("mleMean requires at least one sample");
    const Eigen::Index p = samples.front().size();
    Eigen::VectorXd bar = Eigen::VectorXd::Zero(p);
    for (const auto& s : samples) {
        if (s.size() != p) throw DimensionMismatchError("samples have mixed dimensions");
        if (std::abs(s.norm() - 1.0) > 1e-9)
            throw NonUnitStateError("mleMean samples must be unit vectors");
        bar += s;
    }
    bar /= static_cast<double>(samples.size());
    const double resultant = bar.norm();
    if (resultant < 1e-14) {
        Eigen::VectorXd arbitrary = Eigen::VectorXd::Zero(p);
        arbitrary[0] = 1.0;
        return {arbitrary, 0.0, true};
    }
    return {bar / resultant, resultant, false};
}

// ---------------------------------------------------------------------------
// Marginal-cosine sampler
// ---------------------------------------------------------------------------

double VmfCosineSampler::scaledDensity(double theta) const {
    double g = kappa_ * std::cos(theta);
    if (p_ > 2) {
        const double s = std::sin(theta);
        if (s <= 0.0) return 0.0;
        g += (p_ - 2) * std::log(s);
    }
    return std::exp(g - gMax_);
}

VmfCosineSampler::VmfCosineSampler(int p, double kappa) : p_(p), kappa_(kappa) {
    if (p < 2) throw std::invalid_argument("cosine sampler requires p >= 2");
    if (kappa < 0.0) throw std::invalid_argument("cosine sampler requires kappa >= 0");

    // Peak of g(theta) = kappa cos(theta) + (p-2) log sin(theta); everything
    // is evaluated relative to it so kappa = 700 cannot overflow.
    if (p_ == 2) {
        gMax_ = kappa_;
    } else if (kappa_ == 0.0) {
        gMax_ = 0.0;
    } else {
        const double pm2 = static_cast<double>(p_ - 2);
        const double c = (-pm2 + std::hypot(pm2, 2.0 * kappa_)) / (2.0 * kappa_);
        gMax_ = kappa_ * c + 0.5 * pm2 * std::log(std::max(0.0, 1.0 - c * c));
    }

    constexpr int kSeedPanels = 16;
    for (int i = 0; i < kSeedPanels; ++i)
        buildPanel(kPi * i / kSeedPanels, kPi * (i + 1) / kSeedPanels, 0);

    double cum = 0.0;
    cumulative_.reserve(panels_.size());
    for (auto& panel : panels_) {
        panel.cumBefore = cum;
        cum += panel.mass;
        cumulative_.push_back(cum);
    }
    total_ = cum;
    if (!(total_ > 0.0))
        throw ConvergenceError("vMF cosine marginal has no mass; table construction failed");
}

void VmfCosineSampler::buildPanel(double lo, double hi, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    // Chebyshev-Lobatto interpolation of the scaled density on the panel.
    std::array<double, kChebNodes> values{};
    for (int j = 0; j < kChebNodes; ++j) {
        const double x = std::cos(kPi * j / (kChebNodes - 1));
        values[j] = scaledDensity(mid + half * x);
    }
    std::vector<double> coeff(kChebNodes, 0.0);
    for (int m = 0; m < kChebNodes; ++m) {
        double acc = 0.5 * values[0];
        for (int j = 1; j < kChebNodes - 1; ++j)
            acc += values[j] * std::cos(kPi * m * j / (kChebNodes - 1));
        acc += 0.5 * values[kChebNodes - 1] * std::cos(kPi * m);
        coeff[m] = 2.0 * acc / (kChebNodes - 1);
    }
    coeff[0] *= 0.5;
    coeff[kChebNodes - 1] *= 0.5;

    double largest = 0.0;
    for (double c : coeff) largest = std::max(largest, std::abs(c));
    const double tail = std::abs(coeff[kChebNodes - 1]) + std::abs(coeff[kChebNodes - 2]);
    if (tail > 1e-14 * std::max(largest, 1e-30) && depth < 42 &&
        panels_.size() < (1u << 15)) {
        buildPanel(lo, mid, depth + 1);
        buildPanel(mid, hi, depth + 1);
        return;
    }

    // Antiderivative series, scaled so evaluating it at x(theta) gives the
    // integral of the scaled density from the panel's left edge.
    std::vector<double> anti(kChebNodes + 1, 0.0);
    for (int k = 1; k <= kChebNodes; ++k) {
        const double prev = (k == 1) ? 2.0 * coeff[0] : coeff[k - 1];
        const double next = (k + 1 < kChebNodes) ? coeff[k + 1] : 0.0;
        anti[k] = half * (prev - next) / (2.0 * k);
    }
    double atLeft = 0.0;
    for (int k = 1; k <= kChebNodes; ++k) atLeft += (k % 2 == 0) ? anti[k] : -anti[k];
    anti[0] = -atLeft;

    Panel panel;
    panel.lo = lo;
    panel.hi = hi;
    panel.antiderivative = std::move(anti);
    panel.mass = clenshaw(panel.antiderivative, 1.0);
    panels_.push_back(std::move(panel));
}

double VmfCosineSampler::cosine(double u) const {
    const double target = std::clamp(u, 0.0, 1.0) * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const std::size_t idx =
        std::min<std::size_t>(it - cumulative_.begin(), panels_.size() - 1);
    const Panel& panel = panels_[idx];
    const double local = std::clamp(target - panel.cumBefore, 0.0, panel.mass);

    double lo = panel.lo, hi = panel.hi;
    const double center = 0.5 * (panel.lo + panel.hi);
    const double half = 0.5 * (panel.hi - panel.lo);
    for (int it2 = 0; it2 < 64 && (hi - lo) > 1e-12; ++it2) {
        const double mid = 0.5 * (lo + hi);
        const double x = (mid - center) / half;
        if (clenshaw(panel.antiderivative, x) < local)
            lo = mid;
        else
            hi = mid;
    }
    return std::clamp(std::cos(0.5 * (lo + hi)), -1.0, 1.0);
}

Eigen::VectorXd sampleOne(const VonMisesFisher& dist, const VmfCosineSampler& marginal,
                          Rng& rng) {
    const int p = dist.p();
    const double t = marginal.cosine(rng.uniform());

    // Uniform tangent direction: isotropic normals projected off mu.
    Eigen::VectorXd w(p);
    double norm = 0.0;
    do {
        for (int i = 0; i < p; ++i) w[i] = rng.normal();
        w -= dist.mu().dot(w) * dist.mu();
        norm = w.norm();
    } while (norm < 1e-12);

    Eigen::VectorXd psi = t * dist.mu() + std::sqrt(std::max(0.0, 1.0 - t * t)) * (w / norm);
    psi /= psi.norm();
    return psi;
}

std::vector<Eigen::VectorXd> sample(const VonMisesFisher& dist, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    Rng rng(seed);
    VmfCosineSampler marginal(dist.p(), dist.kappa());
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sampleOne(dist, marginal, rng));
    return out;
}

}  // namespace vmfgs
