#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vmfgs/hamiltonian.hpp"
#include "vmfgs/vmf.hpp"

namespace vmfgs {

inline constexpr double kDefaultKappaInit = 0.001;
inline constexpr int kDefaultMaxIterations = 1000;

/// Termination rule: stop when the concentration reaches kappaMax or the
/// iteration count reaches maxIterations, whichever first. kappaInit seeds
/// the very first step (the update needs kappa > 0 because the coefficients
/// contain A/k and B/k).
struct StoppingRule {
    double kappaMax = kDefaultKappaMax;
    int maxIterations = kDefaultMaxIterations;
    double kappaInit = kDefaultKappaInit;
};

enum class StopReason { None, KappaThreshold, IterationBudget };

std::string stopReasonLabel(StopReason reason);

/// State of the inference at iteration n: the vMF prior and its resultant
/// length R_n = A_p(k_n). R_n is derived from kappa, never free, except
/// under the carry-resultant option where the previous step's exact
/// posterior resultant is kept instead.
struct InferenceState {
    int iteration = 0;
    VonMisesFisher prior;
    double resultant = 0.0;

    static InferenceState initial(Eigen::VectorXd mu0, double kappaInit, int p);
};

/// One Bayesian step: coefficients alpha, beta, the success-outcome mass z,
/// and the moment-matched next parameters.
struct PosteriorUpdate {
    double alpha = 0.0;
    double beta = 0.0;
    double z = 0.0;
    Eigen::VectorXd muNext;
    double resultantNext = 0.0;
    double kappaNext = 0.0;
};

/// z_n = (1 + E_n[psi^T W psi]) / 2, the prior-averaged success probability.
double successMass(const InferenceState& state, const WMatrix& W);

/// The deterministic posterior step:
///   alpha = 1 + (1/R) ((B/k) Tr W + D mu^T W mu),  beta = 2B / (R k),
///   mu'   = (alpha mu + beta W mu) / ||.||,
///   R'    = (R / 2z) ||alpha mu + beta W mu||,
///   k'    = estimateKappa(R') capped at kappaCap.
PosteriorUpdate updateStep(const InferenceState& state, const WMatrix& W,
                           double kappaCap = kDefaultKappaMax);

/// Successor state. By default the resultant is recomputed as A_p(k'),
/// making the moment-matching projection back into the vMF family explicit;
/// carryResultant keeps R' from the update instead (they differ by the
/// kappa estimator's approximation error).
InferenceState advance(const InferenceState& state, const PosteriorUpdate& update,
                       bool carryResultant = false);

/// R_c = (target . next) / (target . prev); >= 1 is the convergence
/// guarantee when the target spans the top eigenspace of W. Throws
/// OrthogonalStartError when target . prev vanishes -- use projection norms
/// for such starts.
double convergenceRatio(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                        const Eigen::VectorXd& target);

/// mu^T W mu >= Tr W / p (within 1e-12): when it holds, the update cannot
/// shrink the resultant length.
bool growthCondition(const InferenceState& state, const WMatrix& W);

/// One row of the run log; schema mirrors the CSV export.
struct IterationTrace {
    int runId = 0;
    int iteration = 0;
    double fidelity = 0.0;
    double resultant = 0.0;
    double kappa = 0.0;
    double muWmu = 0.0;
    double z = 0.0;
    StopReason stopReason = StopReason::None;  // set on the terminal row only
};

struct InferenceRun {
    std::vector<IterationTrace> trace;
    StopReason stopReason;
    InferenceState finalState;
};

/// Iterate updateStep from `init` until the stopping rule fires. The trace
/// holds one row per visited state, iteration 0 first; at most
/// stop.maxIterations update steps are taken.
InferenceRun runInference(const VonMisesFisher& init, const WMatrix& W,
                          const StoppingRule& stop, bool carryResultant = false);

}  // namespace vmfgs
