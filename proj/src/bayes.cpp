#include "vmfgs/bayes.hpp"

#include <cmath>

namespace vmfgs {

std::string stopReasonLabel(StopReason reason) {
    switch (reason) {
        case StopReason::KappaThreshold: return "kappa_threshold";
        case StopReason::IterationBudget: return "iteration_budget";
        case StopReason::None: break;
    }
    return "";
}

InferenceState InferenceState::initial(Eigen::VectorXd mu0, double kappaInit, int p) {
    if (mu0.size() != p) throw DimensionMismatchError("initial direction has wrong dimension");
    VonMisesFisher prior(std::move(mu0), kappaInit);
    const double resultant = besselRatios(p, kappaInit).a;
    return InferenceState{0, std::move(prior), resultant};
}

double successMass(const InferenceState& state, const WMatrix& W) {
    return 0.5 * (1.0 + quadraticMoment(state.prior, W));
}

PosteriorUpdate updateStep(const InferenceState& state, const WMatrix& W, double kappaCap) {
    const auto& prior = state.prior;
    if (W.p != prior.p())
        throw DimensionMismatchError("W dimension does not match the prior");
    if (prior.kappa() <= 0.0)
        throw ZeroKappaError("updateStep needs kappa > 0; seed iteration 0 with kappaInit");

    const BesselRatios r = besselRatios(prior.p(), prior.kappa());
    const double traceW = W.trace();
    const Eigen::VectorXd wMu = W.entries * prior.mu();
    const double muWmu = prior.mu().dot(wMu);

    PosteriorUpdate update;
    update.alpha = 1.0 + (r.bOverK * traceW + r.d * muWmu) / state.resultant;
    update.beta = 2.0 * r.bOverK / state.resultant;
    update.z = 0.5 * (1.0 + r.aOverK * traceW + r.b * muWmu);

    const Eigen::VectorXd direction = update.alpha * prior.mu() + update.beta * wMu;
    const double directionNorm = direction.norm();
    update.muNext = direction / directionNorm;
    update.resultantNext = state.resultant / (2.0 * update.z) * directionNorm;
    update.kappaNext = estimateKappa(update.resultantNext, prior.p(), kappaCap);
    return update;
}

InferenceState advance(const InferenceState& state, const PosteriorUpdate& update,
                       bool carryResultant) {
    VonMisesFisher prior(update.muNext, update.kappaNext);
    const double resultant = carryResultant
                                 ? update.resultantNext
                                 : besselRatios(prior.p(), update.kappaNext).a;
    return InferenceState{state.iteration + 1, std::move(prior), resultant};
}

double convergenceRatio(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                        const Eigen::VectorXd& target) {
    const double denom = target.dot(prev);
    if (denom == 0.0)
        throw OrthogonalStartError(
            "target is orthogonal to the previous mean; the ratio is undefined");
    return target.dot(next) / denom;
}

bool growthCondition(const InferenceState& state, const WMatrix& W) {
    if (W.p != state.prior.p())
        throw DimensionMismatchError("W dimension does not match the prior");
    const double muWmu = state.prior.mu().dot(W.entries * state.prior.mu());
    return muWmu >= W.trace() / static_cast<double>(W.p) - 1e-12;
}

InferenceRun runInference(const VonMisesFisher& init, const WMatrix& W,
                          const StoppingRule& stop, bool carryResultant) {
    if (init.p() != W.p)
        throw DimensionMismatchError("initial distribution does not match W");

    const double kappa0 = init.kappa() > 0.0 ? init.kappa() : stop.kappaInit;
    InferenceState state = InferenceState::initial(init.mu(), kappa0, init.p());

    std::vector<IterationTrace> trace;
    trace.reserve(stop.maxIterations + 1);
    StopReason reason = StopReason::None;
    for (;;) {
        IterationTrace row;
        row.iteration = state.iteration;
        row.fidelity = fidelity(state.prior.mu(), W);
        row.resultant = state.resultant;
        row.kappa = state.prior.kappa();
        row.muWmu = state.prior.mu().dot(W.entries * state.prior.mu());
        row.z = successMass(state, W);

        if (state.prior.kappa() >= stop.kappaMax)
            reason = StopReason::KappaThreshold;
        else if (state.iteration >= stop.maxIterations)
            reason = StopReason::IterationBudget;
        row.stopReason = reason;
        trace.push_back(row);
        if (reason != StopReason::None) break;
        state = advance(state, updateStep(state, W, stop.kappaMax), carryResultant);
    }
    return InferenceRun{std::move(trace), reason, std::move(state)};
}

}  // namespace vmfgs
