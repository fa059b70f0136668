#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmfgs/bayes.hpp"
#include "vmfgs/hamiltonian.hpp"

namespace vmfgs {

/// Flat key = value experiment description. `hamiltonian` is either the
/// literal "random" or a path (dense JSON or Pauli-sum text). Unknown keys
/// are rejected.
struct ExperimentConfig {
    std::string hamiltonianSource = "random";
    int dim = 2;
    double windowLo = 0.1;
    double windowHi = kPi / 2.0;
    int restarts = 100;
    double kappaInit = kDefaultKappaInit;
    double kappaMax = kDefaultKappaMax;
    int maxIterations = kDefaultMaxIterations;
    std::uint64_t seed = 0;
    bool carryResultant = false;

    Window window() const { return Window(windowLo, windowHi); }
    void validate() const;

    static ExperimentConfig fromFile(const std::string& path);
    static ExperimentConfig fromStream(std::istream& in, const std::string& label);
};

/// GUE-style draw: H = (G + G^dagger) / 2 with independent standard
/// complex-normal entries in G. Deterministic per seed.
ComplexHermitian randomHamiltonian(int d, std::uint64_t seed);
ComplexHermitian randomHamiltonian(int d, Rng& rng);

/// Uniform direction on S^{p-1} via normalized isotropic normals.
Eigen::VectorXd randomUnitVector(int p, std::uint64_t seed);
Eigen::VectorXd randomUnitVector(int p, Rng& rng);

/// Ensemble averages at one iteration index. Runs that stopped earlier are
/// held at their terminal values (carry-forward); runCount records how many
/// runs were still active — i.e. had not yet emitted their terminal row
/// before this iteration.
struct AggregateTrace {
    int iteration = 0;
    double meanFidelity = 0.0;
    double meanResultant = 0.0;
    double meanKappa = 0.0;
    int runCount = 0;
};

struct EnsembleResult {
    std::vector<std::vector<IterationTrace>> runs;  // indexed by runId
    std::vector<AggregateTrace> aggregate;
    WMatrix w;
};

/// The full experiment protocol: build (or load) one Hamiltonian, scale it
/// into the window, and run `restarts` independent inferences from uniform
/// random starts. Runs execute on up to `threadCap` workers (0 = hardware
/// concurrency); results and aggregates are identical for every thread
/// count because each run owns an Rng substream derived from (seed, runId).
EnsembleResult runEnsemble(const ExperimentConfig& config, int threadCap = 0);

/// Fold per-run traces into carry-forward ensemble means.
std::vector<AggregateTrace> aggregateRuns(const std::vector<std::vector<IterationTrace>>& runs);

/// CSV schemas:
///   runs:      run_id,iteration,fidelity,resultant,kappa,mu_w_mu,z,stop_reason
///   aggregate: iteration,mean_fidelity,mean_resultant,mean_kappa,run_count
/// Floats are written with 17 significant digits and re-parse bit-identically.
void writeRunsCsv(const std::vector<std::vector<IterationTrace>>& runs, std::ostream& out);
void writeAggregateCsv(const std::vector<AggregateTrace>& aggregate, std::ostream& out);
void exportTraces(const EnsembleResult& result, const std::string& runsPath,
                  const std::string& aggregatePath);

}  // namespace vmfgs
