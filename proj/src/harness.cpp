#include "vmfgs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vmfgs/csv.hpp"
#include "vmfgs/formats.hpp"

namespace vmfgs {

namespace {

// Substream tags for the ensemble's derived Rngs.
constexpr std::uint64_t kHamiltonianStream = 1;
constexpr std::uint64_t kStartStreamBase = 1000;

bool parseBool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ParseError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
    Window check(windowLo, windowHi);  // throws WindowError on bad intervals
    (void)check;
    if (restarts < 1) throw ParseError("restarts must be >= 1");
    if (dim < 1) throw ParseError("dim must be >= 1");
    if (hamiltonianSource == "random" && dim < 2) throw ParseError("random Hamiltonians need dim >= 2");
    if (kappaInit <= 0.0) throw ParseError("kappa_init must be > 0");
    if (kappaMax <= kappaInit) throw ParseError("kappa_max must exceed kappa_init");
    if (maxIterations < 1) throw ParseError("max_iterations must be >= 1");
}

ExperimentConfig ExperimentConfig::fromStream(std::istream& in, const std::string& label) {
    ExperimentConfig config;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto firstChar = line.find_first_not_of(" \t\r");
        if (firstChar == std::string::npos || line[firstChar] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(label + ":" + std::to_string(lineNo) + ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(label + ":" + std::to_string(lineNo) + ": empty key or value");

        try {
            if (key == "dim") config.dim = std::stoi(value);
            else if (key == "window_lo") config.windowLo = std::stod(value);
            else if (key == "window_hi") config.windowHi = std::stod(value);
            else if (key == "restarts") config.restarts = std::stoi(value);
            else if (key == "kappa_init") config.kappaInit = std::stod(value);
            else if (key == "kappa_max") config.kappaMax = std::stod(value);
            else if (key == "max_iterations") config.maxIterations = std::stoi(value);
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "hamiltonian") config.hamiltonianSource = value;
            else if (key == "carry_resultant") config.carryResultant = parseBool(value, key);
            else throw ParseError(label + ":" + std::to_string(lineNo) + ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ParseError(label + ":" + std::to_string(lineNo) + ": bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw ParseError(label + ":" + std::to_string(lineNo) + ": value out of range for '" + key + "'");
        }
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return fromStream(in, path);
}

ComplexHermitian randomHamiltonian(int d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("randomHamiltonian requires d >= 2");
    // Standard complex normal: re and im each N(0, 1/2).
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            g(i, j) = std::complex<double>(s * rng.normal(), s * rng.normal());
    return ComplexHermitian(0.5 * (g + g.adjoint().eval()));
}

ComplexHermitian randomHamiltonian(int d, std::uint64_t seed) {
    Rng rng(seed);
    return randomHamiltonian(d, rng);
}

Eigen::VectorXd randomUnitVector(int p, Rng& rng) {
    if (p < 2) throw std::invalid_argument("randomUnitVector requires p >= 2");
    Eigen::VectorXd v(p);
    double norm = 0.0;
    do {
        for (int i = 0; i < p; ++i) v[i] = rng.normal();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

Eigen::VectorXd randomUnitVector(int p, std::uint64_t seed) {
    Rng rng(seed);
    return randomUnitVector(p, rng);
}

std::vector<AggregateTrace> aggregateRuns(const std::vector<std::vector<IterationTrace>>& runs) {
    std::size_t length = 0;
    for (const auto& run : runs) length = std::max(length, run.size());

    std::vector<AggregateTrace> aggregate;
    aggregate.reserve(length);
    for (std::size_t n = 0; n < length; ++n) {
        AggregateTrace row;
        row.iteration = static_cast<int>(n);
        for (const auto& run : runs) {
            const IterationTrace& src = n < run.size() ? run[n] : run.back();
            row.meanFidelity += src.fidelity;
            row.meanResultant += src.resultant;
            row.meanKappa += src.kappa;
            if (n < run.size()) ++row.runCount;
        }
        const auto total = static_cast<double>(runs.size());
        row.meanFidelity /= total;
        row.meanResultant /= total;
        row.meanKappa /= total;
        aggregate.push_back(row);
    }
    return aggregate;
}

EnsembleResult runEnsemble(const ExperimentConfig& config, int threadCap) {
    config.validate();
    Rng root(config.seed);

    ComplexHermitian H = [&] {
        if (config.hamiltonianSource == "random") {
            Rng hamRng = root.derive(kHamiltonianStream);
            return randomHamiltonian(config.dim, hamRng);
        }
        return loadHamiltonian(config.hamiltonianSource);
    }();

    const Window window = config.window();
    const ScaledHamiltonian scaled = scaleToWindow(eigendecompose(H), window);
    EnsembleResult result;
    result.w = buildW(scaled, window.withinConvergentRange());

    const StoppingRule stop{config.kappaMax, config.maxIterations, config.kappaInit};
    const int p = result.w.p;
    result.runs.resize(config.restarts);

    auto runOne = [&](int runId) {
        Rng startRng = root.derive(kStartStreamBase + static_cast<std::uint64_t>(runId));
        const VonMisesFisher init(randomUnitVector(p, startRng), config.kappaInit);
        InferenceRun run = runInference(init, result.w, stop, config.carryResultant);
        for (auto& row : run.trace) row.runId = runId;
        result.runs[runId] = std::move(run.trace);
    };

    unsigned workers = threadCap > 0 ? static_cast<unsigned>(threadCap)
                                     : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(config.restarts));
    if (workers <= 1) {
        for (int r = 0; r < config.restarts; ++r) {
            try {
                runOne(r);
            } catch (const std::exception& e) {
                throw std::runtime_error("ensemble run " + std::to_string(r) + " (seed stream " +
                                         std::to_string(kStartStreamBase + r) +
                                         ") failed: " + e.what());
            }
        }
    } else {
        // A failing run aborts the whole ensemble: workers record the first
        // failure and the run that caused it, and it is rethrown after join.
        std::mutex failureLock;
        std::exception_ptr failure;
        int failedRun = -1;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned wkr = 0; wkr < workers; ++wkr) {
            pool.emplace_back([&, wkr] {
                for (int r = static_cast<int>(wkr); r < config.restarts;
                     r += static_cast<int>(workers)) {
                    try {
                        runOne(r);
                    } catch (...) {
                        std::lock_guard<std::mutex> guard(failureLock);
                        if (!failure) {
                            failure = std::current_exception();
                            failedRun = r;
                        }
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) {
            try {
                std::rethrow_exception(failure);
            } catch (const std::exception& e) {
                throw std::runtime_error("ensemble run " + std::to_string(failedRun) +
                                         " (seed stream " +
                                         std::to_string(kStartStreamBase + failedRun) +
                                         ") failed: " + e.what());
            }
        }
    }

    result.aggregate = aggregateRuns(result.runs);
    return result;
}

void writeRunsCsv(const std::vector<std::vector<IterationTrace>>& runs, std::ostream& out) {
    out << "run_id,iteration,fidelity,resultant,kappa,mu_w_mu,z,stop_reason\n";
    for (const auto& run : runs) {
        for (const auto& row : run) {
            out << row.runId << ',' << row.iteration << ',' << csv::formatDouble(row.fidelity)
                << ',' << csv::formatDouble(row.resultant) << ',' << csv::formatDouble(row.kappa)
                << ',' << csv::formatDouble(row.muWmu) << ',' << csv::formatDouble(row.z) << ','
                << stopReasonLabel(row.stopReason) << '\n';
        }
    }
}

void writeAggregateCsv(const std::vector<AggregateTrace>& aggregate, std::ostream& out) {
    out << "iteration,mean_fidelity,mean_resultant,mean_kappa,run_count\n";
    for (const auto& row : aggregate) {
        out << row.iteration << ',' << csv::formatDouble(row.meanFidelity) << ','
            << csv::formatDouble(row.meanResultant) << ',' << csv::formatDouble(row.meanKappa)
            << ',' << row.runCount << '\n';
    }
}

void exportTraces(const EnsembleResult& result, const std::string& runsPath,
                  const std::string& aggregatePath) {
    std::ofstream runsOut(runsPath, std::ios::binary);
    if (!runsOut) throw IoError("cannot write " + runsPath);
    writeRunsCsv(result.runs, runsOut);

    std::ofstream aggOut(aggregatePath, std::ios::binary);
    if (!aggOut) throw IoError("cannot write " + aggregatePath);
    writeAggregateCsv(result.aggregate, aggOut);
}

}  // namespace vmfgs
