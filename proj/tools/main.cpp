#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "vmfgs/bayes.hpp"
#include "vmfgs/csv.hpp"
#include "vmfgs/formats.hpp"
#include "vmfgs/harness.hpp"
#include "vmfgs/measurement.hpp"
#include "vmfgs/vmf.hpp"

namespace {

using namespace vmfgs;

int ensembleThreadCap() {
    // VMF_EIGENSOLVER_THREADS caps ensemble parallelism; 0 or unset = auto.
    const char* env = std::getenv("VMF_EIGENSOLVER_THREADS");
    if (!env) return 0;
    const int cap = std::atoi(env);
    return cap > 0 ? cap : 0;
}

ScaledHamiltonian scaleFromFile(const std::string& path, double windowLo, double windowHi,
                                std::optional<std::pair<double, double>> bounds) {
    const ComplexHermitian H = loadHamiltonian(path);
    const Window window(windowLo, windowHi);
    const ScaledHamiltonian scaled = scaleToWindow(eigendecompose(H), window, bounds);
    if (scaled.degenerate)
        std::cerr << "warning: constant spectrum; all phases pinned to window_lo\n";
    return scaled;
}

int cmdRun(const std::string& configPath, const std::string& outDir) {
    const ExperimentConfig config = ExperimentConfig::fromFile(configPath);
    std::filesystem::create_directories(outDir);
    if (config.windowHi > kPi / 2.0 + 1e-15)
        std::cerr << "warning: window exceeds pi/2; the spectral bound behind the "
                     "convergence guarantee may not hold\n";

    const EnsembleResult result = runEnsemble(config, ensembleThreadCap());
    const auto runsPath = (std::filesystem::path(outDir) / "runs.csv").string();
    const auto aggregatePath = (std::filesystem::path(outDir) / "aggregate.csv").string();
    exportTraces(result, runsPath, aggregatePath);

    double meanFinalFidelity = 0.0;
    std::map<std::string, int> reasons;
    for (const auto& run : result.runs) {
        meanFinalFidelity += run.back().fidelity;
        ++reasons[stopReasonLabel(run.back().stopReason)];
    }
    meanFinalFidelity /= static_cast<double>(result.runs.size());

    std::cout << "runs: " << result.runs.size() << "\n";
    std::cout << "mean_final_fidelity: " << csv::formatDouble(meanFinalFidelity) << "\n";
    for (const auto& [reason, count] : reasons)
        std::cout << "stop_" << reason << ": " << count << "\n";
    std::cout << "wrote: " << runsPath << "\n";
    std::cout << "wrote: " << aggregatePath << "\n";
    return 0;
}

int cmdSpectrum(const std::string& hamiltonianPath, double windowLo, double windowHi,
                std::optional<std::pair<double, double>> bounds) {
    const ScaledHamiltonian scaled = scaleFromFile(hamiltonianPath, windowLo, windowHi, bounds);
    const Eigen::VectorXd phases = scaled.phases();
    std::cout << "index,eigenvalue,phase,cosine\n";
    for (int n = 0; n < scaled.dim(); ++n) {
        std::cout << n << ',' << csv::formatDouble(scaled.spectrum.eigenvalues[n]) << ','
                  << csv::formatDouble(phases[n]) << ','
                  << csv::formatDouble(std::cos(phases[n])) << '\n';
    }
    std::cout << "# ground_cosine=" << csv::formatDouble(std::cos(phases.minCoeff())) << "\n";
    return 0;
}

int cmdBuildW(const std::string& hamiltonianPath, double windowLo, double windowHi,
              bool permissive, const std::string& outPath) {
    const ScaledHamiltonian scaled = scaleFromFile(hamiltonianPath, windowLo, windowHi, std::nullopt);
    const WMatrix W = buildW(scaled, !permissive);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!outPath.empty()) {
        file.open(outPath, std::ios::binary);
        if (!file) throw IoError("cannot write " + outPath);
        out = &file;
    }
    *out << "# p=" << W.p << " ground_cosine=" << csv::formatDouble(W.groundCosine)
         << " trace=" << csv::formatDouble(W.trace()) << "\n";
    for (int i = 0; i < W.p; ++i) {
        for (int j = 0; j < W.p; ++j)
            *out << (j ? "," : "") << csv::formatDouble(W.entries(i, j));
        *out << '\n';
    }
    return 0;
}

int cmdSampleVmf(int p, double kappa, const std::string& muPath, bool north, int n,
                 std::uint64_t seed, const std::string& outPath) {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    Eigen::VectorXd mu;
    if (north) {
        mu = Eigen::VectorXd::Zero(p);
        mu[0] = 1.0;
    } else {
        mu = loadRealVector(muPath);
        if (mu.size() != p) throw DimensionMismatchError("mean direction length does not match p");
    }
    const VonMisesFisher dist(mu, kappa);  // NonUnitStateError on bad mu
    const auto draws = sample(dist, n, seed);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!outPath.empty()) {
        file.open(outPath, std::ios::binary);
        if (!file) throw IoError("cannot write " + outPath);
        out = &file;
    }
    for (const auto& draw : draws) {
        for (int i = 0; i < p; ++i) *out << (i ? "," : "") << csv::formatDouble(draw[i]);
        *out << '\n';
    }
    const MeanEstimate fit = mleMean(draws);
    *out << "# mu_hat";
    for (int i = 0; i < p; ++i) *out << ',' << csv::formatDouble(fit.mu[i]);
    *out << "\n# resultant," << csv::formatDouble(fit.resultant) << "\n";
    *out << "# kappa_hat," << csv::formatDouble(estimateKappa(fit.resultant, p)) << "\n";
    return 0;
}

int cmdMeasure(const std::string& hamiltonianPath, const std::string& statePath, double phase,
               long long shots, std::uint64_t seed, double windowLo, double windowHi) {
    const ScaledHamiltonian scaled = scaleFromFile(hamiltonianPath, windowLo, windowHi, std::nullopt);
    const Eigen::VectorXcd psi = loadComplexVectorJson(statePath);
    const OutcomeProbabilities prob = outcomeProbability(scaled, psi, phase);
    const OutcomeTally tally = sampleOutcomes(prob.p0, shots, seed);
    const double rate = tally.successRate();
    const double se = std::sqrt(prob.p0 * (1.0 - prob.p0) / static_cast<double>(shots));

    std::cout << "phase,shots,successes,p0_exact\n";
    std::cout << csv::formatDouble(phase) << ',' << shots << ',' << tally.successes << ','
              << csv::formatDouble(prob.p0) << '\n';
    std::cout << "# empirical_rate=" << csv::formatDouble(rate)
              << " standard_error=" << csv::formatDouble(se) << "\n";
    return 0;
}

int cmdRandomH(int dim, std::uint64_t seed, const std::string& outPath) {
    const ComplexHermitian H = randomHamiltonian(dim, seed);
    saveHamiltonianJson(H, outPath);
    std::cout << "wrote: " << outPath << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian ground-state search with the von Mises-Fisher distribution"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run an experiment config and export trace CSVs");
    std::string configPath, outDir;
    run->add_option("--config", configPath, "experiment config file")->required();
    run->add_option("--out", outDir, "output directory for runs.csv and aggregate.csv")->required();

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "print eigenvalues, scaled phases and cosines");
    std::string spectrumHam;
    double sWinLo = 0.1, sWinHi = kPi / 2.0;
    std::optional<double> boundsLo, boundsHi;
    spectrum->add_option("hamiltonian", spectrumHam, "Hamiltonian file (JSON or Pauli)")->required();
    spectrum->add_option("--window-lo", sWinLo, "phase window lower edge");
    spectrum->add_option("--window-hi", sWinHi, "phase window upper edge");
    spectrum->add_option("--bounds-lo", boundsLo, "eigenvalue lower bound override");
    spectrum->add_option("--bounds-hi", boundsHi, "eigenvalue upper bound override");

    // build-w
    auto* buildw = app.add_subcommand("build-w", "assemble the real quadratic form W");
    std::string buildwHam, buildwOut;
    double bWinLo = 0.1, bWinHi = kPi / 2.0;
    bool permissive = false;
    buildw->add_option("hamiltonian", buildwHam, "Hamiltonian file (JSON or Pauli)")->required();
    buildw->add_option("--window-lo", bWinLo, "phase window lower edge");
    buildw->add_option("--window-hi", bWinHi, "phase window upper edge");
    buildw->add_flag("--permissive", permissive, "allow negative cosines (window beyond pi/2)");
    buildw->add_option("--out", buildwOut, "write CSV here instead of stdout");

    // sample-vmf
    auto* sampleVmf = app.add_subcommand("sample-vmf", "draw from a von Mises-Fisher distribution");
    int vmfP = 4, vmfN = 0;
    double vmfKappa = 0.0;
    std::string muPath;
    bool north = false;
    std::uint64_t vmfSeed = 0;
    std::string vmfOut;
    sampleVmf->add_option("--p", vmfP, "ambient dimension")->required();
    sampleVmf->add_option("--kappa", vmfKappa, "concentration")->required();
    sampleVmf->add_option("--n", vmfN, "number of samples")->required();
    sampleVmf->add_option("--seed", vmfSeed, "random seed");
    auto* muOpt = sampleVmf->add_option("--mu", muPath, "mean direction file (whitespace reals)");
    sampleVmf->add_flag("--north", north, "use e_1 as the mean direction")->excludes(muOpt);
    sampleVmf->add_option("--out", vmfOut, "write CSV here instead of stdout");

    // measure
    auto* measure = app.add_subcommand("measure", "ancilla measurement probabilities and shots");
    std::string measureHam, measureState;
    double phase = 0.0;
    long long shots = 100000;
    std::uint64_t measureSeed = 0;
    double mWinLo = 0.1, mWinHi = kPi / 2.0;
    measure->add_option("hamiltonian", measureHam, "Hamiltonian file")->required();
    measure->add_option("state", measureState, "state file {\"re\": [...], \"im\": [...]}")->required();
    measure->add_option("--phase", phase, "measurement phase in radians");
    measure->add_option("--shots", shots, "shot count");
    measure->add_option("--seed", measureSeed, "random seed");
    measure->add_option("--window-lo", mWinLo, "phase window lower edge");
    measure->add_option("--window-hi", mWinHi, "phase window upper edge");

    // random-h
    auto* randomH = app.add_subcommand("random-h", "write a seeded random Hermitian matrix");
    int rhDim = 2;
    std::uint64_t rhSeed = 0;
    std::string rhOut;
    randomH->add_option("--dim", rhDim, "matrix dimension")->required();
    randomH->add_option("--seed", rhSeed, "random seed");
    randomH->add_option("--out", rhOut, "output JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmdRun(configPath, outDir);
        if (*spectrum) {
            std::optional<std::pair<double, double>> bounds;
            if (boundsLo.has_value() != boundsHi.has_value())
                throw std::invalid_argument("--bounds-lo and --bounds-hi must be given together");
            if (boundsLo) bounds = std::make_pair(*boundsLo, *boundsHi);
            return cmdSpectrum(spectrumHam, sWinLo, sWinHi, bounds);
        }
        if (*buildw) return cmdBuildW(buildwHam, bWinLo, bWinHi, permissive, buildwOut);
        if (*sampleVmf) {
            if (!north && muPath.empty())
                throw std::invalid_argument("sample-vmf needs --mu FILE or --north");
            return cmdSampleVmf(vmfP, vmfKappa, muPath, north, vmfN, vmfSeed, vmfOut);
        }
        if (*measure)
            return cmdMeasure(measureHam, measureState, phase, shots, measureSeed, mWinLo, mWinHi);
        if (*randomH) return cmdRandomH(rhDim, rhSeed, rhOut);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable: a subcommand is required
}
