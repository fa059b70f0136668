#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vmfgs/vmf.hpp"

using namespace vmfgs;

namespace {

const std::vector<int> kGridP = {2, 4, 8, 64, 2048};
const std::vector<double> kGridKappa = {1e-6, 0.01, 1.0, 10.0, 700.0, 1e4};

WMatrix isotropicW(int p, double c) {
    WMatrix W;
    W.p = p;
    W.entries = c * Eigen::MatrixXd::Identity(p, p);
    W.cosines = Eigen::VectorXd::Constant(p / 2, c);
    W.groundCosine = c;
    W.groundProjector = Eigen::MatrixXd::Identity(p, p);
    return W;
}

WMatrix diagonalW(const Eigen::VectorXd& diag, int groundPlaneSize) {
    WMatrix W;
    W.p = static_cast<int>(diag.size());
    W.entries = diag.asDiagonal();
    W.groundCosine = diag.maxCoeff();
    W.groundProjector = Eigen::MatrixXd::Zero(W.p, W.p);
    for (int i = 0; i < groundPlaneSize; ++i) W.groundProjector(i, i) = 1.0;
    return W;
}

Eigen::VectorXd unitVector(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v / v.norm();
}

}  // namespace

TEST_CASE("bessel ratios match the power-series oracle at p = 4, k = 1") {
    const BesselRatios r = besselRatios(4, 1.0);
    const auto s = oracles::ratiosFromSeries(4, 1.0);
    CHECK(r.a == doctest::Approx(s.a).epsilon(1e-13));
    CHECK(r.b == doctest::Approx(s.b).epsilon(1e-13));
    CHECK(r.d == doctest::Approx(s.d).epsilon(1e-13));

    // Worked values from the series I_1(1) = 0.565159, I_2(1) = 0.135748,
    // I_3(1) = 0.022168, I_4(1) = 0.002737.
    CHECK(r.a == doctest::Approx(0.240194).epsilon(1e-5));
    CHECK(r.b == doctest::Approx(0.039225).epsilon(2e-4));
    CHECK(r.d == doctest::Approx(0.004843).epsilon(2e-4));
    CHECK(4.0 * r.a / 1.0 + r.b == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("bessel ratios against the series across moderate (p, k)") {
    for (int p : {2, 3, 4, 5, 8, 16}) {
        for (double k : {0.01, 0.5, 1.0, 5.0, 20.0}) {
            const BesselRatios r = besselRatios(p, k);
            const auto s = oracles::ratiosFromSeries(p, k);
            CHECK(r.a == doctest::Approx(s.a).epsilon(1e-12));
            CHECK(r.b == doctest::Approx(s.b).epsilon(1e-11));
            CHECK(r.d == doctest::Approx(s.d).epsilon(1e-10));
        }
    }
}

TEST_CASE("bessel ratios match frozen 50-digit reference values at extreme (p, k)") {
    // Reference values computed once with 50-digit arithmetic; these pin the
    // continued fraction's absolute accuracy where the power series cannot go.
    struct Ref {
        int p;
        double k, a, b, d;
    };
    const Ref refs[] = {
        {2, 1e4, 0.99994999874987498, 0.99980001000025003, 0.99955007874587488},
        {4, 700.0, 0.99785790925861473, 0.99429795480423649, 0.9893353553602927},
        {2048, 700.0, 0.30915528143301723, 0.095499976607401009, 0.029476778511342849},
        {2048, 1e4, 0.90286954256249881, 0.81509231768320024, 0.73577561743744276},
        {64, 1e-6, 1.5624999999999996e-8, 2.3674242424242413e-16, 3.4815062388591777e-24},
    };
    for (const Ref& ref : refs) {
        const BesselRatios r = besselRatios(ref.p, ref.k);
        CHECK(r.a == doctest::Approx(ref.a).epsilon(1e-13));
        CHECK(r.b == doctest::Approx(ref.b).epsilon(1e-13));
        CHECK(r.d == doctest::Approx(ref.d).epsilon(1e-12));
    }
}

TEST_CASE("k = 0 is the uniform limit") {
    for (int p : kGridP) {
        const BesselRatios r = besselRatios(p, 0.0);
        CHECK(r.a == 0.0);
        CHECK(r.b == 0.0);
        CHECK(r.d == 0.0);
        CHECK(r.aOverK == doctest::Approx(1.0 / p).epsilon(1e-15));
        CHECK(r.bOverK == 0.0);
    }
}

TEST_CASE("large-k asymptote: A(700) at p = 4 approaches 1 - (p-1)/(2k)") {
    const BesselRatios r = besselRatios(4, 700.0);
    CHECK(std::abs(r.a - 0.997857142857) < 1e-6);
    CHECK(r.a < 1.0);
}

TEST_CASE("normalization and recurrence identities over the full grid") {
    for (int p : kGridP) {
        for (double k : kGridKappa) {
            const BesselRatios r = besselRatios(p, k);
            CHECK(std::abs(p * r.aOverK + r.b - 1.0) <= 1e-12);

            // Recurrences compare against the scale of their largest term:
            // at small k the subtractions cancel almost exactly and a
            // relative-to-result check is not representable in doubles.
            const double bViaRecurrence = 1.0 - (p / k) * r.a;
            const double bScale = std::max({1.0, (p / k) * r.a, std::abs(r.b)});
            CHECK(std::abs(r.b - bViaRecurrence) <= 1e-10 * bScale);

            const double dViaRecurrence = r.a - ((p + 2.0) / k) * r.b;
            const double dScale = std::max({std::abs(r.a), ((p + 2.0) / k) * r.b, std::abs(r.d)});
            CHECK(std::abs(r.d - dViaRecurrence) <= 1e-10 * dScale);

            CHECK(r.a >= 0.0);
            CHECK(r.a < 1.0);
            CHECK(r.b >= 0.0);
            CHECK(r.d >= 0.0);
        }
    }
}

TEST_CASE("A is strictly increasing in k") {
    for (int p : {2, 4, 8, 64}) {
        double previous = -1.0;
        for (double k : {1e-6, 1e-3, 0.1, 1.0, 5.0, 30.0, 200.0, 700.0, 5e3, 1e4}) {
            const double a = besselRatios(p, k).a;
            CHECK(a > previous);
            previous = a;
        }
    }
}

TEST_CASE("logBesselI agrees with the series at integer and half-integer orders") {
    for (int twiceNu : {0, 1, 2, 3, 4, 6, 9, 12}) {
        for (double k : {0.5, 1.0, 5.0, 19.0, 25.0, 100.0}) {
            const double expected = std::log(oracles::besselISeries(twiceNu / 2.0, k));
            CHECK(logBesselI(twiceNu, k) == doctest::Approx(expected).epsilon(1e-11));
        }
    }

    // Tiny and denormal-range arguments stay finite (log-domain series).
    CHECK(std::isfinite(logBesselI(8, 1e-8)));
    CHECK(std::isfinite(logBesselI(8, 1e-300)));
    CHECK(logBesselI(8, 1e-300) < -1000.0);
    CHECK(logBesselI(0, 1e-300) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("logDensity: uniform constant, maximum at mu, exact exponent differences") {
    const VonMisesFisher uniform(unitVector({0, 0, 1}), 0.0);
    const double c = logDensity(uniform, unitVector({1, 0, 0}));
    CHECK(c == doctest::Approx(-std::log(4.0 * kPi)).epsilon(1e-12));
    CHECK(logDensity(uniform, unitVector({0, 1, 1})) == doctest::Approx(c).epsilon(1e-12));

    const VonMisesFisher sharp(unitVector({1, 0, 0}), 2.0);
    const double atMu = logDensity(sharp, unitVector({1, 0, 0}));
    Rng rng(5150);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd psi(3);
        for (int j = 0; j < 3; ++j) psi[j] = rng.normal();
        psi.normalize();
        CHECK(logDensity(sharp, psi) <= atMu + 1e-12);
    }

    // k (mu.psi) differences are exact: 2 * (0.5 - 0) = 1.
    const Eigen::VectorXd at05 = unitVector({0.5, std::sqrt(0.75), 0.0});
    const Eigen::VectorXd at00 = unitVector({0.0, 1.0, 0.0});
    CHECK(logDensity(sharp, at05) - logDensity(sharp, at00) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(logDensity(sharp, Eigen::VectorXd::Ones(4)), DimensionMismatchError);
}

TEST_CASE("logDensity stays finite deep in the overflow regime") {
    // Raw I_nu(700) at p = 2048 overflows doubles by hundreds of orders of
    // magnitude; the log-domain path must not.
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2048);
    mu[0] = 1.0;
    const VonMisesFisher dist(mu, 700.0);
    const double atMu = logDensity(dist, mu);
    CHECK(std::isfinite(atMu));
    Eigen::VectorXd other = Eigen::VectorXd::Zero(2048);
    other[1] = 1.0;
    CHECK(std::isfinite(logDensity(dist, other)));
    CHECK(logDensity(dist, other) < atMu);

    const VonMisesFisher huge(mu, 1e4);
    CHECK(std::isfinite(logDensity(huge, mu)));
}

TEST_CASE("logDensity integrates to one (Monte Carlo on S^2)") {
    const VonMisesFisher dist(unitVector({0.3, -0.8, 0.52}), 2.0);
    Rng rng(6006);
    const double area = 4.0 * kPi;
    std::vector<double> values;
    values.reserve(200000);
    for (int i = 0; i < 200000; ++i) {
        Eigen::VectorXd psi(3);
        for (int j = 0; j < 3; ++j) psi[j] = rng.normal();
        psi.normalize();
        values.push_back(std::exp(logDensity(dist, psi)) * area);
    }
    const auto stat = oracles::meanStderr(values);
    CHECK(std::abs(stat.mean - 1.0) <= 4.0 * stat.stderrOfMean);
}

TEST_CASE("meanResultant: uniform gives zero, worked value at p = 4") {
    CHECK(meanResultant(VonMisesFisher(unitVector({0, 1, 0, 0}), 0.0)).norm() == 0.0);

    const Eigen::VectorXd m = meanResultant(VonMisesFisher(unitVector({1, 0, 0, 0}), 1.0));
    CHECK(m[0] == doctest::Approx(0.240194).epsilon(1e-5));
    CHECK(m.tail(3).norm() == 0.0);
}

TEST_CASE("quadraticMoment: isotropic exactness, uniform limit, worked value") {
    const VonMisesFisher dist(unitVector({1, 1, 1, 1}), 1.0);
    CHECK(quadraticMoment(dist, isotropicW(4, 0.37)) == doctest::Approx(0.37).epsilon(1e-13));

    const VonMisesFisher nearUniform(unitVector({1, 1, 1, 1}), 1e-9);
    const WMatrix W = diagonalW(Eigen::Vector4d(0.8660254, 0.8660254, 0.0, 0.0), 2);
    CHECK(quadraticMoment(nearUniform, W) == doctest::Approx(W.trace() / 4.0).epsilon(1e-9));

    CHECK(quadraticMoment(dist, W) == doctest::Approx(0.433014).epsilon(2e-5));

    CHECK_THROWS_AS(quadraticMoment(dist, isotropicW(6, 1.0)), DimensionMismatchError);
}

TEST_CASE("cubicContraction: isotropic and eigenvector cases stay collinear with mu") {
    const int p = 4;
    const double c = 0.61;
    const VonMisesFisher dist(unitVector({2, -1, 0.5, 3}), 2.5);
    const BesselRatios r = besselRatios(p, 2.5);

    const Eigen::VectorXd iso = cubicContraction(dist, isotropicW(p, c));
    const double expectedIso = 2.0 * r.bOverK * c + r.bOverK * p * c + r.d * c;
    CHECK(iso.isApprox(expectedIso * dist.mu(), 1e-12));

    const WMatrix W = diagonalW(Eigen::Vector4d(0.9, 0.9, 0.2, 0.2), 2);
    const VonMisesFisher onEig(unitVector({1, 0, 0, 0}), 2.5);
    const Eigen::VectorXd cube = cubicContraction(onEig, W);
    const double lambda = 0.9;
    const double expected = 2.0 * r.bOverK * lambda + r.bOverK * W.trace() + r.d * lambda;
    CHECK(cube.isApprox(expected * onEig.mu(), 1e-12));
}

TEST_CASE("moment formulas agree with the sampler (p = 4, k = 1)") {
    const int p = 4;
    const VonMisesFisher dist(unitVector({1, 1, 1, 1}), 1.0);
    const WMatrix W = diagonalW(Eigen::Vector4d(0.8660254, 0.8660254, 0.0, 0.0), 2);
    const int n = 200000;
    const auto draws = sample(dist, n, 20250808);

    const Eigen::VectorXd expectedMean = meanResultant(dist);
    const double expectedQuad = quadraticMoment(dist, W);
    const Eigen::VectorXd expectedCubic = cubicContraction(dist, W);

    for (int comp = 0; comp < p; ++comp) {
        std::vector<double> xs, cs;
        xs.reserve(n);
        cs.reserve(n);
        for (const auto& psi : draws) {
            xs.push_back(psi[comp]);
            cs.push_back(psi.dot(W.entries * psi) * psi[comp]);
        }
        const auto statMean = oracles::meanStderr(xs);
        CHECK(std::abs(statMean.mean - expectedMean[comp]) <= 5.0 * statMean.stderrOfMean);
        const auto statCubic = oracles::meanStderr(cs);
        CHECK(std::abs(statCubic.mean - expectedCubic[comp]) <= 5.0 * statCubic.stderrOfMean);
    }
    std::vector<double> quads;
    quads.reserve(n);
    for (const auto& psi : draws) quads.push_back(psi.dot(W.entries * psi));
    const auto statQuad = oracles::meanStderr(quads);
    CHECK(std::abs(statQuad.mean - expectedQuad) <= 5.0 * statQuad.stderrOfMean);
}

TEST_CASE("estimateKappa: exact values, cap, monotonicity, round trip") {
    CHECK(estimateKappa(0.0, 7) == 0.0);
    CHECK(estimateKappa(0.5, 4) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(estimateKappa(0.999999999, 4) == kDefaultKappaMax);
    CHECK(estimateKappa(1.0, 4) == kDefaultKappaMax);
    CHECK(estimateKappa(0.3, 8, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(estimateKappa(-0.1, 4), ResultantRangeError);

    double previous = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = static_cast<double>(i) / 1000.0;
        const double k = estimateKappa(r, 4);
        CHECK(k >= previous);
        previous = k;
    }

    // Round trip through the first moment: A(k = 1) -> k_hat = 1.0049, under
    // 1% off. The estimator is an approximation whose error peaks near
    // k ~ p (3.8% at k = 5 here), so the wider sweep gets the looser bound.
    const double khat = estimateKappa(besselRatios(4, 1.0).a, 4);
    CHECK(std::abs(khat - 1.0) < 0.01);
    CHECK(khat == doctest::Approx(1.0049).epsilon(1e-3));
    for (double k : {0.5, 2.0, 5.0, 10.0, 100.0}) {
        const double rt = estimateKappa(besselRatios(4, k).a, 4);
        CHECK(std::abs(rt - k) / k < 0.05);
    }
}

TEST_CASE("mleMean: identical, antipodal and sampled inputs") {
    const Eigen::VectorXd e1 = unitVector({1, 0, 0, 0});
    const auto identical = mleMean({e1, e1});
    CHECK(identical.mu.isApprox(e1, 1e-12));
    CHECK(identical.resultant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(identical.zeroResultant);

    const auto antipodal = mleMean({e1, -e1});
    CHECK(antipodal.zeroResultant);
    CHECK(antipodal.resultant == 0.0);

    CHECK_THROWS_AS(mleMean({}), EmptySampleError);
    CHECK_THROWS_AS(mleMean({2.0 * e1}), NonUnitStateError);

    const Eigen::VectorXd mu = unitVector({0.2, -0.5, 1.0, 0.7});
    const auto draws = sample(VonMisesFisher(mu, 5.0), 100000, 99);
    const auto fit = mleMean(draws);
    CHECK(fit.mu.dot(mu) >= 0.999);
}

TEST_CASE("sample: determinism, unit norm, uniform and concentrated regimes") {
    const Eigen::VectorXd mu = unitVector({0, 0, 1, 0});
    const VonMisesFisher dist(mu, 50.0);

    const auto a = sample(dist, 3, 12345);
    const auto b = sample(dist, 3, 12345);
    REQUIRE(a.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK((a[i] - b[i]).norm() == 0.0);  // bitwise identical
    const auto c = sample(dist, 3, 54321);
    CHECK((a[0] - c[0]).norm() != 0.0);

    for (const auto& psi : a) CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);

    const auto concentrated = mleMean(sample(dist, 20000, 777));
    CHECK(concentrated.mu.dot(mu) >= 0.99);

    const auto uniformDraws = sample(VonMisesFisher(mu, 0.0), 100000, 31415);
    Eigen::VectorXd bar = Eigen::VectorXd::Zero(4);
    for (const auto& psi : uniformDraws) bar += psi;
    CHECK((bar / 100000.0).norm() <= 0.02);

    CHECK_THROWS_AS(sample(dist, 0, 1), std::invalid_argument);
}

TEST_CASE("marginal cosine at p = 2, k = 0 is cos(pi u) exactly") {
    // For p = 2 the colatitude density is flat, so the inverse CDF is linear.
    const VmfCosineSampler sampler(2, 0.0);
    for (double u : {0.01, 0.2, 0.5, 0.8, 0.99}) {
        CHECK(sampler.cosine(u) == doctest::Approx(std::cos(kPi * u)).epsilon(1e-9));
    }
}

TEST_CASE("marginal cosine mean matches A(k) for assorted (p, k)") {
    for (auto [p, k] : std::vector<std::pair<int, double>>{{2, 1.5}, {3, 0.7}, {4, 1.0},
                                                           {8, 20.0}, {16, 300.0}, {64, 700.0}}) {
        const VmfCosineSampler sampler(p, k);
        Rng rng(1000 + p);
        std::vector<double> ts;
        ts.reserve(50000);
        for (int i = 0; i < 50000; ++i) ts.push_back(sampler.cosine(rng.uniform()));
        const auto stat = oracles::meanStderr(ts);
        const double expected = besselRatios(p, k).a;
        CHECK(std::abs(stat.mean - expected) <= 5.0 * stat.stderrOfMean);
    }
}

TEST_CASE("inverse-CDF quantiles agree with the quadrature CDF deterministically") {
    // F_oracle(theta(u)) must return u itself: a noise-free check of the
    // whole inverse map at the quadrature oracle's accuracy (~1e-8 for
    // moderate concentrations).
    for (auto [p, k] : std::vector<std::pair<int, double>>{{2, 1.5}, {3, 0.0}, {4, 1.0}, {8, 20.0}}) {
        const oracles::VmfColatitudeCdf cdf(p, k);
        const VmfCosineSampler sampler(p, k);
        for (int i = 1; i < 200; ++i) {
            const double u = i / 200.0;
            const double roundTrip = cdf(std::acos(sampler.cosine(u)));
            CHECK(std::abs(roundTrip - u) <= 1e-5);
        }
    }
}

TEST_CASE("sampled cosines follow the quadrature CDF (Kolmogorov-Smirnov)") {
    // Probability transform through an independent Simpson-quadrature CDF;
    // the result must be uniform. This checks the whole marginal shape, not
    // just its moments.
    for (auto [p, k] : std::vector<std::pair<int, double>>{{2, 1.5}, {3, 0.0}, {4, 1.0}, {8, 20.0}}) {
        const oracles::VmfColatitudeCdf cdf(p, k);
        const VmfCosineSampler sampler(p, k);
        Rng rng(42000 + p);
        std::vector<double> us;
        us.reserve(20000);
        for (int i = 0; i < 20000; ++i)
            us.push_back(cdf(std::acos(sampler.cosine(rng.uniform()))));
        CHECK(oracles::ksUniformPValue(std::move(us)) > 0.01);
    }
}

TEST_CASE("distribution constructor validates inputs") {
    CHECK_THROWS_AS(VonMisesFisher(Eigen::VectorXd::Ones(4), 1.0), NonUnitStateError);
    CHECK_THROWS_AS(VonMisesFisher(unitVector({1, 0}), -0.5), std::invalid_argument);
    CHECK_THROWS_AS(VonMisesFisher(Eigen::VectorXd::Ones(1), 1.0), std::invalid_argument);
}
