#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cvt/dependence.hpp"
#include "cvt/errors.hpp"
#include "cvt/rng.hpp"
#include "testutil.hpp"

using namespace cvt;

TEST_SUITE_BEGIN("dependence");

TEST_CASE("exact ecdf follows the counting definition") {
    const std::vector<double> v{1, 2, 3, 4};
    const EmpiricalCdf cdf = EmpiricalCdf::fit(v, CdfMode::exact_ecdf, 0);
    CHECK(cdf(2.0) == 0.5);
    CHECK(cdf(0.5) == 0.0);
    CHECK(cdf(4.0) == 1.0);
    CHECK(cdf(5.0) == 1.0);
    CHECK(cdf(2.5) == 0.5);
    CHECK(cdf(3.0) == 0.75);
}

TEST_CASE("histogram cdf reaches 1 at the max observation") {
    const std::vector<double> v{0.0, 1.0};
    const EmpiricalCdf cdf = EmpiricalCdf::fit(v, CdfMode::histogram, 2);
    CHECK(cdf(1.0) == 1.0);
    CHECK(cdf(0.0) == 0.5);
    CHECK(cdf(-0.1) == 0.0);
}

TEST_CASE("histogram cdf on a uniform grid stays near the identity") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(i) / static_cast<double>(v.size() - 1);
    const EmpiricalCdf cdf = EmpiricalCdf::fit(v, CdfMode::histogram, 20);
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(cdf(x) - x)); // oracle: F(x)=x
    CHECK(worst < 0.06);
}

TEST_CASE("cdf evaluation is nondecreasing with range [0,1]") {
    Rng rng(5);
    for (CdfMode mode : {CdfMode::histogram, CdfMode::exact_ecdf}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto v = testutil::random_vector(rng, 50, trial % 2 == 0);
            const EmpiricalCdf cdf = EmpiricalCdf::fit(v, mode, 10);
            double prev = -1.0;
            for (double x = -12.0; x <= 12.0; x += 0.25) {
                const double f = cdf(x);
                CHECK(f >= prev);
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
                prev = f;
            }
            CHECK(cdf(*std::max_element(v.begin(), v.end())) == 1.0);
        }
    }
}

TEST_CASE("zero-range histogram degenerates to one flagged bin") {
    const std::vector<double> v{3.0, 3.0, 3.0};
    const EmpiricalCdf cdf = EmpiricalCdf::fit(v, CdfMode::histogram, 20);
    CHECK(cdf.degenerate());
    CHECK(cdf.bins() == 1);
    CHECK(cdf(3.0) == 1.0);
    CHECK(cdf(2.9) == 0.0);
}

TEST_CASE("cdf fitting rejects bad input") {
    CHECK_THROWS_AS(EmpiricalCdf::fit(std::vector<double>{1.0}, CdfMode::histogram, 4), DataError);
    CHECK_THROWS_AS(EmpiricalCdf::fit(std::vector<double>{1.0, std::nan("")},
                                      CdfMode::exact_ecdf, 4),
                    DataError);
    CHECK_THROWS_AS(EmpiricalCdf::fit(std::vector<double>{1.0, 2.0}, CdfMode::histogram, 0),
                    DataError);
}

namespace {

ActivationTrace toy_trace(const std::vector<std::size_t>& widths, const Matrix& values) {
    ActivationTrace t;
    t.layer_widths = widths;
    t.values = values;
    return t;
}

} // namespace

TEST_CASE("pseudo-observations live in [0,1] and equal ranks/n for distinct values") {
    Rng rng(17);
    Matrix values(25, 3);
    for (std::size_t r = 0; r < 25; ++r) {
        values(r, 0) = static_cast<double>(r + 1); // strictly increasing
        values(r, 1) = 100.0 * rng.uniform();
        values(r, 2) = static_cast<double>(rng.below(4));
    }
    const ActivationTrace trace = toy_trace({1, 1, 1}, values);
    const auto cdfs = fit_all_cdfs(trace, CdfMode::exact_ecdf, 0);
    const PseudoObservations pseudo = pseudo_observations(trace, cdfs);

    for (std::size_t r = 0; r < 25; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(pseudo.u(r, c) >= 0.0);
            CHECK(pseudo.u(r, c) <= 1.0);
        }
        CHECK(pseudo.u(r, 0) == static_cast<double>(r + 1) / 25.0); // rank identity
    }
}

TEST_CASE("exact-mode pseudo-observations ignore strictly increasing transforms") {
    Rng rng(23);
    Matrix raw(40, 2);
    for (std::size_t r = 0; r < 40; ++r) {
        raw(r, 0) = 10.0 * rng.uniform() - 3.0;
        raw(r, 1) = static_cast<double>(rng.below(6));
    }
    Matrix warped = raw;
    for (std::size_t r = 0; r < 40; ++r) {
        warped(r, 0) = std::exp(raw(r, 0));
        warped(r, 1) = 2.0 * raw(r, 1) + 8.0;
    }
    const auto widths = std::vector<std::size_t>{1, 1};
    const auto u_raw = pseudo_observations(
        toy_trace(widths, raw), fit_all_cdfs(toy_trace(widths, raw), CdfMode::exact_ecdf, 0));
    const auto u_warp = pseudo_observations(
        toy_trace(widths, warped), fit_all_cdfs(toy_trace(widths, warped), CdfMode::exact_ecdf, 0));
    CHECK(u_raw.u == u_warp.u);
}

TEST_CASE("histogram-mode pseudo-observations take at most `bins` distinct values") {
    Rng rng(29);
    Matrix values(200, 1);
    for (std::size_t r = 0; r < 200; ++r) values(r, 0) = rng.normal();
    const ActivationTrace trace = toy_trace({1}, values);
    for (std::size_t bins : {3, 7, 20}) {
        const PseudoObservations p =
            pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::histogram, bins));
        std::set<double> distinct;
        for (std::size_t r = 0; r < 200; ++r) distinct.insert(p.u(r, 0));
        CHECK(distinct.size() <= bins);
    }
}

TEST_CASE("pseudo_observations rejects a cdf count mismatch") {
    Matrix values(5, 2);
    const ActivationTrace trace = toy_trace({1, 1}, values);
    std::vector<EmpiricalCdf> one{
        EmpiricalCdf::fit(std::vector<double>{0.0, 1.0}, CdfMode::exact_ecdf, 0)};
    CHECK_THROWS_AS(pseudo_observations(trace, one), DataError);
}

TEST_CASE("kendall tau on the spec triples") {
    const std::vector<double> inc{1, 2, 3};
    const std::vector<double> dec{3, 2, 1};
    CHECK(kendall_tau(inc, inc).value == 1.0);
    CHECK(kendall_tau(inc, dec).value == -1.0);

    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{2, 1, 4, 3};
    CHECK(kendall_tau(x, y).value == 1.0 / 3.0); // 4 concordant, 2 discordant of 6
}

TEST_CASE("kendall tau flags constant margins instead of crashing") {
    const std::vector<double> c{2, 2, 2};
    const std::vector<double> v{1, 2, 3};
    const CorrValue left = kendall_tau(c, v);
    CHECK_FALSE(left.defined);
    CHECK(left.reason.find("constant margin") != std::string::npos);
    CHECK_FALSE(kendall_tau(v, c).defined);
    CHECK_FALSE(kendall_tau(c, c).defined);
}

TEST_CASE("kendall tau input validation") {
    CHECK_THROWS_AS(kendall_tau(std::vector<double>{1, 2}, std::vector<double>{1}), DataError);
    CHECK_THROWS_AS(kendall_tau(std::vector<double>{1}, std::vector<double>{1}), DataError);
}

TEST_CASE("kendall tau equals the brute-force oracle exactly") {
    Rng rng(404);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        const bool ties = trial % 2 == 0;
        const auto x = testutil::random_vector(rng, n, ties);
        const auto y = testutil::random_vector(rng, n, ties);
        const CorrValue got = kendall_tau(x, y);
        const CorrValue want = testutil::tau_oracle(x, y);
        REQUIRE(got.defined == want.defined);
        if (got.defined) {
            CHECK(got.value == want.value); // bit-exact
            CHECK(got.value >= -1.0);
            CHECK(got.value <= 1.0);
        }
    }
}

TEST_CASE("kendall tau is symmetric") {
    Rng rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        const auto x = testutil::random_vector(rng, n, true);
        const auto y = testutil::random_vector(rng, n, true);
        const CorrValue a = kendall_tau(x, y);
        const CorrValue b = kendall_tau(y, x);
        CHECK(a.defined == b.defined);
        if (a.defined) CHECK(a.value == b.value);
    }
}

TEST_CASE("monotone maps leave tau fixed, antitone maps flip its sign") {
    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(50);
        const auto x = testutil::random_vector(rng, n, true); // integer-valued, ties likely
        const auto y = testutil::random_vector(rng, n, true);
        const CorrValue base = kendall_tau(x, y);
        if (!base.defined) continue;

        std::vector<double> inc(n), dec(n);
        for (std::size_t i = 0; i < n; ++i) {
            inc[i] = std::exp(x[i]);       // strictly increasing, distinct ints stay distinct
            dec[i] = 1.0 / (1.0 + x[i]);   // strictly decreasing on [0, 9]
        }
        CHECK(kendall_tau(inc, y).value == base.value);
        CHECK(kendall_tau(dec, y).value == -base.value);
    }
}

TEST_CASE("tau is identical on raw data and exact-mode pseudo-observations") {
    Rng rng(707);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.below(80);
        Matrix values(n, 2);
        std::set<double> seen_a, seen_b;
        for (std::size_t r = 0; r < n; ++r) {
            double a, b;
            do { a = 50.0 * rng.uniform(); } while (!seen_a.insert(a).second);
            do { b = 50.0 * rng.uniform(); } while (!seen_b.insert(b).second);
            values(r, 0) = a;
            values(r, 1) = b;
        }
        const ActivationTrace trace = toy_trace({1, 1}, values);
        const auto pseudo = pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::exact_ecdf, 0));
        const CorrValue raw = kendall_tau(values.column(0), values.column(1));
        const CorrValue ranked = kendall_tau(pseudo.u.column(0), pseudo.u.column(1));
        REQUIRE(raw.defined);
        CHECK(raw.value == ranked.value);
    }
}

TEST_CASE("pearson and spearman basics") {
    std::vector<double> x(10), y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        x[i] = static_cast<double>(i + 1);
        y[i] = 2.0 * x[i] + 1.0;
    }
    CHECK(pearson(x, y).value == 1.0);

    std::vector<double> warped(10);
    for (std::size_t i = 0; i < 10; ++i) warped[i] = std::exp(x[i]);
    CHECK(spearman(warped, x).value == 1.0);

    const std::vector<double> px{-1, 0, 1};
    const std::vector<double> py{1, 0, 1};
    CHECK(pearson(px, py).value == 0.0); // symmetric parabola

    CHECK_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).defined);
    CHECK_FALSE(spearman(std::vector<double>{4, 4}, std::vector<double>{1, 2}).defined);
}

TEST_CASE("correlation matrices cover adjacent layer pairs with the right shapes") {
    Rng rng(808);
    const std::vector<std::size_t> widths{4, 6, 6, 3};
    Matrix values(30, 19);
    for (std::size_t r = 0; r < 30; ++r)
        for (std::size_t c = 0; c < 19; ++c) values(r, c) = rng.uniform();
    const ActivationTrace trace = toy_trace(widths, values);
    const auto pseudo = pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::exact_ecdf, 0));

    const auto mats = adjacent_correlations(pseudo, CorrelationKind::kendall_tau_b);
    REQUIRE(mats.size() == 3);
    CHECK(mats[0].values.rows() == 4);
    CHECK(mats[0].values.cols() == 6);
    CHECK(mats[1].values.rows() == 6);
    CHECK(mats[1].values.cols() == 6);
    CHECK(mats[2].values.rows() == 6);
    CHECK(mats[2].values.cols() == 3);
    for (const auto& m : mats)
        for (std::size_t i = 0; i < m.values.rows(); ++i)
            for (std::size_t j = 0; j < m.values.cols(); ++j) {
                REQUIRE(m.entry_defined(i, j));
                CHECK(m.values(i, j) >= -1.0);
                CHECK(m.values(i, j) <= 1.0);
            }
}

TEST_CASE("duplicated source node gives two identical matrix rows") {
    Rng rng(909);
    Matrix values(20, 5); // widths (2,3): source nodes 0,1 duplicated
    for (std::size_t r = 0; r < 20; ++r) {
        const double v = rng.normal();
        values(r, 0) = v;
        values(r, 1) = v;
        for (std::size_t c = 2; c < 5; ++c) values(r, c) = rng.normal();
    }
    const ActivationTrace trace = toy_trace({2, 3}, values);
    const auto pseudo = pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::exact_ecdf, 0));
    const LayerCorrelation m = correlation_matrix(pseudo, 0, 1, CorrelationKind::kendall_tau_b);
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.values(0, j) == m.values(1, j));
}

TEST_CASE("a dead node is flagged undefined in its row and column") {
    Rng rng(111);
    const std::vector<std::size_t> widths{2, 2, 2};
    Matrix values(25, 6);
    for (std::size_t r = 0; r < 25; ++r) {
        values(r, 0) = rng.normal();
        values(r, 1) = rng.normal();
        values(r, 2) = 0.0; // dead ReLU node: constant zero
        values(r, 3) = rng.normal();
        values(r, 4) = rng.normal();
        values(r, 5) = rng.normal();
    }
    const ActivationTrace trace = toy_trace(widths, values);
    const auto pseudo = pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::histogram, 10));
    const auto mats = adjacent_correlations(pseudo, CorrelationKind::kendall_tau_b);

    // dead node is node 0 of layer 1: column 0 of the first matrix,
    // row 0 of the second
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK_FALSE(mats[0].entry_defined(i, 0));
        CHECK(mats[0].entry_reason(i, 0).find("constant margin") != std::string::npos);
        CHECK(mats[0].entry_defined(i, 1));
    }
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK_FALSE(mats[1].entry_defined(0, j));
        CHECK(mats[1].entry_defined(1, j));
    }
}

TEST_CASE("non-adjacent layers are rejected") {
    Matrix values(5, 4);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 4; ++c) values(r, c) = static_cast<double>(r + c);
    const ActivationTrace trace = toy_trace({2, 1, 1}, values);
    const auto pseudo = pseudo_observations(trace, fit_all_cdfs(trace, CdfMode::exact_ecdf, 0));
    CHECK_THROWS_AS(correlation_matrix(pseudo, 0, 2, CorrelationKind::kendall_tau_b), DataError);
}

TEST_SUITE_END();
