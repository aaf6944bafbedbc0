#include "doctest.h"

#include <cmath>

#include "besov/applications.hpp"

using namespace besov;

namespace {

MatrixOperator op(const std::string& s) { return load_operator(s); }

}  // namespace

TEST_CASE("band operator") {
    auto r = check_band_operator(op("diag(1,2)"), {1.0, -1.0}, {1.0, 4.0}, 1.0, 4.0);
    CHECK(r.pass);
    // normal: lhs = max |f(lambda)|
    const double want = std::max(std::abs(std::exp(-1.0) - std::exp(-4.0)), std::abs(std::exp(-2.0) - std::exp(-8.0)));
    CHECK(std::abs(r.lhs - want) < 1e-6);
    auto s = check_band_operator(op("sectorial_random(n=4,seed=7,angle=pi/6)"), {1.0, -1.0}, {1.0, 4.0}, 1.0, 4.0);
    CHECK(s.params.back().second == "sectorial");
    CHECK(s.pass);
}

TEST_CASE("hilbert and sectorial bounds") {
    auto A = op("diag(1,2)");
    auto r = check_hilbert_bound(A, make_catalog("cayley(n=2)"));
    CHECK(r.pass);
    CHECK(std::abs(r.rhs - 2 * b_norm(make_catalog("cayley(n=2)")).value) < 1e-6);
    CHECK_THROWS_AS(check_hilbert_bound(op("[[1,1],[0,2]]"), make_catalog("exp(a=1)")), Error);
    auto s = check_sectorial_bound(op("sectorial_random(n=4,seed=3,angle=pi/4)"), make_catalog("eta"));
    CHECK(s.pass);
}

TEST_CASE("smoothed window and fractional smoothing") {
    auto A = op("normal_random(n=3,seed=5)");
    for (double omega : {0.1, 1.0})
        for (double tau : {0.1, 1.0}) {
            CAPTURE(omega);
            CAPTURE(tau);
            CHECK(check_smoothed_window(A, make_catalog("resolvent(a=2)"), omega, tau).pass);
        }
    for (double alpha : {0.5, 1.0, 2.0}) {
        CAPTURE(alpha);
        auto r = check_fractional_smoothing(A, make_catalog("resolvent(a=2)"), 1.0, 1.0, alpha);
        CHECK(r.pass);
    }
    // diag(1): g(1) (1+1)^{-1} with g = r_2
    auto one = check_fractional_smoothing(op("diag(1)"), make_catalog("resolvent(a=2)"), 1.0, 1.0, 1.0);
    CHECK(std::abs(one.lhs - 1.0 / 6) < 1e-6);
}

TEST_CASE("derivative of the calculus") {
    auto A = op("diag(1,2)");
    for (const char* fs : {"resolvent(a=2)", "exp(a=1)", "cayley(n=1)"}) {
        CAPTURE(fs);
        auto r = check_deriv_operator(A, make_catalog(fs), 0.5);
        CHECK(r.pass);
    }
    // f = r_2: f'(1) = -1/9, f'(2) = -1/16
    auto r = check_deriv_operator(A, make_catalog("resolvent(a=2)"), 0.5);
    CHECK(std::abs(r.lhs - 1.0 / 9) < 1e-6);
}

TEST_CASE("exponential stability fit") {
    auto fit = fit_exponential_stability(op("diag(0.5,3)"));
    CHECK(fit.omega <= 0.5);
    CHECK(fit.omega > 0.49);
    CHECK(fit.M >= 1.0);
    CHECK(fit.M < 1.01);
    auto nn = fit_exponential_stability(op("[[1,5],[0,2]]"));
    CHECK(nn.omega <= 1.0);
    auto Anon = MatrixOperator(make_matrix("[[1,5],[0,2]]"));
    for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0})
        CHECK(opnorm(semigroup(Anon, t)) <= nn.M * std::exp(-nn.omega * t) * (1 + 1e-9));
    CHECK_THROWS_AS(fit_exponential_stability(op("diag(0,1)")), Error);
}

TEST_CASE("exponentially stable decay") {
    auto [f, h] = rational_decay_family(1.0, {1.0, 1.0});
    for (const char* a : {"diag(0.5,3)", "diag(1,2i+1)", "normal_random(n=3,seed=2)"}) {
        CAPTURE(a);
        CHECK(check_exp_stable_decay(op(a), f, h).pass);
    }
}

TEST_CASE("inverse generator") {
    // scalar: exp(-t/w) <= 2(2 - e^{-t/w}) or the log branch
    for (double t : {0.1, 1.0, 10.0}) {
        auto r = inverse_generator_check(op("diag(2)"), t);
        CHECK(std::abs(r.lhs - std::exp(-t / 2)) < 1e-12);
        CHECK(r.pass);
    }
    auto big = inverse_generator_check(op("diag(1,4)"), 10.0);
    CHECK(big.pass);
    auto tiny = inverse_generator_check(op("diag(1,4)"), 1e-8);
    CHECK(std::abs(tiny.lhs - 1.0) < 1e-7);
    CHECK(std::abs(tiny.rhs - 2.0) < 1e-6);
    for (double t : {0.5, 10.0}) {
        CAPTURE(t);
        auto c = inverse_generator_calculus(op("diag(1,4)"), t);
        CHECK(c.pass);
        CHECK(c.lhs < 1e-4);
    }
    auto g = inverse_generator_growth(op("diag(1,4)"), 10.0);
    CHECK(g.kind == EstimateReport::Kind::Report);
    CHECK(g.pass);
}

TEST_CASE("cayley power of operators") {
    auto r = cayley_power_check(op("diag(1,2)"), 16);
    CHECK(r.lhs <= 1.0 + 1e-12);
    CHECK(r.pass);
    auto axis = cayley_power_check(op("diag(i,-i,1)"), 64);
    CHECK(std::abs(axis.lhs - 1.0) < 1e-9);
    CHECK(axis.pass);
    auto one = cayley_power_check(op("diag(1,2)"), 1);
    CHECK(std::abs(one.lhs - 1.0 / 3) < 1e-12);
    for (int n : {1, 16}) {
        CAPTURE(n);
        CHECK(cayley_power_calculus(op("diag(1,2)"), n).pass);
    }
}

TEST_CASE("spectral mapping") {
    auto r = spectral_mapping_check(op("diag(1,2)"), make_catalog("cayley(n=1)"));
    CHECK(r.estimate_id == "spectral_mapping");
    CHECK(r.pass);
    CHECK(r.lhs < 1e-6);
    auto j = spectral_mapping_check(op("[[1,1],[0,1]]"), make_catalog("exp(a=1)"));
    CHECK(j.pass);
    CHECK(spectral_mapping_check(op("sectorial_random(n=4,seed=11,angle=pi/4)"), make_catalog("eta")).pass);
    auto incl = spectral_mapping_check(op("diag(i,-i,1)"), make_catalog("exp(a=1)"));
    CHECK(incl.estimate_id == "spectral_inclusion");
    CHECK(incl.pass);
}

TEST_CASE("convergence demo") {
    Vec x(2);
    x << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    auto d = convergence_demo(op("diag(1,2)"), make_catalog("exp(a=1)"), {1, 4, 16, 64}, x);
    CHECK(d.report.pass);
    CHECK(d.curve.rows.size() == 4);
    for (size_t i = 1; i < d.curve.rows.size(); ++i) CHECK(d.curve.rows[i][1] < d.curve.rows[i - 1][1]);
    CHECK(d.curve.to_csv().rfind("n,shrink,stretch\n1,", 0) == 0);
    auto c = convergence_demo(op("diag(1,2)"), make_catalog("const(c=2)"), {1, 4, 16, 64}, x);
    for (const auto& row : c.curve.rows) CHECK(row[1] < 1e-12);
}
