#include "doctest.h"

#include <cmath>
#include <random>

#include "besov/function.hpp"

using namespace besov;

namespace {

std::vector<cplx> random_points(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.05, 5.0), uy(-8.0, 8.0);
    std::vector<cplx> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(ux(rng), uy(rng));
    return pts;
}

}  // namespace

TEST_CASE("catalog evaluations") {
    auto e1 = make_catalog("exp(a=1)");
    CHECK(std::abs(e1.eval(1.0) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(e1.value_at_infinity()) == 0.0);
    auto chi = make_catalog("cayley(n=1)");
    CHECK(std::abs(chi.eval(1.0)) < 1e-15);
    CHECK(chi.value_at_infinity() == cplx(1.0));
    auto eta = make_catalog("eta");
    CHECK(std::abs(eta.eval(1e-9) - 1.0) < 1e-8);
    CHECK(std::abs(eta.eval(1e4)) < 1e-3);
    CHECK(std::abs(eta.eval(cplx(2, 3)) - (1.0 - std::exp(-cplx(2, 3))) / cplx(2, 3)) < 1e-14);
    auto r = make_catalog("RESOLVENT(a=1+2i)");
    CHECK(std::abs(r.eval(cplx(1, -2)) - 0.5) < 1e-15);
    auto ex = make_catalog("expinv(t=2)");
    CHECK(std::abs(ex.eval(1.0) - std::exp(-1.0)) < 1e-15);
    auto v = make_catalog("vitse(t=1)");
    CHECK(std::abs(v.eval(1.0) - 0.25 * std::exp(-1.0)) < 1e-15);
}

TEST_CASE("catalog errors") {
    CHECK_THROWS_AS(make_catalog("nosuch(a=1)"), Error);
    try {
        make_catalog("band(eps=2,sigma=2;coeffs=[1];taus=[2])");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParameter);
    }
    try {
        make_catalog("nosuch");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownSpec);
    }
    CHECK_THROWS_AS(make_catalog("resolvent(a=-1)"), Error);
    CHECK_THROWS_AS(make_catalog("cayley(n=0)"), Error);
    CHECK_THROWS_AS(make_catalog("exp(a=1+i)"), Error);
}

TEST_CASE("fallback derivative") {
    auto e1 = make_catalog("exp(a=1)");
    CHECK(std::abs(deriv_fallback(e1, 1.0) + std::exp(-1.0)) < 1e-9);
    auto r1 = make_catalog("resolvent(a=1)");
    CHECK(std::abs(deriv_fallback(r1, 1.0) + 0.25) < 1e-9);
    auto c3 = make_catalog("cayley(n=3)");
    const cplx z(2, 1);
    const cplx exact = 6.0 * std::pow(z - 1.0, 2) / std::pow(z + 1.0, 4);
    CHECK(std::abs(deriv_fallback(c3, z) - exact) < 1e-8);
}

TEST_CASE("property: analytic derivatives agree with the Cauchy fallback") {
    for (const auto& spec : catalog_specs()) {
        CAPTURE(spec);
        auto f = make_catalog(spec);
        for (cplx z : random_points(10, 7)) {
            const cplx a = f.deriv(z), b = deriv_fallback(f, z);
            CHECK(std::abs(a - b) <= 1e-7 * (1 + std::abs(a)));
        }
    }
}

TEST_CASE("property: values at infinity are approached along 2^k") {
    for (const auto& spec : catalog_specs()) {
        CAPTURE(spec);
        auto f = make_catalog(spec);
        bool cert = false;
        const cplx finf = f.value_at_infinity(&cert);
        CHECK(cert);
        double prev = kInf;
        for (int k = 4; k <= 12; ++k) {
            const double d = std::abs(f.eval(std::ldexp(1.0, k)) - finf);
            CHECK(d <= prev + 1e-12);
            prev = d;
        }
        CHECK(prev < 1e-2);
    }
}

TEST_CASE("property: product rule") {
    auto f = make_catalog("cayley(n=3)"), g = make_catalog("expinv(t=2)");
    auto h = fn::mul(f, g);
    for (cplx z : random_points(100, 11)) {
        const cplx want = f.deriv(z) * g.eval(z) + f.eval(z) * g.deriv(z);
        CHECK(std::abs(h.deriv(z) - want) <= 1e-9 * std::abs(want) + 1e-300);
    }
    CHECK(std::abs(make_catalog("mul(resolvent(a=1),resolvent(a=1))").eval(1.0) - 0.25) < 1e-15);
}

TEST_CASE("property: shift and dilate compose evaluators") {
    auto f = make_catalog("vitse(t=1)");
    auto h = fn::shift(fn::dilate(f, 3.0), cplx(0.5, 1.0));
    for (cplx z : random_points(50, 3)) CHECK(h.eval(z) == f.eval(3.0 * (z + cplx(0.5, 1.0))));
    auto se = make_catalog("shift(exp(a=1),a=1)");
    CHECK(std::abs(se.eval(cplx(0.3, 2)) - std::exp(-cplx(1.3, 2))) < 1e-15);
    auto de = make_catalog("eta(delta=0.5)");
    auto e = make_catalog("eta");
    CHECK(std::abs(de.eval(cplx(1, 1)) - e.eval(cplx(0.5, 0.5))) < 1e-15);
}

TEST_CASE("property: band functions decay like e^{-eps x}") {
    auto f = make_catalog("band(eps=1,sigma=4;coeffs=[1,-1];taus=[1,4])");
    double boundary = 0;
    for (double y = -20; y <= 20; y += 0.01) boundary = std::max(boundary, std::abs(f.eval(cplx(1e-9, y))));
    for (double x : {0.1, 0.5, 1.0, 3.0})
        for (double y = -10; y <= 10; y += 0.37) CHECK(std::abs(f.eval(cplx(x, y))) <= std::exp(-x) * boundary + 1e-12);
}

TEST_CASE("reciprocal and power range checks") {
    CHECK_THROWS_AS(fn::reciprocal(make_catalog("exp(a=1)")), Error);
    auto g = fn::reciprocal(make_catalog("add(const(c=2),exp(a=1))"));
    CHECK(std::abs(g.eval(1.0) - 1.0 / (2 + std::exp(-1.0))) < 1e-15);
    CHECK_THROWS_AS(fn::power(make_catalog("cayley(n=1)"), 0.5), Error);
    auto p = fn::power(make_catalog("add(const(c=2),exp(a=1))"), 0.5);
    CHECK(std::abs(p.eval(1.0) - std::sqrt(2 + std::exp(-1.0))) < 1e-15);
}

TEST_CASE("measures and Laplace transforms") {
    auto chi = make_catalog("laplace(atoms=[(0,1)];density=exp(rate=1,coeff=-2))");
    for (cplx z : random_points(20, 5)) CHECK(std::abs(chi.eval(z) - (z - 1.0) / (z + 1.0)) < 1e-14);
    auto leb = make_catalog("laplace(density=unit(a=0,b=1))");
    for (cplx z : {cplx(1e-3, 0), cplx(0.5, 0.2), cplx(3, -4)}) {
        CHECK(std::abs(leb.eval(z) - (1.0 - std::exp(-z)) / z) < 1e-12);  // reference cancels near 0
        CHECK(std::abs(leb.deriv(z) - deriv_fallback(leb, z)) < 1e-8);
    }
    auto mu = parse_measure("laplace(atoms=[(0,1),(1,-2)];density=exp)");
    CHECK(mu.total_variation() == doctest::Approx(4.0));
    CHECK(std::abs(parse_complex("1+2i") - cplx(1, 2)) == 0.0);
    CHECK(std::abs(parse_complex("-i") - cplx(0, -1)) == 0.0);
    CHECK(std::abs(parse_complex("pi/4") - kPi / 4) == 0.0);
}

TEST_CASE("bernstein functions") {
    auto fb = parse_bernstein("bernstein(a=0,b=0,jumps=[(1,1)])");
    double prev = 0, prevd = kInf;
    for (double x = 0.01; x < 20; x *= 1.3) {
        const double v = fb.eval(x).real(), d = fb.deriv(x).real();
        CHECK(v > prev);
        CHECK(d < prevd);
        prev = v;
        prevd = d;
    }
    auto h = make_catalog("bernstein_res(b=1,alpha=0.5,beta=2,theta=pi/4,lambda=1)");
    for (cplx z : random_points(10, 9)) CHECK(std::abs(h.eval(z) - 1.0 / (1.0 + z)) < 1e-13);
    CHECK_THROWS_AS(make_catalog("bernstein_res(b=1,alpha=0.5,beta=2,theta=pi/4,lambda=10i)"), Error);
}

TEST_CASE("format_complex round trips") {
    for (cplx z : {cplx(1, 2), cplx(0, -1), cplx(0.1, 0), cplx(-3.5, -0.25), cplx(0, 0)})
        CHECK(parse_complex(format_complex(z)) == z);
}
