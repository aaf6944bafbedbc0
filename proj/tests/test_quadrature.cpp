#include "doctest.h"

#include <cmath>

#include "besov/quadrature.hpp"

using namespace besov;

TEST_CASE("interval integrals with closed forms") {
    QuadratureConfig cfg;
    auto r1 = integrate_interval([](double) { return cplx(1.0); }, 0.0, 1.0, cfg);
    CHECK(std::abs(r1.value - 1.0) < 1e-12);
    auto r2 = integrate_interval([](double t) { return cplx(std::exp(-t)); }, 0.0, 50.0, cfg);
    CHECK(std::abs(r2.value - (1.0 - std::exp(-50.0))) < 1e-9);
    auto r3 = integrate_interval([](double t) { return cplx(1.0 / (1.0 + t * t)); }, -1e3, 1e3, cfg);
    CHECK(std::abs(r3.value.real() - (kPi - 2.0 * std::atan(1e-3))) < 1e-8);
    CHECK(std::abs(r3.value.real() - 3.139593) < 1e-6);
}

TEST_CASE("reported error dominates the actual error on a battery") {
    QuadratureConfig cfg;
    struct Case {
        RealFn g;
        double a, b, exact;
    };
    std::vector<Case> cases = {
        {[](double t) { return t * t; }, 0, 1, 1.0 / 3},
        {[](double t) { return std::pow(t, 5); }, -1, 2, (64.0 - 1.0) / 6},
        {[](double t) { return std::sqrt(t); }, 0, 1, 2.0 / 3},
        {[](double t) { return std::pow(t, -0.5); }, 1e-12, 1, 2.0 * (1 - 1e-6)},
        {[](double t) { return std::exp(-3 * t); }, 0, 10, (1 - std::exp(-30.0)) / 3},
        {[](double t) { return std::exp(t); }, 0, 5, std::exp(5.0) - 1},
        {[](double t) { return 1.0 / (1 + t); }, 0, 100, std::log(101.0)},
        {[](double t) { return 1.0 / (1 + t * t); }, 0, 1, kPi / 4},
        {[](double t) { return 1.0 / (1e-4 + t * t); }, -1, 1, 2 * std::atan(1 / 1e-2) / 1e-2},
        {[](double t) { return std::sin(t); }, 0, kPi, 2.0},
        {[](double t) { return std::cos(20 * t); }, 0, 1, std::sin(20.0) / 20},
        {[](double t) { return t * std::exp(-t); }, 0, 30, 1 - 31 * std::exp(-30.0)},
        {[](double t) { return std::log(t); }, 1e-14, 1, -1 - (1e-14 * std::log(1e-14) - 1e-14)},
        {[](double t) { return 1.0 / std::pow(1 + t, 3); }, 0, 1e3, 0.5 * (1 - 1 / std::pow(1001.0, 2))},
        {[](double t) { return std::abs(t - 0.3); }, 0, 1, 0.5 * (0.09 + 0.49)},
        {[](double t) { return t < 0.5 ? 1.0 : 0.0; }, 0, 1, 0.5},
        {[](double t) { return std::exp(-t * t); }, -8, 8, std::sqrt(kPi) * std::erf(8.0)},
        {[](double t) { return 1.0 / (2 + std::cos(t)); }, 0, 2 * kPi, 2 * kPi / std::sqrt(3.0)},
        {[](double t) { return t * t * t - 2 * t; }, -3, 3, 0.0},
        {[](double t) { return std::exp(-t) * std::sin(5 * t); }, 0, 40, 5.0 / 26 * (1 - std::exp(-40.0) * (std::cos(200.0) + std::sin(200.0) / 5))},
    };
    for (size_t i = 0; i < cases.size(); ++i) {
        CAPTURE(i);
        auto r = integrate_interval_real(cases[i].g, cases[i].a, cases[i].b, cfg, {0.3, 0.5});
        CHECK(std::abs(r.value - cases[i].exact) <= r.error + 1e-14 * std::abs(cases[i].exact) + 1e-15);
        CHECK(r.error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value)));
    }
}

TEST_CASE("half-line and full-line integrals use the envelope tail") {
    QuadratureConfig cfg;
    auto r = integrate_halfline_real([](double t) { return 1.0 / (1 + t * t); }, DecayEnvelope::power(2, 1.0), cfg);
    CHECK(std::abs(r.value - kPi / 2) < 1e-7);
    auto r2 = integrate_line([](double t) { return cplx(1.0 / (4 + t * t)); }, DecayEnvelope::resolvent(1.0, 2.0), cfg);
    CHECK(std::abs(r2.value - kPi / 2) < 1e-7);
    auto r3 = integrate_halfline_real([](double t) { return std::exp(-2 * t); }, DecayEnvelope::exponential(2, 1.0), cfg);
    CHECK(std::abs(r3.value - 0.5) < 1e-9);
}

TEST_CASE("envelope violation is detected") {
    QuadratureConfig cfg;
    CHECK_THROWS_AS(integrate_halfline_real([](double t) { return 10.0 / (1 + t * t); }, DecayEnvelope::power(2, 1.0, 1.0), cfg),
                    Error);
}

TEST_CASE("bent contour reproduces a line integral of an analytic function") {
    QuadratureConfig cfg;
    // 1/((y-i)(y+2i)) has poles off the real line; the lower half-plane holds only -2i
    auto G = [](cplx y) { return 1.0 / ((y - cplx(0, 1)) * (y + cplx(0, 2))); };
    // exact: close upward, residue at i: 2 pi i * 1/(3i) = 2pi/3
    const double phi = kPi / 3;
    // on the rays |y|^2 >= T^2 + s^2 and |y - i||y + 2i| >= (3/8)|y|^2
    auto env = DecayEnvelope::resolvent(std::sqrt(8.0 / 3.0), 4.0);
    auto r = integrate_bent_line_v<cplx>(G, 4.0, +1, phi, env, cfg, [](const cplx& v) { return std::abs(v); },
                                         cplx(0.0));
    CHECK(std::abs(r.value - 2 * kPi / 3) < 1e-7);
    auto rs = integrate_line([&](double y) { return G(cplx(y, 0)); }, DecayEnvelope::power(2, 4.0, 4.0), cfg);
    CHECK(std::abs(rs.value - 2 * kPi / 3) < 1e-6);
}

TEST_CASE("vertical line suprema") {
    QuadratureConfig cfg;
    auto s1 = sup_on_vertical_line([](double y) { return std::abs(std::exp(-cplx(1, y))); }, {1.0, 100.0, 2 * kPi}, cfg);
    CHECK(std::abs(s1.value - std::exp(-1.0)) < 1e-12);
    CHECK(s1.arg == 0.0);
    auto s2 = sup_on_vertical_line([](double y) { return 1.0 / (4 + y * y); }, {1.0, 100.0, 0.0}, cfg);
    CHECK(std::abs(s2.value - 0.25) < 1e-14);
    // cayley n=2 at x=0.5: |f'| = 4|z-1|/|z+1|^3, maximum off the real axis
    const double x = 0.5;
    auto phi = [x](double y) {
        const cplx z(x, y);
        return std::abs(4.0 * (z - 1.0) / std::pow(z + 1.0, 3));
    };
    auto s3 = sup_on_vertical_line(phi, {0.5, 100.0, 0.0}, cfg);
    // closed form from maximizing 4 sqrt((1-x)^2+y^2)/((1+x)^2+y^2)^{3/2} in y^2
    double best = 0;
    const double u = (1 - x) * (1 - x), v = (1 + x) * (1 + x);
    const double s_star = std::max(0.0, (v - 3 * u) / 2);
    for (double s : {0.0, s_star}) best = std::max(best, 4 * std::sqrt(u + s) / std::pow(v + s, 1.5));
    CHECK(std::abs(s3.value - best) < 1e-6);
}

TEST_CASE("property: sup is monotone under pointwise domination") {
    QuadratureConfig cfg;
    for (int k = 1; k <= 5; ++k) {
        auto p1 = [k](double y) { return std::exp(-k * y * y) * (1 + std::cos(3 * y)); };
        auto p2 = [k, &p1](double y) { return p1(y) + 0.01 / (1 + y * y); };
        auto a = sup_on_vertical_line(p1, {}, cfg), b = sup_on_vertical_line(p2, {}, cfg);
        CHECK(a.value <= b.value + cfg.abs_tol);
    }
}
