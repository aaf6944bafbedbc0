#include "doctest.h"

#include <cmath>

#include "besov/duality.hpp"

using namespace besov;

TEST_CASE("pairing examples") {
    auto r1 = make_catalog("resolvent(a=1)");
    CHECK(std::abs(pairing(r1, make_catalog("const(c=4)")).value) == 0.0);
    CHECK(std::abs(pairing(r1, make_catalog("exp(a=1)")).value - kPi / 2 * std::exp(-1.0)) < 1e-7);
    CHECK(std::abs(pairing(make_catalog("resolvent(a=2)"), r1).value - kPi / 6) < 1e-7);
}

TEST_CASE("reproducing formula") {
    CHECK(reproduce_residual(make_catalog("exp(a=1)"), 1.0) < 1e-5);
    CHECK(reproduce_residual(make_catalog("const(c=3)"), cplx(0.5, 2)) == 0.0);
    CHECK(reproduce_residual(make_catalog("cayley(n=4)"), cplx(2, 3)) < 1e-5);
    // boundary point uses the offset convention
    CHECK(reproduce_residual(make_catalog("cayley(n=2)"), cplx(0, 1)) < 1e-5);
    CHECK_THROWS_AS(reproduce_residual(make_catalog("exp(a=1)"), cplx(-1, 0)), Error);
}

TEST_CASE("property: pairing bounded by E0 times B0") {
    for (const char* gs : {"resolvent(a=1)", "resolvent(a=0.5+2i)", "cayley(n=2)", "expinv(t=1)"})
        for (const char* fs : {"exp(a=1)", "cayley(n=3)", "eta", "vitse(t=1)"}) {
            CAPTURE(gs);
            CAPTURE(fs);
            auto g = make_catalog(gs), f = make_catalog(fs);
            auto p = pairing(g, f);
            CHECK(std::abs(p.value) <= p.g_e0 * b0_norm(f).value + 1e-6);
        }
}

TEST_CASE("property: bilinearity") {
    auto g = make_catalog("resolvent(a=1+i)");
    auto f1 = make_catalog("cayley(n=2)"), f2 = make_catalog("eta");
    const cplx alpha(0.7, -1.3);
    auto lhs = pairing(g, fn::add(fn::scale(f1, alpha), f2)).value;
    auto rhs = alpha * pairing(g, f1).value + pairing(g, f2).value;
    CHECK(std::abs(lhs - rhs) < 1e-6);
}

TEST_CASE("property: shift is self-adjoint across the pairing") {
    for (double a : {0.5, 2.0}) {
        for (const char* gs : {"resolvent(a=1)", "cayley(n=2)"}) {
            CAPTURE(a);
            CAPTURE(gs);
            auto g = make_catalog(gs), f = make_catalog("expinv(t=2)");
            auto l = pairing(fn::shift(g, a), f).value;
            auto r = pairing(g, fn::shift(f, a)).value;
            CHECK(std::abs(l - r) < 1e-6);
        }
    }
}
