#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "besov/norms.hpp"
#include "besov/operator.hpp"

using namespace besov;

namespace {

Mat M2(cplx a, cplx b, cplx c, cplx d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

MatrixOperator op(const std::string& s) { return MatrixOperator(make_matrix(s)); }

}  // namespace

TEST_CASE("construction and validation") {
    CHECK_THROWS_AS(op("[[0,1],[0,0]]"), Error);  // Jordan block on the imaginary axis
    try {
        op("[[0,1],[0,0]]");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SpectrumViolation);
    }
    CHECK_THROWS_AS(op("diag(1,-0.5)"), Error);
    CHECK_NOTHROW(op("diag(i,-i)"));
    CHECK_NOTHROW(op("diag(0,0,1)"));
    try {
        MatrixOperator big(Mat::Identity(65, 65));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SizeLimit);
    }
    auto J = op("jordan(lambda=2,m=3)");
    CHECK_FALSE(J.diagonalizable());
    CHECK(op("diag(1,2)").diagonalizable());
    CHECK(op("normal_random(n=5,seed=7)").is_normal());
    CHECK_FALSE(op("sectorial_random(n=5,seed=7,angle=pi/6)").is_normal());
}

TEST_CASE("resolvent examples") {
    CHECK(std::abs(resolvent(op("[[1]]"), 1.0)(0, 0) - 0.5) < 1e-15);
    Mat R = resolvent(op("diag(1,2)"), cplx(0, 1));
    CHECK(std::abs(R(0, 0) - 1.0 / cplx(1, 1)) < 1e-15);
    CHECK(std::abs(R(1, 1) - 1.0 / cplx(2, 1)) < 1e-15);
    CHECK(std::abs(R(0, 1)) == 0.0);
    CHECK((resolvent(op("[[1,1],[0,1]]"), 0.0) - M2(1, -1, 0, 1)).norm() < 1e-14);
    try {
        resolvent(op("[[1]]"), -1.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularShift);
    }
}

TEST_CASE("semigroup examples") {
    CHECK((semigroup(op("[[1,1],[0,1]]"), 1.0) - std::exp(-1.0) * M2(1, -1, 0, 1)).norm() < 1e-14);
    CHECK((semigroup(op("diag(0,0)"), 3.0) - Mat::Identity(2, 2)).norm() == 0.0);
    for (int seed : {1, 2, 3}) {
        auto A = op("normal_random(n=6,seed=" + std::to_string(seed) + ")");
        Vec d(6);
        for (int k = 0; k < 6; ++k) d(k) = std::exp(-0.7 * A.eigenvalues()(k));
        const Mat ref = A.eigenvectors() * d.asDiagonal() * A.eigenvectors().inverse();
        CHECK((semigroup(A, 0.7) - ref).norm() < 1e-10);
    }
}

TEST_CASE("profile examples") {
    auto p = op("[[1]]").profile();
    CHECK(p.K_A == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.M_A == doctest::Approx(1.0).epsilon(1e-9));
    // (2/pi) alpha int d beta / ((alpha+1)^2 + beta^2) = 2 alpha/(alpha+1) increases to 2
    CHECK(p.gamma_hat == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(p.gamma_weak_sample <= p.gamma_hat + 1e-6);
    CHECK(p.gamma_weak_sample > 1.99);
    auto u = op("diag(i,-i)").profile();
    CHECK(u.K_A == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(u.M_A));
    CHECK(u.to_json()["M_A"] == "inf");
}

TEST_CASE("closed-form resolvent-square integral") {
    // int d beta / ((alpha+1)^2 + beta^2) = pi/(alpha+1)
    auto A = op("[[1]]");
    for (double a : {0.01, 1.0, 100.0})
        CHECK(resolvent_sq_integral(A, a).value == doctest::Approx(kPi / (a + 1)).epsilon(1e-7));
}

TEST_CASE("apply_calculus examples") {
    auto r = apply_calculus(op("[[2]]"), make_catalog("resolvent(a=1)"));
    CHECK(std::abs(r.value(0, 0) - 1.0 / 3) < 1e-8);
    CHECK_FALSE(r.extrapolated);
    auto e = apply_calculus(op("diag(1,2)"), make_catalog("exp(a=1)")).value;
    CHECK(std::abs(e(0, 0) - std::exp(-1.0)) < 1e-8);
    CHECK(std::abs(e(1, 1) - std::exp(-2.0)) < 1e-8);
    CHECK(std::abs(e(0, 1)) < 1e-8);
    // V(A) = (A-I)(A+I)^{-1} = [[0,1/2],[0,0]] is nilpotent
    auto c = apply_calculus(op("[[1,1],[0,1]]"), make_catalog("cayley(n=2)")).value;
    CHECK(c.norm() < 1e-8);
    CHECK_THROWS_AS(apply_calculus(op("[[1]]"), make_catalog("resolvent(a=i)")), Error);
}

TEST_CASE("apply_calculus on the imaginary axis extrapolates") {
    auto A = op("diag(i,-i,1)");
    auto f = make_catalog("cayley(n=3)");
    auto r = apply_calculus(A, f);
    CHECK(r.extrapolated);
    CHECK((r.value - oracle_apply(A, f)).norm() < 1e-4);
    // sectorial with a zero eigenvalue integrates directly
    auto z = apply_calculus(op("diag(0,1)"), make_catalog("exp(a=1)"));
    CHECK_FALSE(z.extrapolated);
    CHECK(std::abs(z.value(0, 0) - 1.0) < 1e-6);
}

TEST_CASE("hp_apply examples") {
    auto A = op("diag(1,2)");
    CHECK((hp_apply(A, parse_measure("dirac(0)")).value - Mat::Identity(2, 2)).norm() == 0.0);
    auto chi = hp_apply(A, parse_measure("laplace(atoms=[(0,1)];density=exp(rate=1,coeff=-2))")).value;
    CHECK(std::abs(chi(0, 0)) < 1e-8);
    CHECK(std::abs(chi(1, 1) - 1.0 / 3) < 1e-8);
    auto eta = hp_apply(op("[[1]]"), parse_measure("lebesgue(0,1)")).value;
    CHECK(std::abs(eta(0, 0) - (1 - std::exp(-1.0))) < 1e-8);
}

TEST_CASE("oracle_apply examples") {
    auto c = oracle_apply(op("diag(1,2)"), make_catalog("cayley(n=1)"));
    CHECK(std::abs(c(0, 0)) < 1e-15);
    CHECK(std::abs(c(1, 1) - 1.0 / 3) < 1e-15);
    auto j = oracle_apply(op("[[1,1],[0,1]]"), make_catalog("exp(a=1)"));
    CHECK((j - std::exp(-1.0) * M2(1, -1, 0, 1)).norm() < 1e-12);
    auto A = op("normal_random(n=4,seed=11)");
    auto eta = make_catalog("eta");
    Vec d(4);
    for (int k = 0; k < 4; ++k) d(k) = eta.eval(A.eigenvalues()(k));
    const Mat& V = A.eigenvectors();
    CHECK((oracle_apply(A, eta) - V * d.asDiagonal() * V.inverse()).norm() < 1e-12);
    // third-order Taylor block
    auto J = op("jordan(lambda=2,m=3)");
    auto e = oracle_apply(J, make_catalog("exp(a=1)"));
    CHECK(std::abs(e(0, 2) - std::exp(-2.0) / 2) < 1e-9);
    Mat defective = Mat::Identity(3, 3);
    defective(0, 2) = 1.0;
    defective(0, 1) = 1.0;
    defective(1, 2) = 0.5;
    defective.diagonal() << 1.0, 1.0, 1.0;
    try {
        oracle_apply(MatrixOperator(defective), make_catalog("exp(a=1)"));
        CHECK(false);
    } catch (const Error& e2) {
        CHECK(e2.kind() == ErrorKind::NotDiagonalizable);
    }
}

TEST_CASE("semigroup reconstruction") {
    const Vec one = Vec::Ones(1);
    CHECK(semigroup_reconstruct_check(op("[[1]]"), 1.0, one, one) < 1e-6);
    CHECK(semigroup_reconstruct_check(op("[[1]]"), 2.0, one, one) < 1e-6);
    CHECK(semigroup_reconstruct_check(op("diag(1,3)"), 0.5, random_unit_vector(2, 1), random_unit_vector(2, 2)) <
          1e-5);
    CHECK(semigroup_reconstruct_check(op("jordan(lambda=0.5+i,m=2)"), 3.0, random_unit_vector(2, 3),
                                      random_unit_vector(2, 4)) < 1e-5);
}

TEST_CASE("matrix text format and families") {
    Mat M = make_matrix("[[1+2i,0.5],[-i,3]]");
    std::stringstream ss;
    write_matrix(ss, M);
    CHECK(ss.str() == "2\n1+2i 0.5\n-i 3\n");
    CHECK((read_matrix(ss) - M).norm() == 0.0);
    std::stringstream bad("2\n1 2\n3");
    CHECK_THROWS_AS(read_matrix(bad), Error);
    const std::string path = "operator_roundtrip.txt";
    {
        std::ofstream out(path);
        write_matrix(out, make_matrix("diag(1,2)"));
    }
    CHECK((load_operator(path).matrix() - make_matrix("diag(1,2)")).norm() == 0.0);
    std::remove(path.c_str());
    CHECK(make_matrix("jordan(lambda=3,m=2)") == M2(3, 1, 0, 3));
    // same seed, same matrix
    CHECK(make_matrix("sectorial_random(n=4,seed=5,angle=pi/3)") == make_matrix("sectorial_random(n=4,seed=5,angle=pi/3)"));
    auto S = op("sectorial_random(n=6,seed=5,angle=pi/6)");
    for (const cplx& l : S.eigenvalues()) CHECK(std::abs(std::arg(l)) <= kPi / 6 + 1e-9);
    auto B = op("diagonalizable_random(n=5,seed=2,re=[0.5,5],im=[-5,5])");
    for (const cplx& l : B.eigenvalues()) {
        CHECK(l.real() >= 0.5 - 1e-9);
        CHECK(l.real() <= 5 + 1e-9);
        CHECK(std::abs(l.imag()) <= 5 + 1e-9);
    }
    CHECK_THROWS_AS(make_matrix("nosuch(1)"), Error);
    CHECK_THROWS_AS(make_matrix("sectorial_random(n=3,seed=1,angle=2)"), Error);
}

// ---------------------------------------------------------------- properties

TEST_CASE("property: oracle equivalence and eigenvector rule") {
    const std::vector<std::string> fs = {"exp(a=1)", "cayley(n=4)", "eta", "resolvent(a=1+2i)"};
    for (int seed : {1, 2}) {
        auto A = op("diagonalizable_random(n=4,seed=" + std::to_string(seed) + ")");
        for (const auto& s : fs) {
            CAPTURE(seed);
            CAPTURE(s);
            auto f = make_catalog(s);
            const Mat F = apply_calculus(A, f).value;
            CHECK((F - oracle_apply(A, f)).norm() < 1e-4);
            for (int k = 0; k < 4; ++k) {
                const Vec x = A.eigenvectors().col(k);
                CHECK((F * x - f.eval(A.eigenvalues()(k)) * x).norm() < 1e-5);
            }
        }
    }
}

TEST_CASE("property: homomorphism") {
    auto A = op("sectorial_random(n=3,seed=9,angle=pi/4)");
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"exp(a=1)", "cayley(n=2)"}, {"eta", "resolvent(a=1)"}, {"expinv(t=2)", "vitse(t=1)"}};
    for (const auto& [a, b] : pairs) {
        CAPTURE(a);
        CAPTURE(b);
        auto f = make_catalog(a), g = make_catalog(b);
        const Mat lhs = apply_calculus(A, fn::mul(f, g)).value;
        const Mat rhs = apply_calculus(A, f).value * apply_calculus(A, g).value;
        CHECK((lhs - rhs).norm() < 1e-4);
    }
}

TEST_CASE("property: calculus, Hilbert and sectorial bounds") {
    const std::vector<std::string> fs = {"exp(a=1)", "cayley(n=8)", "eta", "vitse(t=10)"};
    for (const char* spec : {"sectorial_random(n=4,seed=3,angle=pi/4)", "normal_random(n=4,seed=3)"}) {
        auto A = op(spec);
        const auto& p = A.profile();
        CAPTURE(spec);
        CHECK(p.gamma_hat >= 4 / std::exp(1.0));
        CHECK(p.gamma_weak_sample <= p.gamma_hat + 1e-6);
        if (std::isfinite(p.M_A))
            CHECK(p.gamma_hat <= 8 * (2 + std::log(2.0)) * p.M_A * (std::log(p.M_A) + 1) + 1e-6);
        for (const auto& s : fs) {
            CAPTURE(s);
            auto f = make_catalog(s);
            const double nf = opnorm(apply_calculus(A, f).value);
            const double bn = b_norm(f).value;
            CHECK(nf <= p.gamma_hat * bn + 1e-6);
            if (A.is_normal()) CHECK(nf <= 2 * p.K_A * p.K_A * bn + 1e-6);
        }
    }
}

TEST_CASE("property: HP compatibility") {
    auto A = op("diagonalizable_random(n=3,seed=4)");
    for (const char* m : {"laplace(atoms=[(0,1)];density=exp(rate=1,coeff=-2))", "lebesgue(0,1)", "dirac(1)"}) {
        CAPTURE(m);
        auto mu = parse_measure(m);
        const Mat lhs = apply_calculus(A, fn::laplace(mu)).value;
        CHECK((lhs - hp_apply(A, mu).value).norm() < 1e-4);
    }
}

TEST_CASE("property: shift and dilation laws") {
    auto A = op("sectorial_random(n=3,seed=6,angle=pi/3)");
    for (const char* s : {"cayley(n=3)", "eta", "expinv(t=1)"}) {
        auto f = make_catalog(s);
        CAPTURE(s);
        for (double a : {0.5, 2.0}) {
            CAPTURE(a);
            CHECK((apply_calculus(A.shifted(a), f).value - apply_calculus(A, fn::shift(f, a)).value).norm() < 1e-5);
            CHECK((apply_calculus(A.scaled(a), f).value - apply_calculus(A, fn::dilate(f, a)).value).norm() < 1e-5);
        }
    }
}

TEST_CASE("property: weak Plancherel bound for normal operators") {
    auto A = op("normal_random(n=4,seed=21,re=[0,3],im=[-3,3])");
    const double K = A.profile().K_A;
    for (int k = 0; k < 5; ++k)
        for (double a : {0.05, 1.0, 20.0}) {
            const Vec x = random_unit_vector(4, 100 + k), y = random_unit_vector(4, 200 + k);
            CHECK(weak_resolvent_sq_integral(A, a, x, y).value <= kPi * K * K / a + 1e-6);
        }
}
