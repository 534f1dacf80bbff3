#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "patchbeam/errors.hpp"
#include "patchbeam/expr.hpp"

using namespace patchbeam;

TEST_CASE("literals and arithmetic") {
    CHECK(Expr::parse("1 + 2*3")({0, 0, 0}) == doctest::Approx(7.0));
    CHECK(Expr::parse("(1 + 2)*3")({0, 0, 0}) == doctest::Approx(9.0));
    CHECK(Expr::parse("2^3")({0, 0, 0}) == doctest::Approx(8.0));
    CHECK(Expr::parse("-2^2")({0, 0, 0}) == doctest::Approx(-4.0));
    CHECK(Expr::parse("1/4")({0, 0, 0}) == doctest::Approx(0.25));
}

TEST_CASE("variables and functions") {
    const Expr e = Expr::parse("sin(pi*y1) + y2*y3");
    CHECK(e({0.5, 2, 3}) == doctest::Approx(1.0 + 6.0));
    CHECK(e({0.0, -1, 4}) == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(Expr::parse("sqrt(y2^2+y3^2)")({0, 3, 4}) == doctest::Approx(5.0));
    CHECK(Expr::parse("tanh(0)")({0, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("variable usage tracking") {
    CHECK(Expr::parse("y2 + y3").independent_of(0));
    CHECK_FALSE(Expr::parse("y1").independent_of(0));
    CHECK(Expr::parse("1.5").independent_of(0));
    CHECK(Expr().is_zero());
    CHECK_FALSE(Expr::parse("0.1").is_zero());
}

TEST_CASE("malformed expressions are config errors") {
    CHECK_THROWS_AS(Expr::parse(""), ConfigError);
    CHECK_THROWS_AS(Expr::parse("1 +"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("foo(1)"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("sin 1"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("(1"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("1 2"), ConfigError);
}
