#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace sdem;

namespace {

Polynomial P(const SdeModel& m, const std::string& s) { return parse_polynomial(s, m.variables); }

std::map<Monomial, Rational, GrlexLess> terms(std::initializer_list<std::pair<Monomial, Rational>> l) {
    return {l.begin(), l.end()};
}

}  // namespace

TEST(DiffusionProduct, OuEnv) {
    const SdeModel m = load_benchmark("ou-env");
    const auto d = diffusion_product(m);
    EXPECT_EQ(d[0][0], P(m, "1"));
    EXPECT_TRUE(d[0][1].is_zero());
    EXPECT_TRUE(d[1][0].is_zero());
    EXPECT_EQ(d[1][1], P(m, "x1^2"));
}

TEST(DiffusionProduct, ZeroDiffusionGivesZeroMatrix) {
    SdeModel m = load_benchmark("ou-env");
    for (auto& row : m.diffusion)
        for (auto& s : row) s = Polynomial(2);
    for (const auto& row : diffusion_product(m))
        for (const auto& e : row) EXPECT_TRUE(e.is_zero());
}

TEST(DiffusionProduct, ConsensusIsDiagonalSquares) {
    const SdeModel m = load_benchmark("consensus");
    const auto d = diffusion_product(m);
    EXPECT_EQ(d[0][0], P(m, "x1") * P(m, "x1"));
    EXPECT_EQ(d[1][1], P(m, "x2^2"));
    EXPECT_TRUE(d[0][1].is_zero());
}

TEST(DiffusionProduct, SymmetricOnRandomModels) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        const SdeModel m = oracle::random_model(rng, 3, 2);
        const auto d = diffusion_product(m);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(d[i][j], d[j][i]);
    }
}

TEST(ApplyGenerator, OuEnvSecondMomentOfY) {
    const auto img = apply_generator(load_benchmark("ou-env"), Monomial{0, 2});
    EXPECT_EQ(img.linear_part, terms({{Monomial{0, 2}, -4}, {Monomial{2, 1}, 2}, {Monomial{2, 0}, 1}, {Monomial{1, 1}, 2}}));
    EXPECT_EQ(img.constant, 0);
}

TEST(ApplyGenerator, OuEnvSecondMomentOfX) {
    const auto img = apply_generator(load_benchmark("ou-env"), Monomial{2, 0});
    EXPECT_EQ(img.linear_part, terms({{Monomial{2, 0}, -2}}));
    EXPECT_EQ(img.constant, 1);
}

TEST(ApplyGenerator, ConstantMapsToZero) {
    for (const auto& name : benchmark_names()) {
        const SdeModel m = load_benchmark(name);
        const auto img = apply_generator(m, Monomial(m.dim()));
        EXPECT_TRUE(img.linear_part.empty()) << name;
        EXPECT_EQ(img.constant, 0) << name;
    }
}

TEST(ApplyGenerator, LinearPartNeverHoldsConstantOrZeros) {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 30; ++k) {
        const SdeModel m = oracle::random_model(rng, 2, 2);
        const Generator gen(m);
        for (unsigned a = 0; a < 4; ++a)
            for (unsigned b = 0; b < 4; ++b)
                for (const auto& [g, c] : gen.apply(Monomial{a, b}).linear_part) {
                    EXPECT_FALSE(g.is_constant());
                    EXPECT_NE(c, 0);
                }
    }
}

TEST(ApplyGenerator, DoubleWellRaisesDegreeByTwo) {
    // drift x - x^3, unit noise: A x^n = -n x^(n+2) + n x^n + n(n-1)/2 x^(n-2)
    const SdeModel m = load_benchmark("double-well");
    const Generator gen(m);
    for (unsigned n = 1; n <= 30; ++n) {
        const auto img = gen.apply(Monomial{n});
        EXPECT_EQ(img.to_polynomial(1).coefficient(Monomial{n + 2}), -Rational(n)) << n;
        EXPECT_EQ(img.to_polynomial(1).coefficient(Monomial{n}), Rational(n)) << n;
        if (n >= 2) {
            EXPECT_EQ(img.to_polynomial(1).coefficient(Monomial{n - 2}), Rational(n * (n - 1) / 2)) << n;
        }
        EXPECT_EQ(img.to_polynomial(1).size(), n >= 2 ? 3u : 2u);
    }
}

class GeneratorProperty : public ::testing::TestWithParam<int> {};

TEST_P(GeneratorProperty, MatchesPointwiseOracle) {
    std::mt19937_64 rng(500 + GetParam());
    const std::size_t n = 2 + GetParam() % 2;
    const SdeModel m = oracle::random_model(rng, n, 1 + GetParam() % 3);
    const Generator gen(m);
    std::uniform_int_distribution<int> ex(0, 3);
    std::vector<int> beta(n);
    std::vector<Monomial::Exponent> ub(n);
    for (std::size_t i = 0; i < n; ++i) ub[i] = static_cast<Monomial::Exponent>(beta[i] = ex(rng));
    const Polynomial image = gen.apply(Monomial(ub)).to_polynomial(n);
    for (int k = 0; k < 20; ++k) {
        const auto x = oracle::random_point(rng, n);
        EXPECT_EQ(image.eval(x), oracle::generator_at(m, beta, x));
    }
}

TEST_P(GeneratorProperty, LinearOverPolynomials) {
    std::mt19937_64 rng(900 + GetParam());
    const SdeModel m = oracle::random_model(rng, 2, 2);
    const Generator gen(m);
    const Polynomial p = oracle::random_poly(rng, 2), q = oracle::random_poly(rng, 2);
    const Rational s = oracle::random_rational(rng);
    EXPECT_EQ(gen.apply(p + q), gen.apply(p) + gen.apply(q));
    EXPECT_EQ(gen.apply(s * p), s * gen.apply(p));
    Polynomial by_terms(2);
    for (const auto& [mono, c] : p.terms()) by_terms += c * gen.apply_polynomial(mono);
    EXPECT_EQ(gen.apply(p), by_terms);
}

INSTANTIATE_TEST_SUITE_P(Random, GeneratorProperty, ::testing::Range(0, 100));
