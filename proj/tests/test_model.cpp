#include <gtest/gtest.h>

#include "sdem/benchmarks.hpp"

using namespace sdem;

namespace {

Polynomial P(const SdeModel& m, const std::string& s) { return parse_polynomial(s, m.variables); }

const char* minimal = R"({
  "name": "m",
  "variables": ["x", "y"],
  "brownian_dim": 1,
  "drift": ["-x", "x*y"],
  "diffusion": [["1"], ["0.5*y"]],
  "initial": {"kind": "point", "values": ["1", "-3/2"]}
})";

void expect_model_error(const std::string& text) { EXPECT_THROW(load_model(text), ModelError) << text; }

std::string replace(std::string s, const std::string& what, const std::string& with) {
    const auto at = s.find(what);
    EXPECT_NE(at, std::string::npos) << what;
    return s.replace(at, what.size(), with);
}

}  // namespace

TEST(LoadModel, OuEnvBenchmark) {
    const SdeModel m = load_benchmark("ou-env");
    EXPECT_EQ(m.dim(), 2u);
    EXPECT_EQ(m.brownian_dim, 2u);
    EXPECT_EQ(m.drift[0], P(m, "-x1"));
    EXPECT_EQ(m.drift[1], P(m, "-2*x2 + x1 + x1^2"));
    EXPECT_EQ(m.diffusion[0][0], P(m, "1"));
    EXPECT_TRUE(m.diffusion[0][1].is_zero());
    EXPECT_TRUE(m.diffusion[1][0].is_zero());
    EXPECT_EQ(m.diffusion[1][1], P(m, "x1"));
    ASSERT_EQ(m.initial.kind, InitialCondition::Kind::point);
    EXPECT_EQ(m.initial.point, (std::vector<Rational>{0, 0}));
}

TEST(LoadModel, VehiclesExpandsSquaredDrift) {
    const SdeModel m = load_benchmark("vehicles");
    EXPECT_EQ(m.variables, (std::vector<std::string>{"p1", "v1", "p2", "v2"}));
    EXPECT_EQ(m.drift[3], P(m, "-v2 + v1^2 - 2*v1 + 1"));
    EXPECT_EQ(m.initial.point, (std::vector<Rational>{1, 0, 0, 0}));
}

TEST(LoadModel, EveryBenchmarkLoadsAndValidates) {
    for (const auto& name : benchmark_names()) {
        SdeModel m;
        ASSERT_NO_THROW(m = load_benchmark(name)) << name;
        EXPECT_EQ(m.name, name);
        EXPECT_NO_THROW(m.validate());
    }
}

TEST(LoadModel, BenchmarkDimensionsAndDegrees) {
    struct Row {
        const char* name;
        std::size_t dim;
        std::uint64_t deg;
    };
    // dim and deg columns of the published table
    for (const Row& r : {Row{"ou-env", 2, 2}, Row{"gene", 5, 3}, Row{"consensus", 2, 1}, Row{"vehicles", 4, 2},
                         Row{"oscillator", 3, 2}, Row{"coupled3d", 3, 3}}) {
        const SdeModel m = load_benchmark(r.name);
        EXPECT_EQ(m.dim(), r.dim) << r.name;
        EXPECT_EQ(m.degree(), r.deg) << r.name;
    }
}

TEST(LoadModel, ShapeMismatchesAreRejected) {
    const std::string base = minimal;
    expect_model_error(replace(base, R"(["-x", "x*y"])", R"(["-x"])"));
    expect_model_error(replace(base, R"([["1"], ["0.5*y"]])", R"([["1"]])"));
    expect_model_error(replace(base, R"([["1"], ["0.5*y"]])", R"([["1", "0"], ["0.5*y"]])"));
    expect_model_error(replace(base, R"(["1", "-3/2"])", R"(["1"])"));
}

TEST(LoadModel, SchemaViolationsAreRejected) {
    const std::string base = minimal;
    expect_model_error("not json");
    expect_model_error("[1, 2]");
    expect_model_error(replace(base, R"("name": "m",)", ""));
    expect_model_error(replace(base, R"("brownian_dim": 1)", R"("brownian_dim": 0)"));
    expect_model_error(replace(base, R"("x", "y"])", R"("x", "x"])"));
    expect_model_error(replace(base, R"("x", "y"])", R"("x", "t"])"));
    expect_model_error(replace(base, R"("kind": "point")", R"("kind": "gaussian")"));
    expect_model_error(replace(base, R"("-x")", R"("-z")"));
    expect_model_error(replace(base, R"("-x")", R"("-x/y")"));
    expect_model_error(replace(base, R"("-3/2")", R"("abc")"));
}

TEST(LoadModel, MomentTableInitialCondition) {
    const std::string text = replace(minimal, R"({"kind": "point", "values": ["1", "-3/2"]})",
                                     R"j({"kind": "moments", "table": {"(1,0)": "1/2", "(0, 2)": 3}})j");
    const SdeModel m = load_model(text);
    EXPECT_EQ(initial_moment(m.initial, Monomial{1, 0}), Rational(1, 2));
    EXPECT_EQ(initial_moment(m.initial, Monomial{0, 2}), 3);
    EXPECT_EQ(initial_moment(m.initial, Monomial{0, 0}), 1);
    try {
        initial_moment(m.initial, Monomial{1, 1});
        FAIL() << "missing moment should throw";
    } catch (const MissingMomentError& e) {
        EXPECT_EQ(e.index(), (Monomial{1, 1}));
    }
    expect_model_error(replace(text, R"j("(0, 2)")j", R"j("(0,2,1)")j"));
}

TEST(InitialMoment, DeterministicPoint) {
    EXPECT_EQ(initial_moment(load_benchmark("ou-env").initial, Monomial{2, 1}), 0);
    EXPECT_EQ(initial_moment(load_benchmark("vehicles").initial, Monomial{1, 0, 0, 0}), 1);
    EXPECT_EQ(initial_moment(load_benchmark("vehicles").initial, Monomial{0, 0, 0, 0}), 1);
    const SdeModel m = load_model(minimal);
    EXPECT_EQ(initial_moment(m.initial, Monomial{0, 3}), Rational(-27, 8));
}

TEST(InitialMoment, MultiplicativeAtPoints) {
    const SdeModel m = load_model(minimal);
    for (unsigned a = 0; a < 4; ++a)
        for (unsigned b = 0; b < 4; ++b)
            for (unsigned c = 0; c < 4; ++c)
                for (unsigned d = 0; d < 4; ++d) {
                    const Monomial u{a, b}, v{c, d};
                    EXPECT_EQ(initial_moment(m.initial, u * v), initial_moment(m.initial, u) * initial_moment(m.initial, v));
                }
}

TEST(ModelJson, RoundTripReproducesEveryBenchmark) {
    for (const auto& name : benchmark_names()) {
        const SdeModel m = load_benchmark(name);
        const SdeModel again = load_model(model_to_json(m).dump());
        EXPECT_EQ(again.name, m.name);
        EXPECT_EQ(again.variables, m.variables);
        EXPECT_EQ(again.brownian_dim, m.brownian_dim);
        EXPECT_EQ(again.drift, m.drift);
        EXPECT_EQ(again.diffusion, m.diffusion);
        EXPECT_EQ(again.initial.point, m.initial.point);
    }
}

TEST(ModelJson, RoundTripMomentTable) {
    const std::string text = replace(minimal, R"({"kind": "point", "values": ["1", "-3/2"]})",
                                     R"j({"kind": "moments", "table": {"(1,0)": "1/2", "(2,0)": "-7"}})j");
    const SdeModel m = load_model(text);
    const SdeModel again = load_model(model_to_json(m).dump());
    EXPECT_EQ(again.initial.table, m.initial.table);
}
