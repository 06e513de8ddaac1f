#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"

using namespace sdem;

namespace {

MomentSystem closed(const SdeModel& m, const Monomial& alpha) { return std::get<MomentSystem>(build_closure(m, alpha)); }

ExactClosedForm exact(const MomentSystem& ms) { return std::get<ExactClosedForm>(solve_closed_form(ms)); }

Rational q(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

const std::vector<double> kTimes{0, 0.1, 0.5, 1, 2, 5, 10};

void expect_close(double got, double want, const std::string& what) {
    EXPECT_LE(std::abs(got - want), 1e-10 + 1e-8 * std::abs(want)) << what << ": " << got << " vs " << want;
}

}  // namespace

TEST(ClosedForm, OuEnvSecondMomentTerms) {
    const SdeModel m = load_benchmark("ou-env");
    const ExactClosedForm cf = exact(closed(m, Monomial{0, 2}));
    ExactClosedForm want;
    want.terms = {{q(0), {q(1, 3)}}, {q(-2), {q(-11, 8), q(-1, 4)}}, {q(-3), {q(2, 3)}}, {q(-4), {q(3, 8), q(1), q(3, 4)}}};
    EXPECT_EQ(cf, want);
    EXPECT_EQ(to_string(cf), "1/3 + (-11/8 - 1/4*t)*exp(-2*t) + 2/3*exp(-3*t) + (3/8 + t + 3/4*t^2)*exp(-4*t)");
    EXPECT_EQ(value_at_zero(cf), 0);
    EXPECT_NEAR(eval_closed_form(cf, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(eval_closed_form(cf, 50.0), 1.0 / 3.0, 1e-9);
}

TEST(ClosedForm, OuEnvJson) {
    const auto j = to_json(exact(closed(load_benchmark("ou-env"), Monomial{0, 2})));
    EXPECT_EQ(j["scalar_kind"], "exact-rational");
    ASSERT_EQ(j["terms"].size(), 4u);
    EXPECT_EQ(j["terms"][1]["lambda"], "-2");
    EXPECT_EQ(j["terms"][1]["coeffs"], (nlohmann::json{"-11/8", "-1/4"}));
}

TEST(ClosedForm, LowOrderOuEnvMomentsByHand) {
    // dx1 = -x1 dt + dW1, x1(0) = 0: E[x1^2] = (1 - e^{-2t})/2
    const ExactClosedForm cf = exact(closed(load_benchmark("ou-env"), Monomial{2, 0}));
    ExactClosedForm want;
    want.terms = {{q(0), {q(1, 2)}}, {q(-2), {q(-1, 2)}}};
    EXPECT_EQ(cf, want);
    EXPECT_TRUE(exact(closed(load_benchmark("ou-env"), Monomial{1, 0})).terms.empty());
}

TEST(ClosedForm, VehiclesDistanceMean) {
    const SdeModel m = load_benchmark("vehicles");
    const auto res = linear_functional_moment(m, parse_polynomial("p1 - p2", m.variables));
    const auto& fm = std::get<FunctionalMoment>(res);
    const ExactClosedForm cf = std::get<ExactClosedForm>(fm.closed_form());
    // u = v1 - 1 is OU from -1, so E[u^2] = 1/2 + e^{-2t}/2, E[v1] = 1 - e^{-t},
    // E[p1] = t + e^{-t}, E[v2] = 1/2 - e^{-2t}/2, E[p2] = t/2 - 1/4 + e^{-2t}/4
    ExactClosedForm want;
    want.terms = {{q(0), {q(1, 4), q(1, 2)}}, {q(-1), {q(1)}}, {q(-2), {q(-1, 4)}}};
    EXPECT_EQ(cf, want);
    EXPECT_EQ(value_at_zero(cf), 1);
    const auto num = fm.eval(kTimes);
    for (std::size_t i = 0; i < kTimes.size(); ++i) {
        const double t = kTimes[i];
        const double hand = 0.25 + t / 2 + std::exp(-t) - std::exp(-2 * t) / 4;
        expect_close(num[i], hand, "vehicles t=" + std::to_string(t));
        expect_close(eval_closed_form(cf, t), hand, "vehicles cf t=" + std::to_string(t));
    }
}

TEST(ClosedForm, ConsensusNeedsFloatSpectrum) {
    const SdeModel m = load_benchmark("consensus");
    const auto fm = std::get<FunctionalMoment>(linear_functional_moment(m, parse_polynomial("(x1 - x2)^2", m.variables)));
    const auto ex = fm.closed_form();
    ASSERT_TRUE(std::holds_alternative<Unsupported>(ex));
    EXPECT_EQ(std::get<Unsupported>(ex).factor, UPoly({q(8), q(7), q(1)}));
    const auto fl = fm.float_closed_form();
    ASSERT_TRUE(std::holds_alternative<FloatClosedForm>(fl));
    const double r17 = std::sqrt(17.0);
    for (double t : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double paper = ((17 - 3 * r17) * std::exp((r17 - 7) * t / 2) + (17 + 3 * r17) * std::exp(-(r17 + 7) * t / 2)) / 34;
        EXPECT_NEAR(eval_closed_form(std::get<FloatClosedForm>(fl), t), paper, 1e-9) << t;
    }
}

TEST(ClosedForm, FloatPathRefusesRepeatedEigenvalues) {
    const auto res = solve_float_closed_form(closed(load_benchmark("ou-env"), Monomial{0, 2}));
    EXPECT_TRUE(std::holds_alternative<Unsupported>(res));
}

TEST(ClosedForm, FloatPathAgreesWithExactWhenSimple) {
    const MomentSystem ms = closed(load_benchmark("ou-env"), Monomial{2, 0});
    const auto fl = std::get<FloatClosedForm>(solve_float_closed_form(ms));
    const auto ex = exact(ms);
    for (double t : kTimes) EXPECT_NEAR(eval_closed_form(fl, t), eval_closed_form(ex, t), 1e-12);
}

TEST(ClosedForm, SingleMonomialFunctionalMatchesPlainPipeline) {
    for (const auto& row : table1_rows()) {
        const SdeModel m = load_benchmark(row.benchmark);
        const Monomial alpha(row.alpha);
        Polynomial f(m.dim());
        f.add_term(alpha, 1);
        const auto fm = std::get<FunctionalMoment>(linear_functional_moment(m, f));
        const MomentSystem ms = closed(m, alpha);
        EXPECT_EQ(fm.system.indices, ms.indices) << row.benchmark;
        const auto a = fm.closed_form();
        const auto b = solve_closed_form(ms);
        ASSERT_EQ(a.index(), b.index()) << row.benchmark;
        if (a.index() == 0) {
            EXPECT_EQ(std::get<0>(a), std::get<0>(b)) << row.benchmark;
        }
    }
}

TEST(ClosedForm, AgreesWithMatrixExponentialOnBenchmarks) {
    for (const auto& row : table1_rows()) {
        const SdeModel m = load_benchmark(row.benchmark);
        const MomentSystem ms = closed(m, Monomial(row.alpha));
        const auto num = eval_numeric(ms, kTimes);
        const auto ex = solve_closed_form(ms);
        const auto fl = solve_float_closed_form(ms);
        ASSERT_TRUE(ex.index() == 0 || fl.index() == 0) << row.benchmark;
        for (std::size_t i = 0; i < kTimes.size(); ++i) {
            const std::string what = row.benchmark + " " + Monomial(row.alpha).to_tuple() + " t=" + std::to_string(kTimes[i]);
            if (ex.index() == 0) expect_close(eval_closed_form(std::get<0>(ex), kTimes[i]), num[i][0], what);
            if (fl.index() == 0) expect_close(eval_closed_form(std::get<0>(fl), kTimes[i]), num[i][0], what + " float");
        }
    }
}

TEST(ClosedForm, OdeResidualIsIdenticallyZero) {
    for (const auto& row : table1_rows()) {
        const MomentSystem ms = closed(load_benchmark(row.benchmark), Monomial(row.alpha));
        const auto all = solve_closed_form_all(ms);
        if (all.index() != 0) continue;
        const auto& cfs = std::get<0>(all);
        ASSERT_EQ(cfs.size(), ms.size());
        for (std::size_t r = 0; r < ms.size(); ++r) {
            std::vector<std::pair<Rational, const ExactClosedForm*>> rhs;
            for (const auto& [col, v] : ms.rows[r]) rhs.emplace_back(v, &cfs[col]);
            EXPECT_EQ(derivative(cfs[r]), scaled_sum(rhs, ms.vector_c[r])) << row.benchmark << " row " << r;
            EXPECT_EQ(value_at_zero(cfs[r]), ms.m0[r]) << row.benchmark << " row " << r;
        }
    }
}

TEST(ClosedForm, RandomTriangularModelsHaveRationalSpectra) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        SdeModel m = oracle::random_triangular_model(rng, 2, 2);
        m.initial = InitialCondition::at_point(oracle::random_point(rng, 2));
        const MomentSystem ms = closed(m, Monomial{1, 1});
        const auto res = solve_closed_form(ms);
        ASSERT_EQ(res.index(), 0u) << std::get<Unsupported>(res).reason;
        const auto num = eval_numeric(ms, std::vector<double>{0, 0.1, 0.3, 0.5});
        const auto& cf = std::get<0>(res);
        EXPECT_EQ(value_at_zero(cf), ms.m0[0]);
        for (std::size_t i = 0; i < 4; ++i) {
            const double t = std::vector<double>{0, 0.1, 0.3, 0.5}[i];
            EXPECT_LE(std::abs(eval_closed_form(cf, t) - num[i][0]), 1e-8 * (1 + std::abs(num[i][0]))) << k << " t=" << t;
        }
    }
}

TEST(Spectrum, CharacteristicPolynomialMatchesDeterminant) {
    std::set<std::string> seen;
    for (const auto& row : table1_rows()) {
        if (!seen.insert(row.benchmark).second) continue;
        const std::string& name = row.benchmark;
        const MomentSystem ms = closed(load_benchmark(name), Monomial(row.alpha));
        const RationalMatrix a = augmented_matrix_exact(ms);
        const UPoly chi = rational_spectrum(ms).characteristic;
        EXPECT_EQ(chi, characteristic_polynomial(a)) << name;
        EXPECT_EQ(chi.degree(), static_cast<int>(a.size()));
        for (long x = -3; x <= 3; ++x) {
            RationalMatrix xm = a;
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (auto& v : xm[i]) v = -v;
                xm[i][i] += x;
            }
            EXPECT_EQ(chi.eval(Rational(x)), oracle::determinant(xm)) << name << " x=" << x;
        }
    }
}

TEST(Spectrum, OuEnvRootsWithMultiplicity) {
    const auto spec = rational_spectrum(closed(load_benchmark("ou-env"), Monomial{0, 2}));
    EXPECT_TRUE(spec.splits());
    const std::vector<std::pair<Rational, unsigned>> want{{q(0), 1}, {q(-1), 1}, {q(-2), 2}, {q(-3), 2}, {q(-4), 3}};
    EXPECT_EQ(spec.roots, want);
}

TEST(Expm, KnownMatrices) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
    EXPECT_TRUE(expm(z).isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-15));
    Eigen::MatrixXd n(2, 2);
    n << 0, 1, 0, 0;
    Eigen::MatrixXd en(2, 2);
    en << 1, 1, 0, 1;
    EXPECT_LE((expm(n) - en).norm(), 1e-14);
    for (double th : {0.3, 2.0, 10.0, 40.0}) {
        Eigen::MatrixXd r(2, 2);
        r << 0, -th, th, 0;
        Eigen::MatrixXd er(2, 2);
        er << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        EXPECT_LE((expm(r) - er).norm(), 1e-12) << th;
    }
    Eigen::MatrixXd d = Eigen::Vector3d(-50, 0.5, 3).asDiagonal();
    const Eigen::MatrixXd ed = expm(d);
    EXPECT_NEAR(ed(0, 0), std::exp(-50.0), 1e-30);
    EXPECT_NEAR(ed(1, 1), std::exp(0.5), 1e-13);
    EXPECT_NEAR(ed(2, 2) / std::exp(3.0), 1.0, 1e-13);
    // Jordan block: exp(J t) = e^{lt} [[1, t], [0, 1]]
    Eigen::MatrixXd j(2, 2);
    j << -2, 1, 0, -2;
    EXPECT_NEAR(expm(j * 3.0)(0, 1), 3.0 * std::exp(-6.0), 1e-15);
}

TEST(Expm, SemigroupProperty) {
    for (const auto& row : table1_rows()) {
        const AugmentedSystem aug(closed(load_benchmark(row.benchmark), Monomial(row.alpha)));
        const Eigen::MatrixXd lhs = expm(aug.matrix * 1.7);
        const Eigen::MatrixXd rhs = expm(aug.matrix * 0.5) * expm(aug.matrix * 1.2);
        EXPECT_LE((lhs - rhs).norm(), 1e-9 * (1 + lhs.norm())) << row.benchmark;
    }
}

TEST(EvalNumeric, InitialValueAndChecks) {
    const MomentSystem ms = closed(load_benchmark("vehicles"), Monomial{1, 0, 0, 0});
    const auto at0 = eval_numeric(ms, std::vector<double>{0.0});
    for (std::size_t r = 0; r < ms.size(); ++r) EXPECT_DOUBLE_EQ(at0[0][r], ms.m0[r].get_d());
    EXPECT_THROW(eval_numeric(ms, std::vector<double>{-1.0}), Error);
    EXPECT_THROW(eval_numeric(ms, std::vector<double>{2.0, 1.0}), Error);
    EXPECT_THROW(eval_numeric(ms, std::vector<double>{std::nan("")}), Error);
    EXPECT_THROW(eval_numeric(ms, std::vector<double>{1.0}, std::vector<Rational>(ms.size() + 1)), Error);
}

TEST(MarkovTailBound, ConsensusTail) {
    const SdeModel m = load_benchmark("consensus");
    const auto fm = std::get<FunctionalMoment>(linear_functional_moment(m, parse_polynomial("(x1 - x2)^2", m.variables)));
    const std::vector<double> ts{10, 12, 15};
    const auto vals = fm.eval(ts);
    for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_LE(markov_tail_bound(vals[i], 0.1), std::exp(-ts[i])) << ts[i];
    EXPECT_DOUBLE_EQ(markov_tail_bound(4.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(markov_tail_bound(32.0, 2.0, 4), 2.0);
    EXPECT_THROW(markov_tail_bound(1.0, 0.0), Error);
    EXPECT_THROW(markov_tail_bound(1.0, 1.0, 3), Error);
    EXPECT_THROW(markov_tail_bound(1.0, 1.0, 0), Error);
    EXPECT_THROW(markov_tail_bound(-1.0, 1.0), Error);
}
