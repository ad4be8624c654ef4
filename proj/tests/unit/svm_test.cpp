#include "mmsarc/svm.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mmsarc/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mmsarc::svm {
namespace {

using testing::ElementsAre;

FeatureVector dense(std::vector<double> v) {
    FeatureVector fv;
    fv.add_dense("x", std::move(v));
    return fv;
}

struct Problem {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    std::vector<FeatureVector> fv;
};

Problem random_problem(mmsarc::Rng& rng) {
    Problem p;
    const std::size_t n = 2 + rng.below(19), d = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = rng.normal();
        const int label = i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1);
        // shift the classes apart a little so some problems are separable
        x[0] += 0.7 * label;
        p.X.push_back(x);
        p.y.push_back(label);
        p.fv.push_back(dense(x));
    }
    return p;
}

TEST(Concat, OffsetsAndIdentity) {
    FeatureVector a, b;
    a.add_dense("a", {1, 2, 3, 4, 5});
    b.add_sparse("b", 3, {1});
    const std::vector<FeatureVector> parts = {a, b};
    const auto c = concat(parts);
    EXPECT_EQ(c.total_dim(), 8u);
    ASSERT_EQ(c.layout().size(), 2u);
    EXPECT_EQ(c.layout()[0].offset, 0u);
    EXPECT_EQ(c.layout()[1].offset, 5u);
    EXPECT_THAT(c.to_dense(), ElementsAre(1, 2, 3, 4, 5, 0, 1, 0));
    const std::vector<FeatureVector> one = {a};
    EXPECT_EQ(concat(one).to_dense(), a.to_dense());
    EXPECT_EQ(concat(one).layout(), a.layout());
    const std::vector<FeatureVector> dup = {a, a};
    EXPECT_THROW(concat(dup), Error);
}

TEST(Train, OneDimensionalAnalyticOptimum) {
    const std::vector<FeatureVector> X = {dense({1.0}), dense({-1.0})};
    const std::vector<int> y = {1, -1};
    const auto m = train(X, y, TrainConfig{});
    EXPECT_NEAR(m.w[0], 1.0, 1e-3);
    EXPECT_NEAR(m.b, 0.0, 1e-3);
    EXPECT_EQ(predict(m, dense({-3.0})).label, -1);
    EXPECT_EQ(predict(m, dense({3.0})).label, 1);
}

TEST(Train, SeparableFourPoints) {
    const std::vector<FeatureVector> X = {dense({2, 1}), dense({1, 2}), dense({-1, -2}), dense({-2, -1})};
    const std::vector<int> y = {1, 1, -1, -1};
    const auto m = train(X, y, TrainConfig{});
    for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(predict(m, X[i]).label, y[i]);
}

TEST(Train, MatchesReferenceSolver) {
    mmsarc::Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_problem(rng);
        const double C = trial % 3 == 0 ? 0.1 : (trial % 3 == 1 ? 1.0 : 10.0);
        TrainConfig cfg;
        cfg.C = C;
        cfg.tol = 1e-6;
        cfg.max_epochs = 100000;
        const auto m = train(p.fv, p.y, cfg);
        const auto ref = oracle::svm_reference(p.X, p.y, C);
        const double ours = oracle::svm_primal(p.X, p.y, m.w, m.b, C);
        EXPECT_LE(std::abs(ours - ref.primal), 1e-3 * std::abs(ref.primal)) << "trial " << trial;
        EXPECT_NEAR(primal_objective(m, p.fv, p.y), ours, 1e-9 * std::max(1.0, ours));
    }
}

TEST(Train, DualStaysFeasible) {
    mmsarc::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(rng);
        TrainConfig cfg;
        cfg.C = 0.5;
        const auto r = train_with_trace(p.fv, p.y, cfg);
        EXPECT_TRUE(r.trace.dual_feasible);
        for (double a : r.trace.alpha) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, cfg.C);
        }
    }
}

// Coordinate ascent never lowers the dual objective, and the dual is a lower
// bound on the primal at every epoch. The primal value of the iterate itself
// is not monotone under this method (it can rise between epochs), so the
// primal is only required to close the gap at convergence.
TEST(Train, DualObjectiveNeverDecreases) {
    mmsarc::Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_problem(rng);
        const auto r = train_with_trace(p.fv, p.y, TrainConfig{});
        for (std::size_t e = 1; e < r.trace.dual.size(); ++e) {
            EXPECT_GE(r.trace.dual[e], r.trace.dual[e - 1] - 1e-9);
        }
        for (std::size_t e = 0; e < r.trace.dual.size(); ++e) {
            EXPECT_LE(r.trace.dual[e], r.trace.primal[e] + 1e-9);
        }
    }
}

TEST(Train, DualityGapClosesAtConvergence) {
    mmsarc::Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_problem(rng);
        TrainConfig cfg;
        cfg.tol = 1e-8;
        cfg.max_epochs = 200000;
        const auto r = train_with_trace(p.fv, p.y, cfg);
        ASSERT_TRUE(r.trace.converged) << "trial " << trial;
        const double primal = r.trace.primal.back(), dual = r.trace.dual.back();
        EXPECT_LE(primal - dual, 1e-4 * std::max(1.0, primal)) << "trial " << trial;
        EXPECT_LE(primal, r.trace.primal.front() + 1e-9);
    }
}

TEST(Train, Deterministic) {
    mmsarc::Rng rng(10);
    const auto p = random_problem(rng);
    TrainConfig cfg;
    cfg.seed = 77;
    const auto a = train(p.fv, p.y, cfg);
    const auto b = train(p.fv, p.y, cfg);
    ASSERT_EQ(a.w.size(), b.w.size());
    EXPECT_EQ(std::memcmp(a.w.data(), b.w.data(), a.w.size() * sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.b, &b.b, sizeof(double)), 0);
}

TEST(Train, Errors) {
    const std::vector<FeatureVector> X = {dense({1.0}), dense({2.0})};
    try {
        train(X, std::vector<int>{1, 1}, TrainConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateLabels);
    }
    TrainConfig bad;
    bad.C = 0.0;
    EXPECT_THROW(train(X, std::vector<int>{1, -1}, bad), Error);
}

TEST(Predict, ScoreAndTies) {
    SvmModel m;
    m.w = {1.0, 0.0};
    m.layout = dense({0, 0}).layout();
    auto p = predict(m, dense({2, 5}));
    EXPECT_DOUBLE_EQ(p.score, 2.0);
    EXPECT_EQ(p.label, 1);
    p = predict(m, dense({0, 5}));
    EXPECT_DOUBLE_EQ(p.score, 0.0);
    EXPECT_EQ(p.label, 1);
    try {
        predict(m, dense({1, 2, 3}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LayoutMismatch);
    }
}

TEST(Predict, LabelInvariantUnderPositiveScaling) {
    mmsarc::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        SvmModel m;
        m.w = {rng.normal(), rng.normal(), rng.normal()};
        m.b = rng.normal();
        m.layout = dense({0, 0, 0}).layout();
        const auto x = dense({rng.normal(), rng.normal(), rng.normal()});
        const double s = std::exp(rng.uniform(-5, 5));
        auto scaled = m;
        for (auto& v : scaled.w) v *= s;
        scaled.b *= s;
        EXPECT_EQ(predict(scaled, x).label, predict(m, x).label);
    }
}

TEST(Model, SaveLoadIsExact) {
    mmsarc::Rng rng(12);
    const auto p = random_problem(rng);
    TrainConfig cfg;
    cfg.normalize = true;
    const auto m = train(p.fv, p.y, cfg);
    std::stringstream buf;
    save(buf, m);
    const auto again = load(buf);
    EXPECT_EQ(again.w, m.w);
    EXPECT_EQ(again.b, m.b);
    EXPECT_EQ(again.C, m.C);
    EXPECT_EQ(again.normalize, m.normalize);
    EXPECT_EQ(again.layout, m.layout);
}

TEST(Model, SparseAndDenseAgree) {
    FeatureVector s, d;
    s.add_sparse("x", 4, {0, 2});
    d.add_dense("x", {1, 0, 1, 0});
    const std::vector<FeatureVector> Xs = {s, [] {
                                               FeatureVector f;
                                               f.add_sparse("x", 4, {1, 3});
                                               return f;
                                           }()};
    const std::vector<FeatureVector> Xd = {d, dense({0, 1, 0, 1})};
    const std::vector<int> y = {1, -1};
    const auto ms = train(Xs, y, TrainConfig{});
    auto md = train(Xd, y, TrainConfig{});
    EXPECT_EQ(ms.w, md.w);
    EXPECT_EQ(ms.b, md.b);
}

}  // namespace
}  // namespace mmsarc::svm
