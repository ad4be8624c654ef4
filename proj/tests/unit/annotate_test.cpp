#include "mmsarc/annotate.hpp"

#include <algorithm>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mmsarc/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mmsarc::annotate {
namespace {

using testing::ElementsAre;

constexpr Vote Y = Vote::Yes, N = Vote::No, D = Vote::DontKnow;

JudgmentSet set(std::vector<Vote> votes, Task task = Task::TextOnlyTask, std::string id = "p") {
    return {std::move(id), task, std::move(votes)};
}

std::vector<std::vector<std::string>> as_strings(std::span<const JudgmentSet> sets) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : sets) {
        std::vector<std::string> votes;
        for (auto v : s.votes) votes.emplace_back(to_string(v));
        out.push_back(votes);
    }
    return out;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidArgument;
}

TEST(Majority, Examples) {
    EXPECT_EQ(majority(set({Y, Y, Y, N, N})), Majority::Yes);
    EXPECT_EQ(majority(set({Y, N, D, D, D})), Majority::Undecided);
    EXPECT_EQ(majority(set({N, N, N, Y, Y})), Majority::No);
    EXPECT_EQ(majority(set({D, D, Y})), Majority::Yes);
}

TEST(Category, Examples) {
    const auto t1_yes = set({Y, Y, Y, Y, N});
    EXPECT_EQ(assign_category(t1_yes, nullptr), Category::TextOnly);
    const auto t1_no = set({N, N, N, Y, Y});
    const auto t2_yes = set({Y, Y, Y, N, N}, Task::TextImageTask);
    EXPECT_EQ(assign_category(t1_no, &t2_yes), Category::TextImage);
    const auto t2_no = set({N, N, N, N, N}, Task::TextImageTask);
    EXPECT_EQ(assign_category(set({N, N, N, N, N}), &t2_no), Category::NotSarcastic);
    EXPECT_EQ(assign_category(t1_no, nullptr), Category::Undecided);
    const auto t2_tie = set({Y, N, D, D, D}, Task::TextImageTask);
    EXPECT_EQ(assign_category(t1_no, &t2_tie), Category::Undecided);
    EXPECT_EQ(kind_of([&] { assign_category(t1_yes, &t2_yes); }), ErrorKind::ProtocolViolation);
}

TEST(Matching, Examples) {
    const std::vector<JudgmentSet> unanimous = {set({Y, Y, Y}), set({N, N, N})};
    EXPECT_DOUBLE_EQ(matching_percent(unanimous), 100.0);
    const std::vector<JudgmentSet> one = {set({Y, Y, Y, N, N})};
    EXPECT_DOUBLE_EQ(matching_percent(one), 60.0);
    const std::vector<JudgmentSet> two = {set({Y, Y, Y, N, N}), set({N, N, N, N, N})};
    EXPECT_DOUBLE_EQ(matching_percent(two), 80.0);
}

TEST(Matching, InvariantToVoteOrder) {
    mmsarc::Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<JudgmentSet> sets;
        for (int o = 0; o < 4; ++o) {
            std::vector<Vote> votes(5);
            for (auto& v : votes) v = kAllVotes[rng.below(3)];
            sets.push_back(set(votes));
        }
        const double base = matching_percent(sets);
        for (auto& s : sets) rng.shuffle(s.votes);
        EXPECT_EQ(matching_percent(sets), base);
    }
}

TEST(Kappa, UnanimousFixtureIsOne) {
    const auto sets = load_judgments(testing_support::data_path("fixtures/judgments/unanimous.jsonl"));
    EXPECT_EQ(fleiss_kappa(sets), 1.0);
}

TEST(Kappa, SplitFixtureIsMinusOneThird) {
    const auto sets = load_judgments(testing_support::data_path("fixtures/judgments/split_2_2.jsonl"));
    EXPECT_NEAR(fleiss_kappa(sets), -1.0 / 3.0, 1e-9);
}

TEST(Kappa, MatchesTextbookFormula) {
    mmsarc::Rng rng(2);
    const std::vector<std::string> cats = {"yes", "no", "dont_know"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<JudgmentSet> sets;
        const std::size_t raters = 2 + rng.below(5);
        for (std::size_t o = 0, n = 1 + rng.below(8); o < n; ++o) {
            std::vector<Vote> votes(raters);
            for (auto& v : votes) v = kAllVotes[rng.below(3)];
            sets.push_back(set(votes));
        }
        double expected = 0.0;
        try {
            const double k = fleiss_kappa(sets);
            expected = oracle::fleiss(as_strings(sets), cats);
            EXPECT_NEAR(k, expected, 1e-12);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::DegenerateMarginals);
        }
    }
}

TEST(Kappa, OneIffUnanimous) {
    mmsarc::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<JudgmentSet> sets;
        bool all_unanimous = true;
        for (int o = 0; o < 5; ++o) {
            std::vector<Vote> votes(4, kAllVotes[rng.below(3)]);
            if (rng.bernoulli(0.2)) {
                votes[rng.below(4)] = kAllVotes[rng.below(3)];
            }
            all_unanimous &= std::all_of(votes.begin(), votes.end(), [&](Vote v) { return v == votes[0]; });
            sets.push_back(set(votes));
        }
        try {
            EXPECT_EQ(fleiss_kappa(sets) == 1.0, all_unanimous);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::DegenerateMarginals);
        }
    }
}

TEST(Kappa, Errors) {
    const std::vector<JudgmentSet> single = {set({Y, Y}), set({Y, Y, Y})};
    EXPECT_EQ(kind_of([&] { fleiss_kappa(single); }), ErrorKind::RaggedJudgments);
    const std::vector<JudgmentSet> one_cat = {set({Y, Y}), set({Y, Y})};
    EXPECT_EQ(kind_of([&] { fleiss_kappa(one_cat); }), ErrorKind::DegenerateMarginals);
}

TEST(Fixture, MixedJudgments) {
    const auto records = load_judgments(testing_support::data_path("fixtures/judgments/mixed.jsonl"));
    std::vector<JudgmentSet> text, text_image;
    for (const auto& r : records) (r.task == Task::TextOnlyTask ? text : text_image).push_back(r);
    // per-object modal shares worked out by hand
    EXPECT_NEAR(matching_percent(text), (60.0 + 80 + 60 + 100 + 40 + 100) / 6, 1e-12);
    EXPECT_NEAR(matching_percent(text_image), (100.0 + 80 + 80 + 60) / 4, 1e-12);
    EXPECT_NEAR(fleiss_kappa(text), oracle::fleiss(as_strings(text), {"yes", "no", "dont_know"}), 1e-12);

    const auto posts = group_by_post(records);
    ASSERT_EQ(posts.size(), 6u);
    std::vector<Category> cats;
    for (const auto& p : posts) cats.push_back(p.category());
    EXPECT_THAT(cats, ElementsAre(Category::TextOnly, Category::TextImage, Category::TextImage,
                                  Category::NotSarcastic, Category::TextImage, Category::TextOnly));
    const auto dist = category_distribution(posts);
    EXPECT_DOUBLE_EQ(dist.text_only, 2.0 / 6);
    EXPECT_DOUBLE_EQ(dist.text_image, 3.0 / 6);
    EXPECT_DOUBLE_EQ(dist.not_sarcastic, 1.0 / 6);
    EXPECT_DOUBLE_EQ(dist.d80, 2.0 / 6);
    EXPECT_DOUBLE_EQ(dist.d100, 1.0 / 6);
}

TEST(Gold, ThresholdExamples) {
    auto annotated = [](std::string id, std::vector<Vote> t2) {
        return AnnotatedPost{id, set({N, N, N, N, N}, Task::TextOnlyTask, id),
                             set(std::move(t2), Task::TextImageTask, id)};
    };
    const std::vector<AnnotatedPost> posts = {annotated("a", {Y, Y, Y, Y, N}), annotated("b", {Y, Y, Y, N, N}),
                                              annotated("c", {Y, Y, Y, Y, Y}), annotated("d", {Y, Y, Y, Y, D})};
    const std::vector<std::string> pool = {"n1", "n2", "n3", "n4", "n5"};
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_THAT(sorted(build_gold(posts, pool, 0.8, 1).positives), ElementsAre("a", "c", "d"));
    EXPECT_THAT(sorted(build_gold(posts, pool, 1.0, 1).positives), ElementsAre("c"));
    EXPECT_THAT(sorted(build_gold(posts, pool, 0.5, 1).positives), ElementsAre("a", "b", "c", "d"));
    const auto g = build_gold(posts, pool, 0.5, 1);
    EXPECT_EQ(g.negatives.size(), g.positives.size());
    const std::vector<std::string> small = {"n1"};
    EXPECT_EQ(kind_of([&] { build_gold(posts, small, 0.8, 1); }), ErrorKind::InsufficientData);
    EXPECT_THROW(build_gold(posts, pool, 0.7, 1), Error);
}

std::vector<AnnotatedPost> random_corpus(mmsarc::Rng& rng, std::size_t n) {
    std::vector<AnnotatedPost> posts;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string id = "p" + std::to_string(i);
        std::vector<Vote> t1(5), t2(5);
        for (auto& v : t1) v = kAllVotes[rng.below(3)];
        for (auto& v : t2) v = rng.bernoulli(0.7) ? Y : kAllVotes[rng.below(3)];
        AnnotatedPost p{id, set(t1, Task::TextOnlyTask, id), std::nullopt};
        if (majority(p.task1) == Majority::No) p.task2 = set(t2, Task::TextImageTask, id);
        posts.push_back(p);
    }
    return posts;
}

TEST(Gold, ThresholdMonotonicity) {
    mmsarc::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto posts = random_corpus(rng, 10 + rng.below(40));
        std::vector<std::string> pool;
        for (int i = 0; i < 60; ++i) pool.push_back("neg" + std::to_string(i));
        auto positives = [&](double t) {
            auto v = build_gold(posts, pool, t, 9).positives;
            std::sort(v.begin(), v.end());
            return v;
        };
        const auto d50 = positives(0.5), d80 = positives(0.8), d100 = positives(1.0);
        EXPECT_TRUE(std::includes(d80.begin(), d80.end(), d100.begin(), d100.end()));
        EXPECT_TRUE(std::includes(d50.begin(), d50.end(), d80.begin(), d80.end()));
    }
}

TEST(Distribution, FractionsSumToOne) {
    mmsarc::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto posts = random_corpus(rng, 1 + rng.below(30));
        const auto d = category_distribution(posts);
        EXPECT_NEAR(d.text_only + d.text_image + d.not_sarcastic + d.undecided, 1.0, 1e-12);
    }
}

TEST(Files, RoundTrips) {
    const auto records = load_judgments(testing_support::data_path("fixtures/judgments/mixed.jsonl"));
    std::stringstream buf;
    write_judgments(buf, records);
    const auto again = read_judgments(buf);
    ASSERT_EQ(again.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(again[i].post_id, records[i].post_id);
        EXPECT_EQ(again[i].task, records[i].task);
        EXPECT_EQ(again[i].votes, records[i].votes);
    }
    GoldSet g{0.8, {"a", "b"}, {"x", "y"}, true};
    std::stringstream gbuf;
    write_gold(gbuf, g);
    const auto g2 = read_gold(gbuf);
    EXPECT_EQ(g2.threshold, 0.8);
    EXPECT_EQ(g2.positives, g.positives);
    EXPECT_EQ(g2.negatives, g.negatives);
    std::stringstream ragged("{\"post_id\": \"a\", \"task\": \"text\", \"votes\": []}\n");
    EXPECT_THROW(read_judgments(ragged), Error);
}

}  // namespace
}  // namespace mmsarc::annotate
