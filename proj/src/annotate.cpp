#include "mmsarc/annotate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmsarc/error.hpp"
#include "mmsarc/random.hpp"

namespace mmsarc::annotate {

namespace {

std::array<std::size_t, 3> tally(const JudgmentSet& j) {
    std::array<std::size_t, 3> counts{};
    for (Vote v : j.votes) ++counts[static_cast<std::size_t>(v)];
    return counts;
}

void require_votes(const JudgmentSet& j) {
    if (j.votes.empty()) throw Error(ErrorKind::InvalidArgument, "judgment set for '" + j.post_id + "' has no votes");
}

}  // namespace

std::string_view to_string(Vote v) {
    switch (v) {
        case Vote::Yes: return "yes";
        case Vote::No: return "no";
        case Vote::DontKnow: return "dont_know";
    }
    return "?";
}

std::string_view to_string(Task t) { return t == Task::TextOnlyTask ? "text" : "text_image"; }

std::string_view to_string(Majority m) {
    switch (m) {
        case Majority::Yes: return "yes";
        case Majority::No: return "no";
        case Majority::Undecided: return "undecided";
    }
    return "?";
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::TextOnly: return "text_only";
        case Category::TextImage: return "text_image";
        case Category::NotSarcastic: return "not_sarcastic";
        case Category::Undecided: return "undecided";
    }
    return "?";
}

Vote parse_vote(std::string_view s) {
    if (s == "yes" || s == "Y") return Vote::Yes;
    if (s == "no" || s == "N") return Vote::No;
    if (s == "dont_know" || s == "?") return Vote::DontKnow;
    throw Error(ErrorKind::Parse, "unknown vote '" + std::string(s) + "'");
}

Task parse_task(std::string_view s) {
    if (s == "text") return Task::TextOnlyTask;
    if (s == "text_image") return Task::TextImageTask;
    throw Error(ErrorKind::Parse, "unknown task '" + std::string(s) + "'");
}

Majority majority(const JudgmentSet& j) {
    require_votes(j);
    const auto c = tally(j);
    const auto yes = c[static_cast<std::size_t>(Vote::Yes)];
    const auto no = c[static_cast<std::size_t>(Vote::No)];
    if (yes > no) return Majority::Yes;
    if (no > yes) return Majority::No;
    return Majority::Undecided;
}

double yes_share(const JudgmentSet& j) {
    require_votes(j);
    return static_cast<double>(tally(j)[static_cast<std::size_t>(Vote::Yes)]) / static_cast<double>(j.votes.size());
}

Category assign_category(const JudgmentSet& task1, const JudgmentSet* task2) {
    if (task1.task != Task::TextOnlyTask) {
        throw Error(ErrorKind::InvalidArgument, "first judgment set must come from the text-only task");
    }
    if (task2 && task2->task != Task::TextImageTask) {
        throw Error(ErrorKind::InvalidArgument, "second judgment set must come from the text+image task");
    }
    const Majority m1 = majority(task1);
    if (m1 == Majority::Yes) {
        if (task2) {
            throw Error(ErrorKind::ProtocolViolation,
                        "post '" + task1.post_id + "' has task-2 judgments but its text was judged sarcastic");
        }
        return Category::TextOnly;
    }
    if (m1 == Majority::No && task2) {
        switch (majority(*task2)) {
            case Majority::Yes: return Category::TextImage;
            case Majority::No: return Category::NotSarcastic;
            case Majority::Undecided: break;
        }
    }
    return Category::Undecided;
}

double matching_percent(std::span<const JudgmentSet> sets) {
    if (sets.empty()) throw Error(ErrorKind::InvalidArgument, "matching percent needs at least one object");
    double total = 0.0;
    for (const auto& j : sets) {
        require_votes(j);
        const auto c = tally(j);
        const auto modal = *std::max_element(c.begin(), c.end());
        total += static_cast<double>(modal) / static_cast<double>(j.votes.size());
    }
    return 100.0 * total / static_cast<double>(sets.size());
}

double fleiss_kappa(std::span<const JudgmentSet> sets, std::span<const Vote> categories) {
    if (sets.empty()) throw Error(ErrorKind::InvalidArgument, "Fleiss' kappa needs at least one object");
    if (categories.empty()) throw Error(ErrorKind::InvalidArgument, "Fleiss' kappa needs categories");
    const std::size_t raters = sets.front().votes.size();
    if (raters < 2) throw Error(ErrorKind::RaggedJudgments, "Fleiss' kappa needs at least two votes per object");

    std::array<int, 3> column{-1, -1, -1};
    for (std::size_t k = 0; k < categories.size(); ++k) column[static_cast<std::size_t>(categories[k])] = static_cast<int>(k);

    std::vector<double> marginal(categories.size(), 0.0);
    double agreement = 0.0;
    for (const auto& j : sets) {
        if (j.votes.size() != raters) {
            throw Error(ErrorKind::RaggedJudgments, "object '" + j.post_id + "' has " + std::to_string(j.votes.size()) +
                                                        " votes, expected " + std::to_string(raters));
        }
        std::vector<double> counts(categories.size(), 0.0);
        for (Vote v : j.votes) {
            const int col = column[static_cast<std::size_t>(v)];
            if (col < 0) {
                throw Error(ErrorKind::InvalidArgument, "vote '" + std::string(to_string(v)) + "' is not a listed category");
            }
            counts[static_cast<std::size_t>(col)] += 1.0;
        }
        double sq = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            sq += counts[k] * counts[k];
            marginal[k] += counts[k];
        }
        const double n = static_cast<double>(raters);
        agreement += (sq - n) / (n * (n - 1.0));
    }
    const double objects = static_cast<double>(sets.size());
    const double p_bar = agreement / objects;
    double p_e = 0.0;
    for (double m : marginal) {
        const double p = m / (objects * static_cast<double>(raters));
        p_e += p * p;
    }
    if (p_e >= 1.0 - 1e-15) {
        throw Error(ErrorKind::DegenerateMarginals, "all votes fall in one category; kappa is undefined");
    }
    return (p_bar - p_e) / (1.0 - p_e);
}

Category AnnotatedPost::category() const {
    return assign_category(task1, task2 ? &*task2 : nullptr);
}

std::vector<AnnotatedPost> group_by_post(std::span<const JudgmentSet> records) {
    std::map<std::string, std::pair<std::optional<JudgmentSet>, std::optional<JudgmentSet>>> by_post;
    for (const auto& r : records) {
        auto& slot = by_post[r.post_id];
        auto& target = r.task == Task::TextOnlyTask ? slot.first : slot.second;
        if (target) {
            throw Error(ErrorKind::InvalidArgument, "post '" + r.post_id + "' has duplicate " +
                                                        std::string(to_string(r.task)) + " judgments");
        }
        target = r;
    }
    std::vector<AnnotatedPost> out;
    out.reserve(by_post.size());
    for (auto& [id, tasks] : by_post) {
        if (!tasks.first) throw Error(ErrorKind::ProtocolViolation, "post '" + id + "' has no task-1 judgments");
        out.push_back({id, std::move(*tasks.first), std::move(tasks.second)});
    }
    return out;
}

CategoryDistribution category_distribution(std::span<const AnnotatedPost> posts) {
    CategoryDistribution d;
    d.n_posts = posts.size();
    if (posts.empty()) return d;
    for (const auto& p : posts) {
        switch (p.category()) {
            case Category::TextOnly: d.text_only += 1.0; break;
            case Category::TextImage: {
                d.text_image += 1.0;
                const double share = yes_share(*p.task2);
                if (share >= 0.8 - 1e-12) d.d80 += 1.0;
                if (share >= 1.0 - 1e-12) d.d100 += 1.0;
                break;
            }
            case Category::NotSarcastic: d.not_sarcastic += 1.0; break;
            case Category::Undecided: d.undecided += 1.0; break;
        }
    }
    const double n = static_cast<double>(posts.size());
    for (double* f : {&d.text_only, &d.text_image, &d.not_sarcastic, &d.undecided, &d.d80, &d.d100}) *f /= n;
    return d;
}

bool valid_gold_threshold(double threshold) {
    return threshold == 0.5 || threshold == 0.8 || threshold == 1.0;
}

GoldSet build_gold(std::span<const AnnotatedPost> posts, std::span<const std::string> negative_pool,
                   double threshold, std::uint64_t seed, bool balanced) {
    if (!valid_gold_threshold(threshold)) {
        throw Error(ErrorKind::InvalidArgument, "gold threshold must be 0.5, 0.8 or 1.0");
    }
    GoldSet gold;
    gold.threshold = threshold;
    gold.balanced = balanced;
    for (const auto& p : posts) {
        if (p.category() != Category::TextImage) continue;
        // Compare counts so 4/5 against 0.8 is not at the mercy of rounding.
        const auto& votes = p.task2->votes;
        const auto yes = std::count(votes.begin(), votes.end(), Vote::Yes);
        if (static_cast<double>(yes) + 1e-9 >= threshold * static_cast<double>(votes.size())) {
            gold.positives.push_back(p.post_id);
        }
    }
    std::sort(gold.positives.begin(), gold.positives.end());

    std::vector<std::string> pool(negative_pool.begin(), negative_pool.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::erase_if(pool, [&](const std::string& id) {
        return std::binary_search(gold.positives.begin(), gold.positives.end(), id);
    });
    if (balanced) {
        if (pool.size() < gold.positives.size()) {
            throw Error(ErrorKind::InsufficientData, "negative pool has " + std::to_string(pool.size()) +
                                                         " posts, need " + std::to_string(gold.positives.size()));
        }
        Rng rng(seed);
        rng.shuffle(pool);
        pool.resize(gold.positives.size());
        std::sort(pool.begin(), pool.end());
    }
    gold.negatives = std::move(pool);
    return gold;
}

std::vector<JudgmentSet> read_judgments(std::istream& in) {
    std::vector<JudgmentSet> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            JudgmentSet j;
            j.post_id = rec.at("post_id").get<std::string>();
            j.task = parse_task(rec.at("task").get<std::string>());
            for (const auto& v : rec.at("votes")) j.votes.push_back(parse_vote(v.get<std::string>()));
            require_votes(j);
            out.push_back(std::move(j));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, "judgments line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), "judgments line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<JudgmentSet> load_judgments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open judgments '" + path + "'");
    return read_judgments(in);
}

void write_judgments(std::ostream& out, std::span<const JudgmentSet> sets) {
    for (const auto& j : sets) {
        nlohmann::ordered_json rec;
        rec["post_id"] = j.post_id;
        rec["task"] = to_string(j.task);
        auto votes = nlohmann::json::array();
        for (Vote v : j.votes) votes.push_back(to_string(v));
        rec["votes"] = votes;
        out << rec.dump() << '\n';
    }
}

void write_gold(std::ostream& out, const GoldSet& gold) {
    char t[32];
    std::snprintf(t, sizeof t, "%g", gold.threshold);
    out << "# gold threshold=" << t << " balanced=" << (gold.balanced ? 1 : 0)
        << " positives=" << gold.positives.size() << " negatives=" << gold.negatives.size() << '\n';
    for (const auto& id : gold.positives) out << id << "\tsarcastic\n";
    for (const auto& id : gold.negatives) out << id << "\tnon_sarcastic\n";
}

GoldSet read_gold(std::istream& in) {
    GoldSet gold;
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("# gold ")) throw Error(ErrorKind::Parse, "not a gold-set file");
    std::istringstream header(line.substr(7));
    for (std::string kv; header >> kv;) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "threshold") gold.threshold = std::stod(value);
        if (key == "balanced") gold.balanced = value == "1";
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error(ErrorKind::Parse, "gold line without a label: '" + line + "'");
        const std::string id = line.substr(0, tab), label = line.substr(tab + 1);
        if (label == "sarcastic") gold.positives.push_back(id);
        else if (label == "non_sarcastic") gold.negatives.push_back(id);
        else throw Error(ErrorKind::Parse, "bad gold label '" + label + "'");
    }
    return gold;
}

}  // namespace mmsarc::annotate
