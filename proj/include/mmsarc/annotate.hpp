#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmsarc::annotate {

enum class Vote { Yes, No, DontKnow };
// Task 1 shows the text only; task 2 shows text and image and is run only on
// posts whose task-1 majority was No.
enum class Task { TextOnlyTask, TextImageTask };
enum class Majority { Yes, No, Undecided };
enum class Category { TextOnly, TextImage, NotSarcastic, Undecided };

std::string_view to_string(Vote v);
std::string_view to_string(Task t);
std::string_view to_string(Majority m);
std::string_view to_string(Category c);
Vote parse_vote(std::string_view s);
Task parse_task(std::string_view s);

struct JudgmentSet {
    std::string post_id;
    Task task = Task::TextOnlyTask;
    std::vector<Vote> votes;
};

// Strictly more Yes than No (or the reverse); DontKnow counts for neither.
Majority majority(const JudgmentSet& j);

// Yes votes over all votes, DontKnow included in the denominator.
double yes_share(const JudgmentSet& j);

Category assign_category(const JudgmentSet& task1, const JudgmentSet* task2);

// Mean over objects of the share of votes equal to the object's modal vote,
// times 100.
double matching_percent(std::span<const JudgmentSet> sets);

inline constexpr Vote kAllVotes[] = {Vote::Yes, Vote::No, Vote::DontKnow};

// Fleiss' kappa over the given categories. Every object needs the same number
// of votes (at least 2).
double fleiss_kappa(std::span<const JudgmentSet> sets,
                    std::span<const Vote> categories = std::span<const Vote>(kAllVotes));

// Both tasks for one post.
struct AnnotatedPost {
    std::string post_id;
    JudgmentSet task1;
    std::optional<JudgmentSet> task2;

    Category category() const;
};

// Groups judgment records by post id (sorted by id). Every post needs exactly
// one task-1 record and at most one task-2 record.
std::vector<AnnotatedPost> group_by_post(std::span<const JudgmentSet> records);

struct CategoryDistribution {
    std::size_t n_posts = 0;
    double text_only = 0.0;
    double text_image = 0.0;
    double not_sarcastic = 0.0;
    double undecided = 0.0;
    // Text+Image posts whose task-2 Yes share reaches 0.8 / 1.0, as fractions
    // of all posts.
    double d80 = 0.0;
    double d100 = 0.0;
};

CategoryDistribution category_distribution(std::span<const AnnotatedPost> posts);

struct GoldSet {
    double threshold = 0.8;
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
    bool balanced = true;
};

bool valid_gold_threshold(double threshold);

// Positives: Text+Image posts whose task-2 Yes share is at least threshold
// (0.5, 0.8 or 1.0 for D-50, D-80, D-100). Negatives are drawn from the pool
// with a seeded shuffle; when balanced, exactly as many as positives.
GoldSet build_gold(std::span<const AnnotatedPost> posts, std::span<const std::string> negative_pool,
                   double threshold, std::uint64_t seed, bool balanced = true);

// Line-delimited JSON: {"post_id": ..., "task": "text"|"text_image", "votes": [...]}
std::vector<JudgmentSet> read_judgments(std::istream& in);
std::vector<JudgmentSet> load_judgments(const std::string& path);
void write_judgments(std::ostream& out, std::span<const JudgmentSet> sets);

// Header "# gold threshold=<t> balanced=<0|1> positives=<n> negatives=<m>",
// then "post_id<TAB>label" lines.
void write_gold(std::ostream& out, const GoldSet& gold);
GoldSet read_gold(std::istream& in);

}  // namespace mmsarc::annotate
