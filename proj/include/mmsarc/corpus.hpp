#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mmsarc::corpus {

enum class Platform { IG, TU, TW };
enum class Label { Sarcastic, NonSarcastic, Unlabeled };

std::string_view to_string(Platform p);
std::string_view to_string(Label l);
Platform parse_platform(std::string_view s);
Label parse_label(std::string_view s);

// One social-media item. words/hashtags/emojis are produced by tokenize();
// for Tumblr the separate tag field is merged into hashtags.
struct Post {
    std::string id;
    Platform platform = Platform::IG;
    std::string raw_text;
    std::vector<std::string> words;
    std::vector<std::string> hashtags;  // without '#'
    std::vector<std::string> emojis;
    std::vector<std::string> image_ids;
    Label label = Label::Unlabeled;
};

// Closed codepoint intervals treated as emoji.
class EmojiTable {
public:
    EmojiTable() = default;
    explicit EmojiTable(std::vector<std::pair<char32_t, char32_t>> ranges);

    // One "start-end" or single hex codepoint per line; '#' starts a comment.
    static EmojiTable parse(std::istream& in);
    static EmojiTable load(const std::string& path);
    static const EmojiTable& builtin();

    bool contains(char32_t cp) const;
    std::size_t size() const { return ranges_.size(); }

private:
    std::vector<std::pair<char32_t, char32_t>> ranges_;  // sorted, merged
};

enum class TokenKind { Word, Hashtag, Emoji, Mention, Url };

struct Token {
    TokenKind kind;
    std::string text;  // hashtags and mentions without their sigil
    std::size_t begin; // byte range in the source
    std::size_t end;
};

// Full token stream in source order. Whitespace and punctuation are dropped.
std::vector<Token> scan(std::string_view text, const EmojiTable& emoji = EmojiTable::builtin());

struct Tokens {
    std::vector<std::string> words;
    std::vector<std::string> hashtags;
    std::vector<std::string> emojis;
};

Tokens tokenize(std::string_view text, const EmojiTable& emoji = EmojiTable::builtin());

// Alphabetic word token: at least one letter, no digits.
bool is_regular_word(std::string_view word);

std::size_t count_regular_words(const Post& p);

// Builds a tokenized post. tag_field entries not already present inline are
// appended to the hashtags.
Post make_post(std::string id, Platform platform, std::string raw_text,
               const std::vector<std::string>& tag_field, std::vector<std::string> image_ids,
               Label label, const EmojiTable& emoji = EmojiTable::builtin());

// Checks the per-platform image-count bounds (IG at most 1, TU at most 10).
void validate(const Post& p);

struct FilterConfig {
    std::size_t min_regular_words = 4;
    std::vector<std::string> banned_tag_substrings{"someecards"};
    std::vector<std::string> collection_tags{"sarcasm", "sarcastic"};
    // Entries containing a dot match as a host suffix ("t.co" matches
    // "t.co" and "x.t.co" but not "reddit.com"); others match as a host
    // substring.
    std::vector<std::string> internal_link_allowlist{"instagram", "tumblr", "twitter", "t.co",
                                                     "twimg.com"};

    void validate() const;
};

enum class RejectReason {
    NoImage,
    MissingImage,
    Mention,
    ExternalLink,
    CollectionTagAsWord,
    CollectionTagInSentence,
    BannedTag,
    TooFewWords,
};

std::string_view to_string(RejectReason r);

// nullopt means Keep. Rules are applied in a fixed order and the first
// failing one is reported. When available_images is given, an image id
// absent from it counts as a missing image.
std::optional<RejectReason> filter_post(const Post& p, const FilterConfig& cfg,
                                        const EmojiTable& emoji = EmojiTable::builtin(),
                                        const std::unordered_set<std::string>* available_images = nullptr);

bool is_internal_link(std::string_view url, const FilterConfig& cfg);

// Removes collection tags from the hashtags and internal links (and inline
// collection hashtags) from the raw text.
Post strip_collection_artifacts(const Post& p, const FilterConfig& cfg,
                                const EmojiTable& emoji = EmojiTable::builtin());

struct CorpusStats {
    std::size_t n_posts = 0;
    double avg_words = 0.0;
    double avg_emojis = 0.0;
    double avg_tags = 0.0;
    double pct_with_text = 0.0;
    double pct_with_images = 0.0;
    double pct_with_both = 0.0;
};

CorpusStats corpus_stats(std::span<const Post> posts);

// Line-delimited JSON records: id, platform, text, tags, image_ids, label.
std::vector<Post> read_corpus(std::istream& in, const EmojiTable& emoji = EmojiTable::builtin());
std::vector<Post> load_corpus(const std::string& path, const EmojiTable& emoji = EmojiTable::builtin());
void write_post(std::ostream& out, const Post& p);
void write_corpus(std::ostream& out, std::span<const Post> posts);

}  // namespace mmsarc::corpus
