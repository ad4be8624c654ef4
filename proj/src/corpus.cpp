#include "mmsarc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmsarc/error.hpp"
#include "mmsarc/utf8.hpp"

namespace mmsarc::corpus {

namespace {

using utf8::Codepoint;

// Mirrors data/emoji_ranges.txt.
const std::vector<std::pair<char32_t, char32_t>> kBuiltinEmojiRanges = {
    {0x00A9, 0x00A9},   {0x00AE, 0x00AE},   {0x203C, 0x203C},   {0x2049, 0x2049},
    {0x2122, 0x2122},   {0x2139, 0x2139},   {0x2194, 0x2199},   {0x21A9, 0x21AA},
    {0x231A, 0x231B},   {0x2328, 0x2328},   {0x23CF, 0x23CF},   {0x23E9, 0x23F3},
    {0x23F8, 0x23FA},   {0x24C2, 0x24C2},   {0x25AA, 0x25AB},   {0x25B6, 0x25B6},
    {0x25C0, 0x25C0},   {0x25FB, 0x25FE},   {0x2600, 0x27BF},   {0x2934, 0x2935},
    {0x2B05, 0x2B07},   {0x2B1B, 0x2B1C},   {0x2B50, 0x2B50},   {0x2B55, 0x2B55},
    {0x3030, 0x3030},   {0x303D, 0x303D},   {0x3297, 0x3297},   {0x3299, 0x3299},
    {0x1F000, 0x1F0FF}, {0x1F10D, 0x1F1FF}, {0x1F200, 0x1F2FF}, {0x1F300, 0x1F5FF},
    {0x1F600, 0x1F64F}, {0x1F680, 0x1F6FF}, {0x1F700, 0x1F77F}, {0x1F780, 0x1F7FF},
    {0x1F900, 0x1F9FF}, {0x1FA00, 0x1FAFF},
};

constexpr char32_t kZeroWidthJoiner = 0x200D;
constexpr char32_t kKeycap = 0x20E3;

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }
bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_variation_selector(char32_t cp) { return cp == 0xFE0E || cp == 0xFE0F; }

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029 ||
           cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

bool is_ascii_letter(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }
bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Non-ASCII punctuation and symbol blocks. Everything else outside ASCII that
// is not an emoji is treated as a letter.
bool is_nonascii_symbol(char32_t cp) {
    return (cp >= 0x0080 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
           (cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
           (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xFE30 && cp <= 0xFE4F) ||
           (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || cp == 0xFFFD ||
           (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0xE0000 && cp <= 0xE007F);
}

bool is_letter(char32_t cp, const EmojiTable& emoji) {
    if (cp < 0x80) return is_ascii_letter(cp);
    return !emoji.contains(cp) && !is_space(cp) && !is_nonascii_symbol(cp);
}

bool is_word_char(char32_t cp, const EmojiTable& emoji) {
    return is_ascii_digit(cp) || is_letter(cp, emoji);
}

bool is_tag_char(char32_t cp, const EmojiTable& emoji) {
    return cp == '_' || is_word_char(cp, emoji);
}

bool is_trailing_url_punct(char32_t cp) {
    return cp < 0x80 && std::string_view(".,;:!?)]}\"'").find(static_cast<char>(cp)) != std::string_view::npos;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

bool starts_with_ci(const std::vector<Codepoint>& cps, std::size_t i, std::string_view prefix) {
    if (i + prefix.size() > cps.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        char32_t c = cps[i + k].value;
        if (c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
        if (c != static_cast<char32_t>(prefix[k])) return false;
    }
    return true;
}

bool in_list_ci(std::string_view token, const std::vector<std::string>& list) {
    const std::string lowered = utf8::ascii_lower(token);
    return std::any_of(list.begin(), list.end(),
                       [&](const std::string& s) { return utf8::ascii_lower(s) == lowered; });
}

std::string url_host(std::string_view url) {
    std::string lowered = utf8::ascii_lower(url);
    std::string_view rest = lowered;
    if (auto pos = rest.find("://"); pos != std::string_view::npos) rest.remove_prefix(pos + 3);
    const auto stop = rest.find_first_of("/?#:");
    if (stop != std::string_view::npos) rest = rest.substr(0, stop);
    return std::string(rest);
}

}  // namespace

std::string_view to_string(Platform p) {
    switch (p) {
        case Platform::IG: return "IG";
        case Platform::TU: return "TU";
        case Platform::TW: return "TW";
    }
    return "?";
}

std::string_view to_string(Label l) {
    switch (l) {
        case Label::Sarcastic: return "sarcastic";
        case Label::NonSarcastic: return "non_sarcastic";
        case Label::Unlabeled: return "unlabeled";
    }
    return "?";
}

Platform parse_platform(std::string_view s) {
    if (s == "IG") return Platform::IG;
    if (s == "TU") return Platform::TU;
    if (s == "TW") return Platform::TW;
    throw Error(ErrorKind::Parse, "unknown platform '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
    if (s == "sarcastic") return Label::Sarcastic;
    if (s == "non_sarcastic") return Label::NonSarcastic;
    if (s == "unlabeled") return Label::Unlabeled;
    throw Error(ErrorKind::Parse, "unknown label '" + std::string(s) + "'");
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::NoImage: return "no_image";
        case RejectReason::MissingImage: return "missing_image";
        case RejectReason::Mention: return "mention";
        case RejectReason::ExternalLink: return "external_link";
        case RejectReason::CollectionTagAsWord: return "collection_tag_as_word";
        case RejectReason::CollectionTagInSentence: return "collection_tag_in_sentence";
        case RejectReason::BannedTag: return "banned_tag";
        case RejectReason::TooFewWords: return "too_few_words";
    }
    return "?";
}

EmojiTable::EmojiTable(std::vector<std::pair<char32_t, char32_t>> ranges) {
    for (auto& [lo, hi] : ranges) {
        if (lo > hi) throw Error(ErrorKind::Parse, "emoji range with start > end");
    }
    std::sort(ranges.begin(), ranges.end());
    for (const auto& r : ranges) {
        if (!ranges_.empty() && r.first <= ranges_.back().second + 1) {
            ranges_.back().second = std::max(ranges_.back().second, r.second);
        } else {
            ranges_.push_back(r);
        }
    }
}

EmojiTable EmojiTable::parse(std::istream& in) {
    std::vector<std::pair<char32_t, char32_t>> ranges;
    std::string line;
    std::size_t lineno = 0;
    auto parse_hex = [&](const std::string& s) -> char32_t {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(s, &used, 16);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || v > 0x10FFFF) {
            throw Error(ErrorKind::Parse,
                        "emoji table line " + std::to_string(lineno) + ": bad codepoint '" + s + "'");
        }
        return static_cast<char32_t>(v);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string interval;
        if (!(fields >> interval)) continue;
        const auto dash = interval.find('-');
        if (dash == std::string::npos) {
            const char32_t cp = parse_hex(interval);
            ranges.emplace_back(cp, cp);
        } else {
            ranges.emplace_back(parse_hex(interval.substr(0, dash)), parse_hex(interval.substr(dash + 1)));
        }
    }
    return EmojiTable(std::move(ranges));
}

EmojiTable EmojiTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open emoji table '" + path + "'");
    return parse(in);
}

const EmojiTable& EmojiTable::builtin() {
    static const EmojiTable table(kBuiltinEmojiRanges);
    return table;
}

bool EmojiTable::contains(char32_t cp) const {
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), cp,
                               [](char32_t v, const auto& r) { return v < r.first; });
    if (it == ranges_.begin()) return false;
    --it;
    return cp <= it->second;
}

std::vector<Token> scan(std::string_view text, const EmojiTable& emoji) {
    const auto cps = utf8::decode(text);
    std::vector<Token> tokens;
    const std::size_t n = cps.size();
    auto slice = [&](std::size_t from, std::size_t to) {
        return std::string(text.substr(cps[from].begin, cps[to - 1].end - cps[from].begin));
    };
    auto prev_is_word = [&](std::size_t i) { return i > 0 && is_tag_char(cps[i - 1].value, emoji); };

    std::size_t i = 0;
    while (i < n) {
        const char32_t cp = cps[i].value;
        if (is_space(cp)) {
            ++i;
            continue;
        }
        if (!prev_is_word(i) &&
            (starts_with_ci(cps, i, "http://") || starts_with_ci(cps, i, "https://") ||
             starts_with_ci(cps, i, "www."))) {
            std::size_t j = i;
            while (j < n && !is_space(cps[j].value)) ++j;
            std::size_t end = j;
            while (end > i + 1 && is_trailing_url_punct(cps[end - 1].value)) --end;
            tokens.push_back({TokenKind::Url, slice(i, end), cps[i].begin, cps[end - 1].end});
            i = j;
            continue;
        }
        if ((cp == '#' || cp == '@') && i + 1 < n && is_tag_char(cps[i + 1].value, emoji) &&
            !(cp == '@' && prev_is_word(i))) {
            std::size_t j = i + 1;
            while (j < n && is_tag_char(cps[j].value, emoji)) ++j;
            tokens.push_back({cp == '#' ? TokenKind::Hashtag : TokenKind::Mention, slice(i + 1, j),
                              cps[i].begin, cps[j - 1].end});
            i = j;
            continue;
        }
        if (emoji.contains(cp)) {
            std::size_t j = i + 1;
            if (is_regional_indicator(cp) && j < n && is_regional_indicator(cps[j].value)) ++j;
            while (j < n) {
                const char32_t next = cps[j].value;
                if (is_variation_selector(next) || is_skin_tone(next) || next == kKeycap) {
                    ++j;
                } else if (next == kZeroWidthJoiner && j + 1 < n && emoji.contains(cps[j + 1].value)) {
                    j += 2;
                } else {
                    break;
                }
            }
            tokens.push_back({TokenKind::Emoji, slice(i, j), cps[i].begin, cps[j - 1].end});
            i = j;
            continue;
        }
        if (is_word_char(cp, emoji)) {
            std::size_t j = i + 1;
            while (j < n) {
                if (is_word_char(cps[j].value, emoji)) {
                    ++j;
                } else if (is_apostrophe(cps[j].value) && j + 1 < n &&
                           is_word_char(cps[j + 1].value, emoji)) {
                    j += 2;
                } else {
                    break;
                }
            }
            tokens.push_back({TokenKind::Word, slice(i, j), cps[i].begin, cps[j - 1].end});
            i = j;
            continue;
        }
        ++i;  // punctuation
    }
    return tokens;
}

Tokens tokenize(std::string_view text, const EmojiTable& emoji) {
    Tokens out;
    for (auto& tok : scan(text, emoji)) {
        switch (tok.kind) {
            case TokenKind::Word: out.words.push_back(std::move(tok.text)); break;
            case TokenKind::Hashtag: out.hashtags.push_back(std::move(tok.text)); break;
            case TokenKind::Emoji: out.emojis.push_back(std::move(tok.text)); break;
            case TokenKind::Mention:
            case TokenKind::Url: break;
        }
    }
    return out;
}

bool is_regular_word(std::string_view word) {
    bool has_letter = false;
    for (const auto& cp : utf8::decode(word)) {
        if (is_ascii_digit(cp.value)) return false;
        if (is_letter(cp.value, EmojiTable::builtin())) has_letter = true;
    }
    return has_letter;
}

std::size_t count_regular_words(const Post& p) {
    return static_cast<std::size_t>(
        std::count_if(p.words.begin(), p.words.end(), [](const std::string& w) { return is_regular_word(w); }));
}

Post make_post(std::string id, Platform platform, std::string raw_text,
               const std::vector<std::string>& tag_field, std::vector<std::string> image_ids,
               Label label, const EmojiTable& emoji) {
    Post p;
    p.id = std::move(id);
    p.platform = platform;
    p.raw_text = std::move(raw_text);
    auto toks = tokenize(p.raw_text, emoji);
    p.words = std::move(toks.words);
    p.hashtags = std::move(toks.hashtags);
    p.emojis = std::move(toks.emojis);
    const std::size_t inline_count = p.hashtags.size();
    for (const auto& tag : tag_field) {
        std::string_view t = tag;
        if (!t.empty() && t.front() == '#') t.remove_prefix(1);
        if (t.empty()) continue;
        const auto inline_end = p.hashtags.begin() + static_cast<std::ptrdiff_t>(inline_count);
        if (std::find(p.hashtags.begin(), inline_end, t) == inline_end) p.hashtags.emplace_back(t);
    }
    p.image_ids = std::move(image_ids);
    p.label = label;
    return p;
}

void validate(const Post& p) {
    if (p.id.empty()) throw Error(ErrorKind::InvalidArgument, "post with empty id");
    const std::size_t images = p.image_ids.size();
    if (p.platform == Platform::IG && images > 1) {
        throw Error(ErrorKind::InvalidArgument, "IG post '" + p.id + "' has more than one image");
    }
    if (p.platform == Platform::TU && images > 10) {
        throw Error(ErrorKind::InvalidArgument, "TU post '" + p.id + "' has more than ten images");
    }
}

void FilterConfig::validate() const {
    if (collection_tags.empty()) {
        throw Error(ErrorKind::InvalidArgument, "filter config needs at least one collection tag");
    }
}

bool is_internal_link(std::string_view url, const FilterConfig& cfg) {
    const std::string host = url_host(url);
    for (const auto& entry : cfg.internal_link_allowlist) {
        const std::string e = utf8::ascii_lower(entry);
        if (e.find('.') != std::string::npos) {
            if (host == e || (host.size() > e.size() && host.ends_with(e) &&
                              host[host.size() - e.size() - 1] == '.')) {
                return true;
            }
        } else if (host.find(e) != std::string::npos) {
            return true;
        }
    }
    return false;
}

std::optional<RejectReason> filter_post(const Post& p, const FilterConfig& cfg, const EmojiTable& emoji,
                                        const std::unordered_set<std::string>* available_images) {
    // (1) image presence
    if (p.image_ids.empty()) return RejectReason::NoImage;
    for (const auto& id : p.image_ids) {
        if (id.empty() || (available_images && !available_images->contains(id))) {
            return RejectReason::MissingImage;
        }
    }

    const auto tokens = scan(p.raw_text, emoji);

    // (2) mentions, then external links
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::Mention) return RejectReason::Mention;
    }
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::Url && !is_internal_link(t.text, cfg)) return RejectReason::ExternalLink;
    }

    // (3) collection tag used as a word or inside a sentence
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::Word && in_list_ci(t.text, cfg.collection_tags)) {
            return RejectReason::CollectionTagAsWord;
        }
    }
    bool seen_collection_tag = false;
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::Hashtag && in_list_ci(t.text, cfg.collection_tags)) {
            seen_collection_tag = true;
        } else if (seen_collection_tag && t.kind == TokenKind::Word && is_regular_word(t.text)) {
            return RejectReason::CollectionTagInSentence;
        }
    }

    // (4) meme/ecard tags, then length
    for (const auto& tag : p.hashtags) {
        const std::string lowered = utf8::ascii_lower(tag);
        for (const auto& banned : cfg.banned_tag_substrings) {
            if (lowered.find(utf8::ascii_lower(banned)) != std::string::npos) return RejectReason::BannedTag;
        }
    }
    if (count_regular_words(p) < cfg.min_regular_words) return RejectReason::TooFewWords;
    return std::nullopt;
}

Post strip_collection_artifacts(const Post& p, const FilterConfig& cfg, const EmojiTable& emoji) {
    Post out = p;
    std::erase_if(out.hashtags, [&](const std::string& t) { return in_list_ci(t, cfg.collection_tags); });

    std::vector<std::pair<std::size_t, std::size_t>> cuts;
    for (const auto& t : scan(p.raw_text, emoji)) {
        const bool drop = (t.kind == TokenKind::Url && is_internal_link(t.text, cfg)) ||
                          (t.kind == TokenKind::Hashtag && in_list_ci(t.text, cfg.collection_tags));
        if (drop) cuts.emplace_back(t.begin, t.end);
    }
    if (cuts.empty()) return out;

    std::string text;
    std::size_t pos = 0;
    for (const auto& [begin, end] : cuts) {
        text.append(p.raw_text, pos, begin - pos);
        const bool space_before = text.empty() || std::isspace(static_cast<unsigned char>(text.back()));
        const bool space_after = end >= p.raw_text.size() ||
                                 std::isspace(static_cast<unsigned char>(p.raw_text[end]));
        if (!space_before && !space_after) text.push_back(' ');
        pos = end;
    }
    text.append(p.raw_text, pos);
    out.raw_text = std::move(text);
    return out;
}

CorpusStats corpus_stats(std::span<const Post> posts) {
    if (posts.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus statistics need at least one post");
    CorpusStats s;
    s.n_posts = posts.size();
    std::size_t with_text = 0, with_images = 0, with_both = 0;
    for (const auto& p : posts) {
        s.avg_words += static_cast<double>(count_regular_words(p));
        s.avg_emojis += static_cast<double>(p.emojis.size());
        s.avg_tags += static_cast<double>(p.hashtags.size());
        const bool text = !p.words.empty() || !p.hashtags.empty() || !p.emojis.empty();
        const bool image = !p.image_ids.empty();
        with_text += text;
        with_images += image;
        with_both += text && image;
    }
    const double n = static_cast<double>(posts.size());
    s.avg_words /= n;
    s.avg_emojis /= n;
    s.avg_tags /= n;
    s.pct_with_text = 100.0 * static_cast<double>(with_text) / n;
    s.pct_with_images = 100.0 * static_cast<double>(with_images) / n;
    s.pct_with_both = 100.0 * static_cast<double>(with_both) / n;
    return s;
}

std::vector<Post> read_corpus(std::istream& in, const EmojiTable& emoji) {
    std::vector<Post> posts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            std::vector<std::string> tags, images;
            if (rec.contains("tags")) tags = rec.at("tags").get<std::vector<std::string>>();
            if (rec.contains("image_ids")) images = rec.at("image_ids").get<std::vector<std::string>>();
            const Label label = rec.contains("label") ? parse_label(rec.at("label").get<std::string>())
                                                      : Label::Unlabeled;
            auto post = make_post(rec.at("id").get<std::string>(),
                                  parse_platform(rec.at("platform").get<std::string>()),
                                  rec.value("text", std::string{}), tags, std::move(images), label, emoji);
            validate(post);
            posts.push_back(std::move(post));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, "corpus line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), "corpus line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return posts;
}

std::vector<Post> load_corpus(const std::string& path, const EmojiTable& emoji) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open corpus '" + path + "'");
    return read_corpus(in, emoji);
}

void write_post(std::ostream& out, const Post& p) {
    nlohmann::ordered_json rec;
    rec["id"] = p.id;
    rec["platform"] = to_string(p.platform);
    rec["text"] = p.raw_text;
    rec["tags"] = p.hashtags;
    rec["image_ids"] = p.image_ids;
    rec["label"] = to_string(p.label);
    out << rec.dump() << '\n';
}

void write_corpus(std::ostream& out, std::span<const Post> posts) {
    for (const auto& p : posts) write_post(out, p);
}

}  // namespace mmsarc::corpus
