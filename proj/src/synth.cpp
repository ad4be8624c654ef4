#include "mmsarc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mmsarc/error.hpp"
#include "mmsarc/format.hpp"
#include "mmsarc/random.hpp"

namespace mmsarc::synth {

namespace {

const std::vector<std::string> kWeatherScenes{"sunshine", "blue_sky", "rain", "storm"};
const std::vector<std::string> kFoodScenes{"cake", "pizza", "mold", "burnt_toast"};
const std::vector<std::string> kPositive{"lovely", "beautiful", "gorgeous", "perfect", "wonderful"};
const std::vector<std::string> kNegative{"rubbish", "awful", "terrible", "disgusting", "horrible"};
const std::vector<std::string> kWeatherNouns{"weather", "day", "morning", "afternoon"};
const std::vector<std::string> kFoodNouns{"dinner", "lunch", "food", "meal"};
const std::vector<std::string> kFillers{"today", "at", "the", "park", "with", "friends", "again", "just",
                                        "here", "our", "new", "place", "this", "look", "so", "we",
                                        "got", "went", "out", "there", "after", "work", "it's", "they"};
const std::vector<std::string> kHashtags{"weekend", "nofilter", "life", "photo", "friday", "instagood"};
const std::vector<std::string> kEmojis{"\xF0\x9F\x93\xB7", "\xF0\x9F\x98\x80", "\xE2\x9C\xA8", "\xF0\x9F\x99\x82"};

const std::vector<std::string> kHedges{"maybe", "perhaps", "probably", "somewhat"};
const std::vector<std::string> kContractions{"it's", "don't", "can't", "i'm", "won't"};
const std::vector<std::string> kFirst{"i", "me", "my", "we", "our", "us"};
const std::vector<std::string> kThird{"he", "she", "they", "them", "their", "it"};

constexpr std::uint64_t kLabelSalt = 1;
constexpr std::uint64_t kCueSalt = 2;
constexpr std::uint64_t kTextSalt = 3;
constexpr std::uint64_t kPrototypeSalt = 4;
constexpr std::uint64_t kImageSalt = 5;
constexpr std::uint64_t kJudgeSalt = 6;
constexpr std::uint64_t kLexiconSalt = 7;

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[rng.below(items.size())];
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::vector<annotate::Vote> cast_votes(Rng& rng, bool truth, const Params& p) {
    std::vector<annotate::Vote> votes;
    for (std::size_t r = 0; r < p.raters; ++r) {
        if (rng.bernoulli(p.dont_know_rate)) {
            votes.push_back(annotate::Vote::DontKnow);
        } else {
            const bool yes = rng.bernoulli(p.vote_accuracy) ? truth : !truth;
            votes.push_back(yes ? annotate::Vote::Yes : annotate::Vote::No);
        }
    }
    return votes;
}

Lexicons make_lexicons(const Params& p) {
    Rng rng(Rng::derive(p.seed, kLexiconSalt));
    Lexicons lex;
    std::vector<std::string> vocab;
    auto add_all = [&](const std::vector<std::string>& words) { vocab.insert(vocab.end(), words.begin(), words.end()); };
    add_all(kPositive);
    add_all(kNegative);
    add_all(kWeatherNouns);
    add_all(kFoodNouns);
    add_all(kFillers);
    add_all(kHedges);
    add_all(kContractions);
    add_all(kFirst);
    add_all(kThird);
    for (const auto& c : kWeatherScenes) vocab.push_back(scene_word(c));
    for (const auto& c : kFoodScenes) vocab.push_back(scene_word(c));
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

    for (const auto& w : vocab) {
        lex.word_counts[w] = static_cast<double>(1 + rng.below(100000));
        lex.formality[w] = round3(rng.uniform(-1.0, 1.0));
        lex.subjectivity[w] = round3(rng.uniform(0.0, 0.3));
        std::vector<double> vec(p.embedding_dim);
        for (auto& x : vec) x = round3(rng.normal() * 0.5);
        lex.embeddings[w] = std::move(vec);
    }
    for (const auto& w : kPositive) {
        lex.sentiment[w] = round3(rng.uniform(0.6, 1.0));
        lex.subjectivity[w] = round3(rng.uniform(0.7, 1.0));
    }
    for (const auto& w : kNegative) {
        lex.sentiment[w] = round3(rng.uniform(-1.0, -0.6));
        lex.subjectivity[w] = round3(rng.uniform(0.7, 1.0));
    }
    lex.hedges = kHedges;
    lex.contractions = kContractions;
    lex.pronouns_1st = kFirst;
    lex.pronouns_3rd = kThird;
    return lex;
}

void write_map(const std::string& path, const std::map<std::string, double>& table) {
    std::ofstream out(path);
    for (const auto& [w, v] : table) out << w << ' ' << shortest(v) << '\n';
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

void write_list(const std::string& path, const std::vector<std::string>& words) {
    std::ofstream out(path);
    for (const auto& w : words) out << w << '\n';
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

}  // namespace

void Params::validate() const {
    if (n < 40) throw Error(ErrorKind::InvalidArgument, "synthetic corpus needs n >= 40");
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidArgument, "q must be in [0, 1]");
    if (platforms.empty()) throw Error(ErrorKind::InvalidArgument, "at least one platform is required");
    if (n_concepts < kWeatherScenes.size() + kFoodScenes.size() + distractors + 1) {
        throw Error(ErrorKind::InvalidArgument, "concept vocabulary too small for the scenes and distractors");
    }
    if (avr_dim == 0 || prototype_dims == 0 || prototype_dims > avr_dim) {
        throw Error(ErrorKind::InvalidArgument, "prototype_dims must be in [1, avr_dim]");
    }
    if (embedding_dim == 0) throw Error(ErrorKind::InvalidArgument, "embedding_dim must be positive");
    if (!(judged_fraction >= 0.0 && judged_fraction <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "judged_fraction must be in [0, 1]");
    }
    if (raters < 2) throw Error(ErrorKind::InvalidArgument, "at least two raters are required");
    if (!(vote_accuracy >= 0.0 && vote_accuracy <= 1.0) || !(dont_know_rate >= 0.0 && dont_know_rate < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "vote rates must be probabilities");
    }
}

const std::vector<std::string>& scene_concepts() {
    static const std::vector<std::string> all = [] {
        auto v = kWeatherScenes;
        v.insert(v.end(), kFoodScenes.begin(), kFoodScenes.end());
        return v;
    }();
    return all;
}

const std::vector<std::string>& positive_words() { return kPositive; }
const std::vector<std::string>& negative_words() { return kNegative; }

std::string scene_word(const std::string& scene) {
    const auto cut = scene.rfind('_');
    return cut == std::string::npos ? scene : scene.substr(cut + 1);
}

bool contradicts(bool positive_phrase, const std::string& scene) {
    if (positive_phrase) return scene == "rain" || scene == "storm";
    return scene == "cake" || scene == "pizza";
}

Corpus generate(const Params& p) {
    p.validate();
    Corpus c;
    c.params = p;
    c.images = visfeat::FeatureStore(p.avr_dim);

    std::vector<std::string> names = scene_concepts();
    for (std::size_t k = names.size(); k < p.n_concepts; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "object_%04zu", k);
        names.emplace_back(buf);
    }
    c.concepts = visfeat::ConceptVocab(names);
    const std::size_t first_distractor = scene_concepts().size();

    // Sparse non-negative prototype per concept.
    std::vector<std::vector<std::pair<std::size_t, double>>> prototypes(p.n_concepts);
    {
        Rng rng(Rng::derive(p.seed, kPrototypeSalt));
        for (auto& proto : prototypes) {
            for (std::size_t k = 0; k < p.prototype_dims; ++k) {
                proto.emplace_back(rng.below(p.avr_dim), rng.uniform(0.5, 1.5));
            }
        }
    }

    // Exactly balanced labels and an exact share of image-only cues.
    std::vector<bool> sarcastic(p.n), image_only(p.n);
    for (std::size_t i = 0; i < p.n; ++i) sarcastic[i] = i % 2 == 0;
    const auto n_image_only = static_cast<std::size_t>(std::llround(p.q * static_cast<double>(p.n)));
    for (std::size_t i = 0; i < p.n; ++i) image_only[i] = i < n_image_only;
    {
        Rng label_rng(Rng::derive(p.seed, kLabelSalt));
        Rng cue_rng(Rng::derive(p.seed, kCueSalt));
        // std::vector<bool> has no swappable references for Rng::shuffle.
        std::vector<int> s(p.n), q(p.n);
        for (std::size_t i = 0; i < p.n; ++i) {
            s[i] = sarcastic[i];
            q[i] = image_only[i];
        }
        label_rng.shuffle(s);
        cue_rng.shuffle(q);
        for (std::size_t i = 0; i < p.n; ++i) {
            sarcastic[i] = s[i] != 0;
            image_only[i] = q[i] != 0;
        }
    }

    Rng text_rng(Rng::derive(p.seed, kTextSalt));
    Rng image_rng(Rng::derive(p.seed, kImageSalt));
    for (std::size_t i = 0; i < p.n; ++i) {
        const bool positive = text_rng.bernoulli(0.5);
        const auto& scenes = positive ? kWeatherScenes : kFoodScenes;
        std::vector<std::string> candidates;
        for (const auto& s : scenes) {
            if (contradicts(positive, s) == sarcastic[i]) candidates.push_back(s);
        }
        const std::string scene = pick(text_rng, candidates);

        std::vector<std::string> words{pick(text_rng, positive ? kPositive : kNegative),
                                       pick(text_rng, positive ? kWeatherNouns : kFoodNouns)};
        const std::size_t n_fill = 3 + text_rng.below(3);
        std::vector<std::string> tail;
        for (std::size_t k = 0; k < n_fill; ++k) tail.push_back(pick(text_rng, kFillers));
        if (!image_only[i]) tail.insert(tail.begin() + static_cast<std::ptrdiff_t>(text_rng.below(tail.size() + 1)),
                                        scene_word(scene));
        words.insert(words.end(), tail.begin(), tail.end());
        std::string text;
        for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
        text += " #" + pick(text_rng, kHashtags);
        if (text_rng.bernoulli(0.5)) text += " " + pick(text_rng, kEmojis);

        char id[32];
        std::snprintf(id, sizeof id, "syn%05zu", i);
        const std::string image_id = std::string("img") + (id + 3);
        const auto platform = p.platforms[i % p.platforms.size()];
        c.posts.push_back(corpus::make_post(id, platform, text, {}, {image_id},
                                            sarcastic[i] ? corpus::Label::Sarcastic : corpus::Label::NonSarcastic));
        c.image_only_cue.push_back(image_only[i]);

        std::vector<visfeat::Detection> dets;
        std::vector<double> avr(p.avr_dim, 0.0);
        auto add_concept = [&](std::size_t k, double conf, double weight) {
            dets.push_back({names[k], round3(conf)});
            for (const auto& [dim, v] : prototypes[k]) avr[dim] += weight * v;
        };
        add_concept(*c.concepts.index(scene), image_rng.uniform(0.5, 1.0), 1.0);
        std::vector<std::size_t> chosen;
        while (chosen.size() < p.distractors) {
            const std::size_t k = first_distractor + image_rng.below(p.n_concepts - first_distractor);
            if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
            chosen.push_back(k);
            add_concept(k, image_rng.uniform(0.05, 0.9), 0.5);
        }
        for (std::size_t k = 0; k < p.prototype_dims; ++k) {
            avr[image_rng.below(p.avr_dim)] += p.avr_noise * image_rng.uniform();
        }
        for (auto& v : avr) v = round3(std::max(v, 0.0));
        c.images.add_detections(image_id, std::move(dets));
        c.images.add_avr(image_id, std::move(avr));
    }

    // Raters see a share of the sarcastic posts. The text alone is sarcastic
    // exactly when it names the contradicting scene.
    {
        Rng judge_rng(Rng::derive(p.seed, kJudgeSalt));
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < p.n; ++i) {
            if (sarcastic[i]) pos.push_back(i);
        }
        judge_rng.shuffle(pos);
        pos.resize(static_cast<std::size_t>(std::llround(p.judged_fraction * static_cast<double>(pos.size()))));
        std::sort(pos.begin(), pos.end());
        for (auto i : pos) {
            annotate::JudgmentSet t1{c.posts[i].id, annotate::Task::TextOnlyTask, cast_votes(judge_rng, !image_only[i], p)};
            const bool ask_image = annotate::majority(t1) != annotate::Majority::Yes;
            c.judgments.push_back(std::move(t1));
            if (ask_image) {
                c.judgments.push_back(
                    {c.posts[i].id, annotate::Task::TextImageTask, cast_votes(judge_rng, true, p)});
            }
        }
    }

    c.lexicons = make_lexicons(p);
    return c;
}

textfeat::LexResources Corpus::resources() const {
    textfeat::LexResources r;
    for (const auto& [w, n] : lexicons.word_counts) r.word_log_freq[w] = std::log(n);
    auto table = [](const std::map<std::string, double>& m) {
        return std::make_shared<textfeat::LexiconScorer>(std::unordered_map<std::string, double>(m.begin(), m.end()));
    };
    r.formality = table(lexicons.formality);
    r.sentiment = table(lexicons.sentiment);
    r.subjectivity = table(lexicons.subjectivity);
    r.hedges = {lexicons.hedges.begin(), lexicons.hedges.end()};
    r.contractions = {lexicons.contractions.begin(), lexicons.contractions.end()};
    r.pronouns_1st = {lexicons.pronouns_1st.begin(), lexicons.pronouns_1st.end()};
    r.pronouns_3rd = {lexicons.pronouns_3rd.begin(), lexicons.pronouns_3rd.end()};
    r.embeddings.dim = params.embedding_dim;
    r.embeddings.vectors = {lexicons.embeddings.begin(), lexicons.embeddings.end()};
    return r;
}

eval::Dataset Corpus::dataset() const {
    return eval::Dataset{posts, resources(), concepts, images, judgments};
}

std::string write(const Corpus& c, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + (fs::path(dir) / name).string() + "'");
        return out;
    };
    {
        auto out = open("corpus.jsonl");
        corpus::write_corpus(out, c.posts);
    }
    {
        auto out = open("concept_vocab.txt");
        c.concepts.save(out);
    }
    {
        auto out = open("concepts.txt");
        c.images.write_concepts(out);
    }
    {
        auto out = open("avr.txt");
        c.images.write_avr(out);
    }
    {
        auto out = open("judgments.jsonl");
        annotate::write_judgments(out, c.judgments);
    }
    const auto& lex = c.lexicons;
    const std::string d = (fs::path(dir) / "").string();
    write_map(d + "word_freq.txt", lex.word_counts);
    write_map(d + "formality.txt", lex.formality);
    write_map(d + "sentiment.txt", lex.sentiment);
    write_map(d + "subjectivity.txt", lex.subjectivity);
    write_list(d + "hedges.txt", lex.hedges);
    write_list(d + "contractions.txt", lex.contractions);
    write_list(d + "pronouns_1st.txt", lex.pronouns_1st);
    write_list(d + "pronouns_3rd.txt", lex.pronouns_3rd);
    {
        auto out = open("embeddings.txt");
        out << lex.embeddings.size() << ' ' << c.params.embedding_dim << '\n';
        for (const auto& [w, vec] : lex.embeddings) {
            out << w;
            for (double v : vec) out << ' ' << shortest(v);
            out << '\n';
        }
    }

    nlohmann::ordered_json platforms = nlohmann::ordered_json::array();
    for (auto pl : c.params.platforms) platforms.push_back(std::string(corpus::to_string(pl)));
    nlohmann::ordered_json cfg = {
        {"seed", 42},
        {"corpus", "corpus.jsonl"},
        {"concept_vocab", "concept_vocab.txt"},
        {"concepts", "concepts.txt"},
        {"avr", "avr.txt"},
        {"avr_dim", c.params.avr_dim},
        {"judgments", "judgments.jsonl"},
        {"resources",
         {{"word_freq", "word_freq.txt"},
          {"formality", "formality.txt"},
          {"sentiment", "sentiment.txt"},
          {"subjectivity", "subjectivity.txt"},
          {"hedges", "hedges.txt"},
          {"contractions", "contractions.txt"},
          {"pronouns_1st", "pronouns_1st.txt"},
          {"pronouns_3rd", "pronouns_3rd.txt"},
          {"embeddings", "embeddings.txt"}}},
        {"experiment", {{"method", "svm"}, {"split_ratio", 0.5}, {"regime", "silver"}, {"platforms", platforms}}},
        {"synth",
         {{"n", c.params.n},
          {"q", c.params.q},
          {"seed", c.params.seed},
          {"avr_dim", c.params.avr_dim},
          {"n_concepts", c.params.n_concepts}}},
    };
    const std::string path = d + "config.json";
    std::ofstream out(path);
    out << cfg.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    return path;
}

}  // namespace mmsarc::synth
