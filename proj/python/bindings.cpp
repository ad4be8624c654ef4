#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mmsarc/annotate.hpp"
#include "mmsarc/cli.hpp"
#include "mmsarc/config.hpp"
#include "mmsarc/corpus.hpp"
#include "mmsarc/error.hpp"
#include "mmsarc/eval.hpp"
#include "mmsarc/fusionnet.hpp"
#include "mmsarc/svm.hpp"
#include "mmsarc/synth.hpp"

namespace py = pybind11;
using namespace mmsarc;

namespace {

PyObject* error_type = nullptr;

std::vector<annotate::JudgmentSet> vote_sets(const std::vector<std::vector<std::string>>& votes) {
    std::vector<annotate::JudgmentSet> out;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        annotate::JudgmentSet j{"o" + std::to_string(i), annotate::Task::TextOnlyTask, {}};
        for (const auto& v : votes[i]) j.votes.push_back(annotate::parse_vote(v));
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<FeatureVector> dense_rows(const std::vector<std::vector<double>>& X) {
    std::vector<FeatureVector> out;
    for (const auto& row : X) {
        FeatureVector fv;
        fv.add_dense("x", row);
        out.push_back(std::move(fv));
    }
    return out;
}

std::string platform_name(const corpus::Post& p) { return std::string(corpus::to_string(p.platform)); }
std::string label_name(const corpus::Post& p) { return std::string(corpus::to_string(p.label)); }

}  // namespace

PYBIND11_MODULE(_mmsarc, m) {
    m.doc() = "Multimodal sarcasm detection: corpus filtering, features, SVM and fusion-network models.";

    error_type = py::exception<Error>(m, "Error").release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type, inst.ptr());
        }
    });

    py::class_<corpus::Post>(m, "Post")
        .def_readonly("id", &corpus::Post::id)
        .def_readonly("raw_text", &corpus::Post::raw_text)
        .def_readonly("words", &corpus::Post::words)
        .def_readonly("hashtags", &corpus::Post::hashtags)
        .def_readonly("emojis", &corpus::Post::emojis)
        .def_readonly("image_ids", &corpus::Post::image_ids)
        .def_property_readonly("platform", &platform_name)
        .def_property_readonly("label", &label_name)
        .def("__repr__", [](const corpus::Post& p) { return "<Post " + p.id + ">"; });

    m.def(
        "tokenize",
        [](const std::string& text) {
            const auto t = corpus::tokenize(text);
            py::dict d;
            d["words"] = t.words;
            d["hashtags"] = t.hashtags;
            d["emojis"] = t.emojis;
            return d;
        },
        py::arg("text"));

    m.def(
        "parse_post",
        [](const std::string& json_line) {
            std::istringstream in(json_line);
            auto posts = corpus::read_corpus(in);
            if (posts.size() != 1) throw Error(ErrorKind::Parse, "expected exactly one post");
            return posts[0];
        },
        py::arg("json_line"));
    m.def("load_corpus", [](const std::string& path) { return corpus::load_corpus(path); }, py::arg("path"));

    m.def(
        "filter_post",
        [](const corpus::Post& p, std::optional<std::unordered_set<std::string>> images) {
            const auto r = corpus::filter_post(p, corpus::FilterConfig{}, corpus::EmojiTable::builtin(),
                                               images ? &*images : nullptr);
            return r ? std::string(corpus::to_string(*r)) : std::string("keep");
        },
        py::arg("post"), py::arg("available_images") = py::none(),
        "Verdict under the default filter rules: \"keep\" or the first failing rule.");

    m.def(
        "fleiss_kappa", [](const std::vector<std::vector<std::string>>& votes) { return annotate::fleiss_kappa(vote_sets(votes)); },
        py::arg("votes"), "One list of votes (\"yes\", \"no\", \"dont_know\") per judged object.");
    m.def(
        "matching_percent",
        [](const std::vector<std::vector<std::string>>& votes) { return annotate::matching_percent(vote_sets(votes)); },
        py::arg("votes"));

    py::class_<svm::SvmModel>(m, "SvmModel")
        .def_readonly("w", &svm::SvmModel::w)
        .def_readonly("b", &svm::SvmModel::b)
        .def_readonly("C", &svm::SvmModel::C)
        .def(
            "predict",
            [](const svm::SvmModel& model, const std::vector<double>& x) {
                FeatureVector fv;
                fv.add_dense("x", x);
                const auto p = svm::predict(model, fv);
                return py::make_tuple(p.label, p.score);
            },
            py::arg("x"), "Returns (label, score) with label in {+1, -1}.")
        .def(
            "primal_objective",
            [](const svm::SvmModel& model, const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
                return svm::primal_objective(model, dense_rows(X), y);
            },
            py::arg("X"), py::arg("y"));

    m.def(
        "svm_train",
        [](const std::vector<std::vector<double>>& X, const std::vector<int>& y, double C, double tol,
           std::size_t max_epochs, std::uint64_t seed) {
            svm::TrainConfig cfg;
            cfg.C = C;
            cfg.tol = tol;
            cfg.max_epochs = max_epochs;
            cfg.seed = seed;
            return svm::train(dense_rows(X), y, cfg);
        },
        py::arg("X"), py::arg("y"), py::arg("C") = 1.0, py::arg("tol") = 1e-4, py::arg("max_epochs") = 1000,
        py::arg("seed") = 1);

    py::class_<fusionnet::FusionNet>(m, "FusionNet")
        .def_static(
            "init",
            [](std::size_t text_in, std::size_t hidden, std::size_t image_dim, const std::string& mode,
               std::uint64_t seed) {
                return fusionnet::FusionNet::init(fusionnet::NetDims{text_in, hidden, image_dim},
                                                  fusionnet::parse_mode(mode), seed);
            },
            py::arg("text_in"), py::arg("hidden") = 512, py::arg("image_dim") = 4096, py::arg("mode") = "fusion",
            py::arg("seed") = 1)
        .def_property_readonly("text_in", [](const fusionnet::FusionNet& n) { return n.dims().text_in; })
        .def_property_readonly("hidden", [](const fusionnet::FusionNet& n) { return n.dims().hidden; })
        .def_property_readonly("image_dim", [](const fusionnet::FusionNet& n) { return n.dims().image_dim; })
        .def_property_readonly("concat_dim", [](const fusionnet::FusionNet& n) { return n.dims().concat_dim(); })
        .def_property_readonly("mode", [](const fusionnet::FusionNet& n) { return std::string(to_string(n.mode())); })
        .def_property(
            "params",
            [](const fusionnet::FusionNet& n) {
                const auto p = n.params();
                return std::vector<double>(p.begin(), p.end());
            },
            [](fusionnet::FusionNet& n, const std::vector<double>& values) {
                auto p = n.params();
                if (values.size() != p.size()) throw Error(ErrorKind::DimensionMismatch, "parameter count mismatch");
                std::copy(values.begin(), values.end(), p.begin());
            })
        .def(
            "forward",
            [](const fusionnet::FusionNet& n, const std::vector<std::uint32_t>& text, const std::vector<double>& avr) {
                const auto p = fusionnet::forward(n, text, avr);
                return py::make_tuple(p[0], p[1]);
            },
            py::arg("text"), py::arg("avr") = std::vector<double>{},
            "Class probabilities (not sarcastic, sarcastic) for unigram indices and an AVR vector.")
        .def(
            "predict",
            [](const fusionnet::FusionNet& n, const std::vector<std::uint32_t>& text, const std::vector<double>& avr) {
                return fusionnet::predict(n, text, avr);
            },
            py::arg("text"), py::arg("avr") = std::vector<double>{});

    m.def(
        "synth_write",
        [](const std::string& out_dir, std::size_t n, double q, std::uint64_t seed, std::size_t n_concepts,
           std::size_t avr_dim) {
            synth::Params p;
            p.n = n;
            p.q = q;
            p.seed = seed;
            p.n_concepts = n_concepts;
            p.avr_dim = avr_dim;
            return synth::write(synth::generate(p), out_dir);
        },
        py::arg("out_dir"), py::arg("n") = 2000, py::arg("q") = 0.5, py::arg("seed") = 7, py::arg("n_concepts") = 1000,
        py::arg("avr_dim") = 4096, "Writes a synthetic corpus and returns the path of its config.json.");

    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::vector<std::string>& feature_sets, std::size_t threads) {
            auto cfg = config::load(config_path);
            auto exp = cfg.experiment;
            if (!feature_sets.empty()) {
                exp.feature_sets.clear();
                for (const auto& f : feature_sets) exp.feature_sets.push_back(eval::parse_feature_set(f));
                exp.method = eval::method_of(exp.feature_sets.front());
            }
            exp.threads = threads;
            const auto data = config::load_dataset(cfg);
            eval::Report report;
            {
                py::gil_scoped_release release;
                report = eval::run_experiment(exp, data);
            }
            py::dict acc;
            for (const auto& c : report.cells) {
                acc[py::str(std::string(to_string(c.feature_set)) + "." + std::string(corpus::to_string(c.platform)))] =
                    c.accuracy;
            }
            return acc;
        },
        py::arg("config_path"), py::arg("feature_sets") = std::vector<std::string>{}, py::arg("threads") = 1,
        "Accuracy per \"<feature set>.<platform>\" cell.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::dispatch(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one CLI verb in-process and returns (exit code, stdout, stderr).");
}
