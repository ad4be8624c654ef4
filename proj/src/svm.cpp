#include "mmsarc/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mmsarc/error.hpp"
#include "mmsarc/random.hpp"

namespace mmsarc::svm {

namespace {

using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

SparseRow to_row(const FeatureVector& x, bool normalize) {
    SparseRow row = x.nonzeros();
    if (normalize) {
        double norm = 0.0;
        for (const auto& [_, v] : row) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (auto& [_, v] : row) v /= norm;
        }
    }
    return row;
}

double dot(const std::vector<double>& w, const SparseRow& row) {
    double s = 0.0;
    for (const auto& [idx, v] : row) s += w[idx] * v;
    return s;
}

void check_layout(const std::vector<BlockLayout>& expected, const FeatureVector& x) {
    if (x.layout() != expected) {
        throw Error(ErrorKind::LayoutMismatch, "feature layout does not match the model layout");
    }
}

double objective(const std::vector<double>& w, double b, double C, const std::vector<SparseRow>& rows,
                 std::span<const int> y) {
    double reg = b * b;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        loss += std::max(0.0, 1.0 - y[i] * (dot(w, rows[i]) + b));
    }
    return 0.5 * reg + C * loss;
}

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::Parse, "bad real '" + s + "' in model file");
    return v;
}

}  // namespace

FeatureVector concat(std::span<const FeatureVector> parts) {
    FeatureVector out;
    for (const auto& part : parts) {
        for (const auto& block : part.blocks()) out.add(block);
    }
    return out;
}

void TrainConfig::validate() const {
    if (!(C > 0.0)) throw Error(ErrorKind::InvalidArgument, "SVM C must be positive");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "SVM tol must be positive");
    if (max_epochs == 0) throw Error(ErrorKind::InvalidArgument, "SVM max_epochs must be at least 1");
}

TrainResult train_with_trace(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg) {
    cfg.validate();
    if (X.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "feature and label counts differ");
    if (X.size() < 2) throw Error(ErrorKind::InsufficientData, "SVM training needs at least two examples");
    bool pos = false, neg = false;
    for (int label : y) {
        if (label == 1) pos = true;
        else if (label == -1) neg = true;
        else throw Error(ErrorKind::InvalidArgument, "SVM labels must be +1 or -1");
    }
    if (!pos || !neg) throw Error(ErrorKind::DegenerateLabels, "SVM training needs both classes");

    const auto layout = X.front().layout();
    for (const auto& x : X) check_layout(layout, x);
    const std::size_t dim = X.front().total_dim();

    std::vector<SparseRow> rows;
    rows.reserve(X.size());
    for (const auto& x : X) rows.push_back(to_row(x, cfg.normalize));

    const std::size_t n = rows.size();
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 1.0;  // constant bias feature
        for (const auto& [_, v] : rows[i]) sq += v * v;
        qd[i] = sq;
    }

    TrainResult result;
    auto& m = result.model;
    auto& trace = result.trace;
    m.w.assign(dim, 0.0);
    m.b = 0.0;
    m.C = cfg.C;
    m.normalize = cfg.normalize;
    m.layout = layout;
    std::vector<double>& alpha = trace.alpha;
    alpha.assign(n, 0.0);

    Rng rng(cfg.seed);
    const double C = cfg.C;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        double max_change = 0.0;
        for (std::size_t i : rng.permutation(n)) {
            const double g = y[i] * (dot(m.w, rows[i]) + m.b) - 1.0;
            double pg = g;
            if (alpha[i] == 0.0) pg = std::min(g, 0.0);
            else if (alpha[i] == C) pg = std::max(g, 0.0);
            if (std::fabs(pg) <= 1e-12) continue;

            const double old = alpha[i];
            alpha[i] = std::min(std::max(old - g / qd[i], 0.0), C);
            if (alpha[i] < 0.0 || alpha[i] > C) trace.dual_feasible = false;
            const double delta = (alpha[i] - old) * y[i];
            for (const auto& [idx, v] : rows[i]) m.w[idx] += delta * v;
            m.b += delta;
            max_change = std::max(max_change, std::fabs(alpha[i] - old));
        }
        ++trace.epochs;

        trace.primal.push_back(objective(m.w, m.b, C, rows, y));
        double sum_alpha = 0.0;
        for (double a : alpha) sum_alpha += a;
        double sq = m.b * m.b;
        for (double v : m.w) sq += v * v;
        trace.dual.push_back(sum_alpha - 0.5 * sq);

        if (max_change < cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    return result;
}

SvmModel train(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg) {
    return train_with_trace(X, y, cfg).model;
}

Prediction predict(const SvmModel& m, const FeatureVector& x) {
    check_layout(m.layout, x);
    const double score = dot(m.w, to_row(x, m.normalize)) + m.b;
    return {score >= 0.0 ? 1 : -1, score};
}

double primal_objective(const SvmModel& m, std::span<const FeatureVector> X, std::span<const int> y) {
    std::vector<SparseRow> rows;
    for (const auto& x : X) {
        check_layout(m.layout, x);
        rows.push_back(to_row(x, m.normalize));
    }
    return objective(m.w, m.b, m.C, rows, y);
}

void save(std::ostream& out, const SvmModel& m) {
    out << "mmsarc-svm 1\n";
    out << "C " << hex(m.C) << '\n';
    out << "bias " << hex(m.b) << '\n';
    out << "normalize " << (m.normalize ? 1 : 0) << '\n';
    out << "blocks " << m.layout.size() << '\n';
    for (const auto& b : m.layout) {
        out << b.name << ' ' << b.offset << ' ' << b.dim << ' ' << (b.sparse ? "sparse" : "dense") << '\n';
    }
    out << "weights " << m.w.size() << '\n';
    for (double v : m.w) out << hex(v) << '\n';
}

SvmModel load(std::istream& in) {
    auto expect = [&](const char* key) {
        std::string got;
        if (!(in >> got) || got != key) {
            throw Error(ErrorKind::Parse, std::string("model file: expected '") + key + "'");
        }
    };
    auto token = [&] {
        std::string t;
        if (!(in >> t)) throw Error(ErrorKind::Parse, "model file truncated");
        return t;
    };
    expect("mmsarc-svm");
    if (token() != "1") throw Error(ErrorKind::Parse, "unsupported model file version");
    SvmModel m;
    expect("C");
    m.C = parse_real(token());
    expect("bias");
    m.b = parse_real(token());
    expect("normalize");
    m.normalize = token() == "1";
    expect("blocks");
    const std::size_t nblocks = std::stoul(token());
    std::size_t offset = 0;
    for (std::size_t k = 0; k < nblocks; ++k) {
        BlockLayout b;
        b.name = token();
        b.offset = std::stoul(token());
        b.dim = std::stoul(token());
        const std::string kind = token();
        if (kind != "sparse" && kind != "dense") throw Error(ErrorKind::Parse, "bad block kind '" + kind + "'");
        b.sparse = kind == "sparse";
        if (b.offset != offset) throw Error(ErrorKind::Parse, "block offsets are not contiguous");
        offset += b.dim;
        m.layout.push_back(std::move(b));
    }
    expect("weights");
    const std::size_t dim = std::stoul(token());
    if (dim != offset) throw Error(ErrorKind::Parse, "weight count does not match the block layout");
    m.w.resize(dim);
    for (auto& v : m.w) v = parse_real(token());
    if (!(m.C > 0.0)) throw Error(ErrorKind::Parse, "model C must be positive");
    return m;
}

}  // namespace mmsarc::svm
