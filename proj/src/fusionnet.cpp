#include "mmsarc/fusionnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "mmsarc/error.hpp"
#include "mmsarc/random.hpp"

namespace mmsarc::fusionnet {

namespace {

struct Activations {
    std::vector<double> h_pre;  // text pre-activation
    std::vector<double> c;      // rectified concatenation
    std::array<double, kClasses> z{};
    std::array<double, kClasses> p{};
    double log_norm = 0.0;      // log sum exp(z)
};

void check_inputs(const FusionNet& net, std::span<const std::uint32_t> text, std::span<const double> avr) {
    const auto& d = net.dims();
    for (auto idx : text) {
        if (idx >= d.text_in) {
            throw Error(ErrorKind::DimensionMismatch, "text index " + std::to_string(idx) +
                                                          " outside vocabulary of " + std::to_string(d.text_in));
        }
    }
    const bool avr_optional = net.mode() == Mode::TextOnly && avr.empty();
    if (!avr_optional && avr.size() != d.image_dim) {
        throw Error(ErrorKind::DimensionMismatch, "image input has " + std::to_string(avr.size()) +
                                                      " values, expected " + std::to_string(d.image_dim));
    }
}

void run(const FusionNet& net, std::span<const std::uint32_t> text, std::span<const double> avr, Activations& a) {
    check_inputs(net, text, avr);
    const auto& d = net.dims();
    const auto w_text = net.w_text();
    const auto b_text = net.b_text();
    const auto w_out = net.w_out();
    const auto b_out = net.b_out();

    a.h_pre.assign(d.hidden, 0.0);
    a.c.assign(d.concat_dim(), 0.0);
    if (net.mode() != Mode::ImageOnly) {
        for (std::size_t j = 0; j < d.hidden; ++j) a.h_pre[j] = b_text[j];
        for (auto idx : text) {
            const double* row = w_text.data() + static_cast<std::size_t>(idx) * d.hidden;
            for (std::size_t j = 0; j < d.hidden; ++j) a.h_pre[j] += row[j];
        }
        // relu(relu(x)) = relu(x): the concatenation rectifier is a no-op on h.
        for (std::size_t j = 0; j < d.hidden; ++j) a.c[j] = std::max(a.h_pre[j], 0.0);
    }
    if (net.mode() != Mode::TextOnly) {
        for (std::size_t k = 0; k < d.image_dim; ++k) a.c[d.hidden + k] = std::max(avr[k], 0.0);
    }

    const std::size_t cd = d.concat_dim();
    for (std::size_t cls = 0; cls < kClasses; ++cls) {
        const double* row = w_out.data() + cls * cd;
        double s = b_out[cls];
        for (std::size_t k = 0; k < cd; ++k) s += row[k] * a.c[k];
        a.z[cls] = s;
    }
    const double zmax = std::max(a.z[0], a.z[1]);
    double sum = 0.0;
    for (std::size_t cls = 0; cls < kClasses; ++cls) {
        a.p[cls] = std::exp(a.z[cls] - zmax);
        sum += a.p[cls];
    }
    for (auto& v : a.p) v /= sum;
    a.log_norm = zmax + std::log(sum);
}

// Adds the gradient of -log p[label] for one example into grads.
double accumulate(const FusionNet& net, const Example& ex, Activations& a, std::vector<double>& grads) {
    run(net, ex.text, ex.avr, a);
    if (ex.label != 0 && ex.label != 1) throw Error(ErrorKind::InvalidArgument, "network labels must be 0 or 1");
    const auto& d = net.dims();
    const std::size_t cd = d.concat_dim();
    const auto w_out = net.w_out();

    std::array<double, kClasses> dz{};
    for (std::size_t cls = 0; cls < kClasses; ++cls) {
        dz[cls] = a.p[cls] - (static_cast<int>(cls) == ex.label ? 1.0 : 0.0);
    }
    double* g_w_out = grads.data() + net.off_w_out();
    double* g_b_out = grads.data() + net.off_b_out();
    for (std::size_t cls = 0; cls < kClasses; ++cls) {
        double* row = g_w_out + cls * cd;
        for (std::size_t k = 0; k < cd; ++k) row[k] += dz[cls] * a.c[k];
        g_b_out[cls] += dz[cls];
    }

    if (net.mode() != Mode::ImageOnly) {
        double* g_w_text = grads.data();
        double* g_b_text = grads.data() + net.off_b_text();
        std::vector<double> dh(d.hidden, 0.0);
        for (std::size_t j = 0; j < d.hidden; ++j) {
            if (a.h_pre[j] <= 0.0) continue;
            dh[j] = dz[0] * w_out[j] + dz[1] * w_out[cd + j];
        }
        for (std::size_t j = 0; j < d.hidden; ++j) g_b_text[j] += dh[j];
        for (auto idx : ex.text) {
            double* row = g_w_text + static_cast<std::size_t>(idx) * d.hidden;
            for (std::size_t j = 0; j < d.hidden; ++j) row[j] += dh[j];
        }
    }
    return a.log_norm - a.z[static_cast<std::size_t>(ex.label)];
}

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::Parse, "bad real '" + s + "' in checkpoint");
    return v;
}

}  // namespace

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::TextOnly: return "text_only";
        case Mode::ImageOnly: return "image_only";
        case Mode::Fusion: return "fusion";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    if (s == "text_only") return Mode::TextOnly;
    if (s == "image_only") return Mode::ImageOnly;
    if (s == "fusion") return Mode::Fusion;
    throw Error(ErrorKind::Parse, "unknown network mode '" + std::string(s) + "'");
}

FusionNet::FusionNet(NetDims dims, Mode mode) : dims_(dims), mode_(mode), params_(dims.num_params(), 0.0) {
    if (dims.hidden == 0) throw Error(ErrorKind::InvalidArgument, "hidden layer must have at least one unit");
}

FusionNet FusionNet::init(NetDims dims, Mode mode, std::uint64_t seed) {
    FusionNet net(dims, mode);
    Rng rng(seed);
    const double text_scale = dims.text_in ? 1.0 / std::sqrt(static_cast<double>(dims.text_in)) : 0.0;
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(dims.concat_dim()));
    auto p = net.params();
    for (std::size_t i = 0; i < net.off_b_text(); ++i) p[i] = rng.uniform(-text_scale, text_scale);
    for (std::size_t i = net.off_w_out(); i < net.off_b_out(); ++i) p[i] = rng.uniform(-out_scale, out_scale);
    return net;
}

std::array<double, kClasses> forward(const FusionNet& net, std::span<const std::uint32_t> text,
                                     std::span<const double> avr) {
    Activations a;
    run(net, text, avr, a);
    return a.p;
}

int predict(const FusionNet& net, std::span<const std::uint32_t> text, std::span<const double> avr) {
    const auto p = forward(net, text, avr);
    return p[1] >= p[0] ? 1 : 0;
}

LossAndGrads loss_and_grads(const FusionNet& net, std::span<const Example* const> batch) {
    if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "loss_and_grads needs a non-empty batch");
    LossAndGrads out;
    out.grads.assign(net.dims().num_params(), 0.0);
    Activations a;
    for (const Example* ex : batch) out.loss += accumulate(net, *ex, a, out.grads);
    const double n = static_cast<double>(batch.size());
    out.loss /= n;
    for (auto& g : out.grads) g /= n;
    return out;
}

LossAndGrads loss_and_grads(const FusionNet& net, std::span<const Example> batch) {
    std::vector<const Example*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& ex : batch) ptrs.push_back(&ex);
    return loss_and_grads(net, std::span<const Example* const>(ptrs));
}

double mean_loss(const FusionNet& net, std::span<const Example> data) {
    if (data.empty()) return 0.0;
    Activations a;
    double total = 0.0;
    for (const auto& ex : data) {
        run(net, ex.text, ex.avr, a);
        total += a.log_norm - a.z[static_cast<std::size_t>(ex.label)];
    }
    return total / static_cast<double>(data.size());
}

void NetTrainConfig::validate() const {
    if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch_size must be at least 1");
    if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be at least 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorKind::InvalidArgument, "momentum must be in [0, 1)");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning_rate must be positive");
}

NetTrainResult train_with_trace(const NetDims& dims, std::span<const Example> data, const NetTrainConfig& cfg) {
    cfg.validate();
    bool pos = false, neg = false;
    for (const auto& ex : data) {
        pos |= ex.label == 1;
        neg |= ex.label == 0;
    }
    if (!pos || !neg) throw Error(ErrorKind::DegenerateLabels, "network training needs both classes");

    NetTrainResult result{FusionNet::init(dims, cfg.mode, cfg.seed), {}};
    FusionNet& net = result.net;
    FusionNet lookahead = net;
    std::vector<double> velocity(dims.num_params(), 0.0);
    Rng rng(Rng::derive(cfg.seed, 1));
    const double mu = cfg.momentum;
    const double eta = cfg.learning_rate;

    std::vector<const Example*> batch;
    batch.reserve(cfg.batch_size);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = rng.permutation(data.size());
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            batch.clear();
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            for (std::size_t k = start; k < stop; ++k) batch.push_back(&data[order[k]]);

            auto theta = net.params();
            auto ahead = lookahead.params();
            for (std::size_t i = 0; i < theta.size(); ++i) ahead[i] = theta[i] + mu * velocity[i];
            const auto lg = loss_and_grads(lookahead, std::span<const Example* const>(batch));
            for (std::size_t i = 0; i < theta.size(); ++i) {
                velocity[i] = mu * velocity[i] - eta * lg.grads[i];
                theta[i] += velocity[i];
            }
        }
        result.epoch_loss.push_back(mean_loss(net, data));
    }
    return result;
}

FusionNet train(const NetDims& dims, std::span<const Example> data, const NetTrainConfig& cfg) {
    return train_with_trace(dims, data, cfg).net;
}

void save(std::ostream& out, const Checkpoint& ckpt) {
    const auto& net = ckpt.net;
    const auto& d = net.dims();
    const auto& c = ckpt.config;
    out << "mmsarc-fusionnet 1\n";
    out << "mode " << to_string(net.mode()) << '\n';
    out << "dims " << d.text_in << ' ' << d.hidden << ' ' << d.image_dim << '\n';
    out << "vocab_hash " << (ckpt.vocab_hash.empty() ? "-" : ckpt.vocab_hash) << '\n';
    out << "config " << c.batch_size << ' ' << c.epochs << ' ' << hex(c.learning_rate) << ' ' << hex(c.momentum)
        << ' ' << c.seed << ' ' << to_string(c.mode) << '\n';
    auto tensor = [&](const char* name, std::span<const double> values) {
        out << "tensor " << name << ' ' << values.size() << '\n';
        for (double v : values) out << hex(v) << '\n';
    };
    tensor("w_text", net.w_text());
    tensor("b_text", net.b_text());
    tensor("w_out", net.w_out());
    tensor("b_out", net.b_out());
}

Checkpoint load(std::istream& in) {
    auto token = [&] {
        std::string t;
        if (!(in >> t)) throw Error(ErrorKind::Parse, "checkpoint truncated");
        return t;
    };
    auto expect = [&](const char* key) {
        if (token() != key) throw Error(ErrorKind::Parse, std::string("checkpoint: expected '") + key + "'");
    };
    expect("mmsarc-fusionnet");
    if (token() != "1") throw Error(ErrorKind::Parse, "unsupported checkpoint version");
    expect("mode");
    const Mode mode = parse_mode(token());
    expect("dims");
    NetDims dims;
    dims.text_in = std::stoul(token());
    dims.hidden = std::stoul(token());
    dims.image_dim = std::stoul(token());
    Checkpoint ckpt;
    expect("vocab_hash");
    ckpt.vocab_hash = token();
    if (ckpt.vocab_hash == "-") ckpt.vocab_hash.clear();
    expect("config");
    ckpt.config.batch_size = std::stoul(token());
    ckpt.config.epochs = std::stoul(token());
    ckpt.config.learning_rate = parse_real(token());
    ckpt.config.momentum = parse_real(token());
    ckpt.config.seed = std::stoull(token());
    ckpt.config.mode = parse_mode(token());

    ckpt.net = FusionNet(dims, mode);
    auto params = ckpt.net.params();
    const std::pair<const char*, std::size_t> tensors[] = {
        {"w_text", ckpt.net.off_b_text()},
        {"b_text", ckpt.net.off_w_out()},
        {"w_out", ckpt.net.off_b_out()},
        {"b_out", params.size()},
    };
    std::size_t pos = 0;
    for (const auto& [name, end] : tensors) {
        expect("tensor");
        if (token() != name) throw Error(ErrorKind::Parse, std::string("checkpoint: expected tensor ") + name);
        if (std::stoul(token()) != end - pos) throw Error(ErrorKind::Parse, std::string("checkpoint: bad size for ") + name);
        for (; pos < end; ++pos) params[pos] = parse_real(token());
    }
    return ckpt;
}

}  // namespace mmsarc::fusionnet
