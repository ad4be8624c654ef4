// Checks of the fusion network against the dense long-double oracle. Shared
// by the unit tests and the acceptance runner.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmsarc/fusionnet.hpp"
#include "mmsarc/random.hpp"
#include "oracles.hpp"

namespace oracle {

struct RandomNet {
    mmsarc::fusionnet::FusionNet net;
    std::vector<std::vector<double>> avr_store;  // owns the image inputs
    std::vector<mmsarc::fusionnet::Example> batch;
};

// Small net with biases and weights all drawn at unit scale (zero biases
// would make every hidden unit sit near the rectifier kink), plus a batch of
// up to four examples. Image inputs mix negative and positive entries so the
// concatenation rectifier is exercised.
inline RandomNet random_net(mmsarc::Rng& rng, mmsarc::fusionnet::Mode mode, std::size_t text_in = 7,
                            std::size_t hidden = 4, std::size_t image = 5) {
    using namespace mmsarc::fusionnet;
    RandomNet r{FusionNet(NetDims{text_in, hidden, image}, mode), {}, {}};
    for (auto& p : r.net.params()) p = rng.uniform(-1.0, 1.0);
    const std::size_t n = 1 + rng.below(4);
    r.avr_store.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.avr_store[i].resize(image);
        for (auto& v : r.avr_store[i]) v = rng.uniform(-1.0, 2.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        Example ex;
        for (std::uint32_t v = 0; v < text_in; ++v) {
            if (rng.bernoulli(0.4)) ex.text.push_back(v);
        }
        ex.avr = r.avr_store[i];
        ex.label = static_cast<int>(rng.below(2));
        r.batch.push_back(std::move(ex));
    }
    return r;
}

inline std::vector<DenseExample> dense_batch(const std::vector<mmsarc::fusionnet::Example>& batch) {
    std::vector<DenseExample> out;
    for (const auto& ex : batch) out.push_back({ex.text, std::vector<double>(ex.avr.begin(), ex.avr.end()), ex.label});
    return out;
}

inline bool uses_text(mmsarc::fusionnet::Mode m) { return m != mmsarc::fusionnet::Mode::ImageOnly; }
inline bool uses_image(mmsarc::fusionnet::Mode m) { return m != mmsarc::fusionnet::Mode::TextOnly; }

// Largest |p_lib - p_oracle| over the batch.
inline double forward_error(const RandomNet& r) {
    const auto& net = r.net;
    const auto d = net.dims();
    const auto dense = unpack(net.params(), d.text_in, d.hidden, d.image_dim);
    double worst = 0.0;
    for (const auto& ex : r.batch) {
        const auto p = mmsarc::fusionnet::forward(net, ex.text, ex.avr);
        const auto q = dense_forward(dense, ex.text, ex.avr, uses_text(net.mode()), uses_image(net.mode()));
        for (std::size_t k = 0; k < 2; ++k) {
            worst = std::max(worst, static_cast<double>(std::fabs(static_cast<long double>(p[k]) - q[k])));
        }
    }
    return worst;
}

inline bool away_from_kinks(const RandomNet& r, long double margin = 1e-3L) {
    const auto d = r.net.dims();
    const auto dense = unpack(r.net.params(), d.text_in, d.hidden, d.image_dim);
    for (const auto& ex : r.batch) {
        if (min_hidden_margin(dense, ex.text) < margin) return false;
    }
    return true;
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t params = 0;
};

// Central differences of the long-double oracle loss with step h against the
// backpropagated gradients. The relative error uses max(|a|, |b|, floor) as
// denominator so parameters with no influence (both gradients ~0) count as
// agreeing.
inline GradCheck grad_check(const RandomNet& r, double h = 1e-6, double floor = 1e-8) {
    const auto& net = r.net;
    const auto d = net.dims();
    const auto lg = mmsarc::fusionnet::loss_and_grads(net, r.batch);
    const auto batch = dense_batch(r.batch);
    std::vector<double> params(net.params().begin(), net.params().end());
    GradCheck out;
    out.params = params.size();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + h;
        const long double up = dense_loss(unpack(params, d.text_in, d.hidden, d.image_dim), batch,
                                          uses_text(net.mode()), uses_image(net.mode()));
        params[i] = orig - h;
        const long double down = dense_loss(unpack(params, d.text_in, d.hidden, d.image_dim), batch,
                                            uses_text(net.mode()), uses_image(net.mode()));
        params[i] = orig;
        const double numeric = static_cast<double>((up - down) / (2.0L * h));
        const double analytic = lg.grads[i];
        const double denom = std::max({std::fabs(numeric), std::fabs(analytic), floor});
        out.max_rel_error = std::max(out.max_rel_error, std::fabs(numeric - analytic) / denom);
    }
    return out;
}

}  // namespace oracle
