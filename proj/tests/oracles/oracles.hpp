// Reference implementations used only by the tests. They share no code with
// the library beyond plain data types, so agreement is evidence rather than
// tautology.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Linear SVM: 0.5 (|w|^2 + b^2) + C sum max(0, 1 - y (w.x + b)).
// The dual  max sum(a) - 0.5 |sum a_i y_i [x_i;1]|^2,  0 <= a_i <= C  is a
// smooth box-constrained QP; accelerated projected gradient ascent on it
// yields w = sum a_i y_i x_i and a duality gap certificate.

struct SvmSolution {
    std::vector<double> w;
    double b = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    std::size_t iterations = 0;
};

inline double svm_primal(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                         const std::vector<double>& w, double b, double C) {
    double obj = 0.5 * b * b;
    for (double v : w) obj += 0.5 * v * v;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double s = b;
        for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * X[i][k];
        obj += C * std::max(0.0, 1.0 - y[i] * s);
    }
    return obj;
}

inline SvmSolution svm_reference(const std::vector<std::vector<double>>& X, const std::vector<int>& y, double C,
                                 double rel_gap = 1e-10, std::size_t max_iter = 2000000) {
    const std::size_t n = X.size(), d = X.empty() ? 0 : X[0].size();
    // Q_ij = y_i y_j (x_i.x_j + 1)
    std::vector<double> Q(n * n);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 1.0;
            for (std::size_t k = 0; k < d; ++k) dot += X[i][k] * X[j][k];
            Q[i * n + j] = y[i] * y[j] * dot;
        }
        trace += Q[i * n + i];
    }
    const double step = 1.0 / std::max(trace, 1e-12);
    std::vector<double> a(n, 0.0), z(n, 0.0), a_prev(n, 0.0), grad(n);
    double t = 1.0;
    SvmSolution sol;
    auto recover = [&](const std::vector<double>& alpha) {
        sol.w.assign(d, 0.0);
        sol.b = 0.0;
        double sum_a = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) sol.w[k] += alpha[i] * y[i] * X[i][k];
            sol.b += alpha[i] * y[i];
            sum_a += alpha[i];
        }
        double norm = sol.b * sol.b;
        for (double v : sol.w) norm += v * v;
        sol.dual = sum_a - 0.5 * norm;
        sol.primal = svm_primal(X, y, sol.w, sol.b, C);
    };
    for (std::size_t it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double g = 1.0;
            for (std::size_t j = 0; j < n; ++j) g -= Q[i * n + j] * z[j];
            grad[i] = g;
        }
        a_prev = a;
        for (std::size_t i = 0; i < n; ++i) a[i] = std::clamp(z[i] + step * grad[i], 0.0, C);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + ((t - 1.0) / t_next) * (a[i] - a_prev[i]);
        t = t_next;
        if (it % 200 == 0) {
            recover(a);
            sol.iterations = it;
            if (sol.primal - sol.dual <= rel_gap * std::max(1.0, std::abs(sol.primal))) return sol;
        }
    }
    recover(a);
    sol.iterations = max_iter;
    return sol;
}

// ---------------------------------------------------------------------------
// Fusion network forward pass with explicit dense matrices, in long double.
// Parameter layout (documented in fusionnet.hpp): W_text as text_in rows of
// hidden weights, b_text, W_out as 2 rows of (hidden + image) weights, b_out.

struct DenseNet {
    std::size_t text_in = 0, hidden = 0, image = 0;
    std::vector<std::vector<long double>> W_text;  // [hidden][text_in]
    std::vector<long double> b_text;
    std::vector<std::vector<long double>> W_out;   // [2][hidden + image]
    std::vector<long double> b_out;
};

inline DenseNet unpack(std::span<const double> params, std::size_t text_in, std::size_t hidden, std::size_t image) {
    DenseNet net;
    net.text_in = text_in;
    net.hidden = hidden;
    net.image = image;
    std::size_t pos = 0;
    net.W_text.assign(hidden, std::vector<long double>(text_in));
    for (std::size_t v = 0; v < text_in; ++v) {
        for (std::size_t j = 0; j < hidden; ++j) net.W_text[j][v] = params[pos++];
    }
    for (std::size_t j = 0; j < hidden; ++j) net.b_text.push_back(params[pos++]);
    net.W_out.assign(2, std::vector<long double>(hidden + image));
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t j = 0; j < hidden + image; ++j) net.W_out[k][j] = params[pos++];
    }
    for (std::size_t k = 0; k < 2; ++k) net.b_out.push_back(params[pos++]);
    return net;
}

// use_text / use_image select the branches (text-only and image-only modes).
inline std::array<long double, 2> dense_forward(const DenseNet& net, const std::vector<std::uint32_t>& text,
                                                std::span<const double> avr, bool use_text, bool use_image) {
    std::vector<long double> x(net.text_in, 0.0L);
    for (auto idx : text) x[idx] = 1.0L;
    std::vector<long double> c(net.hidden + net.image, 0.0L);
    if (use_text) {
        for (std::size_t j = 0; j < net.hidden; ++j) {
            long double s = net.b_text[j];
            for (std::size_t v = 0; v < net.text_in; ++v) s += net.W_text[j][v] * x[v];
            c[j] = std::max(s, 0.0L);
        }
    }
    if (use_image) {
        for (std::size_t k = 0; k < net.image; ++k) c[net.hidden + k] = std::max<long double>(avr[k], 0.0L);
    }
    std::array<long double, 2> z{};
    for (std::size_t k = 0; k < 2; ++k) {
        z[k] = net.b_out[k];
        for (std::size_t j = 0; j < c.size(); ++j) z[k] += net.W_out[k][j] * c[j];
    }
    const long double m = std::max(z[0], z[1]);
    const long double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

struct DenseExample {
    std::vector<std::uint32_t> text;
    std::vector<double> avr;
    int label = 0;
};

// Mean cross-entropy of a batch.
inline long double dense_loss(const DenseNet& net, const std::vector<DenseExample>& batch, bool use_text,
                              bool use_image) {
    long double sum = 0.0L;
    for (const auto& ex : batch) sum -= std::log(dense_forward(net, ex.text, ex.avr, use_text, use_image)[ex.label]);
    return sum / static_cast<long double>(batch.size());
}

// Smallest |pre-activation| of the text hidden layer; finite differences are
// only trustworthy away from the rectifier's kink.
inline long double min_hidden_margin(const DenseNet& net, const std::vector<std::uint32_t>& text) {
    long double best = 1e30L;
    for (std::size_t j = 0; j < net.hidden; ++j) {
        long double s = net.b_text[j];
        for (auto v : text) s += net.W_text[j][v];
        best = std::min(best, std::fabs(s));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Fleiss' kappa from the textbook formulas, over category labels given as
// strings.

inline double fleiss(const std::vector<std::vector<std::string>>& objects, const std::vector<std::string>& cats) {
    const double N = static_cast<double>(objects.size());
    const double n = static_cast<double>(objects.front().size());
    std::map<std::string, double> total;
    double P_bar = 0.0;
    for (const auto& votes : objects) {
        std::map<std::string, double> counts;
        for (const auto& v : votes) counts[v] += 1.0;
        double agree = 0.0;
        for (const auto& c : cats) {
            agree += counts[c] * (counts[c] - 1.0);
            total[c] += counts[c];
        }
        P_bar += agree / (n * (n - 1.0));
    }
    P_bar /= N;
    double P_e = 0.0;
    for (const auto& c : cats) {
        const double p = total[c] / (N * n);
        P_e += p * p;
    }
    return (P_bar - P_e) / (1.0 - P_e);
}

}  // namespace oracle
