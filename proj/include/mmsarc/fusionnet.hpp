#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mmsarc::fusionnet {

enum class Mode { TextOnly, ImageOnly, Fusion };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

inline constexpr std::size_t kClasses = 2;

struct NetDims {
    std::size_t text_in = 0;     // unigram vocabulary size
    std::size_t hidden = 512;    // text-branch hidden units
    std::size_t image_dim = 4096;

    std::size_t concat_dim() const { return hidden + image_dim; }
    std::size_t output_dim() const { return kClasses; }
    std::size_t num_params() const { return text_in * hidden + hidden + kClasses * concat_dim() + kClasses; }

    bool operator==(const NetDims&) const = default;
};

// Two-branch network:
//   h = relu(W_text x + b_text)             text branch, x one-hot unigrams
//   c = relu([h ; avr])                     concatenation layer
//   p = softmax(W_out c + b_out)            two classes, index 1 = sarcastic
// In TextOnly mode the AVR half of c is zero; in ImageOnly mode h is zero.
// All parameters live in one flat buffer so optimizers and checkpoints can
// treat them uniformly.
class FusionNet {
public:
    FusionNet() = default;
    FusionNet(NetDims dims, Mode mode);

    // Weights uniform in +-1/sqrt(fan_in), biases zero.
    static FusionNet init(NetDims dims, Mode mode, std::uint64_t seed);

    const NetDims& dims() const { return dims_; }
    Mode mode() const { return mode_; }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    // Row v of w_text holds the hidden-unit weights of vocabulary entry v.
    std::span<const double> w_text() const { return view(0, dims_.text_in * dims_.hidden); }
    std::span<const double> b_text() const { return view(off_b_text(), dims_.hidden); }
    // Row k of w_out holds the weights of output class k.
    std::span<const double> w_out() const { return view(off_w_out(), kClasses * dims_.concat_dim()); }
    std::span<const double> b_out() const { return view(off_b_out(), kClasses); }

    std::size_t off_b_text() const { return dims_.text_in * dims_.hidden; }
    std::size_t off_w_out() const { return off_b_text() + dims_.hidden; }
    std::size_t off_b_out() const { return off_w_out() + kClasses * dims_.concat_dim(); }

private:
    std::span<const double> view(std::size_t off, std::size_t n) const { return {params_.data() + off, n}; }

    NetDims dims_;
    Mode mode_ = Mode::Fusion;
    std::vector<double> params_;
};

struct Example {
    std::vector<std::uint32_t> text;  // unigram indices
    std::span<const double> avr;      // empty allowed in TextOnly mode
    int label = 0;                    // 1 sarcastic, 0 not
};

// Class probabilities; they are finite and sum to 1.
std::array<double, kClasses> forward(const FusionNet& net, std::span<const std::uint32_t> text,
                                     std::span<const double> avr);

// Predicted class (1 sarcastic). Ties go to class 1.
int predict(const FusionNet& net, std::span<const std::uint32_t> text, std::span<const double> avr);

struct LossAndGrads {
    double loss = 0.0;             // mean cross-entropy over the batch
    std::vector<double> grads;     // same layout as FusionNet::params()
};

LossAndGrads loss_and_grads(const FusionNet& net, std::span<const Example> batch);
LossAndGrads loss_and_grads(const FusionNet& net, std::span<const Example* const> batch);

double mean_loss(const FusionNet& net, std::span<const Example> data);

struct NetTrainConfig {
    std::size_t batch_size = 128;
    std::size_t epochs = 30;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    Mode mode = Mode::Fusion;

    void validate() const;
};

struct NetTrainResult {
    FusionNet net;
    std::vector<double> epoch_loss;  // mean training loss after each epoch
};

// Nesterov momentum SGD over shuffled minibatches:
//   v <- mu v - eta grad f(theta + mu v);  theta <- theta + v
// for exactly cfg.epochs epochs. The image inputs are fixed vectors.
NetTrainResult train_with_trace(const NetDims& dims, std::span<const Example> data, const NetTrainConfig& cfg);
FusionNet train(const NetDims& dims, std::span<const Example> data, const NetTrainConfig& cfg);

// Versioned text container with config, vocabulary hash and every parameter
// tensor in hexadecimal floating point.
struct Checkpoint {
    FusionNet net;
    NetTrainConfig config;
    std::string vocab_hash;
};

void save(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load(std::istream& in);

}  // namespace mmsarc::fusionnet
