#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmsarc/feature_vector.hpp"

namespace mmsarc::svm {

// Joins the blocks of every part, in order, into one long vector.
FeatureVector concat(std::span<const FeatureVector> parts);

struct TrainConfig {
    double C = 1.0;
    std::size_t max_epochs = 1000;
    double tol = 1e-4;
    std::uint64_t seed = 1;
    // Extension: scale each example to unit L2 norm before training and
    // prediction. Off by default.
    bool normalize = false;

    void validate() const;
};

// Linear hinge-loss classifier. The bias is learned as the weight of an
// implicit constant-1 feature, so it is regularized together with w.
struct SvmModel {
    std::vector<double> w;
    double b = 0.0;
    double C = 1.0;
    bool normalize = false;
    std::vector<BlockLayout> layout;

    std::size_t dim() const { return w.size(); }
};

struct TrainTrace {
    std::size_t epochs = 0;
    bool converged = false;
    // Primal and dual objectives after each epoch.
    std::vector<double> primal;
    std::vector<double> dual;
    // Final dual variables and whether every update kept them in [0, C].
    std::vector<double> alpha;
    bool dual_feasible = true;
};

struct TrainResult {
    SvmModel model;
    TrainTrace trace;
};

// Dual coordinate descent on
//   0.5 * (|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b))
// visiting examples in a fresh seeded permutation each epoch and stopping once
// the largest dual-variable change in an epoch drops below tol.
// Labels must be +1/-1 and both classes present.
TrainResult train_with_trace(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg);
SvmModel train(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg);

struct Prediction {
    int label = 1;
    double score = 0.0;
};

// score = w.x + b; label = +1 when score >= 0.
Prediction predict(const SvmModel& m, const FeatureVector& x);

double primal_objective(const SvmModel& m, std::span<const FeatureVector> X, std::span<const int> y);

// Versioned text format; reals are written as hexadecimal floating point so
// the round trip is exact.
void save(std::ostream& out, const SvmModel& m);
SvmModel load(std::istream& in);

}  // namespace mmsarc::svm
