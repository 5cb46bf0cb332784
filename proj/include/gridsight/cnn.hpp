#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <gridsight/proposal.hpp>
#include <gridsight/raster.hpp>

namespace gridsight {

enum class PatchLabel {
    Insulator = 0,
    Triangle = 1,
    Other = 2,
};

const char* to_string(PatchLabel label);

inline constexpr int kPatchSize = 64;
inline constexpr int kNumClasses = 3;

/// Eight-layer classification stack over 64x64 grayscale patches:
///   conv 3x3x8 -> relu -> maxpool 2 -> conv 3x3x16 -> relu ->
///   maxpool 2 -> fully-connected 64 -> fully-connected 3 + softmax.
/// Convolutions are stride 1 with one-pixel zero padding.
struct CnnModel {
    std::vector<double> conv1_w; // [8][1][3][3]
    std::vector<double> conv1_b; // [8]
    std::vector<double> conv2_w; // [16][8][3][3]
    std::vector<double> conv2_b; // [16]
    std::vector<double> fc1_w;   // [64][4096]
    std::vector<double> fc1_b;   // [64]
    std::vector<double> fc2_w;   // [3][64]
    std::vector<double> fc2_b;   // [3]
    std::uint64_t init_seed = 0;

    std::size_t parameter_count() const;
    double* parameter(std::size_t flat_index);
    const double* parameter(std::size_t flat_index) const;
};

struct LabeledPatch {
    RasterGray patch; // 64x64
    PatchLabel label = PatchLabel::Other;
};

struct LabeledDataset {
    std::vector<LabeledPatch> train;
    std::vector<LabeledPatch> test;
};

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 20;
    int batch_size = 16;
    std::uint64_t seed = 1;
    double momentum = 0.9;

    void validate() const;
};

/// Glorot-uniform initialization from a seeded generator; the same seed
/// always produces bit-identical weights.
CnnModel build_model(std::uint64_t seed);

/// All-zero weights; softmax then outputs the uniform distribution.
CnnModel build_zero_model();

/// Mini-batch gradient descent with momentum and cross-entropy loss.
/// Deterministic given the config seed. Per-epoch mean loss is appended
/// to epoch_loss when provided.
CnnModel train(const CnnModel& model, const LabeledDataset& data, const TrainConfig& cfg,
               std::vector<double>* epoch_loss = nullptr);

/// Class probabilities for a 64x64 patch.
std::array<double, kNumClasses> forward_probs(const CnnModel& model, const RasterGray& patch);

struct Classification {
    PatchLabel label = PatchLabel::Other;
    std::array<double, kNumClasses> probabilities{};
};

/// Argmax classification; inputs of other sizes are resampled
/// bilinearly to 64x64 first.
Classification classify(const CnnModel& model, const RasterGray& patch);

/// Compares analytic gradients against central finite differences
/// (step 1e-5) on a random projection of at least n_probes weights.
/// Returns the maximum relative error |a - n| / max(|a| + |n|, 1e-6).
double gradient_check(const CnnModel& model, const RasterGray& patch, PatchLabel label,
                      int n_probes = 200, std::uint64_t seed = 42);

struct ClassifiedRegion {
    ProposalRegion region;
    PatchLabel label = PatchLabel::Other;
    double confidence = 0.0;
};

/// Classifies each proposal's resampled crop and keeps the regions not
/// labeled "other". Output order matches the input order.
std::vector<ClassifiedRegion> filter_proposals(const CnnModel& model,
                                               const std::vector<ProposalRegion>& regions,
                                               const RasterGray& img);

/// Versioned binary container, magic GSCNN1, little-endian f64 weights.
/// Round trips bit-exactly.
void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path);

/// Loads <dir>/{train,test}/{insulator,triangle,other}/*.png, patches
/// resampled to 64x64 when needed.
LabeledDataset load_dataset(const std::string& dir);

namespace cnn_detail {

/// Cross-entropy loss of one sample; when grads is non-null the full
/// analytic gradient is accumulated into it (same layout as the model).
double loss_and_gradients(const CnnModel& model, const RasterGray& patch, int label, CnnModel* grads);

/// Loss through the fully-connected head only (flattened raw input fed
/// straight to fc1); exercises the linear path of the backward pass.
double linear_loss_and_gradients(const CnnModel& model, const std::vector<double>& input, int label,
                                 std::vector<double>* fc1_w_grad, std::vector<double>* fc2_w_grad);

/// Maximum relative error between an explicit analytic gradient vector
/// and central finite differences at the probed flat indices.
double compare_with_fd(const CnnModel& model, const RasterGray& patch, int label,
                       const std::vector<double>& analytic, const std::vector<std::size_t>& probes);

} // namespace cnn_detail

} // namespace gridsight
