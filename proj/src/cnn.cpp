#include <gridsight/cnn.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gridsight/image_io.hpp>

namespace gridsight {

namespace {

// layer geometry
constexpr int kIn = kPatchSize;           // 64
constexpr int kC1 = 8;                    // conv1 filters
constexpr int kC2 = 16;                   // conv2 filters
constexpr int kP1 = kIn / 2;              // 32
constexpr int kP2 = kP1 / 2;              // 16
constexpr int kFlat = kC2 * kP2 * kP2;    // 4096
constexpr int kHidden = 64;

constexpr std::size_t kConv1W = static_cast<std::size_t>(kC1) * 9;
constexpr std::size_t kConv2W = static_cast<std::size_t>(kC2) * kC1 * 9;
constexpr std::size_t kFc1W = static_cast<std::size_t>(kHidden) * kFlat;
constexpr std::size_t kFc2W = static_cast<std::size_t>(kNumClasses) * kHidden;

// Deterministic across platforms, unlike std::uniform_real_distribution.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
};

struct Activations {
    std::vector<double> a1;  // conv1 pre-relu, kC1 x 64 x 64
    std::vector<double> p1;  // pooled relu, kC1 x 32 x 32
    std::vector<int> p1_arg; // winning index into a1
    std::vector<double> a2;  // conv2 pre-relu, kC2 x 32 x 32
    std::vector<double> p2;  // pooled relu, kC2 x 16 x 16
    std::vector<int> p2_arg;
    std::array<double, kHidden> f1{};
    std::array<double, kNumClasses> logits{};
    std::array<double, kNumClasses> probs{};
};

void conv_forward(const double* in, int channels, int side, const double* w, const double* b,
                  int filters, double* out) {
    const int area = side * side;
    for (int f = 0; f < filters; ++f) {
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                double acc = b[f];
                for (int c = 0; c < channels; ++c) {
                    const double* wf = w + (static_cast<std::size_t>(f) * channels + c) * 9;
                    const double* ic = in + static_cast<std::size_t>(c) * area;
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= side) {
                            continue;
                        }
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x + kx - 1;
                            if (xx < 0 || xx >= side) {
                                continue;
                            }
                            acc += wf[ky * 3 + kx] * ic[yy * side + xx];
                        }
                    }
                }
                out[static_cast<std::size_t>(f) * area + y * side + x] = acc;
            }
        }
    }
}

// max pool 2x2 stride 2 over relu(in); arg records the winning input index
void pool_forward(const double* in, int channels, int side, double* out, int* arg) {
    const int half = side / 2;
    for (int c = 0; c < channels; ++c) {
        for (int py = 0; py < half; ++py) {
            for (int px = 0; px < half; ++px) {
                double best = -1.0;
                int best_idx = -1;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int idx = c * side * side + (2 * py + dy) * side + (2 * px + dx);
                        const double v = std::max(0.0, in[idx]);
                        if (v > best) {
                            best = v;
                            best_idx = idx;
                        }
                    }
                }
                out[static_cast<std::size_t>(c) * half * half + py * half + px] = best;
                arg[static_cast<std::size_t>(c) * half * half + py * half + px] = best_idx;
            }
        }
    }
}

void forward_pass(const CnnModel& m, const RasterGray& patch, Activations& act) {
    act.a1.resize(static_cast<std::size_t>(kC1) * kIn * kIn);
    act.p1.resize(static_cast<std::size_t>(kC1) * kP1 * kP1);
    act.p1_arg.resize(act.p1.size());
    act.a2.resize(static_cast<std::size_t>(kC2) * kP1 * kP1);
    act.p2.resize(static_cast<std::size_t>(kC2) * kP2 * kP2);
    act.p2_arg.resize(act.p2.size());

    conv_forward(patch.data.data(), 1, kIn, m.conv1_w.data(), m.conv1_b.data(), kC1, act.a1.data());
    pool_forward(act.a1.data(), kC1, kIn, act.p1.data(), act.p1_arg.data());
    conv_forward(act.p1.data(), kC1, kP1, m.conv2_w.data(), m.conv2_b.data(), kC2, act.a2.data());
    pool_forward(act.a2.data(), kC2, kP1, act.p2.data(), act.p2_arg.data());

    for (int o = 0; o < kHidden; ++o) {
        double acc = m.fc1_b[o];
        const double* w = m.fc1_w.data() + static_cast<std::size_t>(o) * kFlat;
        for (int i = 0; i < kFlat; ++i) {
            acc += w[i] * act.p2[i];
        }
        act.f1[o] = acc;
    }
    for (int o = 0; o < kNumClasses; ++o) {
        double acc = m.fc2_b[o];
        const double* w = m.fc2_w.data() + static_cast<std::size_t>(o) * kHidden;
        for (int i = 0; i < kHidden; ++i) {
            acc += w[i] * act.f1[i];
        }
        act.logits[o] = acc;
    }
    const double top = *std::max_element(act.logits.begin(), act.logits.end());
    double denom = 0.0;
    for (int o = 0; o < kNumClasses; ++o) {
        act.probs[o] = std::exp(act.logits[o] - top);
        denom += act.probs[o];
    }
    for (double& p : act.probs) {
        p /= denom;
    }
}

void conv_backward(const double* in, int channels, int side, const double* w, int filters,
                   const double* dout, double* dw, double* db, double* din) {
    const int area = side * side;
    for (int f = 0; f < filters; ++f) {
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                const double g = dout[static_cast<std::size_t>(f) * area + y * side + x];
                if (g == 0.0) {
                    continue;
                }
                db[f] += g;
                for (int c = 0; c < channels; ++c) {
                    const std::size_t wbase = (static_cast<std::size_t>(f) * channels + c) * 9;
                    const double* ic = in + static_cast<std::size_t>(c) * area;
                    double* dic = din ? din + static_cast<std::size_t>(c) * area : nullptr;
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= side) {
                            continue;
                        }
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x + kx - 1;
                            if (xx < 0 || xx >= side) {
                                continue;
                            }
                            dw[wbase + ky * 3 + kx] += g * ic[yy * side + xx];
                            if (dic) {
                                dic[yy * side + xx] += g * w[wbase + ky * 3 + kx];
                            }
                        }
                    }
                }
            }
        }
    }
}

// gradient of pooled relu back to the pre-activation map
void pool_backward(const double* pre, const double* dout, const int* arg, std::size_t pooled_size,
                   double* din) {
    for (std::size_t i = 0; i < pooled_size; ++i) {
        const int idx = arg[i];
        if (idx >= 0 && pre[idx] > 0.0) {
            din[idx] += dout[i];
        }
    }
}

std::size_t tensor_sizes(const CnnModel&, std::size_t which) {
    static const std::size_t sizes[8] = {kConv1W, kC1, kConv2W, kC2, kFc1W, kHidden, kFc2W, kNumClasses};
    return sizes[which];
}

double* tensor_data(CnnModel& m, std::size_t which) {
    switch (which) {
        case 0: return m.conv1_w.data();
        case 1: return m.conv1_b.data();
        case 2: return m.conv2_w.data();
        case 3: return m.conv2_b.data();
        case 4: return m.fc1_w.data();
        case 5: return m.fc1_b.data();
        case 6: return m.fc2_w.data();
        default: return m.fc2_b.data();
    }
}

CnnModel make_empty_model() {
    CnnModel m;
    m.conv1_w.assign(kConv1W, 0.0);
    m.conv1_b.assign(kC1, 0.0);
    m.conv2_w.assign(kConv2W, 0.0);
    m.conv2_b.assign(kC2, 0.0);
    m.fc1_w.assign(kFc1W, 0.0);
    m.fc1_b.assign(kHidden, 0.0);
    m.fc2_w.assign(kFc2W, 0.0);
    m.fc2_b.assign(kNumClasses, 0.0);
    return m;
}

void check_patch(const RasterGray& patch, const char* where) {
    if (patch.width != kPatchSize || patch.height != kPatchSize) {
        throw InvalidArgumentError(std::string(where) + ": patch must be 64x64");
    }
}

} // namespace

const char* to_string(PatchLabel label) {
    switch (label) {
        case PatchLabel::Insulator: return "insulator";
        case PatchLabel::Triangle: return "triangle";
        default: return "other";
    }
}

std::size_t CnnModel::parameter_count() const {
    return kConv1W + kC1 + kConv2W + kC2 + kFc1W + kHidden + kFc2W + kNumClasses;
}

double* CnnModel::parameter(std::size_t flat_index) {
    for (std::size_t t = 0; t < 8; ++t) {
        const std::size_t size = tensor_sizes(*this, t);
        if (flat_index < size) {
            return tensor_data(*this, t) + flat_index;
        }
        flat_index -= size;
    }
    throw InvalidArgumentError("CnnModel::parameter: index out of range");
}

const double* CnnModel::parameter(std::size_t flat_index) const {
    return const_cast<CnnModel*>(this)->parameter(flat_index);
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) {
        throw InvalidArgumentError("TrainConfig: learning rate must be positive");
    }
    if (epochs < 1 || batch_size < 1) {
        throw InvalidArgumentError("TrainConfig: epochs and batch size must be at least 1");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw InvalidArgumentError("TrainConfig: momentum must be in [0,1)");
    }
}

CnnModel build_model(std::uint64_t seed) {
    CnnModel m = make_empty_model();
    m.init_seed = seed;
    SplitMix64 rng(seed);
    auto glorot = [&](std::vector<double>& w, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : w) {
            v = (2.0 * rng.uniform() - 1.0) * limit;
        }
    };
    glorot(m.conv1_w, 9, kC1 * 9);
    glorot(m.conv2_w, kC1 * 9, kC2 * 9);
    glorot(m.fc1_w, kFlat, kHidden);
    glorot(m.fc2_w, kHidden, kNumClasses);
    return m;
}

CnnModel build_zero_model() { return make_empty_model(); }

std::array<double, kNumClasses> forward_probs(const CnnModel& m, const RasterGray& patch) {
    check_patch(patch, "forward_probs");
    Activations act;
    forward_pass(m, patch, act);
    return act.probs;
}

Classification classify(const CnnModel& m, const RasterGray& patch) {
    if (patch.empty()) {
        throw InvalidArgumentError("classify: empty patch");
    }
    const RasterGray sized = (patch.width == kPatchSize && patch.height == kPatchSize)
                                 ? patch
                                 : resample_bilinear(patch, kPatchSize, kPatchSize);
    Classification out;
    out.probabilities = forward_probs(m, sized);
    int best = 0;
    for (int i = 1; i < kNumClasses; ++i) {
        if (out.probabilities[i] > out.probabilities[best]) {
            best = i;
        }
    }
    out.label = static_cast<PatchLabel>(best);
    return out;
}

namespace cnn_detail {

double loss_and_gradients(const CnnModel& m, const RasterGray& patch, int label, CnnModel* grads) {
    check_patch(patch, "loss_and_gradients");
    if (label < 0 || label >= kNumClasses) {
        throw InvalidArgumentError("loss_and_gradients: bad label");
    }
    Activations act;
    forward_pass(m, patch, act);
    const double loss = -std::log(std::max(act.probs[label], 1e-300));
    if (!grads) {
        return loss;
    }

    std::array<double, kNumClasses> dlogits = act.probs;
    dlogits[label] -= 1.0;

    // fc2
    std::array<double, kHidden> df1{};
    for (int o = 0; o < kNumClasses; ++o) {
        grads->fc2_b[o] += dlogits[o];
        double* dw = grads->fc2_w.data() + static_cast<std::size_t>(o) * kHidden;
        const double* w = m.fc2_w.data() + static_cast<std::size_t>(o) * kHidden;
        for (int i = 0; i < kHidden; ++i) {
            dw[i] += dlogits[o] * act.f1[i];
            df1[i] += dlogits[o] * w[i];
        }
    }
    // fc1
    std::vector<double> dp2(static_cast<std::size_t>(kFlat), 0.0);
    for (int o = 0; o < kHidden; ++o) {
        grads->fc1_b[o] += df1[o];
        double* dw = grads->fc1_w.data() + static_cast<std::size_t>(o) * kFlat;
        const double* w = m.fc1_w.data() + static_cast<std::size_t>(o) * kFlat;
        for (int i = 0; i < kFlat; ++i) {
            dw[i] += df1[o] * act.p2[i];
            dp2[i] += df1[o] * w[i];
        }
    }
    // pool2 + relu
    std::vector<double> da2(act.a2.size(), 0.0);
    pool_backward(act.a2.data(), dp2.data(), act.p2_arg.data(), act.p2.size(), da2.data());
    // conv2
    std::vector<double> dp1(act.p1.size(), 0.0);
    conv_backward(act.p1.data(), kC1, kP1, m.conv2_w.data(), kC2, da2.data(), grads->conv2_w.data(),
                  grads->conv2_b.data(), dp1.data());
    // pool1 + relu
    std::vector<double> da1(act.a1.size(), 0.0);
    pool_backward(act.a1.data(), dp1.data(), act.p1_arg.data(), act.p1.size(), da1.data());
    // conv1 (no input gradient needed)
    conv_backward(patch.data.data(), 1, kIn, m.conv1_w.data(), kC1, da1.data(), grads->conv1_w.data(),
                  grads->conv1_b.data(), nullptr);
    return loss;
}

double linear_loss_and_gradients(const CnnModel& m, const std::vector<double>& input, int label,
                                 std::vector<double>* fc1_w_grad, std::vector<double>* fc2_w_grad) {
    if (input.size() != static_cast<std::size_t>(kFlat)) {
        throw InvalidArgumentError("linear_loss_and_gradients: input must have 4096 values");
    }
    std::array<double, kHidden> f1{};
    for (int o = 0; o < kHidden; ++o) {
        double acc = m.fc1_b[o];
        const double* w = m.fc1_w.data() + static_cast<std::size_t>(o) * kFlat;
        for (int i = 0; i < kFlat; ++i) {
            acc += w[i] * input[i];
        }
        f1[o] = acc;
    }
    std::array<double, kNumClasses> logits{};
    for (int o = 0; o < kNumClasses; ++o) {
        double acc = m.fc2_b[o];
        const double* w = m.fc2_w.data() + static_cast<std::size_t>(o) * kHidden;
        for (int i = 0; i < kHidden; ++i) {
            acc += w[i] * f1[i];
        }
        logits[o] = acc;
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    std::array<double, kNumClasses> probs{};
    double denom = 0.0;
    for (int o = 0; o < kNumClasses; ++o) {
        probs[o] = std::exp(logits[o] - top);
        denom += probs[o];
    }
    for (double& p : probs) {
        p /= denom;
    }
    const double loss = -std::log(std::max(probs[label], 1e-300));
    if (!fc1_w_grad && !fc2_w_grad) {
        return loss;
    }
    std::array<double, kNumClasses> dlogits = probs;
    dlogits[label] -= 1.0;
    std::array<double, kHidden> df1{};
    for (int o = 0; o < kNumClasses; ++o) {
        const double* w = m.fc2_w.data() + static_cast<std::size_t>(o) * kHidden;
        for (int i = 0; i < kHidden; ++i) {
            if (fc2_w_grad) {
                (*fc2_w_grad)[static_cast<std::size_t>(o) * kHidden + i] += dlogits[o] * f1[i];
            }
            df1[i] += dlogits[o] * w[i];
        }
    }
    if (fc1_w_grad) {
        for (int o = 0; o < kHidden; ++o) {
            for (int i = 0; i < kFlat; ++i) {
                (*fc1_w_grad)[static_cast<std::size_t>(o) * kFlat + i] += df1[o] * input[i];
            }
        }
    }
    return loss;
}

double compare_with_fd(const CnnModel& model, const RasterGray& patch, int label,
                       const std::vector<double>& analytic, const std::vector<std::size_t>& probes) {
    constexpr double kStep = 1e-5;
    CnnModel work = model;
    double max_rel = 0.0;
    for (const std::size_t idx : probes) {
        double* w = work.parameter(idx);
        const double original = *w;
        *w = original + kStep;
        const double up = loss_and_gradients(work, patch, label, nullptr);
        *w = original - kStep;
        const double down = loss_and_gradients(work, patch, label, nullptr);
        *w = original;
        const double numeric = (up - down) / (2.0 * kStep);
        const double a = analytic[idx];
        const double rel = std::fabs(a - numeric) / std::max(std::fabs(a) + std::fabs(numeric), 1e-6);
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

} // namespace cnn_detail

double gradient_check(const CnnModel& model, const RasterGray& patch, PatchLabel label, int n_probes,
                      std::uint64_t seed) {
    check_patch(patch, "gradient_check");
    if (n_probes < 1) {
        throw InvalidArgumentError("gradient_check: need at least one probe");
    }
    CnnModel grads = make_empty_model();
    cnn_detail::loss_and_gradients(model, patch, static_cast<int>(label), &grads);
    const std::size_t count = model.parameter_count();
    std::vector<double> flat(count);
    for (std::size_t i = 0; i < count; ++i) {
        flat[i] = *grads.parameter(i);
    }
    SplitMix64 rng(seed);
    std::vector<std::size_t> probes;
    probes.reserve(static_cast<std::size_t>(n_probes));
    while (probes.size() < static_cast<std::size_t>(n_probes)) {
        const std::size_t idx = rng.index(count);
        if (std::find(probes.begin(), probes.end(), idx) == probes.end()) {
            probes.push_back(idx);
        }
    }
    return cnn_detail::compare_with_fd(model, patch, static_cast<int>(label), flat, probes);
}

CnnModel train(const CnnModel& model, const LabeledDataset& data, const TrainConfig& cfg,
               std::vector<double>* epoch_loss) {
    cfg.validate();
    if (data.train.empty()) {
        throw InvalidArgumentError("train: empty training split");
    }
    for (const LabeledPatch& item : data.train) {
        check_patch(item.patch, "train");
    }

    CnnModel m = model;
    CnnModel velocity = make_empty_model();
    CnnModel grads = make_empty_model();
    const std::size_t n_params = m.parameter_count();
    const std::size_t n = data.train.size();

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    SplitMix64 rng(cfg.seed);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates shuffle with the deterministic stream
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[rng.index(i + 1)]);
        }
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            for (std::size_t t = 0; t < 8; ++t) {
                double* g = tensor_data(grads, t);
                std::fill(g, g + tensor_sizes(grads, t), 0.0);
            }
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const LabeledPatch& item = data.train[order[i]];
                batch_loss += cnn_detail::loss_and_gradients(m, item.patch, static_cast<int>(item.label),
                                                             &grads);
            }
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            if (!std::isfinite(batch_loss)) {
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch + 1));
            }
            loss_sum += batch_loss;
            for (std::size_t i = 0; i < n_params; ++i) {
                double* v = velocity.parameter(i);
                *v = cfg.momentum * *v - cfg.learning_rate * (*grads.parameter(i) * inv_batch);
                *m.parameter(i) += *v;
            }
        }
        const double epoch_mean = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_mean)) {
            throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch + 1));
        }
        if (epoch_loss) {
            epoch_loss->push_back(epoch_mean);
        }
    }
    return m;
}

std::vector<ClassifiedRegion> filter_proposals(const CnnModel& model,
                                               const std::vector<ProposalRegion>& regions,
                                               const RasterGray& img) {
    std::vector<ClassifiedRegion> out;
    for (const ProposalRegion& region : regions) {
        const RasterGray patch = crop(img, region.x, region.y, region.w, region.h);
        const Classification c = classify(model, patch);
        if (c.label == PatchLabel::Other) {
            continue;
        }
        out.push_back({region, c.label, c.probabilities[static_cast<int>(c.label)]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// serialization: magic GSCNN1, version, seed, shape table, LE f64 data
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'G', 'S', 'C', 'N', 'N', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

struct TensorShape {
    std::vector<std::uint32_t> dims;
};

const std::vector<TensorShape>& model_shapes() {
    static const std::vector<TensorShape> shapes = {
        {{kC1, 1, 3, 3}}, {{kC1}}, {{kC2, kC1, 3, 3}}, {{kC2}},
        {{kHidden, kFlat}}, {{kHidden}}, {{kNumClasses, kHidden}}, {{kNumClasses}},
    };
    return shapes;
}

} // namespace

void save_model(const CnnModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("save_model: cannot open " + path);
    }
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kFormatVersion);
    write_u64(out, m.init_seed);
    const auto& shapes = model_shapes();
    write_u32(out, static_cast<std::uint32_t>(shapes.size()));
    for (const TensorShape& s : shapes) {
        write_u32(out, static_cast<std::uint32_t>(s.dims.size()));
        for (const std::uint32_t d : s.dims) {
            write_u32(out, d);
        }
    }
    CnnModel& mut = const_cast<CnnModel&>(m);
    for (std::size_t t = 0; t < 8; ++t) {
        const double* data = tensor_data(mut, t);
        for (std::size_t i = 0; i < tensor_sizes(m, t); ++i) {
            write_f64(out, data[i]);
        }
    }
    if (!out) {
        throw IoError("save_model: write failed for " + path);
    }
}

CnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("load_model: cannot open " + path);
    }
    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, kMagic, 6) != 0) {
        throw MalformedHeaderError("load_model: bad magic in " + path);
    }
    if (read_u32(in) != kFormatVersion) {
        throw UnsupportedFormatError("load_model: unsupported version in " + path);
    }
    CnnModel m = make_empty_model();
    m.init_seed = read_u64(in);
    const auto& shapes = model_shapes();
    if (read_u32(in) != shapes.size()) {
        throw MalformedHeaderError("load_model: unexpected tensor count in " + path);
    }
    for (const TensorShape& expect : shapes) {
        const std::uint32_t ndims = read_u32(in);
        if (ndims != expect.dims.size()) {
            throw MalformedHeaderError("load_model: shape table mismatch in " + path);
        }
        for (const std::uint32_t d : expect.dims) {
            if (read_u32(in) != d) {
                throw MalformedHeaderError("load_model: shape table mismatch in " + path);
            }
        }
    }
    for (std::size_t t = 0; t < 8; ++t) {
        double* data = tensor_data(m, t);
        for (std::size_t i = 0; i < tensor_sizes(m, t); ++i) {
            data[i] = read_f64(in);
        }
    }
    if (!in) {
        throw MalformedHeaderError("load_model: truncated file " + path);
    }
    return m;
}

LabeledDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw MissingFileError("load_dataset: no such directory: " + dir);
    }
    const std::pair<const char*, PatchLabel> classes[] = {
        {"insulator", PatchLabel::Insulator},
        {"triangle", PatchLabel::Triangle},
        {"other", PatchLabel::Other},
    };
    LabeledDataset data;
    for (const char* split : {"train", "test"}) {
        auto& bucket = std::string(split) == "train" ? data.train : data.test;
        const fs::path split_dir = fs::path(dir) / split;
        if (!fs::is_directory(split_dir)) {
            continue;
        }
        for (const auto& [name, label] : classes) {
            const fs::path class_dir = split_dir / name;
            if (!fs::is_directory(class_dir)) {
                continue;
            }
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(class_dir)) {
                if (entry.is_regular_file()) {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            for (const fs::path& file : files) {
                RasterGray g = to_gray(load_image(file.string()));
                if (g.width != kPatchSize || g.height != kPatchSize) {
                    g = resample_bilinear(g, kPatchSize, kPatchSize);
                }
                bucket.push_back({std::move(g), label});
            }
        }
    }
    if (data.train.empty() && data.test.empty()) {
        throw MissingFileError("load_dataset: no patches found under " + dir);
    }
    return data;
}

} // namespace gridsight
