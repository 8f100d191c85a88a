// Dense CNN core for the split classifier: convolutional feature extractor in
// front of the cut point, fully-connected semantic decoder behind it, with
// explicit forward/backward passes, SGD training and checkpoint IO.
#ifndef SCAIT_NN_HPP
#define SCAIT_NN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "scait/common.hpp"
#include "scait/dataset.hpp"
#include "scait/image.hpp"
#include "scait/rng.hpp"
#include "scait/tensor.hpp"

namespace scait::nn {

// Fixed layer sequence, configurable widths:
//   Conv(c1,3x3,pad1)+ReLU+MaxPool2 -> Conv(c2,3x3,pad1)+ReLU+MaxPool2
//   -> Conv(c3,3x3,pad1)+ReLU  [cut point]
//   -> Flatten -> FC(hidden)+ReLU -> FC(classes)
struct ModelSpec {
    int input_h = 32;
    int input_w = 32;
    int conv1 = 8;
    int conv2 = 16;
    int conv3 = 32;  // K: feature maps at the cut point
    int fc_hidden = 128;
    int num_classes = 6;

    int map_h() const { return input_h / 4; }
    int map_w() const { return input_w / 4; }
    int fc_in() const { return conv3 * map_h() * map_w(); }

    void validate() const {
        if (input_h < 8 || input_w < 8 || input_h % 4 || input_w % 4)
            throw std::invalid_argument("model: input size must be >= 8 and divisible by 4");
        if (conv1 < 1 || conv2 < 1 || conv3 < 1 || fc_hidden < 1 || num_classes < 2)
            throw std::invalid_argument("model: bad layer widths");
    }

    bool operator==(const ModelSpec&) const = default;
};

struct Model {
    ModelSpec spec;
    Tensor conv1_w, conv1_b;
    Tensor conv2_w, conv2_b;
    Tensor conv3_w, conv3_b;
    Tensor fc1_w, fc1_b;
    Tensor fc2_w, fc2_b;

    struct ParamRef {
        const char* name;
        Tensor* tensor;
    };

    std::vector<ParamRef> params() {
        return {{"conv1.w", &conv1_w}, {"conv1.b", &conv1_b}, {"conv2.w", &conv2_w}, {"conv2.b", &conv2_b},
                {"conv3.w", &conv3_w}, {"conv3.b", &conv3_b}, {"fc1.w", &fc1_w},     {"fc1.b", &fc1_b},
                {"fc2.w", &fc2_w},     {"fc2.b", &fc2_b}};
    }
    std::vector<ParamRef> params() const { return const_cast<Model*>(this)->params(); }

    static Model zeros(const ModelSpec& spec) {
        spec.validate();
        Model m;
        m.spec = spec;
        std::size_t c1 = spec.conv1, c2 = spec.conv2, c3 = spec.conv3;
        std::size_t hid = spec.fc_hidden, cls = spec.num_classes, fin = spec.fc_in();
        m.conv1_w = Tensor({c1, 1, 3, 3});
        m.conv1_b = Tensor({c1});
        m.conv2_w = Tensor({c2, c1, 3, 3});
        m.conv2_b = Tensor({c2});
        m.conv3_w = Tensor({c3, c2, 3, 3});
        m.conv3_b = Tensor({c3});
        m.fc1_w = Tensor({hid, fin});
        m.fc1_b = Tensor({hid});
        m.fc2_w = Tensor({cls, hid});
        m.fc2_b = Tensor({cls});
        return m;
    }

    // He-normal weights, zero biases, deterministic in the seed.
    static Model init(const ModelSpec& spec, std::uint64_t seed) {
        Model m = zeros(spec);
        Rng rng(derive_seed(seed, 0x1417ull));
        auto he_fill = [&](Tensor& w, std::size_t fan_in) {
            double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (double& v : w.data) v = std_dev * rng.normal();
        };
        he_fill(m.conv1_w, 9);
        he_fill(m.conv2_w, 9ull * spec.conv1);
        he_fill(m.conv3_w, 9ull * spec.conv2);
        he_fill(m.fc1_w, spec.fc_in());
        he_fill(m.fc2_w, spec.fc_hidden);
        return m;
    }
};

// ---------------------------------------------------------------------------
// Layer kernels. Convolutions run over zero-padded copies so the inner loops
// carry no bounds checks.

namespace detail {

inline void pad_copy(const double* src, int h, int w, double* dst) {
    int pw = w + 2;
    std::fill(dst, dst + static_cast<std::size_t>(h + 2) * pw, 0.0);
    for (int y = 0; y < h; ++y) std::copy(src + static_cast<std::size_t>(y) * w, src + static_cast<std::size_t>(y + 1) * w, dst + static_cast<std::size_t>(y + 1) * pw + 1);
}

// out[oc][y][x] = b[oc] + sum_ic sum_k w[oc][ic][k] * in[ic][y+ky-1][x+kx-1]
inline void conv3x3_forward(const double* in, int ic, int h, int w, const double* weights, const double* bias,
                            int oc, double* out, std::vector<double>& pad_buf) {
    int pw = w + 2;
    pad_buf.resize(static_cast<std::size_t>(ic) * (h + 2) * pw);
    for (int i = 0; i < ic; ++i)
        pad_copy(in + static_cast<std::size_t>(i) * h * w, h, w, pad_buf.data() + static_cast<std::size_t>(i) * (h + 2) * pw);
    for (int o = 0; o < oc; ++o) {
        double* out_o = out + static_cast<std::size_t>(o) * h * w;
        std::fill(out_o, out_o + static_cast<std::size_t>(h) * w, bias[o]);
        for (int i = 0; i < ic; ++i) {
            const double* wp = weights + (static_cast<std::size_t>(o) * ic + i) * 9;
            const double* pin = pad_buf.data() + static_cast<std::size_t>(i) * (h + 2) * pw;
            for (int y = 0; y < h; ++y) {
                const double* r0 = pin + static_cast<std::size_t>(y) * pw;
                const double* r1 = r0 + pw;
                const double* r2 = r1 + pw;
                double* op = out_o + static_cast<std::size_t>(y) * w;
                for (int x = 0; x < w; ++x) {
                    op[x] += wp[0] * r0[x] + wp[1] * r0[x + 1] + wp[2] * r0[x + 2] + wp[3] * r1[x] +
                             wp[4] * r1[x + 1] + wp[5] * r1[x + 2] + wp[6] * r2[x] + wp[7] * r2[x + 1] +
                             wp[8] * r2[x + 2];
                }
            }
        }
    }
}

// Accumulates dw/db and writes din (din may be null for the first layer).
inline void conv3x3_backward(const double* in, int ic, int h, int w, const double* weights, int oc,
                             const double* dout, double* dw, double* db, double* din,
                             std::vector<double>& pad_in, std::vector<double>& pad_din) {
    int pw = w + 2;
    pad_in.resize(static_cast<std::size_t>(ic) * (h + 2) * pw);
    for (int i = 0; i < ic; ++i)
        pad_copy(in + static_cast<std::size_t>(i) * h * w, h, w, pad_in.data() + static_cast<std::size_t>(i) * (h + 2) * pw);
    if (din) {
        pad_din.assign(static_cast<std::size_t>(ic) * (h + 2) * pw, 0.0);
    }
    for (int o = 0; o < oc; ++o) {
        const double* dout_o = dout + static_cast<std::size_t>(o) * h * w;
        double bsum = 0.0;
        for (int p = 0; p < h * w; ++p) bsum += dout_o[p];
        db[o] += bsum;
        for (int i = 0; i < ic; ++i) {
            double* dwp = dw + (static_cast<std::size_t>(o) * ic + i) * 9;
            const double* wp = weights + (static_cast<std::size_t>(o) * ic + i) * 9;
            const double* pin = pad_in.data() + static_cast<std::size_t>(i) * (h + 2) * pw;
            double* pdin = din ? pad_din.data() + static_cast<std::size_t>(i) * (h + 2) * pw : nullptr;
            double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
            for (int y = 0; y < h; ++y) {
                const double* g = dout_o + static_cast<std::size_t>(y) * w;
                const double* r0 = pin + static_cast<std::size_t>(y) * pw;
                const double* r1 = r0 + pw;
                const double* r2 = r1 + pw;
                for (int x = 0; x < w; ++x) {
                    double gv = g[x];
                    acc[0] += gv * r0[x];
                    acc[1] += gv * r0[x + 1];
                    acc[2] += gv * r0[x + 2];
                    acc[3] += gv * r1[x];
                    acc[4] += gv * r1[x + 1];
                    acc[5] += gv * r1[x + 2];
                    acc[6] += gv * r2[x];
                    acc[7] += gv * r2[x + 1];
                    acc[8] += gv * r2[x + 2];
                }
                if (pdin) {
                    double* d0 = pdin + static_cast<std::size_t>(y) * pw;
                    double* d1 = d0 + pw;
                    double* d2 = d1 + pw;
                    for (int x = 0; x < w; ++x) {
                        double gv = g[x];
                        d0[x] += gv * wp[0];
                        d0[x + 1] += gv * wp[1];
                        d0[x + 2] += gv * wp[2];
                        d1[x] += gv * wp[3];
                        d1[x + 1] += gv * wp[4];
                        d1[x + 2] += gv * wp[5];
                        d2[x] += gv * wp[6];
                        d2[x + 1] += gv * wp[7];
                        d2[x + 2] += gv * wp[8];
                    }
                }
            }
            for (int k = 0; k < 9; ++k) dwp[k] += acc[k];
        }
    }
    if (din) {
        for (int i = 0; i < ic; ++i) {
            const double* pdin = pad_din.data() + static_cast<std::size_t>(i) * (h + 2) * pw;
            double* d = din + static_cast<std::size_t>(i) * h * w;
            for (int y = 0; y < h; ++y)
                std::copy(pdin + static_cast<std::size_t>(y + 1) * pw + 1, pdin + static_cast<std::size_t>(y + 1) * pw + 1 + w,
                          d + static_cast<std::size_t>(y) * w);
        }
    }
}

inline void relu_forward(const double* in, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

inline void relu_backward(const double* in, const double* dout, std::size_t n, double* din) {
    for (std::size_t i = 0; i < n; ++i) din[i] = in[i] > 0.0 ? dout[i] : 0.0;
}

inline void maxpool2_forward(const double* in, int c, int h, int w, double* out, std::uint32_t* argmax) {
    int oh = h / 2, ow = w / 2;
    for (int ch = 0; ch < c; ++ch) {
        const double* pin = in + static_cast<std::size_t>(ch) * h * w;
        double* pout = out + static_cast<std::size_t>(ch) * oh * ow;
        std::uint32_t* parg = argmax + static_cast<std::size_t>(ch) * oh * ow;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                std::uint32_t base = static_cast<std::uint32_t>(2 * y * w + 2 * x);
                std::uint32_t best = base;
                double bv = pin[base];
                std::uint32_t cands[3] = {base + 1, base + static_cast<std::uint32_t>(w),
                                          base + static_cast<std::uint32_t>(w) + 1};
                for (std::uint32_t cand : cands) {
                    if (pin[cand] > bv) {
                        bv = pin[cand];
                        best = cand;
                    }
                }
                pout[y * ow + x] = bv;
                parg[y * ow + x] = best;
            }
        }
    }
}

inline void maxpool2_backward(const double* dout, int c, int h, int w, const std::uint32_t* argmax, double* din) {
    int oh = h / 2, ow = w / 2;
    std::fill(din, din + static_cast<std::size_t>(c) * h * w, 0.0);
    for (int ch = 0; ch < c; ++ch) {
        const double* pd = dout + static_cast<std::size_t>(ch) * oh * ow;
        const std::uint32_t* parg = argmax + static_cast<std::size_t>(ch) * oh * ow;
        double* pin = din + static_cast<std::size_t>(ch) * h * w;
        for (int p = 0; p < oh * ow; ++p) pin[parg[p]] += pd[p];
    }
}

// y = W x + b, W is rows x cols row-major.
inline void fc_forward(const double* x, const double* w, const double* b, int rows, int cols, double* y) {
    for (int r = 0; r < rows; ++r) {
        const double* wr = w + static_cast<std::size_t>(r) * cols;
        double s = b[r];
        for (int c = 0; c < cols; ++c) s += wr[c] * x[c];
        y[r] = s;
    }
}

inline void fc_backward(const double* x, const double* w, int rows, int cols, const double* dy, double* dw,
                        double* db, double* dx) {
    if (dx) std::fill(dx, dx + cols, 0.0);
    for (int r = 0; r < rows; ++r) {
        double g = dy[r];
        db[r] += g;
        double* dwr = dw + static_cast<std::size_t>(r) * cols;
        const double* wr = w + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) {
            dwr[c] += g * x[c];
            if (dx) dx[c] += g * wr[c];
        }
    }
}

struct ForwardCache {
    std::vector<double> x;                    // input 1xHxW
    std::vector<double> z1, a1, p1;           // conv1 / relu / pool
    std::vector<double> z2, a2, p2;           // conv2 / relu / pool
    std::vector<double> z3, a3;               // conv3 / relu (cut point)
    std::vector<double> a3m;                  // cut after training perturbation
    std::vector<double> z4, a4;               // fc1 / relu
    std::vector<double> z5;                   // logits
    std::vector<std::uint32_t> arg1, arg2;    // pool argmax indices
    std::vector<double> scratch_a, scratch_b; // conv padding buffers
};

inline void extractor_forward(const Model& m, const Image& img, ForwardCache& c) {
    const ModelSpec& s = m.spec;
    if (img.width != s.input_w || img.height != s.input_h)
        throw std::invalid_argument("forward: image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                                    " does not match model input " + std::to_string(s.input_w) + "x" +
                                    std::to_string(s.input_h));
    int h = s.input_h, w = s.input_w;
    int h2 = h / 2, w2 = w / 2, h4 = h / 4, w4 = w / 4;
    c.x.assign(img.pixels.begin(), img.pixels.end());
    c.z1.resize(static_cast<std::size_t>(s.conv1) * h * w);
    c.a1.resize(c.z1.size());
    c.p1.resize(static_cast<std::size_t>(s.conv1) * h2 * w2);
    c.arg1.resize(c.p1.size());
    c.z2.resize(static_cast<std::size_t>(s.conv2) * h2 * w2);
    c.a2.resize(c.z2.size());
    c.p2.resize(static_cast<std::size_t>(s.conv2) * h4 * w4);
    c.arg2.resize(c.p2.size());
    c.z3.resize(static_cast<std::size_t>(s.conv3) * h4 * w4);
    c.a3.resize(c.z3.size());

    conv3x3_forward(c.x.data(), 1, h, w, m.conv1_w.ptr(), m.conv1_b.ptr(), s.conv1, c.z1.data(), c.scratch_a);
    relu_forward(c.z1.data(), c.z1.size(), c.a1.data());
    maxpool2_forward(c.a1.data(), s.conv1, h, w, c.p1.data(), c.arg1.data());
    conv3x3_forward(c.p1.data(), s.conv1, h2, w2, m.conv2_w.ptr(), m.conv2_b.ptr(), s.conv2, c.z2.data(), c.scratch_a);
    relu_forward(c.z2.data(), c.z2.size(), c.a2.data());
    maxpool2_forward(c.a2.data(), s.conv2, h2, w2, c.p2.data(), c.arg2.data());
    conv3x3_forward(c.p2.data(), s.conv2, h4, w4, m.conv3_w.ptr(), m.conv3_b.ptr(), s.conv3, c.z3.data(), c.scratch_a);
    relu_forward(c.z3.data(), c.z3.size(), c.a3.data());
}

inline void decoder_forward(const Model& m, const double* cut, ForwardCache& c) {
    const ModelSpec& s = m.spec;
    c.z4.resize(static_cast<std::size_t>(s.fc_hidden));
    c.a4.resize(c.z4.size());
    c.z5.resize(static_cast<std::size_t>(s.num_classes));
    fc_forward(cut, m.fc1_w.ptr(), m.fc1_b.ptr(), s.fc_hidden, s.fc_in(), c.z4.data());
    relu_forward(c.z4.data(), c.z4.size(), c.a4.data());
    fc_forward(c.a4.data(), m.fc2_w.ptr(), m.fc2_b.ptr(), s.num_classes, s.fc_hidden, c.z5.data());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public forward paths.

struct ForwardResult {
    Tensor feature_maps;  // cut-point activation, K x map_h x map_w
    Tensor logits;        // pre-softmax scores, length C
};

inline ForwardResult forward(const Model& m, const Image& img) {
    detail::ForwardCache c;
    detail::extractor_forward(m, img, c);
    detail::decoder_forward(m, c.a3.data(), c);
    ForwardResult r;
    r.feature_maps = Tensor({static_cast<std::size_t>(m.spec.conv3), static_cast<std::size_t>(m.spec.map_h()),
                             static_cast<std::size_t>(m.spec.map_w())},
                            std::move(c.a3));
    r.logits = Tensor({static_cast<std::size_t>(m.spec.num_classes)}, std::move(c.z5));
    return r;
}

// Transmitter half only: image -> cut-point feature maps.
inline Tensor extract_features(const Model& m, const Image& img) {
    detail::ForwardCache c;
    detail::extractor_forward(m, img, c);
    return Tensor({static_cast<std::size_t>(m.spec.conv3), static_cast<std::size_t>(m.spec.map_h()),
                   static_cast<std::size_t>(m.spec.map_w())},
                  std::move(c.a3));
}

// Receiver half: cut-point tensor -> logits. This is the semantic decoder.
inline Tensor forward_from_cut(const Model& m, const Tensor& cut) {
    if (cut.size() != static_cast<std::size_t>(m.spec.fc_in()))
        throw std::invalid_argument("forward_from_cut: cut tensor size mismatch");
    detail::ForwardCache c;
    detail::decoder_forward(m, cut.ptr(), c);
    return Tensor({static_cast<std::size_t>(m.spec.num_classes)}, std::move(c.z5));
}

inline std::vector<double> softmax(std::span<const double> logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// Argmax with ties broken toward the smallest index.
inline int predict(const Tensor& logits) {
    if (logits.data.empty()) throw std::invalid_argument("predict: empty logit vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(logits.data.size()); ++i)
        if (logits.data[static_cast<std::size_t>(i)] > logits.data[static_cast<std::size_t>(best)]) best = i;
    return best;
}

// ---------------------------------------------------------------------------
// Loss, gradients and training.

struct Gradients {
    std::vector<Tensor> by_param;  // same order as Model::params()

    static Gradients zeros_like(const Model& m) {
        Gradients g;
        for (const auto& p : m.params()) g.by_param.push_back(Tensor(p.tensor->shape));
        return g;
    }
    void scale(double s) {
        for (auto& t : by_param)
            for (double& v : t.data) v *= s;
    }
};

namespace detail {

// Per-batch cut-point perturbation used by noise-aware / prune-aware training.
struct CutPerturbation {
    bool add_noise = false;
    double snr_db = 0.0;
    std::uint64_t noise_seed = 0;  // per-example seeds derived from this
    bool apply_mask = false;
    std::vector<std::uint8_t> keep;  // per feature map
};

// Forward + backward of one example; accumulates parameter gradients and
// returns the loss. Gradient tensors are indexed as in Model::params().
inline double example_pass(const Model& m, const Image& img, int label, const CutPerturbation* pert,
                           std::size_t example_index, Gradients& acc, ForwardCache& c, int* predicted) {
    const ModelSpec& s = m.spec;
    int h = s.input_h, w = s.input_w;
    int h2 = h / 2, w2 = w / 2, h4 = h / 4, w4 = w / 4;
    int map_px = h4 * w4;

    extractor_forward(m, img, c);

    const double* cut = c.a3.data();
    if (pert && (pert->add_noise || pert->apply_mask)) {
        c.a3m = c.a3;
        if (pert->add_noise) {
            double p = 0.0;
            for (double v : c.a3m) p += v * v;
            p /= static_cast<double>(c.a3m.size());
            if (p > 0.0) {
                double sigma = std::sqrt(p * std::pow(10.0, -pert->snr_db / 10.0));
                Rng noise(derive_seed(pert->noise_seed, example_index));
                for (double& v : c.a3m) v += sigma * noise.normal();
            }
        }
        if (pert->apply_mask) {
            for (int k = 0; k < s.conv3; ++k)
                if (!pert->keep[static_cast<std::size_t>(k)])
                    std::fill(c.a3m.begin() + static_cast<std::ptrdiff_t>(k) * map_px,
                              c.a3m.begin() + static_cast<std::ptrdiff_t>(k + 1) * map_px, 0.0);
        }
        cut = c.a3m.data();
    }

    decoder_forward(m, cut, c);

    std::vector<double> prob = softmax(c.z5);
    double loss = -std::log(std::max(prob[static_cast<std::size_t>(label)], 1e-300));
    if (predicted) {
        int best = 0;
        for (int i = 1; i < s.num_classes; ++i)
            if (c.z5[static_cast<std::size_t>(i)] > c.z5[static_cast<std::size_t>(best)]) best = i;
        *predicted = best;
    }

    // dL/dlogits = softmax - onehot
    std::vector<double> dz5(prob);
    dz5[static_cast<std::size_t>(label)] -= 1.0;

    std::vector<double> da4(static_cast<std::size_t>(s.fc_hidden));
    fc_backward(c.a4.data(), m.fc2_w.ptr(), s.num_classes, s.fc_hidden, dz5.data(), acc.by_param[8].ptr(),
                acc.by_param[9].ptr(), da4.data());
    std::vector<double> dz4(da4.size());
    relu_backward(c.z4.data(), da4.data(), dz4.size(), dz4.data());
    std::vector<double> dcut(static_cast<std::size_t>(s.fc_in()));
    fc_backward(cut, m.fc1_w.ptr(), s.fc_hidden, s.fc_in(), dz4.data(), acc.by_param[6].ptr(),
                acc.by_param[7].ptr(), dcut.data());

    // Perturbation is additive noise plus a fixed mask: gradient passes the
    // noise unchanged and is zeroed on dropped maps.
    if (pert && pert->apply_mask) {
        for (int k = 0; k < s.conv3; ++k)
            if (!pert->keep[static_cast<std::size_t>(k)])
                std::fill(dcut.begin() + static_cast<std::ptrdiff_t>(k) * map_px,
                          dcut.begin() + static_cast<std::ptrdiff_t>(k + 1) * map_px, 0.0);
    }

    std::vector<double> dz3(dcut.size());
    relu_backward(c.z3.data(), dcut.data(), dz3.size(), dz3.data());
    std::vector<double> dp2(c.p2.size());
    conv3x3_backward(c.p2.data(), s.conv2, h4, w4, m.conv3_w.ptr(), s.conv3, dz3.data(), acc.by_param[4].ptr(),
                     acc.by_param[5].ptr(), dp2.data(), c.scratch_a, c.scratch_b);
    std::vector<double> da2(c.a2.size());
    maxpool2_backward(dp2.data(), s.conv2, h2, w2, c.arg2.data(), da2.data());
    std::vector<double> dz2(da2.size());
    relu_backward(c.z2.data(), da2.data(), dz2.size(), dz2.data());
    std::vector<double> dp1(c.p1.size());
    conv3x3_backward(c.p1.data(), s.conv1, h2, w2, m.conv2_w.ptr(), s.conv2, dz2.data(), acc.by_param[2].ptr(),
                     acc.by_param[3].ptr(), dp1.data(), c.scratch_a, c.scratch_b);
    std::vector<double> da1(c.a1.size());
    maxpool2_backward(dp1.data(), s.conv1, h, w, c.arg1.data(), da1.data());
    std::vector<double> dz1(da1.size());
    relu_backward(c.z1.data(), da1.data(), dz1.size(), dz1.data());
    conv3x3_backward(c.x.data(), 1, h, w, m.conv1_w.ptr(), s.conv1, dz1.data(), acc.by_param[0].ptr(),
                     acc.by_param[1].ptr(), nullptr, c.scratch_a, c.scratch_b);
    return loss;
}

}  // namespace detail

struct LossGrads {
    double loss = 0.0;
    Gradients grads;
};

// Mean cross-entropy over the batch and mean parameter gradients.
inline LossGrads loss_and_grads(const Model& m, std::span<const ds::LabeledExample> batch) {
    if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
    LossGrads out;
    out.grads = Gradients::zeros_like(m);
    detail::ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i)
        out.loss += detail::example_pass(m, batch[i].image, batch[i].label, nullptr, i, out.grads, cache, nullptr);
    double inv = 1.0 / static_cast<double>(batch.size());
    out.loss *= inv;
    out.grads.scale(inv);
    return out;
}

// d(logit[class_id]) / d(cut activation), evaluated at a given cut tensor.
// Backpropagates through the FC decoder only.
inline Tensor grad_wrt_feature_maps_from_cut(const Model& m, const Tensor& cut, int class_id) {
    const ModelSpec& s = m.spec;
    if (class_id < 0 || class_id >= s.num_classes)
        throw std::invalid_argument("grad_wrt_feature_maps: invalid class " + std::to_string(class_id));
    if (cut.size() != static_cast<std::size_t>(s.fc_in()))
        throw std::invalid_argument("grad_wrt_feature_maps: cut tensor size mismatch");
    detail::ForwardCache c;
    detail::decoder_forward(m, cut.ptr(), c);

    std::vector<double> da4(static_cast<std::size_t>(s.fc_hidden), 0.0);
    {
        const double* wr = m.fc2_w.ptr() + static_cast<std::size_t>(class_id) * s.fc_hidden;
        for (int i = 0; i < s.fc_hidden; ++i) da4[static_cast<std::size_t>(i)] = wr[i];
    }
    std::vector<double> dz4(da4.size());
    detail::relu_backward(c.z4.data(), da4.data(), dz4.size(), dz4.data());
    std::vector<double> dcut(static_cast<std::size_t>(s.fc_in()), 0.0);
    for (int r = 0; r < s.fc_hidden; ++r) {
        double g = dz4[static_cast<std::size_t>(r)];
        if (g == 0.0) continue;
        const double* wr = m.fc1_w.ptr() + static_cast<std::size_t>(r) * s.fc_in();
        for (int cidx = 0; cidx < s.fc_in(); ++cidx) dcut[static_cast<std::size_t>(cidx)] += g * wr[cidx];
    }
    return Tensor({static_cast<std::size_t>(s.conv3), static_cast<std::size_t>(s.map_h()),
                   static_cast<std::size_t>(s.map_w())},
                  std::move(dcut));
}

// Same gradient evaluated at the image's own cut activation.
inline Tensor grad_wrt_feature_maps(const Model& m, const Image& img, int class_id) {
    return grad_wrt_feature_maps_from_cut(m, extract_features(m, img), class_id);
}

// ---------------------------------------------------------------------------
// Training.

struct ChannelMode {
    enum class Kind { Clean, AnalogAwgn } kind = Kind::Clean;
    double snr_lo_db = 0.0;
    double snr_hi_db = 20.0;
};

struct PruneAware {
    bool on = false;
    double keep_lo = 0.1;
    double keep_hi = 1.0;
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    ChannelMode channel_mode;
    PruneAware prune_aware;

    void validate() const {
        if (epochs < 1 || batch_size < 1) throw std::invalid_argument("train: epochs/batch_size must be >= 1");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
        if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("train: momentum must be in [0,1)");
        if (channel_mode.kind == ChannelMode::Kind::AnalogAwgn && channel_mode.snr_lo_db > channel_mode.snr_hi_db)
            throw std::invalid_argument("train: snr_lo_db must be <= snr_hi_db");
        if (prune_aware.on &&
            !(prune_aware.keep_lo > 0.0 && prune_aware.keep_lo <= prune_aware.keep_hi && prune_aware.keep_hi <= 1.0))
            throw std::invalid_argument("train: keep fraction range must satisfy 0 < lo <= hi <= 1");
    }
};

struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
};

// SGD with momentum. When channel_mode is analog AWGN, each batch's cut-point
// activations are perturbed with an SNR drawn uniformly from the configured
// range before entering the decoder; when prune-aware, a random subset of
// feature maps (random keep fraction in range) is zeroed per batch.
// Deterministic in (seed, config, data).
inline std::vector<EpochMetrics> train(Model& m, std::span<const ds::LabeledExample> examples,
                                       const TrainConfig& cfg) {
    cfg.validate();
    if (examples.empty()) throw std::invalid_argument("train: no examples");

    std::vector<Tensor> velocity;
    for (const auto& p : m.params()) velocity.push_back(Tensor(p.tensor->shape));

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);

    Gradients grads = Gradients::zeros_like(m);
    detail::ForwardCache cache;
    std::vector<EpochMetrics> metrics;
    int K = m.spec.conv3;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0xE0ull, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t correct = 0;
        std::size_t nbatches = (examples.size() + cfg.batch_size - 1) / static_cast<std::size_t>(cfg.batch_size);

        for (std::size_t b = 0; b < nbatches; ++b) {
            std::size_t begin = b * static_cast<std::size_t>(cfg.batch_size);
            std::size_t end = std::min(begin + static_cast<std::size_t>(cfg.batch_size), examples.size());
            std::size_t n = end - begin;

            detail::CutPerturbation pert;
            Rng batch_rng(derive_seed(cfg.seed, 0xB0ull, static_cast<std::uint64_t>(epoch), b));
            if (cfg.channel_mode.kind == ChannelMode::Kind::AnalogAwgn) {
                pert.add_noise = true;
                pert.snr_db = batch_rng.uniform(cfg.channel_mode.snr_lo_db, cfg.channel_mode.snr_hi_db);
                pert.noise_seed = derive_seed(cfg.seed, 0xB1ull, static_cast<std::uint64_t>(epoch), b);
            }
            if (cfg.prune_aware.on) {
                pert.apply_mask = true;
                double f = batch_rng.uniform(cfg.prune_aware.keep_lo, cfg.prune_aware.keep_hi);
                int keep_n = static_cast<int>(clamp(round_half_away(f * K), 1.0, static_cast<double>(K)));
                std::vector<int> idx(static_cast<std::size_t>(K));
                std::iota(idx.begin(), idx.end(), 0);
                batch_rng.shuffle(idx);
                pert.keep.assign(static_cast<std::size_t>(K), 0);
                for (int i = 0; i < keep_n; ++i) pert.keep[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
            }
            const detail::CutPerturbation* pp =
                (pert.add_noise || pert.apply_mask) ? &pert : nullptr;

            for (auto& g : grads.by_param) g.fill(0.0);
            double batch_loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& ex = examples[order[begin + i]];
                int pred = 0;
                batch_loss += detail::example_pass(m, ex.image, ex.label, pp, i, grads, cache, &pred);
                if (pred == ex.label) ++correct;
            }
            batch_loss /= static_cast<double>(n);
            if (!std::isfinite(batch_loss))
                throw TrainingError("training diverged (non-finite loss) at epoch " + std::to_string(epoch));
            grads.scale(1.0 / static_cast<double>(n));

            auto params = m.params();
            for (std::size_t pi = 0; pi < params.size(); ++pi) {
                Tensor& theta = *params[pi].tensor;
                Tensor& vel = velocity[pi];
                const Tensor& g = grads.by_param[pi];
                for (std::size_t j = 0; j < theta.data.size(); ++j) {
                    vel.data[j] = cfg.momentum * vel.data[j] - cfg.learning_rate * g.data[j];
                    theta.data[j] += vel.data[j];
                }
            }
            epoch_loss += batch_loss * static_cast<double>(n);
        }
        metrics.push_back({epoch, epoch_loss / static_cast<double>(examples.size()),
                           static_cast<double>(correct) / static_cast<double>(examples.size())});
    }
    return metrics;
}

inline double test_accuracy(const Model& m, std::span<const ds::LabeledExample> examples) {
    if (examples.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : examples) {
        ForwardResult r = forward(m, ex.image);
        if (predict(r.logits) == ex.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

// ---------------------------------------------------------------------------
// Checkpoint format: magic "SCNN", version u8, then one record per tensor:
// u8 name length, name bytes, u8 rank, u32 dims, f32 values (little-endian).
// A leading "input_shape" record carries the model input geometry.

namespace detail {

inline void write_record(ByteWriter& w, const std::string& name, const std::vector<std::size_t>& shape,
                         std::span<const double> values) {
    w.u8(static_cast<std::uint8_t>(name.size()));
    w.str(name);
    w.u8(static_cast<std::uint8_t>(shape.size()));
    for (std::size_t d : shape) w.u32(static_cast<std::uint32_t>(d));
    for (double v : values) w.f32(static_cast<float>(v));
}

struct Record {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;
};

inline Record read_record(ByteReader& r) {
    Record rec;
    std::size_t name_len = r.u8();
    rec.name = r.str(name_len);
    std::size_t rank = r.u8();
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        std::size_t d = r.u32();
        rec.shape.push_back(d);
        count *= d;
    }
    if (count > (1u << 28)) throw FormatError("checkpoint: implausible record size in '" + rec.name + "'");
    rec.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) rec.values[i] = static_cast<double>(r.f32());
    return rec;
}

}  // namespace detail

inline byte_vec serialize_checkpoint(const Model& m) {
    ByteWriter w;
    w.str("SCNN");
    w.u8(1);
    detail::write_record(w, "input_shape", {2},
                         std::vector<double>{static_cast<double>(m.spec.input_h), static_cast<double>(m.spec.input_w)});
    for (const auto& p : m.params()) detail::write_record(w, p.name, p.tensor->shape, p.tensor->data);
    return w.take();
}

inline Model parse_checkpoint(const byte_vec& bytes) {
    ByteReader r(bytes, "checkpoint");
    std::string magic = r.str(4);
    if (magic != "SCNN") throw FormatError("checkpoint: bad magic at offset 0 (got '" + magic + "')");
    std::uint8_t version = r.u8();
    if (version != 1) throw FormatError("checkpoint: unsupported version " + std::to_string(version));

    detail::Record meta = detail::read_record(r);
    if (meta.name != "input_shape" || meta.values.size() != 2)
        throw FormatError("checkpoint: missing input_shape record");

    std::vector<detail::Record> recs;
    while (!r.done()) recs.push_back(detail::read_record(r));
    if (recs.size() != 10) throw FormatError("checkpoint: expected 10 parameter records, got " + std::to_string(recs.size()));

    ModelSpec spec;
    spec.input_h = static_cast<int>(meta.values[0]);
    spec.input_w = static_cast<int>(meta.values[1]);
    if (recs[0].shape.size() != 4) throw FormatError("checkpoint: conv1.w rank mismatch");
    spec.conv1 = static_cast<int>(recs[0].shape[0]);
    if (recs[2].shape.size() != 4) throw FormatError("checkpoint: conv2.w rank mismatch");
    spec.conv2 = static_cast<int>(recs[2].shape[0]);
    if (recs[4].shape.size() != 4) throw FormatError("checkpoint: conv3.w rank mismatch");
    spec.conv3 = static_cast<int>(recs[4].shape[0]);
    if (recs[6].shape.size() != 2) throw FormatError("checkpoint: fc1.w rank mismatch");
    spec.fc_hidden = static_cast<int>(recs[6].shape[0]);
    if (recs[8].shape.size() != 2) throw FormatError("checkpoint: fc2.w rank mismatch");
    spec.num_classes = static_cast<int>(recs[8].shape[0]);

    Model m = Model::zeros(spec);
    auto params = m.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const detail::Record& rec = recs[i];
        if (rec.name != params[i].name)
            throw FormatError("checkpoint: expected record '" + std::string(params[i].name) + "', got '" + rec.name + "'");
        if (rec.shape != params[i].tensor->shape)
            throw FormatError("checkpoint: shape mismatch in '" + rec.name + "'");
        params[i].tensor->data = rec.values;
    }
    return m;
}

inline void save_checkpoint(const Model& m, const std::string& path) { write_file(path, serialize_checkpoint(m)); }

inline Model load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

// Checksum binding a KB to the checkpoint it was built from.
inline std::uint64_t model_fingerprint(const Model& m) {
    byte_vec bytes = serialize_checkpoint(m);
    return fnv1a64(bytes);
}

}  // namespace scait::nn

#endif  // SCAIT_NN_HPP
