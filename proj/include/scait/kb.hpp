// Knowledge base: per-(feature map, class) importance weights derived from
// decoder gradients, the global map ranking they induce, and the text-format
// serialization used for transmitter/receiver synchronization.
#ifndef SCAIT_KB_HPP
#define SCAIT_KB_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "scait/common.hpp"
#include "scait/dataset.hpp"
#include "scait/nn.hpp"

namespace scait::kb {

// All stored reals live on the "%.9e" grid so that save -> load -> save is
// byte-identical and scores recompute exactly from loaded weights.
inline double snap9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return std::strtod(buf, nullptr);
}

inline std::string format9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

struct KnowledgeBase {
    int num_maps = 0;     // K
    int num_classes = 0;  // C
    std::uint64_t model_fingerprint = 0;
    std::vector<std::vector<double>> weights;  // K rows of C entries
    std::vector<double> scores;                // length K

    double weight(int k, int c) const { return weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)]; }
};

struct MapRanking {
    std::vector<int> order;  // permutation of [0,K), most important first
};

// scores[k] = mean over classes of |w[k][c]|, snapped to stored precision.
inline std::vector<double> compute_scores(const std::vector<std::vector<double>>& weights) {
    std::vector<double> scores(weights.size(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        double s = 0.0;
        for (double w : weights[k]) s += std::fabs(w);
        scores[k] = snap9(s / static_cast<double>(weights[k].size()));
    }
    return scores;
}

// Averages the decoder gradient d(logit[label])/d(cut) over spatial positions
// and over the correctly-classified training images of each class.
inline KnowledgeBase build_kb(const nn::Model& model, std::span<const ds::LabeledExample> train) {
    if (train.empty()) throw std::invalid_argument("build_kb: empty training set");
    int K = model.spec.conv3;
    int C = model.spec.num_classes;
    int map_px = model.spec.map_h() * model.spec.map_w();

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(C), 0.0));
    std::vector<std::size_t> counted(static_cast<std::size_t>(C), 0);

    for (const auto& ex : train) {
        if (ex.label < 0 || ex.label >= C) throw std::invalid_argument("build_kb: label out of range");
        Tensor cut = nn::extract_features(model, ex.image);
        Tensor logits = nn::forward_from_cut(model, cut);
        if (nn::predict(logits) != ex.label) continue;
        Tensor grad = nn::grad_wrt_feature_maps_from_cut(model, cut, ex.label);
        for (int k = 0; k < K; ++k) {
            const double* g = grad.ptr() + static_cast<std::size_t>(k) * map_px;
            double acc = 0.0;
            for (int p = 0; p < map_px; ++p) acc += g[p];
            sums[static_cast<std::size_t>(k)][static_cast<std::size_t>(ex.label)] += acc / map_px;
        }
        ++counted[static_cast<std::size_t>(ex.label)];
    }

    for (int c = 0; c < C; ++c)
        if (counted[static_cast<std::size_t>(c)] == 0)
            throw std::runtime_error("build_kb: class " + std::to_string(c) +
                                     " has no correctly-classified training images");

    KnowledgeBase kb;
    kb.num_maps = K;
    kb.num_classes = C;
    kb.model_fingerprint = nn::model_fingerprint(model);
    kb.weights.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(C), 0.0));
    for (int k = 0; k < K; ++k)
        for (int c = 0; c < C; ++c)
            kb.weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] =
                snap9(sums[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] /
                      static_cast<double>(counted[static_cast<std::size_t>(c)]));
    kb.scores = compute_scores(kb.weights);
    return kb;
}

// Sort by score descending, index ascending on ties.
inline MapRanking rank_maps(const KnowledgeBase& kb) {
    MapRanking r;
    r.order.resize(static_cast<std::size_t>(kb.num_maps));
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
        double sa = kb.scores[static_cast<std::size_t>(a)];
        double sb = kb.scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return r;
}

// ---------------------------------------------------------------------------
// Text format:
//   SCKB 1 K C
//   fingerprint <hex64>
//   K lines of C weights ("%.9e", space-separated)
//   1 line of K scores
// LF endings throughout.

inline std::string serialize_kb(const KnowledgeBase& kb) {
    for (const auto& row : kb.weights)
        for (double w : row)
            if (!std::isfinite(w)) throw std::invalid_argument("serialize_kb: non-finite weight");
    std::string out;
    out += "SCKB 1 " + std::to_string(kb.num_maps) + " " + std::to_string(kb.num_classes) + "\n";
    out += "fingerprint " + hex64(kb.model_fingerprint) + "\n";
    for (const auto& row : kb.weights) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ' ';
            out += format9(row[c]);
        }
        out += '\n';
    }
    for (std::size_t k = 0; k < kb.scores.size(); ++k) {
        if (k) out += ' ';
        out += format9(kb.scores[static_cast<std::size_t>(k)]);
    }
    out += '\n';
    return out;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline double parse_real(const std::string& tok, int line_no) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
        throw FormatError("kb: line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    return v;
}

}  // namespace detail

inline KnowledgeBase parse_kb(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (lines.empty()) throw FormatError("kb: line 1: empty file");

    auto head = detail::split_ws(lines[0]);
    if (head.size() != 4 || head[0] != "SCKB" || head[1] != "1")
        throw FormatError("kb: line 1: expected 'SCKB 1 K C' header");
    long K = std::strtol(head[2].c_str(), nullptr, 10);
    long C = std::strtol(head[3].c_str(), nullptr, 10);
    if (K < 1 || C < 1 || K > 65535 || C > 65535)
        throw FormatError("kb: line 1: bad dimensions K=" + head[2] + " C=" + head[3]);

    if (lines.size() < 2) throw FormatError("kb: line 2: missing fingerprint line");
    auto fp_line = detail::split_ws(lines[1]);
    if (fp_line.size() != 2 || fp_line[0] != "fingerprint" || fp_line[1].size() != 16)
        throw FormatError("kb: line 2: expected 'fingerprint <hex64>'");
    char* fp_end = nullptr;
    std::uint64_t fp = std::strtoull(fp_line[1].c_str(), &fp_end, 16);
    if (fp_end != fp_line[1].c_str() + 16) throw FormatError("kb: line 2: bad fingerprint hex");

    KnowledgeBase kb;
    kb.num_maps = static_cast<int>(K);
    kb.num_classes = static_cast<int>(C);
    kb.model_fingerprint = fp;
    kb.weights.assign(static_cast<std::size_t>(K), {});

    for (long k = 0; k < K; ++k) {
        int line_no = static_cast<int>(3 + k);
        if (static_cast<std::size_t>(2 + k) >= lines.size())
            throw FormatError("kb: line " + std::to_string(line_no) + ": missing weight row " + std::to_string(k));
        auto toks = detail::split_ws(lines[static_cast<std::size_t>(2 + k)]);
        if (toks.size() != static_cast<std::size_t>(C))
            throw FormatError("kb: line " + std::to_string(line_no) + ": expected " + std::to_string(C) +
                              " weights, got " + std::to_string(toks.size()));
        auto& row = kb.weights[static_cast<std::size_t>(k)];
        row.reserve(static_cast<std::size_t>(C));
        for (const auto& t : toks) row.push_back(detail::parse_real(t, line_no));
    }

    int score_line = static_cast<int>(3 + K);
    if (static_cast<std::size_t>(2 + K) >= lines.size())
        throw FormatError("kb: line " + std::to_string(score_line) + ": missing score row");
    auto toks = detail::split_ws(lines[static_cast<std::size_t>(2 + K)]);
    if (toks.size() != static_cast<std::size_t>(K))
        throw FormatError("kb: line " + std::to_string(score_line) + ": expected " + std::to_string(K) +
                          " scores, got " + std::to_string(toks.size()));
    kb.scores.reserve(static_cast<std::size_t>(K));
    for (const auto& t : toks) kb.scores.push_back(detail::parse_real(t, score_line));

    std::vector<double> recomputed = compute_scores(kb.weights);
    for (long k = 0; k < K; ++k)
        if (recomputed[static_cast<std::size_t>(k)] != kb.scores[static_cast<std::size_t>(k)])
            throw FormatError("kb: line " + std::to_string(score_line) + ": score " + std::to_string(k) +
                              " does not match its weights");
    for (auto& s : kb.scores)
        if (s < 0.0) throw FormatError("kb: line " + std::to_string(score_line) + ": negative score");
    return kb;
}

inline void save_kb(const KnowledgeBase& kb, const std::string& path) {
    std::string text = serialize_kb(kb);
    atomic_write_file(path, byte_vec(text.begin(), text.end()));
}

inline KnowledgeBase load_kb(const std::string& path) {
    byte_vec bytes = read_file(path);
    return parse_kb(std::string(bytes.begin(), bytes.end()));
}

inline bool fingerprint_matches(const KnowledgeBase& kb, const nn::Model& model) {
    return kb.model_fingerprint == nn::model_fingerprint(model);
}

enum class SyncOutcome { AlreadyIdentical, Updated };

struct SyncReport {
    SyncOutcome outcome = SyncOutcome::Updated;
    std::size_t bytes_written = 0;
};

// Replace dest with the source KB's canonical serialization; no write when the
// destination already matches byte for byte.
inline SyncReport sync_kb(const KnowledgeBase& source, const std::string& dest_path) {
    std::string text = serialize_kb(source);
    if (std::filesystem::exists(dest_path)) {
        byte_vec existing = read_file(dest_path);
        if (std::string(existing.begin(), existing.end()) == text) return {SyncOutcome::AlreadyIdentical, 0};
    }
    atomic_write_file(dest_path, byte_vec(text.begin(), text.end()));
    return {SyncOutcome::Updated, text.size()};
}

}  // namespace scait::kb

#endif  // SCAIT_KB_HPP
