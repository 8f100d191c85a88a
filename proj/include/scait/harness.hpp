// Experiment orchestration: bpp and delay metrics, the simulated end-to-end
// pipelines for all three schemes, sweep execution with canonical CSV output,
// and the report charts.
#ifndef SCAIT_HARNESS_HPP
#define SCAIT_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "scait/channel.hpp"
#include "scait/common.hpp"
#include "scait/dataset.hpp"
#include "scait/image_codec.hpp"
#include "scait/kb.hpp"
#include "scait/nn.hpp"
#include "scait/rng.hpp"
#include "scait/semantic.hpp"
#include "scait/svg.hpp"

namespace scait::harness {

// ---------------------------------------------------------------------------
// Metrics.

struct BppResult {
    double bpp_source = 0.0;  // source-coded payload bits per pixel, pre-FEC
    double bpp_air = 0.0;     // after FEC expansion
};

inline BppResult compute_bpp(double payload_bits, int width, int height, ch::Fec fec) {
    if (width < 1 || height < 1) throw std::invalid_argument("compute_bpp: bad image dimensions");
    BppResult r;
    r.bpp_source = payload_bits / (static_cast<double>(width) * height);
    r.bpp_air = r.bpp_source * ch::fec_expansion(fec);
    return r;
}

struct DelayComponents {
    double process_ms = 0.0;
    double transmission_ms = 0.0;
    double total_ms = 0.0;
};

inline DelayComponents delay_model(double process_seconds, double payload_bits, double link_rate_bps) {
    if (!(link_rate_bps > 0.0)) throw std::invalid_argument("delay_model: link rate must be positive");
    DelayComponents d;
    d.process_ms = process_seconds * 1000.0;
    d.transmission_ms = payload_bits / link_rate_bps * 1000.0;
    d.total_ms = d.process_ms + d.transmission_ms;
    return d;
}

// ---------------------------------------------------------------------------
// Schemes and seeds.

enum class Scheme { ScAit, ScRandom, BaselineCodec };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ScAit: return "sc_ait";
        case Scheme::ScRandom: return "sc_random";
        case Scheme::BaselineCodec: return "baseline_codec";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "sc_ait") return Scheme::ScAit;
    if (name == "sc_random") return Scheme::ScRandom;
    if (name == "baseline_codec") return Scheme::BaselineCodec;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected sc_ait, sc_random or baseline_codec)");
}

inline std::uint64_t bits_of(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    return u;
}

// Per-row RNG stream root: hash of (master seed, scheme, sweep point, seed
// index). Shared by the offline harness and the UDP transmitter so both paths
// draw identical impairment noise.
inline std::uint64_t row_seed_for(std::uint64_t master_seed, Scheme scheme, double cr_or_quality, double snr_db,
                                  ch::Fec fec, int seed_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(scheme) + 1, bits_of(cr_or_quality), bits_of(snr_db),
                       static_cast<std::uint64_t>(fec), static_cast<std::uint64_t>(seed_index));
}

// Per-image sub-stream tags under a row seed.
inline constexpr std::uint64_t kChannelTag = 0xC4;
inline constexpr std::uint64_t kSelectTag = 0x5E1;

// ---------------------------------------------------------------------------
// Channel impairment of the exposed byte regions of a serialized payload.
// Structure fields outside the regions model out-of-band/link-protected data.

struct ImpairResult {
    byte_vec bytes;
    double measured_ber = 0.0;
};

inline ImpairResult impair_regions(const byte_vec& payload,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& regions,
                                   const ch::ChannelConfig& cfg) {
    byte_vec exposed;
    for (auto [off, len] : regions) {
        if (off + len > payload.size()) throw std::invalid_argument("impair_regions: region out of bounds");
        exposed.insert(exposed.end(), payload.begin() + static_cast<std::ptrdiff_t>(off),
                       payload.begin() + static_cast<std::ptrdiff_t>(off + len));
    }
    ch::TransmitResult tr = ch::transmit(exposed, cfg);
    ImpairResult out;
    out.bytes = payload;
    out.measured_ber = tr.measured_ber;
    std::size_t cursor = 0;
    for (auto [off, len] : regions) {
        std::copy(tr.received.begin() + static_cast<std::ptrdiff_t>(cursor),
                  tr.received.begin() + static_cast<std::ptrdiff_t>(cursor + len),
                  out.bytes.begin() + static_cast<std::ptrdiff_t>(off));
        cursor += len;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cached cut-point activations so sweeps do not re-run the extractor per row.

struct CutCache {
    std::vector<Tensor> cuts;
    std::vector<int> labels;
    double extract_seconds_mean = 0.0;

    static CutCache build(const nn::Model& model, std::span<const ds::LabeledExample> examples) {
        CutCache c;
        auto t0 = std::chrono::steady_clock::now();
        for (const auto& ex : examples) {
            c.cuts.push_back(nn::extract_features(model, ex.image));
            c.labels.push_back(ex.label);
        }
        auto t1 = std::chrono::steady_clock::now();
        c.extract_seconds_mean =
            std::chrono::duration<double>(t1 - t0).count() / std::max<std::size_t>(1, examples.size());
        return c;
    }
};

struct EvalResult {
    double accuracy = 0.0;
    double payload_bits_mean = 0.0;    // source-coded bits per image, pre-FEC
    double process_seconds_mean = 0.0; // per image: encode + decode + inference
    double measured_ber_mean = 0.0;
    std::vector<int> predictions;      // one per test image, in order
};

// Semantic pipeline (sc_ait or sc_random): select, quantize, serialize, impair
// the quantized value bytes, parse, zero-fill, classify.
inline EvalResult evaluate_semantic(const nn::Model& model, const CutCache& cache, const kb::MapRanking& ranking,
                                    double cr, double snr_db, ch::Fec fec, std::uint64_t row_seed,
                                    bool random_selection) {
    int K = model.spec.conv3;
    std::vector<int> fixed_indices;
    if (!random_selection) fixed_indices = sem::select_maps(ranking, cr, K);

    EvalResult res;
    std::size_t correct = 0;
    double seconds = 0.0;
    for (std::size_t i = 0; i < cache.cuts.size(); ++i) {
        std::vector<int> indices =
            random_selection ? sem::random_select(K, cr, derive_seed(row_seed, kSelectTag, i)) : fixed_indices;

        auto t0 = std::chrono::steady_clock::now();
        sem::SemanticFrame frame = sem::encode_frame(cache.cuts[i], indices);
        byte_vec bytes = sem::serialize_frame(frame);
        auto t1 = std::chrono::steady_clock::now();

        ch::ChannelConfig ccfg{snr_db, fec, derive_seed(row_seed, kChannelTag, i)};
        ImpairResult imp = impair_regions(bytes, sem::code_byte_ranges(frame), ccfg);

        auto t2 = std::chrono::steady_clock::now();
        sem::SemanticFrame rx = sem::parse_frame(imp.bytes);
        Tensor cut_hat = sem::decode_frame(rx);
        Tensor logits = nn::forward_from_cut(model, cut_hat);
        int pred = nn::predict(logits);
        auto t3 = std::chrono::steady_clock::now();

        res.predictions.push_back(pred);
        if (pred == cache.labels[i]) ++correct;
        res.payload_bits_mean += static_cast<double>(bytes.size()) * 8.0;
        res.measured_ber_mean += imp.measured_ber;
        seconds += std::chrono::duration<double>(t1 - t0).count() + std::chrono::duration<double>(t3 - t2).count();
    }
    std::size_t n = cache.cuts.size();
    if (n == 0) throw std::invalid_argument("evaluate_semantic: empty test set");
    res.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    res.payload_bits_mean /= static_cast<double>(n);
    res.measured_ber_mean /= static_cast<double>(n);
    res.process_seconds_mean = seconds / static_cast<double>(n) + cache.extract_seconds_mean;
    return res;
}

// Baseline pipeline: block-DCT encode, impair the coded block bits, decode the
// (possibly degraded) image, classify with the full CNN.
inline EvalResult evaluate_baseline(const nn::Model& model, std::span<const ds::LabeledExample> examples, int quality,
                                    double snr_db, ch::Fec fec, std::uint64_t row_seed) {
    if (examples.empty()) throw std::invalid_argument("evaluate_baseline: empty test set");
    EvalResult res;
    std::size_t correct = 0;
    double seconds = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];

        auto t0 = std::chrono::steady_clock::now();
        codec::BlockStream bs = codec::encode_image(ex.image, quality);
        byte_vec bytes = codec::serialize_blockstream(bs);
        auto t1 = std::chrono::steady_clock::now();

        ch::ChannelConfig ccfg{snr_db, fec, derive_seed(row_seed, kChannelTag, i)};
        ImpairResult imp = impair_regions(bytes, codec::payload_byte_ranges(bs), ccfg);

        auto t2 = std::chrono::steady_clock::now();
        codec::BlockStream rx = codec::parse_blockstream(imp.bytes);
        Image decoded = codec::decode_image(rx);
        nn::ForwardResult fr = nn::forward(model, decoded);
        int pred = nn::predict(fr.logits);
        auto t3 = std::chrono::steady_clock::now();

        res.predictions.push_back(pred);
        if (pred == ex.label) ++correct;
        res.payload_bits_mean += static_cast<double>(bytes.size()) * 8.0;
        res.measured_ber_mean += imp.measured_ber;
        seconds += std::chrono::duration<double>(t1 - t0).count() + std::chrono::duration<double>(t3 - t2).count();
    }
    std::size_t n = examples.size();
    res.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    res.payload_bits_mean /= static_cast<double>(n);
    res.measured_ber_mean /= static_cast<double>(n);
    res.process_seconds_mean = seconds / static_cast<double>(n);
    return res;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepInputs {
    const nn::Model* sc_model = nullptr;        // used by sc_ait and sc_random
    const kb::KnowledgeBase* kb = nullptr;      // used by sc_ait
    const nn::Model* baseline_model = nullptr;  // used by baseline_codec
    std::span<const ds::LabeledExample> test;
};

struct SweepConfig {
    std::vector<Scheme> schemes;
    std::vector<double> crs;      // sc schemes
    std::vector<int> qualities;   // baseline
    std::vector<double> snrs;
    std::vector<ch::Fec> fecs;
    int num_seeds = 1;
    std::uint64_t master_seed = 1;
    double link_rate_bps = 1e6;
};

struct Row {
    Scheme scheme = Scheme::ScAit;
    double cr_or_quality = 0.0;
    double snr_db = 0.0;
    ch::Fec fec = ch::Fec::None;
    int seed_index = 0;
    double accuracy = 0.0;
    double bpp_source = 0.0;
    double bpp_air = 0.0;
    double process_delay_ms = 0.0;
    double transmission_delay_ms = 0.0;
    double total_delay_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "scheme,cr_or_quality,snr_db,fec,seed,accuracy,bpp_source,bpp_air,process_delay_ms,transmission_delay_ms,"
    "total_delay_ms";

inline std::string format_row(const Row& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", scheme_name(r.scheme),
                  r.cr_or_quality, r.snr_db, r.fec == ch::Fec::Hamming74 ? "hamming74" : "none", r.seed_index,
                  r.accuracy, r.bpp_source, r.bpp_air, r.process_delay_ms, r.transmission_delay_ms, r.total_delay_ms);
    return buf;
}

namespace detail {

inline bool row_less(const Row& a, const Row& b) {
    auto key = [](const Row& r) {
        return std::make_tuple(std::string(scheme_name(r.scheme)), r.cr_or_quality, r.snr_db,
                               static_cast<int>(r.fec), r.seed_index);
    };
    return key(a) < key(b);
}

}  // namespace detail

// Runs every (scheme, point, seed) combination over the test set. Duplicate
// combinations are computed once so repeated rows are byte-identical.
inline std::vector<Row> run_sweep(const SweepInputs& in, const SweepConfig& cfg) {
    if (cfg.schemes.empty()) throw std::invalid_argument("sweep: no schemes");
    if (cfg.snrs.empty()) throw std::invalid_argument("sweep: no snr values");
    if (cfg.fecs.empty()) throw std::invalid_argument("sweep: no fec modes");
    if (cfg.num_seeds < 1) throw std::invalid_argument("sweep: num_seeds must be >= 1");
    if (in.test.empty()) throw std::invalid_argument("sweep: empty test set");

    bool wants_sc = false, wants_baseline = false;
    for (Scheme s : cfg.schemes) (s == Scheme::BaselineCodec ? wants_baseline : wants_sc) = true;
    if (wants_sc) {
        if (!in.sc_model) throw std::invalid_argument("sweep: sc schemes need a model");
        if (!in.kb) throw std::invalid_argument("sweep: sc schemes need a knowledge base");
        if (cfg.crs.empty()) throw std::invalid_argument("sweep: sc schemes need compression ratios");
    }
    if (wants_baseline) {
        if (!in.baseline_model) throw std::invalid_argument("sweep: baseline needs a model");
        if (cfg.qualities.empty()) throw std::invalid_argument("sweep: baseline needs quality values");
    }

    CutCache cache;
    kb::MapRanking ranking;
    if (wants_sc) {
        cache = CutCache::build(*in.sc_model, in.test);
        ranking = kb::rank_maps(*in.kb);
    }

    int w = in.test[0].image.width;
    int h = in.test[0].image.height;

    std::vector<Row> rows;
    std::map<std::string, Row> memo;
    auto emit = [&](Scheme scheme, double point, double snr, ch::Fec fec, int seed_index) {
        std::string key = std::string(scheme_name(scheme)) + "|" + std::to_string(point) + "|" +
                          std::to_string(snr) + "|" + std::to_string(static_cast<int>(fec)) + "|" +
                          std::to_string(seed_index);
        auto it = memo.find(key);
        if (it != memo.end()) {
            rows.push_back(it->second);
            return;
        }
        std::uint64_t row_seed = row_seed_for(cfg.master_seed, scheme, point, snr, fec, seed_index);
        EvalResult ev;
        if (scheme == Scheme::BaselineCodec) {
            ev = evaluate_baseline(*in.baseline_model, in.test, static_cast<int>(point), snr, fec, row_seed);
        } else {
            ev = evaluate_semantic(*in.sc_model, cache, ranking, point, snr, fec, row_seed,
                                   scheme == Scheme::ScRandom);
        }
        Row r;
        r.scheme = scheme;
        r.cr_or_quality = point;
        r.snr_db = snr;
        r.fec = fec;
        r.seed_index = seed_index;
        r.accuracy = ev.accuracy;
        BppResult bpp = compute_bpp(ev.payload_bits_mean, w, h, fec);
        r.bpp_source = bpp.bpp_source;
        r.bpp_air = bpp.bpp_air;
        DelayComponents d =
            delay_model(ev.process_seconds_mean, ev.payload_bits_mean * ch::fec_expansion(fec), cfg.link_rate_bps);
        r.process_delay_ms = d.process_ms;
        r.transmission_delay_ms = d.transmission_ms;
        r.total_delay_ms = d.total_ms;
        memo[key] = r;
        rows.push_back(r);
    };

    for (Scheme scheme : cfg.schemes) {
        const bool baseline = scheme == Scheme::BaselineCodec;
        if (baseline) {
            for (int q : cfg.qualities)
                for (double snr : cfg.snrs)
                    for (ch::Fec fec : cfg.fecs)
                        for (int s = 0; s < cfg.num_seeds; ++s) emit(scheme, q, snr, fec, s);
        } else {
            for (double cr : cfg.crs)
                for (double snr : cfg.snrs)
                    for (ch::Fec fec : cfg.fecs)
                        for (int s = 0; s < cfg.num_seeds; ++s) emit(scheme, cr, snr, fec, s);
        }
    }
    std::sort(rows.begin(), rows.end(), detail::row_less);
    return rows;
}

inline std::string report_csv(const std::vector<Row>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const Row& r : rows) out += format_row(r) + "\n";
    return out;
}

inline std::vector<Row> parse_report_csv(const std::string& text) {
    std::vector<Row> rows;
    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string line = nl == std::string::npos ? text.substr(start) : text.substr(start, nl - start);
        start = nl == std::string::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != kCsvHeader) throw FormatError("report: line 1: unexpected CSV header");
            continue;
        }
        std::vector<std::string> f;
        std::size_t p = 0;
        while (p <= line.size()) {
            std::size_t c = line.find(',', p);
            f.push_back(c == std::string::npos ? line.substr(p) : line.substr(p, c - p));
            if (c == std::string::npos) break;
            p = c + 1;
        }
        if (f.size() != 11) throw FormatError("report: line " + std::to_string(line_no) + ": expected 11 fields");
        Row r;
        r.scheme = parse_scheme(f[0]);
        r.cr_or_quality = std::strtod(f[1].c_str(), nullptr);
        r.snr_db = std::strtod(f[2].c_str(), nullptr);
        if (f[3] == "hamming74") {
            r.fec = ch::Fec::Hamming74;
        } else if (f[3] == "none") {
            r.fec = ch::Fec::None;
        } else {
            throw FormatError("report: line " + std::to_string(line_no) + ": bad fec '" + f[3] + "'");
        }
        r.seed_index = static_cast<int>(std::strtol(f[4].c_str(), nullptr, 10));
        r.accuracy = std::strtod(f[5].c_str(), nullptr);
        r.bpp_source = std::strtod(f[6].c_str(), nullptr);
        r.bpp_air = std::strtod(f[7].c_str(), nullptr);
        r.process_delay_ms = std::strtod(f[8].c_str(), nullptr);
        r.transmission_delay_ms = std::strtod(f[9].c_str(), nullptr);
        r.total_delay_ms = std::strtod(f[10].c_str(), nullptr);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Charts: accuracy vs SNR, accuracy vs bpp, stacked delay bars. Seeds are
// averaged per sweep point.

namespace detail {

struct PointAgg {
    double sum_acc = 0.0, sum_bpp = 0.0, sum_proc = 0.0, sum_tx = 0.0;
    int n = 0;
};

}  // namespace detail

inline void emit_plots(const std::vector<Row>& rows, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);

    // accuracy vs SNR: one series per (scheme, point, fec)
    std::map<std::string, std::map<double, detail::PointAgg>> by_series_snr;
    // accuracy vs bpp: one series per (scheme, snr, fec)
    std::map<std::string, std::map<double, detail::PointAgg>> by_series_bpp;
    std::map<std::string, detail::PointAgg> delay_by_scheme;

    for (const Row& r : rows) {
        char label[96];
        std::snprintf(label, sizeof label, "%s %s=%.4g %s", scheme_name(r.scheme),
                      r.scheme == Scheme::BaselineCodec ? "q" : "cr", r.cr_or_quality,
                      r.fec == ch::Fec::Hamming74 ? "fec" : "raw");
        auto& agg = by_series_snr[label][r.snr_db];
        agg.sum_acc += r.accuracy;
        ++agg.n;

        char label2[96];
        std::snprintf(label2, sizeof label2, "%s snr=%.4g %s", scheme_name(r.scheme), r.snr_db,
                      r.fec == ch::Fec::Hamming74 ? "fec" : "raw");
        auto& agg2 = by_series_bpp[label2][r.bpp_source];
        agg2.sum_acc += r.accuracy;
        ++agg2.n;

        auto& agg3 = delay_by_scheme[scheme_name(r.scheme)];
        agg3.sum_proc += r.process_delay_ms;
        agg3.sum_tx += r.transmission_delay_ms;
        ++agg3.n;
    }

    std::vector<svg::Series> snr_series;
    for (const auto& [name, pts] : by_series_snr) {
        svg::Series s;
        s.name = name;
        for (const auto& [x, agg] : pts) s.points.emplace_back(x, agg.sum_acc / agg.n);
        snr_series.push_back(std::move(s));
    }
    write_file(out_dir + "/accuracy_vs_snr.svg",
               svg::line_chart("Classification accuracy vs SNR", "SNR (dB)", "accuracy", snr_series));

    std::vector<svg::Series> bpp_series;
    for (const auto& [name, pts] : by_series_bpp) {
        svg::Series s;
        s.name = name;
        for (const auto& [x, agg] : pts) s.points.emplace_back(x, agg.sum_acc / agg.n);
        bpp_series.push_back(std::move(s));
    }
    write_file(out_dir + "/accuracy_vs_bpp.svg",
               svg::line_chart("Classification accuracy vs bpp", "bpp (source bits/pixel)", "accuracy", bpp_series));

    std::vector<svg::StackedBar> bars;
    for (const auto& [name, agg] : delay_by_scheme) {
        svg::StackedBar b;
        b.label = name;
        b.segments = {{"process", agg.sum_proc / agg.n}, {"transmission", agg.sum_tx / agg.n}};
        bars.push_back(std::move(b));
    }
    write_file(out_dir + "/delay_breakdown.svg",
               svg::stacked_bar_chart("Mean per-image delay by scheme", "delay (ms)", bars));
}

inline void write_report(const std::vector<Row>& rows, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);
    write_file(out_dir + "/report.csv", report_csv(rows));
    emit_plots(rows, out_dir);
}

}  // namespace scait::harness

#endif  // SCAIT_HARNESS_HPP
