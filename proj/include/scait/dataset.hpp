// Synthetic 6-class surface-defect texture dataset plus PGM folder ingestion.
#ifndef SCAIT_DATASET_HPP
#define SCAIT_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "scait/common.hpp"
#include "scait/image.hpp"
#include "scait/rng.hpp"

namespace scait::ds {

inline constexpr int kNumClasses = 6;

inline const std::vector<std::string>& default_class_names() {
    static const std::vector<std::string> names = {"rolled-in_scale", "patches",   "crazing",
                                                   "pitted_surface",  "inclusion", "scratches"};
    return names;
}

struct LabeledExample {
    Image image;
    int label = 0;
};

struct DatasetSplit {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    std::vector<std::string> class_names;
    std::uint64_t seed = 0;

    int num_classes() const { return static_cast<int>(class_names.size()); }
};

struct DatasetConfig {
    int per_class = 300;
    int size = 32;
    double test_fraction = 0.2;
    std::uint64_t seed = 1;
};

// ---------------------------------------------------------------------------
// Texture primitives. Everything draws into a double buffer which is clamped
// and snapped to the 8-bit grid at the end.

namespace detail {

struct Canvas {
    int w, h;
    std::vector<double> v;
    Canvas(int w_, int h_, double fill) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, fill) {}
    double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
};

// Smooth random field: coarse cells-by-cells grid, bilinear upsampled.
inline void add_value_noise(Canvas& c, Rng& rng, int cells, double amplitude) {
    std::vector<double> grid(static_cast<std::size_t>(cells + 1) * (cells + 1));
    for (double& g : grid) g = rng.uniform(-1.0, 1.0);
    for (int y = 0; y < c.h; ++y) {
        double fy = static_cast<double>(y) / c.h * cells;
        int gy = static_cast<int>(fy);
        double ty = fy - gy;
        for (int x = 0; x < c.w; ++x) {
            double fx = static_cast<double>(x) / c.w * cells;
            int gx = static_cast<int>(fx);
            double tx = fx - gx;
            double g00 = grid[static_cast<std::size_t>(gy) * (cells + 1) + gx];
            double g01 = grid[static_cast<std::size_t>(gy) * (cells + 1) + gx + 1];
            double g10 = grid[static_cast<std::size_t>(gy + 1) * (cells + 1) + gx];
            double g11 = grid[static_cast<std::size_t>(gy + 1) * (cells + 1) + gx + 1];
            double g = (1 - ty) * ((1 - tx) * g00 + tx * g01) + ty * ((1 - tx) * g10 + tx * g11);
            c.at(y, x) += amplitude * g;
        }
    }
}

inline void add_speckle(Canvas& c, Rng& rng, double amplitude) {
    for (double& p : c.v) p += rng.uniform(-amplitude, amplitude);
}

// Soft-edged segment from (x0,y0) to (x1,y1); delta falls off linearly over
// one pixel beyond the given half-thickness.
inline void draw_segment(Canvas& c, double x0, double y0, double x1, double y1, double thickness, double delta) {
    double minx = std::min(x0, x1) - thickness - 1, maxx = std::max(x0, x1) + thickness + 1;
    double miny = std::min(y0, y1) - thickness - 1, maxy = std::max(y0, y1) + thickness + 1;
    int ax = std::max(0, static_cast<int>(std::floor(minx)));
    int bx = std::min(c.w - 1, static_cast<int>(std::ceil(maxx)));
    int ay = std::max(0, static_cast<int>(std::floor(miny)));
    int by = std::min(c.h - 1, static_cast<int>(std::ceil(maxy)));
    double dx = x1 - x0, dy = y1 - y0;
    double len2 = dx * dx + dy * dy;
    for (int y = ay; y <= by; ++y) {
        for (int x = ax; x <= bx; ++x) {
            double t = len2 > 0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
            t = clamp(t, 0.0, 1.0);
            double px = x0 + t * dx, py = y0 + t * dy;
            double d = std::hypot(x - px, y - py);
            if (d < thickness) {
                c.at(y, x) += delta;
            } else if (d < thickness + 1.0) {
                c.at(y, x) += delta * (thickness + 1.0 - d);
            }
        }
    }
}

inline void draw_disk(Canvas& c, double cx, double cy, double r, double delta) {
    int ax = std::max(0, static_cast<int>(std::floor(cx - r - 1)));
    int bx = std::min(c.w - 1, static_cast<int>(std::ceil(cx + r + 1)));
    int ay = std::max(0, static_cast<int>(std::floor(cy - r - 1)));
    int by = std::min(c.h - 1, static_cast<int>(std::ceil(cy + r + 1)));
    for (int y = ay; y <= by; ++y) {
        for (int x = ax; x <= bx; ++x) {
            double d = std::hypot(x - cx, y - cy);
            if (d < r) {
                c.at(y, x) += delta;
            } else if (d < r + 1.0) {
                c.at(y, x) += delta * (r + 1.0 - d);
            }
        }
    }
}

inline Image finish(Canvas& c) {
    Image img(c.w, c.h);
    for (std::size_t i = 0; i < c.v.size(); ++i) img.pixels[i] = quantize_intensity(clamp(c.v[i], 0.0, 1.0));
    return img;
}

}  // namespace detail

// Deterministic procedural texture for one defect class. The six generators
// differ in structure scale, orientation and polarity:
//   0 rolled-in scale  low-frequency mottling
//   1 patches          large bright blobs
//   2 crazing          web of thin dark cracks
//   3 pitted surface   scattered small dark pits
//   4 inclusion        wide dark near-vertical streaks
//   5 scratches        thin bright near-horizontal lines
inline Image generate_texture(int class_id, int width, int height, std::uint64_t seed) {
    if (class_id < 0 || class_id >= kNumClasses)
        throw std::invalid_argument("generate_texture: invalid class " + std::to_string(class_id));
    if (width < 8 || height < 8) throw std::invalid_argument("generate_texture: size must be >= 8");

    using namespace detail;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(class_id)));
    Canvas c(width, height, 0.5);
    double diag = std::hypot(width, height);

    switch (class_id) {
        case 0: {  // rolled-in scale: strong low-frequency mottling
            add_value_noise(c, rng, 3, 0.26);
            add_value_noise(c, rng, 7, 0.06);
            add_speckle(c, rng, 0.04);
            break;
        }
        case 1: {  // patches: a few large bright blobs
            add_value_noise(c, rng, 8, 0.05);
            int n = 2 + static_cast<int>(rng.below(3));
            for (int i = 0; i < n; ++i) {
                double r = rng.uniform(0.12, 0.26) * diag;
                draw_disk(c, rng.uniform(0, width), rng.uniform(0, height), r, rng.uniform(0.18, 0.3));
            }
            add_speckle(c, rng, 0.04);
            break;
        }
        case 2: {  // crazing: crackle web of thin dark segments
            add_value_noise(c, rng, 8, 0.05);
            int n = 8 + static_cast<int>(rng.below(7));
            for (int i = 0; i < n; ++i) {
                double x0 = rng.uniform(0, width), y0 = rng.uniform(0, height);
                double ang = rng.uniform(0, 6.283185307179586);
                double len = rng.uniform(0.2, 0.5) * diag;
                draw_segment(c, x0, y0, x0 + len * std::cos(ang), y0 + len * std::sin(ang), 0.5,
                             rng.uniform(-0.30, -0.20));
            }
            add_speckle(c, rng, 0.04);
            break;
        }
        case 3: {  // pitted surface: many small dark pits
            add_value_noise(c, rng, 8, 0.05);
            int n = 18 + static_cast<int>(rng.below(15));
            for (int i = 0; i < n; ++i)
                draw_disk(c, rng.uniform(0, width), rng.uniform(0, height), rng.uniform(0.7, 1.6),
                          rng.uniform(-0.38, -0.24));
            add_speckle(c, rng, 0.04);
            break;
        }
        case 4: {  // inclusion: wide dark near-vertical streaks
            add_value_noise(c, rng, 8, 0.05);
            int n = 1 + static_cast<int>(rng.below(3));
            for (int i = 0; i < n; ++i) {
                double x = rng.uniform(0.1, 0.9) * width;
                double tilt = rng.uniform(-0.22, 0.22);
                double y0 = rng.uniform(-0.1, 0.2) * height;
                double y1 = rng.uniform(0.8, 1.1) * height;
                double xs = x + tilt * (y1 - y0);
                draw_segment(c, x, y0, xs, y1, rng.uniform(1.4, 2.6), rng.uniform(-0.32, -0.22));
            }
            add_speckle(c, rng, 0.04);
            break;
        }
        default: {  // scratches: thin bright near-horizontal lines
            add_value_noise(c, rng, 8, 0.05);
            int n = 2 + static_cast<int>(rng.below(4));
            for (int i = 0; i < n; ++i) {
                double y = rng.uniform(0.05, 0.95) * height;
                double tilt = rng.uniform(-0.35, 0.35);
                double x0 = rng.uniform(-0.1, 0.25) * width;
                double x1 = rng.uniform(0.75, 1.1) * width;
                double ye = y + tilt * (x1 - x0);
                draw_segment(c, x0, y, x1, ye, 0.45, rng.uniform(0.22, 0.32));
            }
            add_speckle(c, rng, 0.04);
            break;
        }
    }
    return finish(c);
}

namespace detail {

// Stratified split shared by the synthetic generator and the PGM loader:
// per class, a seeded shuffle picks the test subset.
inline void split_class(std::vector<LabeledExample>& pool, int class_id, double test_fraction, std::uint64_t seed,
                        std::vector<LabeledExample>& train, std::vector<LabeledExample>& test) {
    int n = static_cast<int>(pool.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x5171ull, static_cast<std::uint64_t>(class_id)));
    rng.shuffle(order);
    int test_n = static_cast<int>(clamp<long long>(std::llround(test_fraction * n), 1, n - 1));
    for (int i = 0; i < n; ++i) {
        auto& dst = (i < test_n) ? test : train;
        dst.push_back(std::move(pool[static_cast<std::size_t>(order[i])]));
    }
}

}  // namespace detail

inline DatasetSplit build_dataset(const DatasetConfig& cfg) {
    if (cfg.per_class < 10) throw std::invalid_argument("build_dataset: per_class must be >= 10");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw std::invalid_argument("build_dataset: test_fraction must be in (0,1)");

    DatasetSplit out;
    out.class_names = default_class_names();
    out.seed = cfg.seed;
    for (int c = 0; c < kNumClasses; ++c) {
        std::vector<LabeledExample> pool;
        pool.reserve(cfg.per_class);
        for (int i = 0; i < cfg.per_class; ++i) {
            std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(i));
            pool.push_back({generate_texture(c, cfg.size, cfg.size, s), c});
        }
        detail::split_class(pool, c, cfg.test_fraction, cfg.seed, out.train, out.test);
    }
    return out;
}

// Ingests a directory with one subdirectory per class holding P5 PGM files.
// Files are ordered lexicographically; the split is stratified like the
// synthetic path.
inline DatasetSplit load_pgm_dir(const std::string& path, const std::vector<std::string>& class_names,
                                 double test_fraction = 0.2, std::uint64_t seed = 1) {
    namespace fs = std::filesystem;
    if (class_names.empty()) throw std::invalid_argument("load_pgm_dir: no class names");
    DatasetSplit out;
    out.class_names = class_names;
    out.seed = seed;
    for (int c = 0; c < static_cast<int>(class_names.size()); ++c) {
        fs::path dir = fs::path(path) / class_names[static_cast<std::size_t>(c)];
        if (!fs::is_directory(dir)) throw IoError("load_pgm_dir: missing class directory " + dir.string());
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file()) files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError("load_pgm_dir: empty class directory " + dir.string());
        std::vector<LabeledExample> pool;
        pool.reserve(files.size());
        for (const auto& f : files) pool.push_back({load_pgm(f), c});
        detail::split_class(pool, c, test_fraction, seed, out.train, out.test);
    }
    return out;
}

// Writes the split back out as a PGM tree (class subdirectories, zero-padded
// file names), usable as input to load_pgm_dir.
inline void save_pgm_dir(const DatasetSplit& split, const std::string& path) {
    namespace fs = std::filesystem;
    auto dump = [&](const std::vector<LabeledExample>& part, const std::string& prefix) {
        std::vector<int> counter(split.class_names.size(), 0);
        for (const auto& ex : part) {
            fs::path dir = fs::path(path) / split.class_names[static_cast<std::size_t>(ex.label)];
            fs::create_directories(dir);
            char name[32];
            std::snprintf(name, sizeof(name), "%s_%04d.pgm", prefix.c_str(), counter[ex.label]++);
            save_pgm(ex.image, (dir / name).string());
        }
    };
    dump(split.train, "train");
    dump(split.test, "test");
}

}  // namespace scait::ds

#endif  // SCAIT_DATASET_HPP
