// Shared test helpers: scratch directories, small deterministic fixtures, and
// the finite-difference tolerance used by the gradient oracles.
#ifndef SCAIT_TESTUTIL_HPP
#define SCAIT_TESTUTIL_HPP

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <scait/scait.hpp>

namespace testutil {

// Unique scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("scait_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string path() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

// |a-b| relative to the larger magnitude, floored at 1 so near-zero pairs are
// judged on absolute error.
inline double rel_err(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) / scale;
}

// Toy network used by the gradient oracles: small enough that exhaustive
// finite differences over every parameter stay fast.
inline scait::nn::ModelSpec toy_spec() {
    scait::nn::ModelSpec s;
    s.input_h = 8;
    s.input_w = 8;
    s.conv1 = 2;
    s.conv2 = 3;
    s.conv3 = 4;
    s.fc_hidden = 8;
    s.num_classes = 3;
    return s;
}

inline scait::Image random_image(int w, int h, std::uint64_t seed) {
    scait::Rng rng(seed);
    scait::Image img(w, h);
    for (double& p : img.pixels) p = scait::quantize_intensity(rng.uniform());
    return img;
}

// Small dataset / trained model pair shared by the KB, harness and link tests.
// Function-local statics: trained once per test process.
inline const scait::ds::DatasetSplit& tiny_split() {
    static const scait::ds::DatasetSplit split = [] {
        scait::ds::DatasetConfig cfg;
        cfg.per_class = 20;
        cfg.size = 16;
        cfg.test_fraction = 0.2;
        cfg.seed = 7;
        return scait::ds::build_dataset(cfg);
    }();
    return split;
}

inline const scait::nn::Model& tiny_model() {
    static const scait::nn::Model model = [] {
        scait::nn::ModelSpec spec;
        spec.input_h = 16;
        spec.input_w = 16;
        spec.conv1 = 4;
        spec.conv2 = 6;
        spec.conv3 = 8;
        spec.fc_hidden = 24;
        spec.num_classes = 6;
        scait::nn::Model m = scait::nn::Model::init(spec, 9);
        scait::nn::TrainConfig cfg;
        cfg.epochs = 15;
        cfg.batch_size = 16;
        cfg.learning_rate = 0.02;
        cfg.seed = 9;
        scait::nn::train(m, tiny_split().train, cfg);
        return m;
    }();
    return model;
}

inline const scait::kb::KnowledgeBase& tiny_kb() {
    static const scait::kb::KnowledgeBase k = scait::kb::build_kb(tiny_model(), tiny_split().train);
    return k;
}

}  // namespace testutil

#endif  // SCAIT_TESTUTIL_HPP
