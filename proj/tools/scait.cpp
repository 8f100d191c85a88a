// Command-line front end: dataset generation, training, KB construction and
// sync, point evaluation, sweeps, the UDP transmitter/receiver pair, and
// plotting. Exit codes: 0 success, 1 usage, 2 setup error, 3 runtime error.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <scait/scait.hpp>

namespace {

using namespace scait;

// Input problems the user can fix before anything runs (missing files, bad
// dimensions, mismatched artifacts). Mapped to exit code 2.
struct SetupError : std::runtime_error {
    explicit SetupError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataOpts {
    std::string pgm_dir;
    int per_class = 300;
    int size = 32;
    double test_fraction = 0.2;
    std::uint64_t seed = 1;
};

void add_data_opts(CLI::App* sub, DataOpts& d) {
    sub->add_option("--data", d.pgm_dir,
                    "directory of PGM images, one subdirectory per class (omit to use the synthetic set)");
    sub->add_option("--per-class", d.per_class, "synthetic samples per class")->capture_default_str();
    sub->add_option("--size", d.size, "synthetic image side length in pixels")->capture_default_str();
    sub->add_option("--test-fraction", d.test_fraction, "held-out fraction per class")->capture_default_str();
    sub->add_option("--data-seed", d.seed, "dataset seed")->capture_default_str();
}

ds::DatasetSplit load_split(const DataOpts& d) {
    try {
        if (!d.pgm_dir.empty())
            return ds::load_pgm_dir(d.pgm_dir, ds::default_class_names(), d.test_fraction, d.seed);
        ds::DatasetConfig c;
        c.per_class = d.per_class;
        c.size = d.size;
        c.test_fraction = d.test_fraction;
        c.seed = d.seed;
        return ds::build_dataset(c);
    } catch (const std::exception& e) {
        throw SetupError(std::string("dataset: ") + e.what());
    }
}

nn::Model load_model_checked(const std::string& path) {
    try {
        return nn::load_checkpoint(path);
    } catch (const std::exception& e) {
        throw SetupError("checkpoint '" + path + "': " + e.what() +
                         " (train one with: scait train --out " + path + ")");
    }
}

kb::KnowledgeBase load_kb_checked(const std::string& path) {
    try {
        return kb::load_kb(path);
    } catch (const std::exception& e) {
        throw SetupError("knowledge base '" + path + "': " + e.what() +
                         " (build one with: scait build-kb --out " + path + ")");
    }
}

void check_kb_model(const kb::KnowledgeBase& k, const nn::Model& m, const char* what) {
    if (k.num_maps != m.spec.conv3 || k.num_classes != m.spec.num_classes)
        throw SetupError(std::string(what) + ": KB dimensions " + std::to_string(k.num_maps) + "x" +
                         std::to_string(k.num_classes) + " do not match the model");
    if (!kb::fingerprint_matches(k, m))
        std::fprintf(stderr, "warning: %s: KB fingerprint does not match this checkpoint\n", what);
}

ch::Fec parse_fec(const std::string& s) {
    if (s == "none") return ch::Fec::None;
    if (s == "hamming74") return ch::Fec::Hamming74;
    throw SetupError("fec must be 'none' or 'hamming74', got '" + s + "'");
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
    DataOpts data;
    std::string out;
};

void cmd_gen_data(const GenDataArgs& a) {
    ds::DatasetSplit split = load_split(a.data);
    try {
        ds::save_pgm_dir(split, a.out);
    } catch (const std::exception& e) {
        throw SetupError(std::string("write: ") + e.what());
    }
    std::printf("wrote %zu train + %zu test images (%d classes) to %s\n", split.train.size(), split.test.size(),
                split.num_classes(), a.out.c_str());
}

struct TrainArgs {
    DataOpts data;
    std::string out = "model.ckpt";
    int epochs = 30;
    int batch = 32;
    double lr = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    std::string channel = "clean";
    double snr_lo = 0.0;
    double snr_hi = 20.0;
    bool prune_aware = false;
    double keep_lo = 0.03;
    double keep_hi = 1.0;
};

void cmd_train(const TrainArgs& a) {
    ds::DatasetSplit split = load_split(a.data);
    nn::TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch;
    cfg.learning_rate = a.lr;
    cfg.momentum = a.momentum;
    cfg.seed = a.seed;
    if (a.channel == "awgn") {
        cfg.channel_mode.kind = nn::ChannelMode::Kind::AnalogAwgn;
        cfg.channel_mode.snr_lo_db = a.snr_lo;
        cfg.channel_mode.snr_hi_db = a.snr_hi;
    } else if (a.channel != "clean") {
        throw SetupError("channel must be 'clean' or 'awgn', got '" + a.channel + "'");
    }
    cfg.prune_aware.on = a.prune_aware;
    cfg.prune_aware.keep_lo = a.keep_lo;
    cfg.prune_aware.keep_hi = a.keep_hi;

    nn::ModelSpec spec;
    spec.input_h = split.train[0].image.height;
    spec.input_w = split.train[0].image.width;
    nn::Model model = nn::Model::init(spec, a.seed);

    std::vector<nn::EpochMetrics> metrics = nn::train(model, split.train, cfg);
    for (const auto& m : metrics)
        std::printf("epoch %2d  loss %.4f  train_acc %.4f\n", m.epoch, m.train_loss, m.train_accuracy);
    double acc = nn::test_accuracy(model, split.test);
    std::printf("test_accuracy %.4f\n", acc);
    nn::save_checkpoint(model, a.out);
    std::printf("wrote %s (fingerprint %s)\n", a.out.c_str(), hex64(nn::model_fingerprint(model)).c_str());
}

struct BuildKbArgs {
    DataOpts data;
    std::string model = "model.ckpt";
    std::string out = "kb.txt";
};

void cmd_build_kb(const BuildKbArgs& a) {
    nn::Model model = load_model_checked(a.model);
    ds::DatasetSplit split = load_split(a.data);
    kb::KnowledgeBase k = kb::build_kb(model, split.train);
    kb::save_kb(k, a.out);
    kb::MapRanking r = kb::rank_maps(k);
    std::printf("wrote %s: %d maps x %d classes\n", a.out.c_str(), k.num_maps, k.num_classes);
    std::printf("top maps:");
    for (int i = 0; i < std::min(8, k.num_maps); ++i)
        std::printf(" %d(%.3e)", r.order[static_cast<std::size_t>(i)],
                    k.scores[static_cast<std::size_t>(r.order[static_cast<std::size_t>(i)])]);
    std::printf("\n");
}

struct SyncKbArgs {
    std::string kb;
    std::string dest;
};

void cmd_sync_kb(const SyncKbArgs& a) {
    kb::KnowledgeBase k = load_kb_checked(a.kb);
    kb::SyncReport rep = kb::sync_kb(k, a.dest);
    std::printf("%s: %s\n", a.dest.c_str(),
                rep.outcome == kb::SyncOutcome::AlreadyIdentical ? "already-identical" : "updated");
}

struct EvaluateArgs {
    DataOpts data;
    std::string model = "model.ckpt";
    std::string kb_path;
    std::string scheme = "sc_ait";
    double cr = 0.0;
    int quality = 75;
    double snr = 100.0;
    std::string fec = "none";
    int seed_index = 0;
    std::uint64_t master_seed = 1;
    double link_rate = 1e6;
};

void cmd_evaluate(const EvaluateArgs& a) {
    harness::Scheme scheme = [&] {
        try {
            return harness::parse_scheme(a.scheme);
        } catch (const std::exception& e) {
            throw SetupError(e.what());
        }
    }();
    nn::Model model = load_model_checked(a.model);
    ds::DatasetSplit split = load_split(a.data);

    kb::KnowledgeBase k;
    harness::SweepInputs in;
    in.test = split.test;
    harness::SweepConfig cfg;
    cfg.schemes = {scheme};
    cfg.snrs = {a.snr};
    cfg.fecs = {parse_fec(a.fec)};
    cfg.num_seeds = a.seed_index + 1;
    cfg.master_seed = a.master_seed;
    cfg.link_rate_bps = a.link_rate;
    if (scheme == harness::Scheme::BaselineCodec) {
        in.baseline_model = &model;
        cfg.qualities = {a.quality};
    } else {
        if (a.kb_path.empty()) throw SetupError("sc schemes need --kb");
        k = load_kb_checked(a.kb_path);
        check_kb_model(k, model, "evaluate");
        in.sc_model = &model;
        in.kb = &k;
        cfg.crs = {a.cr};
    }
    std::vector<harness::Row> rows = harness::run_sweep(in, cfg);
    std::printf("%s\n", harness::kCsvHeader);
    for (const auto& r : rows)
        if (r.seed_index == a.seed_index) std::printf("%s\n", harness::format_row(r).c_str());
}

struct SweepArgs {
    DataOpts data;
    std::string config_path;
    std::string sc_model;
    std::string baseline_model;
    std::string kb_path;
    std::string out = "report";
    std::vector<std::string> schemes;
    std::vector<double> crs;
    std::vector<int> qualities;
    std::vector<double> snrs;
    std::vector<std::string> fecs;
    int seeds = 0;
    std::uint64_t master_seed = 0;
    double link_rate = 0.0;
    bool have_master_seed = false;
};

void cmd_sweep(SweepArgs& a) {
    cfg::Config file_cfg;
    if (!a.config_path.empty()) {
        try {
            file_cfg = cfg::Config::load(a.config_path);
        } catch (const std::exception& e) {
            throw SetupError(std::string("config: ") + e.what());
        }
    }
    auto str_or = [&](const std::string& cli, const char* key, const std::string& fallback) {
        return !cli.empty() ? cli : file_cfg.get_string(key, fallback);
    };
    if (a.schemes.empty())
        for (const auto& s : file_cfg.get_list("schemes")) a.schemes.push_back(s);
    if (a.schemes.empty()) a.schemes = {"sc_ait", "sc_random", "baseline_codec"};
    if (a.crs.empty()) a.crs = file_cfg.get_real_list("crs");
    if (a.crs.empty()) a.crs = {0.0, 0.5, 0.875};
    if (a.qualities.empty())
        for (double q : file_cfg.get_real_list("qualities")) a.qualities.push_back(static_cast<int>(q));
    if (a.qualities.empty()) a.qualities = {75};
    if (a.snrs.empty()) a.snrs = file_cfg.get_real_list("snrs");
    if (a.snrs.empty()) a.snrs = {0, 5, 10, 15, 20};
    if (a.fecs.empty())
        for (const auto& f : file_cfg.get_list("fecs")) a.fecs.push_back(f);
    if (a.fecs.empty()) a.fecs = {"hamming74"};
    if (a.seeds == 0) a.seeds = static_cast<int>(file_cfg.get_int("seeds", 5));
    if (!a.have_master_seed) a.master_seed = static_cast<std::uint64_t>(file_cfg.get_int("master_seed", 1));
    if (a.link_rate == 0.0) a.link_rate = file_cfg.get_real("link_rate_bps", 1e6);
    if (a.data.pgm_dir.empty()) a.data.pgm_dir = file_cfg.get_string("data_dir", "");
    std::string sc_model_path = str_or(a.sc_model, "sc_model", "");
    std::string baseline_model_path = str_or(a.baseline_model, "baseline_model", "");
    std::string kb_path = str_or(a.kb_path, "kb", "");
    std::string out_dir = str_or(a.out == "report" ? "" : a.out, "out_dir", "report");

    harness::SweepConfig cfg;
    for (const auto& s : a.schemes) {
        try {
            cfg.schemes.push_back(harness::parse_scheme(s));
        } catch (const std::exception& e) {
            throw SetupError(e.what());
        }
    }
    cfg.crs = a.crs;
    cfg.qualities = a.qualities;
    cfg.snrs = a.snrs;
    for (const auto& f : a.fecs) cfg.fecs.push_back(parse_fec(f));
    cfg.num_seeds = a.seeds;
    cfg.master_seed = a.master_seed;
    cfg.link_rate_bps = a.link_rate;

    bool wants_sc = false, wants_baseline = false;
    for (auto s : cfg.schemes) (s == harness::Scheme::BaselineCodec ? wants_baseline : wants_sc) = true;

    ds::DatasetSplit split = load_split(a.data);
    harness::SweepInputs in;
    in.test = split.test;

    nn::Model sc_model, baseline_model;
    kb::KnowledgeBase k;
    if (wants_sc) {
        if (sc_model_path.empty() || kb_path.empty())
            throw SetupError("sc schemes need --sc-model and --kb (or sc_model/kb config keys)");
        sc_model = load_model_checked(sc_model_path);
        k = load_kb_checked(kb_path);
        check_kb_model(k, sc_model, "sweep");
        in.sc_model = &sc_model;
        in.kb = &k;
    }
    if (wants_baseline) {
        if (baseline_model_path.empty())
            throw SetupError("baseline_codec needs --baseline-model (or the baseline_model config key)");
        baseline_model = load_model_checked(baseline_model_path);
        in.baseline_model = &baseline_model;
    }

    std::vector<harness::Row> rows = harness::run_sweep(in, cfg);
    harness::write_report(rows, out_dir);
    std::printf("wrote %zu rows to %s/report.csv (+3 SVG charts)\n", rows.size(), out_dir.c_str());
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 9300;
    std::string model = "model.ckpt";
    std::string kb_out = "kb_received.txt";
    std::string log;
    int count = -1;
    int idle_timeout_ms = 5000;
};

void cmd_serve(const ServeArgs& a) {
    nn::Model model = load_model_checked(a.model);
    link::ReceiverConfig cfg;
    cfg.host = a.host;
    cfg.port = static_cast<std::uint16_t>(a.port);
    cfg.kb_out_path = a.kb_out;
    cfg.expected_data_frames = a.count;
    cfg.idle_timeout_ms = a.idle_timeout_ms;
    link::Receiver receiver(cfg);
    std::printf("listening on %s:%u\n", a.host.c_str(), receiver.port());
    std::fflush(stdout);
    std::vector<link::RecvLogEntry> log = receiver.run(model);
    std::string csv = link::recv_log_csv(log);
    if (a.log.empty()) {
        std::printf("%s", csv.c_str());
    } else {
        write_file(a.log, csv);
        std::printf("wrote %zu log rows to %s\n", log.size(), a.log.c_str());
    }
}

struct SendArgs {
    DataOpts data;
    std::string host = "127.0.0.1";
    int port = 9300;
    std::string model = "model.ckpt";
    std::string kb_path = "kb.txt";
    std::string scheme = "sc_ait";
    double cr = 0.0;
    int quality = 75;
    double snr = 100.0;
    std::string fec = "none";
    std::uint64_t master_seed = 1;
    int seed_index = 0;
    int count = 10;
    int task_id = 1;
    std::string log;
};

void cmd_send(const SendArgs& a) {
    harness::Scheme scheme = [&] {
        try {
            return harness::parse_scheme(a.scheme);
        } catch (const std::exception& e) {
            throw SetupError(e.what());
        }
    }();
    nn::Model model = load_model_checked(a.model);
    kb::KnowledgeBase k = load_kb_checked(a.kb_path);
    if (scheme == harness::Scheme::ScAit) {
        if (k.num_maps != model.spec.conv3 || !kb::fingerprint_matches(k, model))
            throw SetupError("send: KB does not match the model checkpoint; rebuild it with scait build-kb");
    }
    ds::DatasetSplit split = load_split(a.data);
    std::size_t n = std::min<std::size_t>(split.test.size(), static_cast<std::size_t>(a.count));
    std::span<const ds::LabeledExample> images(split.test.data(), n);

    link::TransmitterConfig cfg;
    cfg.host = a.host;
    cfg.port = static_cast<std::uint16_t>(a.port);
    cfg.task_id = static_cast<std::uint16_t>(a.task_id);
    cfg.scheme = scheme;
    cfg.cr = a.cr;
    cfg.quality = a.quality;
    cfg.snr_db = a.snr;
    cfg.fec = parse_fec(a.fec);
    double point = scheme == harness::Scheme::BaselineCodec ? a.quality : a.cr;
    cfg.row_seed = harness::row_seed_for(a.master_seed, scheme, point, a.snr, cfg.fec, a.seed_index);

    std::vector<link::SendLogEntry> log = link::run_transmitter(cfg, model, k, images);
    std::string csv = link::send_log_csv(log);
    if (a.log.empty()) {
        std::printf("%s", csv.c_str());
    } else {
        write_file(a.log, csv);
    }
    int drops = 0;
    for (const auto& e : log) drops += e.acked ? 0 : 1;
    std::printf("sent %zu frames, %d unacknowledged\n", log.size(), drops);
}

struct PlotArgs {
    std::string csv = "report/report.csv";
    std::string out = "report";
};

void cmd_plot(const PlotArgs& a) {
    std::vector<harness::Row> rows;
    try {
        byte_vec bytes = read_file(a.csv);
        rows = harness::parse_report_csv(std::string(bytes.begin(), bytes.end()));
    } catch (const std::exception& e) {
        throw SetupError(std::string("report: ") + e.what());
    }
    harness::emit_plots(rows, a.out);
    std::printf("wrote 3 SVG charts to %s\n", a.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-oriented semantic communication testbed"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "generate the synthetic defect-texture dataset as PGM folders");
    add_data_opts(gen, gen_args.data);
    gen->add_option("--out", gen_args.out, "output directory")->required();
    gen->callback([&] { cmd_gen_data(gen_args); });

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train the classifier and write a checkpoint");
    add_data_opts(train, train_args.data);
    train->add_option("--out", train_args.out, "checkpoint path")->capture_default_str();
    train->add_option("--epochs", train_args.epochs)->capture_default_str();
    train->add_option("--batch", train_args.batch)->capture_default_str();
    train->add_option("--lr", train_args.lr)->capture_default_str();
    train->add_option("--momentum", train_args.momentum)->capture_default_str();
    train->add_option("--seed", train_args.seed)->capture_default_str();
    train->add_option("--channel", train_args.channel, "clean | awgn (cut-point noise during training)")
        ->capture_default_str();
    train->add_option("--snr-lo", train_args.snr_lo, "awgn training SNR range low (dB)")->capture_default_str();
    train->add_option("--snr-hi", train_args.snr_hi, "awgn training SNR range high (dB)")->capture_default_str();
    train->add_flag("--prune-aware", train_args.prune_aware, "zero a random feature-map subset per batch");
    train->add_option("--keep-lo", train_args.keep_lo, "prune-aware keep fraction low")->capture_default_str();
    train->add_option("--keep-hi", train_args.keep_hi, "prune-aware keep fraction high")->capture_default_str();
    train->callback([&] { cmd_train(train_args); });

    BuildKbArgs kb_args;
    auto* bkb = app.add_subcommand("build-kb", "build the feature-map importance knowledge base");
    add_data_opts(bkb, kb_args.data);
    bkb->add_option("--model", kb_args.model, "checkpoint path")->capture_default_str();
    bkb->add_option("--out", kb_args.out, "KB output path")->capture_default_str();
    bkb->callback([&] { cmd_build_kb(kb_args); });

    SyncKbArgs sync_args;
    auto* sync = app.add_subcommand("sync-kb", "copy a KB to a destination file if it differs");
    sync->add_option("--kb", sync_args.kb, "source KB")->required();
    sync->add_option("--dest", sync_args.dest, "destination path")->required();
    sync->callback([&] { cmd_sync_kb(sync_args); });

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "run one pipeline point over the test set and print its CSV row");
    add_data_opts(eval, eval_args.data);
    eval->add_option("--model", eval_args.model)->capture_default_str();
    eval->add_option("--kb", eval_args.kb_path, "KB path (sc schemes)");
    eval->add_option("--scheme", eval_args.scheme, "sc_ait | sc_random | baseline_codec")->capture_default_str();
    eval->add_option("--cr", eval_args.cr, "fraction of feature maps discarded")->capture_default_str();
    eval->add_option("--quality", eval_args.quality, "baseline codec quality")->capture_default_str();
    eval->add_option("--snr", eval_args.snr, "channel SNR in dB")->capture_default_str();
    eval->add_option("--fec", eval_args.fec, "none | hamming74")->capture_default_str();
    eval->add_option("--seed-index", eval_args.seed_index)->capture_default_str();
    eval->add_option("--master-seed", eval_args.master_seed)->capture_default_str();
    eval->add_option("--link-rate", eval_args.link_rate, "modeled link rate in bits/s")->capture_default_str();
    eval->callback([&] { cmd_evaluate(eval_args); });

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "run the full experiment grid and write report.csv + charts");
    add_data_opts(sweep, sweep_args.data);
    sweep->add_option("--config", sweep_args.config_path, "key = value config file");
    sweep->add_option("--sc-model", sweep_args.sc_model, "checkpoint for sc_ait/sc_random");
    sweep->add_option("--baseline-model", sweep_args.baseline_model, "checkpoint for baseline_codec");
    sweep->add_option("--kb", sweep_args.kb_path, "KB path");
    sweep->add_option("--out", sweep_args.out, "output directory")->capture_default_str();
    sweep->add_option("--schemes", sweep_args.schemes)->delimiter(',');
    sweep->add_option("--crs", sweep_args.crs)->delimiter(',');
    sweep->add_option("--qualities", sweep_args.qualities)->delimiter(',');
    sweep->add_option("--snrs", sweep_args.snrs)->delimiter(',');
    sweep->add_option("--fecs", sweep_args.fecs)->delimiter(',');
    sweep->add_option("--seeds", sweep_args.seeds, "seeds per sweep point");
    auto* ms = sweep->add_option("--master-seed", sweep_args.master_seed);
    sweep->add_option("--link-rate", sweep_args.link_rate, "modeled link rate in bits/s");
    sweep->callback([&] {
        sweep_args.have_master_seed = ms->count() > 0;
        cmd_sweep(sweep_args);
    });

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "run the receiving edge node (classifier side)");
    serve->add_option("--host", serve_args.host)->capture_default_str();
    serve->add_option("--port", serve_args.port)->capture_default_str();
    serve->add_option("--model", serve_args.model)->capture_default_str();
    serve->add_option("--kb-out", serve_args.kb_out, "where synchronized KB contents land")->capture_default_str();
    serve->add_option("--log", serve_args.log, "classification log CSV path (default stdout)");
    serve->add_option("--count", serve_args.count, "stop after this many unique data frames (-1: until idle)")
        ->capture_default_str();
    serve->add_option("--idle-timeout-ms", serve_args.idle_timeout_ms)->capture_default_str();
    serve->callback([&] { cmd_serve(serve_args); });

    SendArgs send_args;
    auto* send = app.add_subcommand("send", "run the transmitting sensor node over UDP");
    add_data_opts(send, send_args.data);
    send->add_option("--host", send_args.host)->capture_default_str();
    send->add_option("--port", send_args.port)->capture_default_str();
    send->add_option("--model", send_args.model)->capture_default_str();
    send->add_option("--kb", send_args.kb_path)->capture_default_str();
    send->add_option("--scheme", send_args.scheme, "sc_ait | sc_random | baseline_codec")->capture_default_str();
    send->add_option("--cr", send_args.cr)->capture_default_str();
    send->add_option("--quality", send_args.quality)->capture_default_str();
    send->add_option("--snr", send_args.snr)->capture_default_str();
    send->add_option("--fec", send_args.fec)->capture_default_str();
    send->add_option("--master-seed", send_args.master_seed)->capture_default_str();
    send->add_option("--seed-index", send_args.seed_index)->capture_default_str();
    send->add_option("--count", send_args.count, "number of test images to send")->capture_default_str();
    send->add_option("--task-id", send_args.task_id)->capture_default_str();
    send->add_option("--log", send_args.log, "send log CSV path (default stdout)");
    send->callback([&] { cmd_send(send_args); });

    PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot", "re-render SVG charts from an existing report.csv");
    plot->add_option("--csv", plot_args.csv)->capture_default_str();
    plot->add_option("--out", plot_args.out)->capture_default_str();
    plot->callback([&] { cmd_plot(plot_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const SetupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
