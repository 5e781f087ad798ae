// glai: command-line driver for the decoupled structural/quantitative
// training engine. One subcommand per workflow phase; every run is
// reproducible from its config and seeds.
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glai/data_io.hpp"
#include "glai/errors.hpp"
#include "glai/estimator.hpp"
#include "glai/masked.hpp"
#include "glai/paths.hpp"
#include "glai/pattern.hpp"
#include "glai/persistence.hpp"

namespace {

using namespace glai;

// "images.idx:labels.idx" selects the IDX loader; anything else is CSV.
Dataset load_dataset(const std::string& path_spec, const std::string& label_column) {
    auto colon = path_spec.find(':');
    if (colon != std::string::npos) {
        return load_idx(path_spec.substr(0, colon), path_spec.substr(colon + 1));
    }
    return load_csv(path_spec, label_column);
}

void render_num(std::string& out, double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
    out.append(buf, r.ptr);
}

struct MetricsRow {
    std::size_t epoch;
    const char* split;
    double loss;
    double accuracy;
    bool has_diff = false;
    double diff = 0.0;
};

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::string out = "epoch,split,loss,accuracy,pattern_diff\n";
    for (const MetricsRow& r : rows) {
        out += std::to_string(r.epoch);
        out += ',';
        out += r.split;
        out += ',';
        render_num(out, r.loss);
        out += ',';
        render_num(out, r.accuracy);
        out += ',';
        if (r.has_diff) render_num(out, r.diff);
        out += '\n';
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw input_error("cannot write " + tmp);
        f.write(out.data(), std::streamsize(out.size()));
        if (!f) throw input_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw input_error("cannot rename " + tmp + " to " + path);
    }
}

std::vector<MetricsRow> history_rows(const std::vector<EpochStats>& history) {
    std::vector<MetricsRow> rows;
    for (const EpochStats& s : history) {
        rows.push_back({s.epoch, "train", s.train_loss, s.train_accuracy, false, 0.0});
        if (s.has_val) {
            rows.push_back({s.epoch, "val", s.val_loss, s.val_accuracy, false, 0.0});
        }
    }
    return rows;
}

NetworkSpec make_spec(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
    NetworkSpec spec;
    spec.layer_sizes = sizes;
    spec.seed = seed;
    spec.validate();
    return spec;
}

PatternSet slice_patterns(const PatternSet& ps, std::size_t lo, std::size_t hi) {
    PatternSet out;
    out.spec = ps.spec;
    out.patterns.assign(ps.patterns.begin() + std::ptrdiff_t(lo),
                        ps.patterns.begin() + std::ptrdiff_t(hi));
    return out;
}

void configure(CLI::App* sub) {
    // --config files are expanded into --key=value tokens in main() before
    // CLI11 sees the arguments; the option is declared here for help output.
    static std::string dummy;
    sub->add_option("--config", dummy, "key=value config file; explicit flags override it");
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Expands every `--config <file>` into `--key=value` tokens spliced in right
// after the subcommand, skipping keys the command line already sets. Unknown
// keys flow through to CLI11 and are rejected there.
std::vector<std::string> apply_config_files(std::vector<std::string> args) {
    std::vector<std::string> paths;
    std::vector<std::string> cleaned;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw input_error("--config needs a file path");
            paths.push_back(args[++i]);
            continue;
        }
        if (a.rfind("--config=", 0) == 0) {
            paths.push_back(a.substr(9));
            continue;
        }
        if (a.rfind("--", 0) == 0) {
            std::string name = a.substr(2);
            std::size_t eq = name.find('=');
            if (eq != std::string::npos) name = name.substr(0, eq);
            given.insert(name);
        }
        cleaned.push_back(a);
    }
    if (paths.empty()) return cleaned;

    std::size_t sub_pos = cleaned.size();
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
        if (!cleaned[i].empty() && cleaned[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == cleaned.size()) {
        throw input_error("--config requires a subcommand");
    }

    std::map<std::string, std::string> entries;  // later files/lines win
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open config file " + path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::size_t eq = t.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw input_error(path + ":" + std::to_string(line_no) +
                                  ": expected key=value");
            }
            entries[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        }
    }

    std::vector<std::string> injected;
    for (const auto& [key, value] : entries) {
        if (given.count(key)) continue;  // explicit flag wins
        injected.push_back("--" + key + "=" + value);
    }
    cleaned.insert(cleaned.begin() + std::ptrdiff_t(sub_pos) + 1, injected.begin(),
                   injected.end());
    return cleaned;
}

// ---- subcommands -----------------------------------------------------------

struct GenDataOpts {
    std::string out;
    std::string val_out;
    double val_fraction = 0.2;
    std::uint64_t seed = 1;
    int classes = 10;
    std::size_t dims = 8;
    std::size_t per_class = 200;
    double spread = 0.05;
};

void run_gen_data(const GenDataOpts& o) {
    Dataset data = synth_clusters(o.seed, o.classes, o.dims, o.per_class, o.spread);
    if (!o.val_out.empty()) {
        auto [train, val] = split(data, 1.0 - o.val_fraction, o.seed);
        write_csv(train, o.out);
        write_csv(val, o.val_out);
        std::printf("wrote %zu train samples to %s, %zu val samples to %s\n", train.size(),
                    o.out.c_str(), val.size(), o.val_out.c_str());
    } else {
        write_csv(data, o.out);
        std::printf("wrote %zu samples to %s\n", data.size(), o.out.c_str());
    }
}

struct TrainInitialOpts {
    std::string data;
    std::string val;
    std::string label_column = "label";
    std::vector<std::size_t> spec;
    std::uint64_t seed = 0;
    std::size_t epochs = 200;
    double lr = 0.05;
    std::size_t batch = 32;
    std::string out_selector;
    std::string out_estimator;
    std::string history;
};

void run_train_initial(const TrainInitialOpts& o) {
    Dataset data = load_dataset(o.data, o.label_column);
    Dataset val;
    if (!o.val.empty()) val = load_dataset(o.val, o.label_column);

    Network net = init_network(make_spec(o.spec, o.seed));
    auto [trained, history] =
        train_epochs(std::move(net), data, o.epochs, o.lr, o.batch, o.seed,
                     o.val.empty() ? nullptr : &val);
    // Phase 2: selector and estimator start as identical copies.
    save(trained, o.out_selector);
    save(trained, o.out_estimator);
    if (!o.history.empty()) write_metrics_csv(o.history, history_rows(history));

    Metrics m = evaluate(trained, data);
    std::printf("train accuracy %.4f loss %.4f\n", m.accuracy, m.loss);
    if (!o.val.empty()) {
        Metrics v = evaluate(trained, val);
        std::printf("val accuracy %.4f loss %.4f\n", v.accuracy, v.loss);
    }
}

struct CapturePatternsOpts {
    std::string model;
    std::string data;
    std::string label_column = "label";
    std::string out;
};

void run_capture_patterns(const CapturePatternsOpts& o) {
    Network net = load_network(o.model);
    Dataset data = load_dataset(o.data, o.label_column);
    PatternSet ps = capture_patterns(net, data);
    save(ps, o.out);
    std::printf("captured %zu patterns to %s\n", ps.size(), o.out.c_str());
}

struct RetrainPocOpts {
    std::string selector;
    std::string estimator;
    std::string data;
    std::string patterns;
    std::string val;
    std::string label_column = "label";
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    std::string out;
    std::string history;
    std::string baseline_out;
    std::string baseline_history;
};

void run_retrain_poc(const RetrainPocOpts& o) {
    Network selector = load_network(o.selector);
    Network estimator = load_network(o.estimator);
    Dataset data = load_dataset(o.data, o.label_column);

    PatternSet ps = o.patterns.empty() ? capture_patterns(selector, data)
                                       : load_patterns(o.patterns);
    Dataset val;
    PatternSet val_ps;
    bool has_val = !o.val.empty();
    if (has_val) {
        val = load_dataset(o.val, o.label_column);
        val_ps = capture_patterns(selector, val);
    }

    auto [retrained, history] = retrain_quantitative(
        estimator, data, ps, o.epochs, o.lr, o.batch, o.seed,
        has_val ? &val : nullptr, has_val ? &val_ps : nullptr);
    save(retrained, o.out);
    if (!o.history.empty()) write_metrics_csv(o.history, history_rows(history));

    if (has_val) {
        Metrics v = evaluate_masked(retrained, val, val_ps);
        std::printf("quantitative-only val accuracy %.4f loss %.4f\n", v.accuracy, v.loss);
    }

    if (!o.baseline_out.empty() || !o.baseline_history.empty()) {
        Network base = load_network(o.estimator);
        auto [trained, base_history] = train_epochs(
            std::move(base), data, o.epochs, o.lr, o.batch, o.seed,
            has_val ? &val : nullptr);
        if (!o.baseline_out.empty()) save(trained, o.baseline_out);
        if (!o.baseline_history.empty()) {
            write_metrics_csv(o.baseline_history, history_rows(base_history));
        }
        if (has_val) {
            Metrics v = evaluate(trained, val);
            std::printf("baseline sgd val accuracy %.4f loss %.4f\n", v.accuracy, v.loss);
        }
    }
}

struct PatternTraceOpts {
    std::string data;
    std::string val;
    std::string label_column = "label";
    std::vector<std::size_t> spec;
    std::uint64_t seed = 0;
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 32;
    std::string out;
};

void run_pattern_trace(const PatternTraceOpts& o) {
    Dataset data = load_dataset(o.data, o.label_column);
    Dataset val = load_dataset(o.val, o.label_column);
    auto trace = convergence_trace(make_spec(o.spec, o.seed), data, val, o.epochs, o.lr,
                                   o.batch, o.seed);
    std::vector<MetricsRow> rows;
    for (const TraceRow& t : trace) {
        rows.push_back({t.epoch, "train", t.train_loss, t.train_accuracy, false, 0.0});
        rows.push_back({t.epoch, "val", t.val_loss, t.val_accuracy, true, t.pattern_diff});
    }
    write_metrics_csv(o.out, rows);
    std::printf("wrote %zu epochs to %s\n", trace.size(), o.out.c_str());
}

struct BuildEstimatorOpts {
    std::string model;
    std::string out;
    std::uint64_t cap = kDefaultPathCap;
};

void run_build_estimator(const BuildEstimatorOpts& o) {
    Network net = load_network(o.model);
    LinearEstimator est = init_estimator_from_network(net, o.cap);
    save(est, o.out);
    std::printf("enumerated %zu paths to %s\n", est.table.size(), o.out.c_str());
}

struct TrainEstimatorOpts {
    std::string method = "sgd";
    std::string estimator;
    std::string selector;
    std::string patterns;
    std::string data;
    std::string val;
    std::string label_column = "label";
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    std::string loss = "cce";
    double ridge = 1e-8;
    std::string out;
    std::string history;
};

PatternSet patterns_for(const std::string& patterns_path, const std::string& selector_path,
                        const Dataset& data) {
    if (!patterns_path.empty()) return load_patterns(patterns_path);
    if (selector_path.empty()) {
        throw input_error("need --patterns or --selector to obtain activation patterns");
    }
    return capture_patterns(load_network(selector_path), data);
}

void run_train_estimator(const TrainEstimatorOpts& o) {
    LinearEstimator est = load_estimator(o.estimator);
    Dataset data = load_dataset(o.data, o.label_column);
    PatternSet ps = patterns_for(o.patterns, o.selector, data);

    if (o.method == "direct") {
        if (!o.history.empty()) {
            throw input_error("--history requires --method sgd");
        }
        LinearEstimator solved = estimator_direct_solve(est.table, data, ps, o.ridge);
        save(solved, o.out);
        Metrics m = evaluate_estimator(solved, data, ps);
        std::printf("train accuracy %.4f cce %.4f\n", m.accuracy, m.loss);
        if (!o.val.empty()) {
            Dataset val = load_dataset(o.val, o.label_column);
            PatternSet val_ps = patterns_for("", o.selector, val);
            Metrics v = evaluate_estimator(solved, val, val_ps);
            std::printf("val accuracy %.4f cce %.4f\n", v.accuracy, v.loss);
        }
        return;
    }
    if (o.method != "sgd") throw input_error("--method must be sgd or direct");

    EstimatorLoss loss;
    if (o.loss == "cce") loss = EstimatorLoss::Cce;
    else if (o.loss == "mse") loss = EstimatorLoss::Mse;
    else throw input_error("--loss must be cce or mse");

    Dataset val;
    PatternSet val_ps;
    bool has_val = !o.val.empty();
    if (has_val) {
        val = load_dataset(o.val, o.label_column);
        val_ps = patterns_for("", o.selector, val);
    }
    auto [trained, history] =
        estimator_sgd_train(std::move(est), data, ps, o.epochs, o.lr, o.batch, o.seed, loss,
                            has_val ? &val : nullptr, has_val ? &val_ps : nullptr);
    save(trained, o.out);
    if (!o.history.empty()) write_metrics_csv(o.history, history_rows(history));
    Metrics m = evaluate_estimator(trained, data, ps);
    std::printf("train accuracy %.4f cce %.4f\n", m.accuracy, m.loss);
}

struct MergeOpts {
    std::string a;
    std::string b;
    double merge_alpha = 0.5;
    std::string out;
};

void run_merge(const MergeOpts& o) {
    LinearEstimator a = load_estimator(o.a);
    LinearEstimator b = load_estimator(o.b);
    LinearEstimator merged = merge_estimators(a, b, o.merge_alpha);
    save(merged, o.out);
    std::printf("merged %s and %s with alpha %.4f into %s\n", o.a.c_str(), o.b.c_str(),
                o.merge_alpha, o.out.c_str());
}

struct FederatedSimOpts {
    std::size_t nodes = 2;
    std::size_t rounds = 1;
    std::string estimator;
    std::string selector;
    std::string patterns;
    std::string data;
    std::string val;
    std::string label_column = "label";
    std::string method = "direct";
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    std::string loss = "cce";
    double ridge = 1e-8;
    std::string out;
};

void run_federated_sim(const FederatedSimOpts& o) {
    if (o.nodes < 1) throw input_error("--nodes must be >= 1");
    LinearEstimator global_model = load_estimator(o.estimator);
    Dataset data = load_dataset(o.data, o.label_column);
    PatternSet ps = patterns_for(o.patterns, o.selector, data);
    if (data.size() < o.nodes) throw input_error("fewer samples than nodes");

    TrainerConfig cfg;
    cfg.method = o.method == "direct" ? TrainMethod::Direct : TrainMethod::Sgd;
    if (o.method != "direct" && o.method != "sgd") {
        throw input_error("--method must be sgd or direct");
    }
    cfg.epochs = o.epochs;
    cfg.lr = o.lr;
    cfg.batch = o.batch;
    cfg.seed = o.seed;
    cfg.loss = o.loss == "mse" ? EstimatorLoss::Mse : EstimatorLoss::Cce;
    cfg.ridge = o.ridge;

    // Contiguous shards in dataset order.
    std::vector<std::pair<Dataset, PatternSet>> shards;
    for (std::size_t k = 0; k < o.nodes; ++k) {
        std::size_t lo = k * data.size() / o.nodes;
        std::size_t hi = (k + 1) * data.size() / o.nodes;
        std::vector<std::size_t> idx(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) idx[i - lo] = i;
        shards.emplace_back(subset(data, idx), slice_patterns(ps, lo, hi));
    }

    for (std::size_t r = 0; r < o.rounds; ++r) {
        global_model = federated_round(global_model, shards, cfg);
    }
    save(global_model, o.out);

    if (!o.val.empty()) {
        Dataset val = load_dataset(o.val, o.label_column);
        PatternSet val_ps = patterns_for("", o.selector, val);
        Metrics m = evaluate_estimator(global_model, val, val_ps);
        std::printf("val accuracy %.4f cce %.4f\n", m.accuracy, m.loss);
    } else {
        Metrics m = evaluate_estimator(global_model, data, ps);
        std::printf("train accuracy %.4f cce %.4f\n", m.accuracy, m.loss);
    }
}

struct EvalOpts {
    std::string model;
    std::string selector;
    std::string data;
    std::string label_column = "label";
};

void run_eval(const EvalOpts& o) {
    Dataset data = load_dataset(o.data, o.label_column);
    Metrics m;
    switch (peek_kind(o.model)) {
        case ModelKind::Network: {
            Network net = load_network(o.model);
            if (!o.selector.empty()) {
                PatternSet ps = capture_patterns(load_network(o.selector), data);
                m = evaluate_masked(net, data, ps);
            } else {
                m = evaluate(net, data);
            }
            break;
        }
        case ModelKind::Estimator: {
            LinearEstimator est = load_estimator(o.model);
            if (o.selector.empty()) {
                throw input_error("evaluating an estimator requires --selector");
            }
            PatternSet ps = capture_patterns(load_network(o.selector), data);
            m = evaluate_estimator(est, data, ps);
            break;
        }
        case ModelKind::Patterns:
            throw input_error("cannot eval a patterns file");
    }
    std::printf("accuracy=%.6f cce=%.6f n=%zu\n", m.accuracy, m.loss, data.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decoupled structural/quantitative training engine"};
    app.require_subcommand(1);

    GenDataOpts gen;
    auto* sub_gen = app.add_subcommand("gen-data", "generate a synthetic cluster dataset");
    configure(sub_gen);
    sub_gen->add_option("--out", gen.out, "output CSV")->required();
    sub_gen->add_option("--val-out", gen.val_out, "optional validation CSV");
    sub_gen->add_option("--val-fraction", gen.val_fraction, "validation fraction");
    sub_gen->add_option("--seed", gen.seed, "generator seed");
    sub_gen->add_option("--classes", gen.classes, "number of classes");
    sub_gen->add_option("--dims", gen.dims, "feature dimensions");
    sub_gen->add_option("--per-class", gen.per_class, "samples per class");
    sub_gen->add_option("--spread", gen.spread, "cluster standard deviation");
    sub_gen->callback([&] { run_gen_data(gen); });

    TrainInitialOpts ti;
    auto* sub_ti = app.add_subcommand("train-initial",
                                      "phase 1: train a network, save selector+estimator");
    configure(sub_ti);
    sub_ti->add_option("--data", ti.data, "training dataset")->required();
    sub_ti->add_option("--val", ti.val, "validation dataset");
    sub_ti->add_option("--label-column", ti.label_column, "CSV label column");
    sub_ti->add_option("--spec", ti.spec, "layer sizes, e.g. 8,32,16,10")
        ->required()
        ->delimiter(',');
    sub_ti->add_option("--seed", ti.seed, "init + shuffle seed");
    sub_ti->add_option("--epochs", ti.epochs, "training epochs");
    sub_ti->add_option("--lr", ti.lr, "learning rate");
    sub_ti->add_option("--batch", ti.batch, "mini-batch size");
    sub_ti->add_option("--out-selector", ti.out_selector, "selector model file")->required();
    sub_ti->add_option("--out-estimator", ti.out_estimator, "estimator model file")
        ->required();
    sub_ti->add_option("--history", ti.history, "metrics CSV");
    sub_ti->callback([&] { run_train_initial(ti); });

    CapturePatternsOpts cp;
    auto* sub_cp = app.add_subcommand("capture-patterns",
                                      "phase 3: capture activation patterns for a dataset");
    configure(sub_cp);
    sub_cp->add_option("--model", cp.model, "selector network file")->required();
    sub_cp->add_option("--data", cp.data, "dataset")->required();
    sub_cp->add_option("--label-column", cp.label_column, "CSV label column");
    sub_cp->add_option("--out", cp.out, "patterns file")->required();
    sub_cp->callback([&] { run_capture_patterns(cp); });

    RetrainPocOpts rp;
    auto* sub_rp = app.add_subcommand(
        "retrain-poc", "phase 4: masked quantitative-only re-training of a network copy");
    configure(sub_rp);
    sub_rp->add_option("--selector", rp.selector, "frozen selector network")->required();
    sub_rp->add_option("--estimator", rp.estimator, "estimator network to re-train")
        ->required();
    sub_rp->add_option("--data", rp.data, "re-training dataset")->required();
    sub_rp->add_option("--patterns", rp.patterns,
                       "patterns file (captured from the selector when omitted)");
    sub_rp->add_option("--val", rp.val, "validation dataset");
    sub_rp->add_option("--label-column", rp.label_column, "CSV label column");
    sub_rp->add_option("--epochs", rp.epochs, "re-training epochs");
    sub_rp->add_option("--lr", rp.lr, "learning rate");
    sub_rp->add_option("--batch", rp.batch, "mini-batch size");
    sub_rp->add_option("--seed", rp.seed, "shuffle seed");
    sub_rp->add_option("--out", rp.out, "re-trained model file")->required();
    sub_rp->add_option("--history", rp.history, "metrics CSV");
    sub_rp->add_option("--baseline-out", rp.baseline_out,
                       "also run traditional SGD on the same samples, save here");
    sub_rp->add_option("--baseline-history", rp.baseline_history, "baseline metrics CSV");
    sub_rp->callback([&] { run_retrain_poc(rp); });

    PatternTraceOpts pt;
    auto* sub_pt = app.add_subcommand(
        "pattern-trace", "per-epoch activation-pattern stability trace");
    configure(sub_pt);
    sub_pt->add_option("--data", pt.data, "training dataset")->required();
    sub_pt->add_option("--val", pt.val, "validation dataset")->required();
    sub_pt->add_option("--label-column", pt.label_column, "CSV label column");
    sub_pt->add_option("--spec", pt.spec, "layer sizes")->required()->delimiter(',');
    sub_pt->add_option("--seed", pt.seed, "init + shuffle seed");
    sub_pt->add_option("--epochs", pt.epochs, "training epochs");
    sub_pt->add_option("--lr", pt.lr, "learning rate");
    sub_pt->add_option("--batch", pt.batch, "mini-batch size");
    sub_pt->add_option("--out", pt.out, "trace CSV")->required();
    sub_pt->callback([&] { run_pattern_trace(pt); });

    BuildEstimatorOpts be;
    auto* sub_be = app.add_subcommand(
        "build-estimator", "enumerate paths and initialize path weights from a network");
    configure(sub_be);
    sub_be->add_option("--model", be.model, "network file")->required();
    sub_be->add_option("--out", be.out, "estimator file")->required();
    sub_be->add_option("--cap", be.cap, "path count cap");
    sub_be->callback([&] { run_build_estimator(be); });

    TrainEstimatorOpts te;
    auto* sub_te = app.add_subcommand("train-estimator",
                                      "train the path-weight estimator (sgd or direct)");
    configure(sub_te);
    sub_te->add_option("--method", te.method, "sgd | direct");
    sub_te->add_option("--estimator", te.estimator, "estimator file")->required();
    sub_te->add_option("--selector", te.selector, "selector network for pattern capture");
    sub_te->add_option("--patterns", te.patterns, "patterns file");
    sub_te->add_option("--data", te.data, "training dataset")->required();
    sub_te->add_option("--val", te.val, "validation dataset");
    sub_te->add_option("--label-column", te.label_column, "CSV label column");
    sub_te->add_option("--epochs", te.epochs, "sgd epochs");
    sub_te->add_option("--lr", te.lr, "sgd learning rate");
    sub_te->add_option("--batch", te.batch, "sgd mini-batch size");
    sub_te->add_option("--seed", te.seed, "sgd shuffle seed");
    sub_te->add_option("--loss", te.loss, "sgd loss: cce | mse");
    sub_te->add_option("--ridge", te.ridge, "direct-solver ridge");
    sub_te->add_option("--out", te.out, "output estimator file")->required();
    sub_te->add_option("--history", te.history, "metrics CSV (sgd only)");
    sub_te->callback([&] { run_train_estimator(te); });

    MergeOpts mg;
    auto* sub_mg = app.add_subcommand("merge", "parameter-wise weighted average of two estimators");
    configure(sub_mg);
    sub_mg->add_option("--a", mg.a, "first estimator")->required();
    sub_mg->add_option("--b", mg.b, "second estimator")->required();
    sub_mg->add_option("--merge_alpha", mg.merge_alpha, "weight of the first estimator");
    sub_mg->add_option("--out", mg.out, "merged estimator file")->required();
    sub_mg->callback([&] { run_merge(mg); });

    FederatedSimOpts fs;
    auto* sub_fs = app.add_subcommand("federated-sim",
                                      "in-process federated averaging over K shards");
    configure(sub_fs);
    sub_fs->add_option("--nodes", fs.nodes, "number of nodes");
    sub_fs->add_option("--rounds", fs.rounds, "federated rounds");
    sub_fs->add_option("--estimator", fs.estimator, "global estimator file")->required();
    sub_fs->add_option("--selector", fs.selector, "selector network for pattern capture");
    sub_fs->add_option("--patterns", fs.patterns, "patterns file");
    sub_fs->add_option("--data", fs.data, "dataset split across nodes")->required();
    sub_fs->add_option("--val", fs.val, "validation dataset");
    sub_fs->add_option("--label-column", fs.label_column, "CSV label column");
    sub_fs->add_option("--method", fs.method, "sgd | direct");
    sub_fs->add_option("--epochs", fs.epochs, "sgd epochs per round");
    sub_fs->add_option("--lr", fs.lr, "sgd learning rate");
    sub_fs->add_option("--batch", fs.batch, "sgd mini-batch size");
    sub_fs->add_option("--seed", fs.seed, "sgd shuffle seed");
    sub_fs->add_option("--loss", fs.loss, "sgd loss: cce | mse");
    sub_fs->add_option("--ridge", fs.ridge, "direct-solver ridge");
    sub_fs->add_option("--out", fs.out, "merged estimator file")->required();
    sub_fs->callback([&] { run_federated_sim(fs); });

    EvalOpts ev;
    auto* sub_ev = app.add_subcommand("eval", "accuracy + CCE of a saved model on a dataset");
    configure(sub_ev);
    sub_ev->add_option("--model", ev.model, "network or estimator file")->required();
    sub_ev->add_option("--selector", ev.selector,
                       "selector network (masked / estimator evaluation)");
    sub_ev->add_option("--data", ev.data, "dataset")->required();
    sub_ev->add_option("--label-column", ev.label_column, "CSV label column");
    sub_ev->callback([&] { run_eval(ev); });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_files(std::move(args));
        std::reverse(args.begin(), args.end());  // parse(vector) takes reversed args
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
