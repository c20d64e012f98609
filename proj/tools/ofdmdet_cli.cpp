// Command-line front end: dataset generation, training, evaluation, the
// built-in experiment sweeps, and crossing-table reports.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ofdmdet/config_io.hpp"
#include "ofdmdet/constellation.hpp"
#include "ofdmdet/dataset.hpp"
#include "ofdmdet/evaluate.hpp"
#include "ofdmdet/experiment.hpp"
#include "ofdmdet/ioutil.hpp"
#include "ofdmdet/kernels.hpp"
#include "ofdmdet/model_io.hpp"
#include "ofdmdet/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ofdmdet;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    // Link overrides.
    std::optional<std::size_t> pilots;
    std::optional<std::string> modulation;
    std::optional<std::size_t> cp;
    std::vector<double> snr_list;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment config (strict schema)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--pilots", args.pilots, "comb pilot count override");
    cmd->add_option("--modulation", args.modulation, "modulation override: qpsk|16qam");
    cmd->add_option("--cp", args.cp, "cyclic prefix length override");
    cmd->add_option("--snr", args.snr_list, "SNR grid override (dB list)")->delimiter(',');
}

ExperimentSpec resolve_spec(const CommonArgs& args) {
    ExperimentSpec spec;
    if (!args.config_path.empty()) {
        spec = load_experiment_spec(args.config_path);
    } else {
        spec.name = "custom";
        for (double s = 0.0; s <= 20.0 + 1e-9; s += 2.5) spec.snr_grid_db.push_back(s);
    }
    if (args.seed) {
        spec.seed = *args.seed;
        spec.train.config.seed = *args.seed;
    }
    if (args.pilots) spec.config.pilot_count = *args.pilots;
    if (args.modulation) spec.config.modulation = modulation_from_name(*args.modulation);
    if (args.cp) spec.config.cyclic_prefix = *args.cp;
    if (!args.snr_list.empty()) spec.snr_grid_db = args.snr_list;
    spec.validate();
    return spec;
}

DatasetSpec dataset_spec_of(const ExperimentSpec& spec) {
    DatasetSpec ds;
    ds.config = spec.config;
    ds.channel = spec.channel;
    ds.snrs_db = spec.train.snrs_db;
    ds.n_frames = spec.train.n_frames;
    ds.group_bits = spec.group_bits;
    ds.seed = spec.train.config.seed;
    ds.mode = spec.mode;
    return ds;
}

int cmd_dataset(const CommonArgs& args) {
    const ExperimentSpec spec = resolve_spec(args);
    const GeneratedDataset data = generate_dataset(dataset_spec_of(spec));
    const fs::path path = fs::path(args.out_dir) / "dataset.bin";
    save_dataset(path, data);
    std::cout << "wrote " << path.string() << " (" << data.train_frames.size() << " train / "
              << data.val_frames.size() << " validation frames, " << data.groups()
              << " bit groups per frame)\n";
    return 0;
}

int cmd_train(const CommonArgs& args, const std::string& dataset_path) {
    const ExperimentSpec spec = resolve_spec(args);
    GeneratedDataset data;
    if (!dataset_path.empty()) {
        data = load_dataset(dataset_path);
        std::cout << "loaded " << dataset_path << "\n";
    } else {
        std::cout << "generating training data (" << spec.train.n_frames << " frames)\n";
        data = generate_dataset(dataset_spec_of(spec));
    }

    LstmShape shape;
    shape.hidden = spec.train.hidden;
    shape.feature = spec.train.layout.features_per_step;
    shape.output = data.spec.group_bits;

    std::vector<TrainingState> history;
    std::cout << "training " << data.groups() << " group models ("
              << (spec.train.share_groups ? "group-shared weights, " : "")
              << optimizer_name(spec.train.config.optimizer) << ", "
              << spec.train.config.max_epochs << " epochs, kernels: " << kernels::active_name()
              << ")\n";
    const ModelBank bank =
        spec.train.share_groups
            ? train_bank_shared(data.train_examples(), data.val_examples(), spec.train.config,
                                shape, spec.train.layout, data.groups(),
                                pilot_sequence(data.spec.config.subcarriers),
                                data.spec.config.modulation, &history)
            : train_bank(data.train_examples(), data.val_examples(), spec.train.config, shape,
                         spec.train.layout, data.groups(), &history);

    Checkpoint cp;
    cp.config = data.spec.config;
    cp.train = spec.train.config;
    cp.bank = bank;
    cp.history = std::move(history);
    const fs::path path = fs::path(args.out_dir) / "checkpoint.json";
    save_checkpoint(path, cp);
    for (std::size_t g = 0; g < cp.history.size(); ++g)
        std::cout << "  group " << g << ": best epoch " << cp.history[g].best_epoch
                  << ", validation loss " << cp.history[g].val_psi[cp.history[g].best_epoch - 1]
                  << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& checkpoint_path,
             std::vector<std::string> detector_names) {
    ExperimentSpec spec = resolve_spec(args);
    if (!detector_names.empty()) {
        spec.detectors.clear();
        for (const auto& n : detector_names) spec.detectors.push_back(detector_from_name(n));
    }

    std::optional<Checkpoint> cp;
    if (!checkpoint_path.empty()) {
        cp = load_checkpoint(checkpoint_path);
        if (cp->config.subcarriers != spec.config.subcarriers ||
            cp->config.modulation != spec.config.modulation)
            throw std::runtime_error("checkpoint was trained for a different link configuration");
    }

    std::string csv = ber_csv_header();
    for (DetectorKind det : spec.detectors) {
        const ModelBank* bank = nullptr;
        if (det == DetectorKind::Ddlsd) {
            if (!cp) throw std::runtime_error("eval: --checkpoint is required for the ddlsd detector");
            bank = &cp->bank;
        }
        std::cout << "evaluating " << detector_name(det) << " over " << spec.snr_grid_db.size()
                  << " SNR points x " << spec.frames_per_point << " frames\n";
        const BerCurve curve = evaluate_ber(det, spec, bank);
        append_csv_rows(csv, curve);
    }
    const fs::path path = fs::path(args.out_dir) / "results.csv";
    write_file_atomic(path, csv);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& name) {
    std::vector<ExperimentSpec> specs;
    std::string experiment = name;
    if (!name.empty() && name != "custom") {
        const std::uint64_t seed = args.seed.value_or(1);
        specs = built_in_experiment(name, seed);
        // Built-ins still honor the link overrides per arm.
        for (auto& s : specs) {
            if (args.pilots) s.config.pilot_count = *args.pilots;
            if (args.modulation) s.config.modulation = modulation_from_name(*args.modulation);
            if (args.cp) s.config.cyclic_prefix = *args.cp;
            if (!args.snr_list.empty()) s.snr_grid_db = args.snr_list;
        }
    } else {
        if (args.config_path.empty())
            throw std::runtime_error("sweep: give a built-in name (fig3_pilots|fig4_cp|fig5_mod) "
                                     "or --config for a custom spec");
        experiment = "custom";
        specs = {resolve_spec(args)};
    }
    const ExperimentResult result = run_experiment(experiment, specs, args.out_dir);
    std::cout << "wrote " << result.csv_path.string() << "\n"
              << "wrote " << result.manifest_path.string() << "\n"
              << "wrote " << result.plot_path.string() << "\n";

    const auto records = parse_results_csv(read_file(result.csv_path));
    const auto rows = build_report(records, default_report_thresholds());
    std::cout << "\n" << render_report(rows, default_report_thresholds());
    return 0;
}

int cmd_report(const CommonArgs& args, const std::vector<std::string>& csv_paths) {
    std::vector<CsvRecord> records;
    for (const auto& p : csv_paths) {
        const auto part = parse_results_csv(read_file(p));
        records.insert(records.end(), part.begin(), part.end());
    }
    const auto rows = build_report(records, default_report_thresholds());
    const std::string table = render_report(rows, default_report_thresholds());
    std::cout << table;
    const fs::path path = fs::path(args.out_dir) / "report.txt";
    write_file_atomic(path, table);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDM link simulator and detection benchmark"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string dataset_path;
    std::string checkpoint_path;
    std::vector<std::string> detector_names;
    std::string sweep_name;
    std::vector<std::string> csv_paths;

    CLI::App* dataset = app.add_subcommand("dataset", "generate a training dataset file");
    add_common(dataset, args);

    CLI::App* train = app.add_subcommand("train", "train the learned detector to a checkpoint");
    add_common(train, args);
    train->add_option("--dataset", dataset_path, "dataset file (generated on the fly if omitted)");

    CLI::App* eval = app.add_subcommand("eval", "evaluate detectors to a BER curve CSV");
    add_common(eval, args);
    eval->add_option("--checkpoint", checkpoint_path, "trained model checkpoint (for ddlsd)");
    eval->add_option("--detectors", detector_names, "detectors: ls,mmse,ddlsd,oracle")
        ->delimiter(',');

    CLI::App* sweep = app.add_subcommand("sweep", "run a built-in or custom experiment");
    add_common(sweep, args);
    sweep->add_option("name", sweep_name, "fig3_pilots | fig4_cp | fig5_mod | custom");

    CLI::App* report = app.add_subcommand("report", "crossing-SNR table from results CSVs");
    add_common(report, args);
    report->add_option("csv", csv_paths, "results.csv paths")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(dataset)) return cmd_dataset(args);
        if (app.got_subcommand(train)) return cmd_train(args, dataset_path);
        if (app.got_subcommand(eval)) return cmd_eval(args, checkpoint_path, detector_names);
        if (app.got_subcommand(sweep)) return cmd_sweep(args, sweep_name);
        if (app.got_subcommand(report)) return cmd_report(args, csv_paths);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
