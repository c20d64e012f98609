#include "ofdmdet/config_io.hpp"

#include <stdexcept>

#include "ofdmdet/constellation.hpp"
#include "ofdmdet/ioutil.hpp"
#include "ofdmdet/json_util.hpp"

namespace ofdmdet {

namespace {

using nlohmann::json;

void parse_ofdm(const json& j, OfdmConfig& c, const std::string& ctx) {
    jsonu::reject_unknown_keys(
        j, {"subcarriers", "cyclic_prefix", "pilot_count", "modulation", "symbol_duration"}, ctx);
    c.subcarriers = jsonu::optional_or<std::size_t>(j, "subcarriers", c.subcarriers, ctx);
    c.cyclic_prefix = jsonu::optional_or<std::size_t>(j, "cyclic_prefix", c.cyclic_prefix, ctx);
    c.pilot_count = jsonu::optional_or<std::size_t>(j, "pilot_count", c.pilot_count, ctx);
    if (j.contains("modulation"))
        c.modulation = modulation_from_name(jsonu::require<std::string>(j, "modulation", ctx));
    c.symbol_duration = jsonu::optional_or<double>(j, "symbol_duration", c.symbol_duration, ctx);
}

void parse_channel(const json& j, ChannelSpec& c, const std::string& ctx) {
    jsonu::reject_unknown_keys(j, {"tau", "max_delay"}, ctx);
    c.tau = jsonu::optional_or<double>(j, "tau", c.tau, ctx);
    c.max_delay = jsonu::optional_or<std::size_t>(j, "max_delay", c.max_delay, ctx);
}

void parse_train(const json& j, TrainConfig& t, const std::string& ctx) {
    jsonu::reject_unknown_keys(j,
                               {"optimizer", "learning_rate", "lr_drop_factor", "lr_drop_period",
                                "weight_decay", "gradient_threshold", "minibatch", "max_epochs",
                                "seed"},
                               ctx);
    if (j.contains("optimizer"))
        t.optimizer = optimizer_from_name(jsonu::require<std::string>(j, "optimizer", ctx));
    t.learning_rate = jsonu::optional_or<double>(j, "learning_rate", t.learning_rate, ctx);
    t.lr_drop_factor = jsonu::optional_or<double>(j, "lr_drop_factor", t.lr_drop_factor, ctx);
    t.lr_drop_period = jsonu::optional_or<std::size_t>(j, "lr_drop_period", t.lr_drop_period, ctx);
    t.weight_decay = jsonu::optional_or<double>(j, "weight_decay", t.weight_decay, ctx);
    t.gradient_threshold =
        jsonu::optional_or<double>(j, "gradient_threshold", t.gradient_threshold, ctx);
    t.minibatch = jsonu::optional_or<std::size_t>(j, "minibatch", t.minibatch, ctx);
    t.max_epochs = jsonu::optional_or<std::size_t>(j, "max_epochs", t.max_epochs, ctx);
    t.seed = jsonu::optional_or<std::uint64_t>(j, "seed", t.seed, ctx);
}

void parse_train_data(const json& j, TrainSpec& t, const std::string& ctx) {
    jsonu::reject_unknown_keys(j, {"n_frames", "snrs_db", "hidden", "layout", "share_groups"}, ctx);
    t.n_frames = jsonu::optional_or<std::size_t>(j, "n_frames", t.n_frames, ctx);
    if (j.contains("snrs_db")) t.snrs_db = jsonu::require<std::vector<double>>(j, "snrs_db", ctx);
    t.hidden = jsonu::optional_or<std::size_t>(j, "hidden", t.hidden, ctx);
    t.share_groups = jsonu::optional_or<bool>(j, "share_groups", t.share_groups, ctx);
    if (j.contains("layout")) {
        const json& l = j.at("layout");
        jsonu::reject_unknown_keys(l, {"timesteps", "features_per_step"}, ctx + " layout");
        t.layout.timesteps =
            jsonu::optional_or<std::size_t>(l, "timesteps", t.layout.timesteps, ctx);
        t.layout.features_per_step = jsonu::optional_or<std::size_t>(
            l, "features_per_step", t.layout.features_per_step, ctx);
    }
}

} // namespace

ExperimentSpec parse_experiment_spec(const std::string& content, const std::string& context) {
    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::exception& e) {
        throw std::runtime_error(context + ": parse error: " + e.what());
    }
    jsonu::reject_unknown_keys(doc,
                               {"name", "ofdm", "channel", "detectors", "snr_grid_db",
                                "frames_per_point", "group_bits", "seed", "channel_mode", "train",
                                "train_data"},
                               context);

    ExperimentSpec spec;
    spec.name = jsonu::optional_or<std::string>(doc, "name", "custom", context);
    if (doc.contains("ofdm")) parse_ofdm(doc.at("ofdm"), spec.config, context + " ofdm");
    if (doc.contains("channel")) parse_channel(doc.at("channel"), spec.channel, context + " channel");
    if (doc.contains("detectors")) {
        spec.detectors.clear();
        for (const auto& name : jsonu::require<std::vector<std::string>>(doc, "detectors", context))
            spec.detectors.push_back(detector_from_name(name));
    }
    if (doc.contains("snr_grid_db"))
        spec.snr_grid_db = jsonu::require<std::vector<double>>(doc, "snr_grid_db", context);
    if (spec.snr_grid_db.empty())
        for (double s = 0.0; s <= 20.0 + 1e-9; s += 2.5) spec.snr_grid_db.push_back(s);
    spec.frames_per_point =
        jsonu::optional_or<std::size_t>(doc, "frames_per_point", spec.frames_per_point, context);
    spec.group_bits = jsonu::optional_or<std::size_t>(doc, "group_bits", spec.group_bits, context);
    spec.seed = jsonu::optional_or<std::uint64_t>(doc, "seed", spec.seed, context);
    if (doc.contains("channel_mode")) {
        const auto mode = jsonu::require<std::string>(doc, "channel_mode", context);
        if (mode == "cyclic")
            spec.mode = ChannelMode::CyclicPerBlock;
        else if (mode == "linear")
            spec.mode = ChannelMode::LinearOverFrame;
        else
            throw std::runtime_error(context + ": unknown channel_mode \"" + mode + "\"");
    }
    spec.train.config.seed = spec.seed;  // default; an explicit train.seed overrides below
    if (doc.contains("train")) parse_train(doc.at("train"), spec.train.config, context + " train");
    if (doc.contains("train_data"))
        parse_train_data(doc.at("train_data"), spec.train, context + " train_data");
    spec.validate();
    spec.train.config.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    return parse_experiment_spec(read_file(path), "config " + path.string());
}

} // namespace ofdmdet
