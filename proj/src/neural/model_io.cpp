#include "ofdmdet/model_io.hpp"

#include <stdexcept>

#include "ofdmdet/constellation.hpp"
#include "ofdmdet/ioutil.hpp"
#include "ofdmdet/json_util.hpp"

namespace ofdmdet {

namespace {

using nlohmann::json;

json config_to_json(const OfdmConfig& c) {
    return json{{"subcarriers", c.subcarriers},
                {"cyclic_prefix", c.cyclic_prefix},
                {"pilot_count", c.pilot_count},
                {"modulation", modulation_name(c.modulation)},
                {"symbol_duration", c.symbol_duration}};
}

OfdmConfig config_from_json(const json& j, const std::string& ctx) {
    jsonu::reject_unknown_keys(
        j, {"subcarriers", "cyclic_prefix", "pilot_count", "modulation", "symbol_duration"}, ctx);
    OfdmConfig c;
    c.subcarriers = jsonu::require<std::size_t>(j, "subcarriers", ctx);
    c.cyclic_prefix = jsonu::require<std::size_t>(j, "cyclic_prefix", ctx);
    c.pilot_count = jsonu::require<std::size_t>(j, "pilot_count", ctx);
    c.modulation = modulation_from_name(jsonu::require<std::string>(j, "modulation", ctx));
    c.symbol_duration = jsonu::require<double>(j, "symbol_duration", ctx);
    c.validate();
    return c;
}

json train_to_json(const TrainConfig& t) {
    return json{{"optimizer", optimizer_name(t.optimizer)},
                {"learning_rate", t.learning_rate},
                {"lr_drop_factor", t.lr_drop_factor},
                {"lr_drop_period", t.lr_drop_period},
                {"weight_decay", t.weight_decay},
                {"gradient_threshold", t.gradient_threshold},
                {"minibatch", t.minibatch},
                {"max_epochs", t.max_epochs},
                {"seed", t.seed}};
}

TrainConfig train_from_json(const json& j, const std::string& ctx) {
    jsonu::reject_unknown_keys(j,
                               {"optimizer", "learning_rate", "lr_drop_factor", "lr_drop_period",
                                "weight_decay", "gradient_threshold", "minibatch", "max_epochs",
                                "seed"},
                               ctx);
    TrainConfig t;
    t.optimizer = optimizer_from_name(jsonu::require<std::string>(j, "optimizer", ctx));
    t.learning_rate = jsonu::require<double>(j, "learning_rate", ctx);
    t.lr_drop_factor = jsonu::require<double>(j, "lr_drop_factor", ctx);
    t.lr_drop_period = jsonu::require<std::size_t>(j, "lr_drop_period", ctx);
    t.weight_decay = jsonu::require<double>(j, "weight_decay", ctx);
    t.gradient_threshold = jsonu::require<double>(j, "gradient_threshold", ctx);
    t.minibatch = jsonu::require<std::size_t>(j, "minibatch", ctx);
    t.max_epochs = jsonu::require<std::size_t>(j, "max_epochs", ctx);
    t.seed = jsonu::require<std::uint64_t>(j, "seed", ctx);
    t.validate();
    return t;
}

json span_to_json(std::span<const double> s) {
    return json(std::vector<double>(s.begin(), s.end()));
}

void fill_span(std::span<double> dst, const json& j, const char* key, const std::string& ctx) {
    const auto values = jsonu::require<std::vector<double>>(j, key, ctx);
    if (values.size() != dst.size())
        throw std::runtime_error(ctx + ": \"" + key + "\" has " + std::to_string(values.size()) +
                                 " entries, expected " + std::to_string(dst.size()));
    std::copy(values.begin(), values.end(), dst.begin());
}

json model_to_json(const LstmParams& p) {
    return json{{"hidden", p.shape.hidden},
                {"feature", p.shape.feature},
                {"output", p.shape.output},
                {"w_f", span_to_json(p.w_gate(Gate::Forget))},
                {"w_i", span_to_json(p.w_gate(Gate::Input))},
                {"w_c", span_to_json(p.w_gate(Gate::Candidate))},
                {"w_o", span_to_json(p.w_gate(Gate::Output))},
                {"b_f", span_to_json(p.b_gate(Gate::Forget))},
                {"b_i", span_to_json(p.b_gate(Gate::Input))},
                {"b_c", span_to_json(p.b_gate(Gate::Candidate))},
                {"b_o", span_to_json(p.b_gate(Gate::Output))},
                {"w_out", span_to_json(p.w_out())},
                {"b_out", span_to_json(p.b_out())}};
}

LstmParams model_from_json(const json& j, const std::string& ctx) {
    jsonu::reject_unknown_keys(j,
                               {"hidden", "feature", "output", "w_f", "w_i", "w_c", "w_o", "b_f",
                                "b_i", "b_c", "b_o", "w_out", "b_out"},
                               ctx);
    LstmShape shape;
    shape.hidden = jsonu::require<std::size_t>(j, "hidden", ctx);
    shape.feature = jsonu::require<std::size_t>(j, "feature", ctx);
    shape.output = jsonu::require<std::size_t>(j, "output", ctx);
    if (shape.hidden == 0 || shape.feature == 0 || shape.output == 0)
        throw std::runtime_error(ctx + ": zero model dimension");
    LstmParams p = LstmParams::zeros(shape);
    fill_span(p.w_gate(Gate::Forget), j, "w_f", ctx);
    fill_span(p.w_gate(Gate::Input), j, "w_i", ctx);
    fill_span(p.w_gate(Gate::Candidate), j, "w_c", ctx);
    fill_span(p.w_gate(Gate::Output), j, "w_o", ctx);
    fill_span(p.b_gate(Gate::Forget), j, "b_f", ctx);
    fill_span(p.b_gate(Gate::Input), j, "b_i", ctx);
    fill_span(p.b_gate(Gate::Candidate), j, "b_c", ctx);
    fill_span(p.b_gate(Gate::Output), j, "b_o", ctx);
    fill_span(p.w_out(), j, "w_out", ctx);
    fill_span(p.b_out(), j, "b_out", ctx);
    return p;
}

json history_to_json(const TrainingState& s) {
    return json{{"steps", s.step},
                {"best_epoch", s.best_epoch},
                {"train_gamma", s.train_gamma},
                {"val_psi", s.val_psi}};
}

TrainingState history_from_json(const json& j, const std::string& ctx) {
    jsonu::reject_unknown_keys(j, {"steps", "best_epoch", "train_gamma", "val_psi"}, ctx);
    TrainingState s;
    s.step = jsonu::require<std::uint64_t>(j, "steps", ctx);
    s.best_epoch = jsonu::require<std::size_t>(j, "best_epoch", ctx);
    s.train_gamma = jsonu::require<std::vector<double>>(j, "train_gamma", ctx);
    s.val_psi = jsonu::require<std::vector<double>>(j, "val_psi", ctx);
    return s;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    json models = json::array();
    for (const auto& m : checkpoint.bank.models) models.push_back(model_to_json(m));
    json history = json::array();
    for (const auto& h : checkpoint.history) history.push_back(history_to_json(h));
    const json doc{{"version", kCheckpointVersion},
                   {"config", config_to_json(checkpoint.config)},
                   {"train", train_to_json(checkpoint.train)},
                   {"layout",
                    {{"timesteps", checkpoint.bank.layout.timesteps},
                     {"features_per_step", checkpoint.bank.layout.features_per_step}}},
                   {"models", models},
                   {"history", history}};
    write_file_atomic(path, doc.dump());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string ctx = "checkpoint " + path.string();
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error(ctx + ": parse error: " + e.what());
    }
    jsonu::reject_unknown_keys(doc, {"version", "config", "train", "layout", "models", "history"},
                               ctx);
    const int version = jsonu::require<int>(doc, "version", ctx);
    if (version != kCheckpointVersion)
        throw std::runtime_error(ctx + ": unsupported version " + std::to_string(version));

    Checkpoint cp;
    cp.config = config_from_json(doc.at("config"), ctx + " config");
    cp.train = train_from_json(doc.at("train"), ctx + " train");

    const json& layout = doc.at("layout");
    jsonu::reject_unknown_keys(layout, {"timesteps", "features_per_step"}, ctx + " layout");
    cp.bank.layout.timesteps = jsonu::require<std::size_t>(layout, "timesteps", ctx);
    cp.bank.layout.features_per_step = jsonu::require<std::size_t>(layout, "features_per_step", ctx);

    const json& models = doc.at("models");
    if (!models.is_array() || models.empty())
        throw std::runtime_error(ctx + ": \"models\" must be a non-empty array");
    for (std::size_t g = 0; g < models.size(); ++g)
        cp.bank.models.push_back(model_from_json(models[g], ctx + " model " + std::to_string(g)));
    cp.bank.validate(cp.config.data_bit_count());

    const json& history = doc.at("history");
    if (!history.is_array()) throw std::runtime_error(ctx + ": \"history\" must be an array");
    for (std::size_t g = 0; g < history.size(); ++g)
        cp.history.push_back(history_from_json(history[g], ctx + " history " + std::to_string(g)));
    return cp;
}

} // namespace ofdmdet
