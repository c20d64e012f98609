#include "ofdmdet/dataset.hpp"

#include <cstring>
#include <stdexcept>

#include "ofdmdet/constellation.hpp"
#include "ofdmdet/ioutil.hpp"
#include "ofdmdet/json_util.hpp"

namespace ofdmdet {

namespace {

// Stream-id slot reserved for dataset generation, outside the range of
// evaluation SNR grid indices, so training data never reuses an evaluation
// realization.
constexpr std::uint64_t kDatasetSnrSlot = 0xFFFF;

} // namespace

FrameDraw synthesize_frame(const OfdmConfig& config, const PowerDelayProfile& pdp, double snr_db,
                           std::uint64_t seed, std::uint64_t snr_slot, std::uint64_t frame_index,
                           ChannelMode mode) {
    FrameDraw draw;

    RngStream bit_rng(seed, make_stream_id(stream_tag::bits, snr_slot, frame_index));
    std::vector<std::uint8_t> bits(config.data_bit_count());
    for (auto& b : bits) b = static_cast<std::uint8_t>(bit_rng.next_below(2));

    draw.frame = build_frame(bits, pilot_sequence(config.subcarriers), config);
    draw.tx_time = serialize_frame(draw.frame, config);

    RngStream channel_rng(seed, make_stream_id(stream_tag::channel, snr_slot, frame_index));
    draw.channel = draw_channel(pdp, channel_rng);

    draw.noise = calibrate_noise(snr_db, draw.tx_time, draw.channel);

    RngStream noise_rng(seed, make_stream_id(stream_tag::noise, snr_slot, frame_index));
    draw.rx_time = apply_channel(draw.tx_time, draw.channel, draw.noise, noise_rng, mode,
                                 config.block_length());
    return draw;
}

void DatasetSpec::validate() const {
    config.validate();
    if (snrs_db.empty()) throw std::invalid_argument("dataset: no training SNR given");
    if (n_frames < 5) throw std::invalid_argument("dataset: need at least 5 frames for a 4:1 split");
    if (group_bits == 0 || config.data_bit_count() % group_bits != 0)
        throw std::invalid_argument("dataset: group size must divide the data bit count");
}

std::size_t GeneratedDataset::groups() const {
    return spec.config.data_bit_count() / spec.group_bits;
}

std::vector<TrainingExample> expand_examples(const std::vector<FrameRecord>& frames,
                                             std::size_t group_bits) {
    std::vector<TrainingExample> out;
    if (frames.empty()) return out;
    const std::size_t total_bits = frames.front().bits.size();
    if (group_bits == 0 || total_bits % group_bits != 0)
        throw std::invalid_argument("expand_examples: group size must divide the data bit count");
    const std::size_t groups = total_bits / group_bits;
    out.reserve(frames.size() * groups);
    for (const auto& fr : frames) {
        if (fr.bits.size() != total_bits)
            throw std::invalid_argument("expand_examples: inconsistent frame bit counts");
        for (std::size_t g = 0; g < groups; ++g) {
            TrainingExample ex;
            ex.features = fr.features;
            ex.labels.assign(fr.bits.begin() + static_cast<std::ptrdiff_t>(g * group_bits),
                             fr.bits.begin() + static_cast<std::ptrdiff_t>((g + 1) * group_bits));
            ex.group_index = g;
            out.push_back(std::move(ex));
        }
    }
    return out;
}

std::vector<TrainingExample> GeneratedDataset::train_examples() const {
    return expand_examples(train_frames, spec.group_bits);
}

std::vector<TrainingExample> GeneratedDataset::val_examples() const {
    return expand_examples(val_frames, spec.group_bits);
}

GeneratedDataset generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    const PowerDelayProfile pdp = spec.channel.profile();
    const std::size_t n_train = spec.n_frames * 4 / 5;

    RngStream snr_rng(spec.seed, make_stream_id(stream_tag::snr_draw, kDatasetSnrSlot, 0));

    GeneratedDataset out;
    out.spec = spec;
    out.train_frames.reserve(n_train);
    out.val_frames.reserve(spec.n_frames - n_train);
    for (std::size_t i = 0; i < spec.n_frames; ++i) {
        const double snr_db = spec.snrs_db.size() == 1
                                  ? spec.snrs_db.front()
                                  : spec.snrs_db[snr_rng.next_below(spec.snrs_db.size())];
        const FrameDraw draw =
            synthesize_frame(spec.config, pdp, snr_db, spec.seed, kDatasetSnrSlot, i, spec.mode);

        const std::size_t block = spec.config.block_length();
        const cvec rx_pilot(draw.rx_time.begin(),
                            draw.rx_time.begin() + static_cast<std::ptrdiff_t>(block));
        const cvec rx_data(draw.rx_time.begin() + static_cast<std::ptrdiff_t>(block),
                           draw.rx_time.end());
        FrameRecord record;
        record.features =
            frame_features(ofdm_demodulate(rx_pilot, spec.config), ofdm_demodulate(rx_data, spec.config));
        record.bits = draw.frame.data_bits;
        (i < n_train ? out.train_frames : out.val_frames).push_back(std::move(record));
    }
    return out;
}

namespace {

constexpr char kMagic[8] = {'O', 'F', 'D', 'M', 'D', 'S', '1', '\n'};

using nlohmann::json;

void append_u64(std::string& buf, std::uint64_t v) {
    char raw[8];
    std::memcpy(raw, &v, 8);
    buf.append(raw, 8);
}

void append_frames(std::string& buf, const std::vector<FrameRecord>& frames) {
    for (const auto& fr : frames) {
        buf.append(reinterpret_cast<const char*>(fr.features.data()),
                   fr.features.size() * sizeof(double));
        buf.append(reinterpret_cast<const char*>(fr.bits.data()), fr.bits.size());
    }
}

} // namespace

void save_dataset(const std::filesystem::path& path, const GeneratedDataset& dataset) {
    const DatasetSpec& spec = dataset.spec;
    const json header{
        {"version", 1},
        {"ofdm",
         {{"subcarriers", spec.config.subcarriers},
          {"cyclic_prefix", spec.config.cyclic_prefix},
          {"pilot_count", spec.config.pilot_count},
          {"modulation", modulation_name(spec.config.modulation)},
          {"symbol_duration", spec.config.symbol_duration}}},
        {"channel", {{"tau", spec.channel.tau}, {"max_delay", spec.channel.max_delay}}},
        {"snrs_db", spec.snrs_db},
        {"n_frames", spec.n_frames},
        {"group_bits", spec.group_bits},
        {"seed", spec.seed},
        {"mode", spec.mode == ChannelMode::CyclicPerBlock ? "cyclic" : "linear"},
        {"train_frames", dataset.train_frames.size()},
        {"val_frames", dataset.val_frames.size()},
        {"feature_len", 4 * spec.config.subcarriers},
        {"bits_per_frame", spec.config.data_bit_count()}};
    const std::string header_str = header.dump();

    std::string buf;
    const std::size_t frame_bytes =
        4 * spec.config.subcarriers * sizeof(double) + spec.config.data_bit_count();
    buf.reserve(16 + header_str.size() +
                (dataset.train_frames.size() + dataset.val_frames.size()) * frame_bytes);
    buf.append(kMagic, sizeof(kMagic));
    append_u64(buf, header_str.size());
    buf += header_str;
    append_frames(buf, dataset.train_frames);
    append_frames(buf, dataset.val_frames);
    write_file_atomic(path, buf);
}

GeneratedDataset load_dataset(const std::filesystem::path& path) {
    const std::string ctx = "dataset " + path.string();
    const std::string buf = read_file(path);
    if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(ctx + ": not a dataset file");
    std::uint64_t header_len = 0;
    std::memcpy(&header_len, buf.data() + 8, 8);
    if (16 + header_len > buf.size()) throw std::runtime_error(ctx + ": truncated header");

    json header;
    try {
        header = json::parse(buf.substr(16, header_len));
    } catch (const json::exception& e) {
        throw std::runtime_error(ctx + ": header parse error: " + e.what());
    }
    jsonu::reject_unknown_keys(header,
                               {"version", "ofdm", "channel", "snrs_db", "n_frames", "group_bits",
                                "seed", "mode", "train_frames", "val_frames", "feature_len",
                                "bits_per_frame"},
                               ctx);
    if (jsonu::require<int>(header, "version", ctx) != 1)
        throw std::runtime_error(ctx + ": unsupported version");

    GeneratedDataset out;
    const json& ofdm = header.at("ofdm");
    jsonu::reject_unknown_keys(
        ofdm, {"subcarriers", "cyclic_prefix", "pilot_count", "modulation", "symbol_duration"}, ctx);
    out.spec.config.subcarriers = jsonu::require<std::size_t>(ofdm, "subcarriers", ctx);
    out.spec.config.cyclic_prefix = jsonu::require<std::size_t>(ofdm, "cyclic_prefix", ctx);
    out.spec.config.pilot_count = jsonu::require<std::size_t>(ofdm, "pilot_count", ctx);
    out.spec.config.modulation = modulation_from_name(jsonu::require<std::string>(ofdm, "modulation", ctx));
    out.spec.config.symbol_duration = jsonu::require<double>(ofdm, "symbol_duration", ctx);

    const json& channel = header.at("channel");
    jsonu::reject_unknown_keys(channel, {"tau", "max_delay"}, ctx);
    out.spec.channel.tau = jsonu::require<double>(channel, "tau", ctx);
    out.spec.channel.max_delay = jsonu::require<std::size_t>(channel, "max_delay", ctx);

    out.spec.snrs_db = jsonu::require<std::vector<double>>(header, "snrs_db", ctx);
    out.spec.n_frames = jsonu::require<std::size_t>(header, "n_frames", ctx);
    out.spec.group_bits = jsonu::require<std::size_t>(header, "group_bits", ctx);
    out.spec.seed = jsonu::require<std::uint64_t>(header, "seed", ctx);
    const std::string mode = jsonu::require<std::string>(header, "mode", ctx);
    if (mode == "cyclic")
        out.spec.mode = ChannelMode::CyclicPerBlock;
    else if (mode == "linear")
        out.spec.mode = ChannelMode::LinearOverFrame;
    else
        throw std::runtime_error(ctx + ": unknown channel mode \"" + mode + "\"");

    const auto n_train = jsonu::require<std::size_t>(header, "train_frames", ctx);
    const auto n_val = jsonu::require<std::size_t>(header, "val_frames", ctx);
    const auto feature_len = jsonu::require<std::size_t>(header, "feature_len", ctx);
    const auto bits_per_frame = jsonu::require<std::size_t>(header, "bits_per_frame", ctx);
    if (feature_len != 4 * out.spec.config.subcarriers ||
        bits_per_frame != out.spec.config.data_bit_count())
        throw std::runtime_error(ctx + ": header sizes inconsistent with the link config");

    const std::size_t frame_bytes = feature_len * sizeof(double) + bits_per_frame;
    const std::size_t payload_off = 16 + header_len;
    if (buf.size() != payload_off + (n_train + n_val) * frame_bytes)
        throw std::runtime_error(ctx + ": payload size mismatch");

    const char* p = buf.data() + payload_off;
    auto read_frames = [&](std::size_t count, std::vector<FrameRecord>& dst) {
        dst.resize(count);
        for (auto& fr : dst) {
            fr.features.resize(feature_len);
            std::memcpy(fr.features.data(), p, feature_len * sizeof(double));
            p += feature_len * sizeof(double);
            fr.bits.resize(bits_per_frame);
            std::memcpy(fr.bits.data(), p, bits_per_frame);
            p += bits_per_frame;
            for (std::uint8_t b : fr.bits)
                if (b > 1) throw std::runtime_error(ctx + ": corrupt bit payload");
        }
    };
    read_frames(n_train, out.train_frames);
    read_frames(n_val, out.val_frames);
    return out;
}

} // namespace ofdmdet
