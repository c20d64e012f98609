#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ofdmdet/channel.hpp"
#include "ofdmdet/lstm.hpp"
#include "ofdmdet/ofdm.hpp"

namespace ofdmdet {

// Channel family used by datasets and experiments: exponential power delay
// profile with decay tau over taps 0..max_delay (max_delay = 0 is flat).
struct ChannelSpec {
    double tau = 2.0;
    std::size_t max_delay = 15;

    PowerDelayProfile profile() const { return PowerDelayProfile::exponential(tau, max_delay); }
};

// Everything drawn for one simulated frame.
struct FrameDraw {
    OfdmFrame frame;            // transmit-side content, including the data bits
    ChannelRealization channel;
    NoiseSpec noise;            // calibrated to the requested SNR for this frame
    cvec tx_time;               // serialized transmit frame
    cvec rx_time;               // after channel and noise
};

// Deterministic frame synthesis from split substreams keyed by
// (seed, snr_slot, frame_index): bits, channel taps, and noise each draw from
// their own stream, so any frame is reproducible in isolation and every
// detector can be shown the identical realization.
FrameDraw synthesize_frame(const OfdmConfig& config, const PowerDelayProfile& pdp, double snr_db,
                           std::uint64_t seed, std::uint64_t snr_slot, std::uint64_t frame_index,
                           ChannelMode mode);

struct DatasetSpec {
    OfdmConfig config;
    ChannelSpec channel;
    std::vector<double> snrs_db = {20.0};  // one entry = fixed SNR; several = per-frame uniform mix
    std::size_t n_frames = 10000;
    std::size_t group_bits = 16;
    std::uint64_t seed = 1;
    ChannelMode mode = ChannelMode::LinearOverFrame;

    void validate() const;
};

// One stored frame: the network features plus the full data-bit vector
// (labels for every group are sliced out of `bits` on expansion).
struct FrameRecord {
    std::vector<double> features;
    std::vector<std::uint8_t> bits;
};

struct GeneratedDataset {
    DatasetSpec spec;
    std::vector<FrameRecord> train_frames;
    std::vector<FrameRecord> val_frames;

    std::size_t groups() const;
    // One TrainingExample per (frame, bit group), in frame-major order.
    std::vector<TrainingExample> train_examples() const;
    std::vector<TrainingExample> val_examples() const;
};

// Frame pipeline: random bits -> build_frame -> modulate -> fresh channel ->
// noise at the (possibly per-frame drawn) SNR -> demodulate -> features.
// Frames split 4:1 train:validation in generation order.
GeneratedDataset generate_dataset(const DatasetSpec& spec);

// Compact little-endian binary file (JSON header + raw frame records).
void save_dataset(const std::filesystem::path& path, const GeneratedDataset& dataset);
GeneratedDataset load_dataset(const std::filesystem::path& path);

std::vector<TrainingExample> expand_examples(const std::vector<FrameRecord>& frames,
                                             std::size_t group_bits);

} // namespace ofdmdet
