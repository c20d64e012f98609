#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ofdmdet/dataset.hpp"
#include "ofdmdet/lstm.hpp"
#include "ofdmdet/training.hpp"

namespace ofdmdet {

enum class DetectorKind { Ls, Mmse, Ddlsd, Oracle };

const char* detector_name(DetectorKind d);
DetectorKind detector_from_name(const std::string& name);

// Training-side settings carried by an experiment (used when the detector set
// includes the learned detector).
struct TrainSpec {
    TrainConfig config;
    std::size_t n_frames = 10000;          // dataset size, split 4:1
    std::vector<double> snrs_db = {20.0};  // fixed training SNR by default
    std::size_t hidden = 16;
    SequenceLayout layout{2, 128};
    bool share_groups = false;             // pool groups via train_bank_shared
};

// One evaluation configuration: a named link setup, channel, detector set,
// SNR grid and trial budget.  Everything an evaluation or experiment needs.
struct ExperimentSpec {
    std::string name;
    OfdmConfig config;
    ChannelSpec channel;
    std::vector<DetectorKind> detectors{DetectorKind::Ls, DetectorKind::Mmse, DetectorKind::Ddlsd};
    std::vector<double> snr_grid_db;
    std::size_t frames_per_point = 5000;
    std::size_t group_bits = 16;  // exact-match group size (and learned-model output width)
    TrainSpec train;
    std::uint64_t seed = 1;
    ChannelMode mode = ChannelMode::LinearOverFrame;

    void validate() const;
};

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t total_bits = 0;
    std::uint64_t bit_errors = 0;
    double ber_bit = 0.0;
    std::uint64_t n_groups = 0;
    std::uint64_t exact_matches = 0;
    double p_ber_eq13 = 0.0;  // 1 - exact_matches / n_groups
    double stderr_bit = 0.0;  // sqrt(ber (1 - ber) / total_bits)
    double wall_time_s = 0.0;
    std::uint64_t realization_hash = 0;  // FNV over the frame draws; detector-independent
};

struct BerCurve {
    std::string spec_name;
    std::string detector;
    std::uint64_t seed = 0;
    std::vector<BerPoint> points;
};

// A detector maps one received frame draw to the decided data bits.
using DetectorFn =
    std::function<std::vector<std::uint8_t>(const FrameDraw& draw, const OfdmConfig& config)>;

// Monte Carlo sweep: for every grid point, frames_per_point independent frames
// from split substreams keyed by (seed, snr index, frame index) — identical
// realizations for every detector evaluated against the same spec.
BerCurve evaluate_with(const DetectorFn& detector, const std::string& detector_label,
                       const ExperimentSpec& spec);

// Standard detectors.  `bank` is required for the learned detector and must
// cover the spec's data block; MMSE is genie-aided with the spec's profile and
// each frame's true calibrated noise variance.
BerCurve evaluate_ber(DetectorKind detector, const ExperimentSpec& spec,
                      const ModelBank* bank = nullptr);

// Results CSV (fixed column order).
std::string ber_csv_header();
void append_csv_rows(std::string& out, const BerCurve& curve);

} // namespace ofdmdet
