#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ofdmdet/evaluate.hpp"

namespace ofdmdet {

inline constexpr const char* kCodeVersion = "0.1.0";

// Built-in experiments.  Each expands to a list of link variants ("arms")
// sharing the detector set, SNR grid, and seed:
//   fig3_pilots: 8 vs 64 comb pilots, QPSK, CP 16
//   fig4_cp:     CP 16 vs no CP, 8 pilots, QPSK, long-tail channel
//   fig5_mod:    QPSK vs 16QAM, 8 pilots, CP 16
std::vector<ExperimentSpec> built_in_experiment(const std::string& name, std::uint64_t seed);
std::vector<std::string> built_in_experiment_names();

struct ExperimentResult {
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
    std::filesystem::path plot_path;
    std::vector<BerCurve> curves;
};

// Runs every spec in order: trains the learned detector where requested
// (reusing a bank when two arms share identical training conditions, e.g.
// pilot-count variants that do not change the transmitted frames), evaluates
// every detector against paired frame realizations, and writes results.csv,
// manifest.json, plot.py, and per-arm checkpoints atomically under out_dir.
// On any failure a FAILED marker file with the error is left in out_dir and
// the exception propagates.
ExperimentResult run_experiment(const std::string& experiment_name,
                                const std::vector<ExperimentSpec>& specs,
                                const std::filesystem::path& out_dir);

} // namespace ofdmdet
