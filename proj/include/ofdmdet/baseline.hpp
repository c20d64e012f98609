#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ofdmdet/channel.hpp"
#include "ofdmdet/constellation.hpp"
#include "ofdmdet/numerics.hpp"
#include "ofdmdet/ofdm.hpp"

namespace ofdmdet {

enum class EstimatorMethod { Ls, Mmse, Oracle };

const char* estimator_name(EstimatorMethod method);

struct ChannelEstimate {
    cvec h_hat;                        // per-subcarrier frequency response, length N
    EstimatorMethod method = EstimatorMethod::Ls;
    double noise_variance_used = 0.0;  // meaningful for Mmse only
};

// Per-pilot division Ĥ_k = Y_k / D_k, then cyclic linear interpolation onto the
// remaining subcarriers. `known_pilots` is the full frequency-domain pilot block
// (length n); only entries at `pilot_positions` are consulted.
ChannelEstimate ls_estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                            const std::vector<std::size_t>& pilot_positions, std::size_t n);

// LMMSE smoothing of the per-pilot LS estimates:
//   Ĥ = R_hp (R_pp + noise_variance·Λ)^{-1} Ĥ_LS,pilots
// with channel frequency correlations computed analytically from the power delay
// profile, R[k,l] = Σ_m pdp_m exp(−j2π(k−l)m/n), and Λ = diag(1/|D_p|²) scaling
// the noise by per-pilot symbol energy. Caches the geometry-dependent pieces so
// per-frame calls only pay for the (cheap) regularized solve.
class MmseEstimator {
public:
    MmseEstimator(PowerDelayProfile pdp, std::vector<std::size_t> pilot_positions, std::size_t n);

    ChannelEstimate estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                             double noise_variance) const;

    // min/max Cholesky pivot ratio of the last regularized solve (diagnostic).
    double last_diag_ratio() const { return last_diag_ratio_; }

private:
    PowerDelayProfile pdp_;
    std::vector<std::size_t> positions_;
    std::size_t n_ = 0;
    cvec corr_;    // r[d] = Σ_m pdp_m exp(−j2π d m / n), d = 0..n−1
    cvec r_hp_;    // n × P, row-major
    cvec r_pp_;    // P × P, row-major
    mutable double last_diag_ratio_ = 1.0;
};

// One-shot convenience wrapper around MmseEstimator.
ChannelEstimate mmse_estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                              const std::vector<std::size_t>& pilot_positions,
                              const PowerDelayProfile& pdp, double noise_variance,
                              std::size_t n);

// Coherent ML detection: per subcarrier, D̂_k = argmin_c |Y_k − Ĥ_k·c|², ties
// broken toward the lowest constellation index. Because the frequency-domain
// channel is diagonal, this separable search equals the joint minimizer.
cvec mld_detect(const cvec& y, const ChannelEstimate& estimate, const Constellation& constellation);

// Explicit zero-forcing division Y_k / Ĥ_k, exposed for diagnostics only (the
// receive path folds equalization into mld_detect to avoid noise amplification).
cvec zf_equalize(const cvec& y, const ChannelEstimate& estimate);

struct ReceiverOptions {
    EstimatorMethod method = EstimatorMethod::Ls;
    // Required for Mmse:
    std::optional<PowerDelayProfile> pdp;
    double noise_variance = 0.0;
    // Required for Oracle:
    const ChannelRealization* true_channel = nullptr;
};

// Full classical pipeline on one serialized received frame (length 2·(N+N_cp)):
// demodulate both blocks, estimate the channel from the pilot block, MLD on the
// data block, demap to bits.
std::vector<std::uint8_t> classical_receive(const cvec& frame_rx_time, const OfdmConfig& config,
                                            const ReceiverOptions& options);

} // namespace ofdmdet
