#include "ofdmdet/baseline.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ofdmdet/linalg.hpp"

namespace ofdmdet {

const char* estimator_name(EstimatorMethod method) {
    switch (method) {
        case EstimatorMethod::Ls: return "ls";
        case EstimatorMethod::Mmse: return "mmse";
        case EstimatorMethod::Oracle: return "oracle";
    }
    return "?";
}

namespace {

// Per-pilot raw estimates Ĥ_p = Y_p / D_p.
cvec pilot_ls_points(const cvec& y_pilot_block, const cvec& known_pilots,
                     const std::vector<std::size_t>& positions, std::size_t n) {
    if (y_pilot_block.size() != n || known_pilots.size() != n)
        throw std::invalid_argument("channel estimate: block length mismatch");
    if (positions.empty()) throw std::invalid_argument("channel estimate: no pilot positions");
    cvec out(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) {
        const std::size_t p = positions[j];
        if (p >= n) throw std::invalid_argument("channel estimate: pilot position out of range");
        const std::complex<double> d = known_pilots[p];
        if (std::abs(d) == 0.0) throw std::invalid_argument("channel estimate: zero pilot symbol");
        out[j] = y_pilot_block[p] / d;
    }
    return out;
}

} // namespace

ChannelEstimate ls_estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                            const std::vector<std::size_t>& pilot_positions, std::size_t n) {
    const cvec points = pilot_ls_points(y_pilot_block, known_pilots, pilot_positions, n);
    ChannelEstimate est;
    est.method = EstimatorMethod::Ls;
    est.h_hat = interpolate_frequency(pilot_positions, points, n);
    return est;
}

MmseEstimator::MmseEstimator(PowerDelayProfile pdp, std::vector<std::size_t> pilot_positions,
                             std::size_t n)
    : pdp_(std::move(pdp)), positions_(std::move(pilot_positions)), n_(n) {
    if (positions_.empty()) throw std::invalid_argument("MmseEstimator: no pilot positions");
    for (std::size_t p : positions_)
        if (p >= n_) throw std::invalid_argument("MmseEstimator: pilot position out of range");
    if (pdp_.tap_variances.size() > n_)
        throw std::invalid_argument("MmseEstimator: delay spread exceeds subcarrier count");

    corr_.resize(n_);
    for (std::size_t d = 0; d < n_; ++d) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < pdp_.tap_variances.size(); ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(d * m) / static_cast<double>(n_);
            acc += pdp_.tap_variances[m] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        corr_[d] = acc;
    }

    const std::size_t np = positions_.size();
    r_hp_.resize(n_ * np);
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t j = 0; j < np; ++j)
            r_hp_[k * np + j] = corr_[(k + n_ - positions_[j]) % n_];
    r_pp_.resize(np * np);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < np; ++j)
            r_pp_[i * np + j] = corr_[(positions_[i] + n_ - positions_[j]) % n_];
}

ChannelEstimate MmseEstimator::estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                                        double noise_variance) const {
    if (noise_variance < 0.0 || !std::isfinite(noise_variance))
        throw std::invalid_argument("MmseEstimator: noise variance must be finite and nonnegative");
    const cvec points = pilot_ls_points(y_pilot_block, known_pilots, positions_, n_);
    const std::size_t np = positions_.size();

    // Regularized Gram matrix.  The relative ridge floor keeps the factorization
    // positive definite when noise_variance = 0 and the correlation matrix is
    // rank-deficient (few channel taps, many pilots); it is far below the 1e-8
    // agreement tolerance against plain LS in that limit.
    double diag_mean = 0.0;
    for (std::size_t i = 0; i < np; ++i) diag_mean += r_pp_[i * np + i].real();
    diag_mean /= static_cast<double>(np);
    const double ridge = 1e-11 * diag_mean;

    cvec gram = r_pp_;
    for (std::size_t i = 0; i < np; ++i) {
        const std::complex<double> d = known_pilots[positions_[i]];
        const double lambda = 1.0 / std::norm(d);
        gram[i * np + i] += noise_variance * lambda + ridge;
    }

    CholeskyResult chol;
    try {
        chol = cholesky(gram, np);
    } catch (const std::runtime_error&) {
        std::ostringstream msg;
        msg << "MmseEstimator: regularized correlation matrix is numerically singular"
            << " (pivot ratio below machine precision at " << np << " pilots)";
        throw std::runtime_error(msg.str());
    }
    last_diag_ratio_ = chol.diag_ratio;

    const cvec weights = cholesky_solve(chol, points);
    ChannelEstimate est;
    est.method = EstimatorMethod::Mmse;
    est.noise_variance_used = noise_variance;
    est.h_hat.assign(n_, {0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < np; ++j) acc += r_hp_[k * np + j] * weights[j];
        est.h_hat[k] = acc;
    }
    return est;
}

ChannelEstimate mmse_estimate(const cvec& y_pilot_block, const cvec& known_pilots,
                              const std::vector<std::size_t>& pilot_positions,
                              const PowerDelayProfile& pdp, double noise_variance,
                              std::size_t n) {
    MmseEstimator estimator(pdp, pilot_positions, n);
    return estimator.estimate(y_pilot_block, known_pilots, noise_variance);
}

cvec mld_detect(const cvec& y, const ChannelEstimate& estimate, const Constellation& constellation) {
    if (y.size() != estimate.h_hat.size())
        throw std::invalid_argument("mld_detect: length mismatch");
    cvec decided(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const std::complex<double> h = estimate.h_hat[k];
        std::size_t best = 0;
        double best_metric = std::norm(y[k] - h * constellation.points[0]);
        for (std::size_t c = 1; c < constellation.points.size(); ++c) {
            const double metric = std::norm(y[k] - h * constellation.points[c]);
            if (metric < best_metric) {
                best_metric = metric;
                best = c;
            }
        }
        decided[k] = constellation.points[best];
    }
    return decided;
}

cvec zf_equalize(const cvec& y, const ChannelEstimate& estimate) {
    if (y.size() != estimate.h_hat.size())
        throw std::invalid_argument("zf_equalize: length mismatch");
    cvec out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (std::abs(estimate.h_hat[k]) == 0.0)
            throw std::invalid_argument("zf_equalize: zero channel estimate");
        out[k] = y[k] / estimate.h_hat[k];
    }
    return out;
}

std::vector<std::uint8_t> classical_receive(const cvec& frame_rx_time, const OfdmConfig& config,
                                            const ReceiverOptions& options) {
    const std::size_t n = config.subcarriers;
    const std::size_t block = config.block_length();
    if (frame_rx_time.size() != 2 * block)
        throw std::invalid_argument("classical_receive: expected a serialized two-block frame");

    const cvec rx_pilot(frame_rx_time.begin(), frame_rx_time.begin() + static_cast<std::ptrdiff_t>(block));
    const cvec rx_data(frame_rx_time.begin() + static_cast<std::ptrdiff_t>(block), frame_rx_time.end());
    const cvec y_pilot = ofdm_demodulate(rx_pilot, config);
    const cvec y_data = ofdm_demodulate(rx_data, config);

    const cvec known = pilot_sequence(n);
    const std::vector<std::size_t> positions = config.pilot_positions();

    ChannelEstimate est;
    switch (options.method) {
        case EstimatorMethod::Ls:
            est = ls_estimate(y_pilot, known, positions, n);
            break;
        case EstimatorMethod::Mmse: {
            if (!options.pdp)
                throw std::invalid_argument("classical_receive: MMSE needs a power delay profile");
            est = mmse_estimate(y_pilot, known, positions, *options.pdp, options.noise_variance, n);
            break;
        }
        case EstimatorMethod::Oracle: {
            if (options.true_channel == nullptr)
                throw std::invalid_argument("classical_receive: oracle needs the true channel");
            est.method = EstimatorMethod::Oracle;
            est.h_hat = frequency_response(*options.true_channel, n);
            break;
        }
    }

    const Constellation& constellation = Constellation::get(config.modulation);
    const cvec decided = mld_detect(y_data, est, constellation);
    return demap_symbols(decided, config.modulation);
}

} // namespace ofdmdet
