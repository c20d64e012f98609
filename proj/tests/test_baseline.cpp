// Classical receivers.  LS is checked against exact per-pilot division,
// LMMSE against a closed-form rank-one oracle (flat channel) and a Monte
// Carlo comparison, MLD against joint brute-force enumeration.

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "ofdmdet/baseline.hpp"
#include "ofdmdet/ofdm.hpp"

using namespace ofdmdet;

namespace {

cvec elementwise(const cvec& a, const cvec& b) {
    cvec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_below(2));
    return bits;
}

double estimate_mse(const ChannelEstimate& est, const cvec& truth) {
    double acc = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) acc += std::norm(est.h_hat[k] - truth[k]);
    return acc / static_cast<double>(truth.size());
}

} // namespace

TEST_CASE("ls recovers the exact response at pilot positions, everywhere when fully piloted") {
    OfdmConfig config;
    RngStream rng(21, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const auto h = draw_channel(pdp, rng);
    const cvec H = frequency_response(h, config.subcarriers);
    const cvec pilots = pilot_sequence(config.subcarriers);
    const cvec y = elementwise(H, pilots); // noiseless received pilot block

    SUBCASE("comb layout") {
        const auto pos = config.pilot_positions();
        const auto est = ls_estimate(y, pilots, pos, config.subcarriers);
        CHECK(est.method == EstimatorMethod::Ls);
        REQUIRE(est.h_hat.size() == config.subcarriers);
        for (auto p : pos) CHECK(std::abs(est.h_hat[p] - H[p]) < 1e-12);
    }

    SUBCASE("every subcarrier piloted") {
        std::vector<std::size_t> all(config.subcarriers);
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        const auto est = ls_estimate(y, pilots, all, config.subcarriers);
        for (std::size_t k = 0; k < config.subcarriers; ++k)
            CHECK(std::abs(est.h_hat[k] - H[k]) < 1e-12);
    }

    SUBCASE("flat channel interpolates exactly from any comb") {
        const ChannelRealization flat{{{0.8, -0.6}}};
        const cvec Hf = frequency_response(flat, config.subcarriers);
        const auto est = ls_estimate(elementwise(Hf, pilots), pilots, config.pilot_positions(),
                                     config.subcarriers);
        for (std::size_t k = 0; k < config.subcarriers; ++k)
            CHECK(std::abs(est.h_hat[k] - Hf[k]) < 1e-12);
    }
}

TEST_CASE("ls pilot-point error variance equals the per-symbol noise variance") {
    OfdmConfig config;
    RngStream rng(22, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const cvec pilots = pilot_sequence(config.subcarriers); // unit modulus
    std::vector<std::size_t> all(config.subcarriers);
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;

    const double noise_var = 0.2;
    double acc = 0.0;
    std::size_t count = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto h = draw_channel(pdp, rng);
        const cvec H = frequency_response(h, config.subcarriers);
        cvec y = elementwise(H, pilots);
        for (auto& z : y) z += sample_complex_gaussian(rng, noise_var);
        const auto est = ls_estimate(y, pilots, all, config.subcarriers);
        for (std::size_t k = 0; k < config.subcarriers; ++k) {
            acc += std::norm(est.h_hat[k] - H[k]);
            ++count;
        }
    }
    // |e/d|^2 has mean noise_var for |d| = 1; stderr ~ 1%.
    CHECK(acc / static_cast<double>(count) == doctest::Approx(noise_var).epsilon(0.05));
}

TEST_CASE("lmmse matches the closed-form rank-one solution on a flat channel") {
    // Single-tap profile: R is the all-ones matrix, so the solver collapses to
    //   H_hat_k = P / (P + noise_var) * mean(per-pilot LS estimates)
    // for unit-modulus pilots -- derivable by hand from the Sherman-Morrison
    // inverse of (ones + noise_var I).
    const std::size_t n = 16;
    const std::vector<std::size_t> pos{0, 4, 8, 12};
    const auto pdp = PowerDelayProfile::from_variances({1.0});
    cvec pilots(n, {1.0, 0.0});
    const std::complex<double> h0{0.3, -0.9};
    const std::vector<std::complex<double>> errs{
        {0.05, -0.02}, {-0.11, 0.04}, {0.02, 0.09}, {-0.03, -0.01}};

    cvec y(n, {0.0, 0.0});
    std::complex<double> mean_ls{0.0, 0.0};
    for (std::size_t j = 0; j < pos.size(); ++j) {
        y[pos[j]] = h0 + errs[j];
        mean_ls += h0 + errs[j];
    }
    mean_ls /= static_cast<double>(pos.size());

    const double noise_var = 0.5;
    const auto est = mmse_estimate(y, pilots, pos, pdp, noise_var, n);
    CHECK(est.method == EstimatorMethod::Mmse);
    CHECK(est.noise_variance_used == noise_var);
    const std::complex<double> expected =
        mean_ls * (static_cast<double>(pos.size()) / (static_cast<double>(pos.size()) + noise_var));
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(est.h_hat[k] - expected) < 1e-8);
}

TEST_CASE("lmmse with zero noise and full pilots reproduces ls") {
    OfdmConfig config;
    RngStream rng(23, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const auto h = draw_channel(pdp, rng);
    const cvec H = frequency_response(h, config.subcarriers);
    const cvec pilots = pilot_sequence(config.subcarriers);
    const cvec y = elementwise(H, pilots);
    std::vector<std::size_t> all(config.subcarriers);
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;

    const auto est = mmse_estimate(y, pilots, all, pdp, 0.0, config.subcarriers);
    for (std::size_t k = 0; k < config.subcarriers; ++k)
        CHECK(std::abs(est.h_hat[k] - H[k]) < 1e-8);
}

TEST_CASE("lmmse beats ls in mean squared error on an undersampled comb") {
    OfdmConfig config; // 8 pilots vs 16-tap channel: interpolation aliases
    RngStream rng(24, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const cvec pilots = pilot_sequence(config.subcarriers);
    const auto pos = config.pilot_positions();
    const MmseEstimator mmse(pdp, pos, config.subcarriers);

    const double noise_var = 0.05;
    double mse_ls = 0.0, mse_mmse = 0.0;
    const int reps = 300;
    for (int rep = 0; rep < reps; ++rep) {
        const auto h = draw_channel(pdp, rng);
        const cvec H = frequency_response(h, config.subcarriers);
        cvec y = elementwise(H, pilots);
        for (auto& z : y) z += sample_complex_gaussian(rng, noise_var);
        mse_ls += estimate_mse(ls_estimate(y, pilots, pos, config.subcarriers), H);
        mse_mmse += estimate_mse(mmse.estimate(y, pilots, noise_var), H);
    }
    CHECK(mse_mmse < 0.7 * mse_ls);
}

TEST_CASE("mld equals joint brute-force detection on a two-subcarrier system") {
    RngStream rng(25, 2);
    for (Modulation m : {Modulation::Qpsk, Modulation::Qam16}) {
        CAPTURE(modulation_name(m));
        const auto& c = Constellation::get(m);
        for (int rep = 0; rep < 200; ++rep) {
            ChannelEstimate est;
            est.h_hat = {{rng.next_range(-1, 1), rng.next_range(-1, 1)},
                         {rng.next_range(-1, 1), rng.next_range(-1, 1)}};
            const cvec y{{rng.next_range(-2, 2), rng.next_range(-2, 2)},
                         {rng.next_range(-2, 2), rng.next_range(-2, 2)}};

            // Joint search over every symbol pair.
            std::size_t best_i = 0, best_j = 0;
            double best_cost = 1e300;
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                for (std::size_t j = 0; j < c.points.size(); ++j) {
                    const double cost = std::norm(y[0] - est.h_hat[0] * c.points[i]) +
                                        std::norm(y[1] - est.h_hat[1] * c.points[j]);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
            const cvec detected = mld_detect(y, est, c);
            REQUIRE(detected.size() == 2);
            CHECK(std::abs(detected[0] - c.points[best_i]) < 1e-15);
            CHECK(std::abs(detected[1] - c.points[best_j]) < 1e-15);
        }
    }
}

TEST_CASE("mld trivia: identity channel reduces to nearest point; ties take the lowest index") {
    const auto& c = Constellation::get(Modulation::Qpsk);
    ChannelEstimate id;
    id.h_hat = cvec(4, {1.0, 0.0});
    const cvec y{c.points[2], c.points[0], c.points[3], {0.0, 0.0}};
    const cvec detected = mld_detect(y, id, c);
    CHECK(std::abs(detected[0] - c.points[2]) < 1e-15);
    CHECK(std::abs(detected[1] - c.points[0]) < 1e-15);
    CHECK(std::abs(detected[2] - c.points[3]) < 1e-15);
    CHECK(std::abs(detected[3] - c.points[0]) < 1e-15); // equidistant -> label 0

    // A scaled/rotated channel must not change decisions when y = H * point.
    ChannelEstimate rot;
    rot.h_hat = cvec(1, {0.0, 2.0});
    const cvec y2{rot.h_hat[0] * c.points[1]};
    CHECK(std::abs(mld_detect(y2, rot, c)[0] - c.points[1]) < 1e-15);
}

TEST_CASE("zf equalization divides and rejects zero estimates") {
    ChannelEstimate est;
    est.h_hat = {{2.0, 0.0}, {0.0, -1.0}};
    const cvec y{{4.0, 2.0}, {3.0, 3.0}};
    const cvec x = zf_equalize(y, est);
    CHECK(std::abs(x[0] - std::complex<double>(2.0, 1.0)) < 1e-14);
    CHECK(std::abs(x[1] - std::complex<double>(-3.0, 3.0)) < 1e-14);

    est.h_hat[1] = {0.0, 0.0};
    CHECK_THROWS(zf_equalize(y, est));
}

TEST_CASE("classical receive is exact on noiseless frames given adequate knowledge") {
    OfdmConfig config;
    RngStream rng(26, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const cvec pilots = pilot_sequence(config.subcarriers);

    for (Modulation m : {Modulation::Qpsk, Modulation::Qam16}) {
        CAPTURE(modulation_name(m));
        OfdmConfig cfg = config;
        cfg.modulation = m;
        for (int rep = 0; rep < 10; ++rep) {
            const auto h = draw_channel(pdp, rng);
            const auto bits = random_bits(rng, cfg.data_bit_count());
            const OfdmFrame frame = build_frame(bits, pilots, cfg);
            const cvec tx = serialize_frame(frame, cfg);
            const cvec rx = apply_channel(tx, h, NoiseSpec{0.0, 0.0}, rng,
                                          ChannelMode::CyclicPerBlock, cfg.block_length());

            ReceiverOptions oracle;
            oracle.method = EstimatorMethod::Oracle;
            oracle.true_channel = &h;
            CHECK(classical_receive(rx, cfg, oracle) == bits);

            // LS and LMMSE need full pilot coverage to be exact on a 16-tap
            // channel (an 8-comb undersamples the delay spread).
            OfdmConfig full = cfg;
            full.pilot_count = 64;
            const OfdmFrame frame64 = build_frame(bits, pilots, full);
            const cvec rx64 =
                apply_channel(serialize_frame(frame64, full), h, NoiseSpec{0.0, 0.0}, rng,
                              ChannelMode::CyclicPerBlock, full.block_length());
            ReceiverOptions ls;
            ls.method = EstimatorMethod::Ls;
            CHECK(classical_receive(rx64, full, ls) == bits);

            ReceiverOptions mm;
            mm.method = EstimatorMethod::Mmse;
            mm.pdp = pdp;
            mm.noise_variance = 0.0;
            CHECK(classical_receive(rx64, full, mm) == bits);
        }
    }
}

TEST_CASE("receiver options are validated") {
    OfdmConfig config;
    RngStream rng(27, 2);
    const auto pdp = PowerDelayProfile::exponential(2.0, 15);
    const auto h = draw_channel(pdp, rng);
    const auto bits = random_bits(rng, config.data_bit_count());
    const OfdmFrame frame = build_frame(bits, pilot_sequence(config.subcarriers), config);
    const cvec rx = apply_channel(serialize_frame(frame, config), h, NoiseSpec{0.0, 0.0}, rng,
                                  ChannelMode::CyclicPerBlock, config.block_length());

    ReceiverOptions needs_pdp;
    needs_pdp.method = EstimatorMethod::Mmse;
    CHECK_THROWS(classical_receive(rx, config, needs_pdp));

    ReceiverOptions needs_truth;
    needs_truth.method = EstimatorMethod::Oracle;
    CHECK_THROWS(classical_receive(rx, config, needs_truth));

    ReceiverOptions ls;
    CHECK_THROWS(classical_receive(cvec(10), config, ls));

    CHECK(estimator_name(EstimatorMethod::Ls) == std::string("ls"));
    CHECK(estimator_name(EstimatorMethod::Mmse) == std::string("mmse"));
    CHECK(estimator_name(EstimatorMethod::Oracle) == std::string("oracle"));
}
