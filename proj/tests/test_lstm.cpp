// Recurrent detector internals.  The keystone: analytic backpropagation
// through time checked entry-by-entry against central finite differences of
// the full objective, across random instances.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ofdmdet/lstm.hpp"
#include "ofdmdet/rng.hpp"

using namespace ofdmdet;

namespace {

const LstmShape kSmall{4, 8, 4};          // hidden, feature, output
const SequenceLayout kSmallLayout{3, 8};  // timesteps, features per step

LstmParams random_params(const LstmShape& shape, RngStream& rng, double scale) {
    LstmParams p = LstmParams::zeros(shape);
    for (auto& w : p.data) w = rng.next_range(-scale, scale);
    return p;
}

std::vector<double> random_features(std::size_t n, RngStream& rng, double scale) {
    std::vector<double> f(n);
    for (auto& x : f) x = rng.next_range(-scale, scale);
    return f;
}

std::vector<std::uint8_t> random_labels(std::size_t n, RngStream& rng) {
    std::vector<std::uint8_t> y(n);
    for (auto& b : y) b = static_cast<std::uint8_t>(rng.next_below(2));
    return y;
}

double objective(const LstmParams& params, const std::vector<double>& features,
                 const std::vector<std::uint8_t>& labels, const SequenceLayout& layout,
                 double weight_decay) {
    const ForwardCache cache = forward(features, params, layout);
    return loss(cache.d_hat, labels, params, weight_decay).gamma;
}

} // namespace

TEST_CASE("parameter buffer layout: spans tile the flat vector exactly") {
    const LstmShape s = kSmall;
    CHECK(s.concat() == 12);
    CHECK(s.gate_weight_count() == 4 * 4 * 12);
    CHECK(s.param_count() == 192 + 16 + 16 + 4);

    LstmParams p = LstmParams::zeros(s);
    REQUIRE(p.data.size() == s.param_count());
    p.w_gate(Gate::Forget)[0] = 1.0;
    p.w_gate(Gate::Input)[0] = 2.0;
    p.w_gate(Gate::Candidate)[0] = 3.0;
    p.w_gate(Gate::Output)[0] = 4.0;
    p.b_gate(Gate::Forget)[0] = 5.0;
    p.b_gate(Gate::Candidate)[3] = 6.0;
    p.w_out()[0] = 7.0;
    p.b_out()[3] = 8.0;

    CHECK(p.data[0] == 1.0);
    CHECK(p.data[48] == 2.0);
    CHECK(p.data[96] == 3.0);
    CHECK(p.data[144] == 4.0);
    CHECK(p.data[192] == 5.0);
    CHECK(p.data[192 + 8 + 3] == 6.0);
    CHECK(p.data[208] == 7.0);
    CHECK(p.data[227] == 8.0);

    double nonzero = 0;
    for (double v : p.data) nonzero += (v != 0.0) ? 1 : 0;
    CHECK(nonzero == 8);  // no span overlaps another
}

TEST_CASE("cell forward: zero-parameter fixed points") {
    LstmParams p = LstmParams::zeros(kSmall);
    std::vector<double> x(kSmall.feature, 0.0), s_prev(4, 0.0), c_prev(4, 1.0);
    std::vector<double> s_out(4), c_out(4);
    StepCache step;
    lstm_cell_forward(x, s_prev, c_prev, p, s_out, c_out, step);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(step.f[j] == doctest::Approx(0.5));
        CHECK(step.i[j] == doctest::Approx(0.5));
        CHECK(step.o[j] == doctest::Approx(0.5));
        CHECK(step.g[j] == doctest::Approx(0.0));
        CHECK(c_out[j] == doctest::Approx(0.5));
        CHECK(s_out[j] == doctest::Approx(0.5 * std::tanh(0.5)));
        CHECK(s_out[j] == doctest::Approx(0.23105857863000487).epsilon(1e-12));
    }

    std::fill(c_prev.begin(), c_prev.end(), 0.0);
    lstm_cell_forward(x, s_prev, c_prev, p, s_out, c_out, step);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(c_out[j] == 0.0);
        CHECK(s_out[j] == 0.0);
    }

    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS(lstm_cell_forward(x, wrong, c_prev, p, s_out, c_out, step));
}

TEST_CASE("cell forward: gate ranges and cell-state bound over random draws") {
    RngStream rng(61, 1);
    for (int rep = 0; rep < 10000; ++rep) {
        const LstmParams p = random_params(kSmall, rng, 2.0);
        std::vector<double> x = random_features(kSmall.feature, rng, 2.0);
        std::vector<double> s_prev = random_features(4, rng, 1.0);
        std::vector<double> c_prev = random_features(4, rng, 2.0);
        std::vector<double> s_out(4), c_out(4);
        StepCache step;
        lstm_cell_forward(x, s_prev, c_prev, p, s_out, c_out, step);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(step.f[j] > 0.0);
            CHECK(step.f[j] < 1.0);
            CHECK(step.i[j] > 0.0);
            CHECK(step.i[j] < 1.0);
            CHECK(step.o[j] > 0.0);
            CHECK(step.o[j] < 1.0);
            CHECK(std::abs(step.g[j]) <= 1.0);
            CHECK(std::abs(c_out[j]) <=
                  std::abs(step.f[j] * c_prev[j]) + std::abs(step.i[j]) + 1e-15);
            CHECK(std::abs(s_out[j]) < 1.0);
        }
    }
}

TEST_CASE("forward: zero parameters emit exactly 0.5 everywhere") {
    const LstmParams p = LstmParams::zeros(kSmall);
    RngStream rng(62, 1);
    const auto features = random_features(24, rng, 3.0);
    const ForwardCache cache = forward(features, p, kSmallLayout);
    REQUIRE(cache.d_hat.size() == 4);
    for (double d : cache.d_hat) CHECK(d == 0.5);

    const auto labels = random_labels(4, rng);
    const LossValue lv = loss(cache.d_hat, labels, p, 0.0);
    CHECK(lv.psi == doctest::Approx(4.0 * std::numbers::ln2).epsilon(1e-12));
    CHECK(lv.gamma == lv.psi);

    // Widest case used by the real detector.
    const LstmShape wide{16, 128, 16};
    const LstmParams pw = LstmParams::zeros(wide);
    const auto fw = random_features(256, rng, 1.0);
    const ForwardCache cw = forward(fw, pw, SequenceLayout{2, 128});
    const LossValue lw = loss(cw.d_hat, random_labels(16, rng), pw, 0.0);
    CHECK(lw.psi == doctest::Approx(16.0 * std::numbers::ln2).epsilon(1e-12));
    CHECK(lw.psi == doctest::Approx(11.090354888959125).epsilon(1e-12));
}

TEST_CASE("forward: outputs stay strictly inside (0,1) even for large parameters") {
    RngStream rng(63, 1);
    for (int rep = 0; rep < 50; ++rep) {
        const LstmParams p = random_params(kSmall, rng, 10.0);
        const auto features = random_features(24, rng, 10.0);
        const ForwardCache cache = forward(features, p, kSmallLayout);
        for (double d : cache.d_hat) {
            CHECK(d > 0.0);
            CHECK(d < 1.0);
            CHECK(d >= kProbClamp);
            CHECK(d <= 1.0 - kProbClamp);
        }
    }
}

TEST_CASE("forward: examples are independent (zero initial state)") {
    RngStream rng(64, 1);
    const LstmParams p = random_params(kSmall, rng, 0.7);
    const auto f1 = random_features(24, rng, 1.0);
    const auto f2 = random_features(24, rng, 1.0);

    const auto out_a1 = forward(f1, p, kSmallLayout).d_hat;
    const auto out_a2 = forward(f2, p, kSmallLayout).d_hat;
    const auto out_b2 = forward(f2, p, kSmallLayout).d_hat;
    const auto out_b1 = forward(f1, p, kSmallLayout).d_hat;
    CHECK(out_a1 == out_b1);
    CHECK(out_a2 == out_b2);

    CHECK_THROWS(forward(random_features(23, rng, 1.0), p, kSmallLayout));
    CHECK_THROWS(forward(f1, p, SequenceLayout{2, 12}));
}

TEST_CASE("loss: hand-computed cross entropy and the penalty ordering") {
    LstmParams p = LstmParams::zeros(kSmall);
    const std::vector<double> d_hat{0.8, 0.25};
    const std::vector<std::uint8_t> labels{1, 0};
    const LossValue lv = loss(d_hat, labels, p, 0.0);
    CHECK(lv.psi == doctest::Approx(-(std::log(0.8) + std::log(0.75))).epsilon(1e-14));

    // Penalty counts weights only, never biases.
    p.b_gate(Gate::Forget)[0] = 100.0;
    p.b_out()[0] = -50.0;
    const LossValue biased = loss(d_hat, labels, p, 0.5);
    CHECK(biased.gamma == biased.psi);

    p.w_gate(Gate::Input)[0] = 2.0;
    p.w_out()[1] = -3.0;
    const LossValue weighted = loss(d_hat, labels, p, 0.5);
    CHECK(weighted.gamma == doctest::Approx(weighted.psi + 0.25 * (4.0 + 9.0)).epsilon(1e-14));
    CHECK(weighted.gamma > weighted.psi);

    CHECK_THROWS(loss(d_hat, std::vector<std::uint8_t>{1}, p, 0.0));
}

TEST_CASE("keystone: analytic gradients match central finite differences") {
    // Relative error uses |a - f| / max(|a| + |f|, 1e-3): below the floor the
    // comparison degrades to an absolute tolerance of 1e-9, still far above
    // the ~1e-10 round-off noise of double-precision central differences and
    // far below any real backpropagation defect.
    RngStream rng(65, 1);
    const double h = 1e-5;
    const std::vector<double> decays{0.0, 0.01, 0.1};
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        CAPTURE(instance);
        const double wd = decays[static_cast<std::size_t>(instance) % decays.size()];
        LstmParams params = random_params(kSmall, rng, 0.5);
        const auto features = random_features(24, rng, 1.5);
        const auto labels = random_labels(4, rng);

        const ForwardCache cache = forward(features, params, kSmallLayout);
        // Finite differences are only valid away from the probability clamp.
        for (double raw : cache.d_raw) {
            REQUIRE(raw > 1e-6);
            REQUIRE(raw < 1.0 - 1e-6);
        }
        const std::vector<double> analytic = backward(cache, labels, params, wd);
        REQUIRE(analytic.size() == params.data.size());

        for (std::size_t j = 0; j < params.data.size(); ++j) {
            const double saved = params.data[j];
            params.data[j] = saved + h;
            const double up = objective(params, features, labels, kSmallLayout, wd);
            params.data[j] = saved - h;
            const double down = objective(params, features, labels, kSmallLayout, wd);
            params.data[j] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::abs(analytic[j] - fd) / std::max(std::abs(analytic[j]) + std::abs(fd), 1e-3);
            worst = std::max(worst, rel);
            if (rel >= 1e-6) {
                CAPTURE(j);
                CAPTURE(analytic[j]);
                CAPTURE(fd);
            }
            REQUIRE(rel < 1e-6);
        }
    }
    MESSAGE("max relative gradient error over 20 instances: " << worst);
}

TEST_CASE("backward: flat at a clamped optimum; decay term isolates exactly") {
    RngStream rng(66, 1);
    LstmParams params = random_params(kSmall, rng, 0.4);
    // Saturate every output far past the clamp so the data term is flat.
    std::fill(params.w_out().begin(), params.w_out().end(), 0.0);
    params.b_out()[0] = 40.0;
    params.b_out()[1] = -40.0;
    params.b_out()[2] = 40.0;
    params.b_out()[3] = -40.0;
    const std::vector<std::uint8_t> labels{1, 0, 1, 0};  // matches the saturation
    const auto features = random_features(24, rng, 1.0);
    const ForwardCache cache = forward(features, params, kSmallLayout);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(cache.d_hat[j] == (labels[j] ? 1.0 - kProbClamp : kProbClamp));
    }

    const std::vector<double> grad0 = backward(cache, labels, params, 0.0);
    for (double g : grad0) CHECK(std::abs(g) < 1e-9);

    const double wd = 0.37;
    const std::vector<double> grad_wd = backward(cache, labels, params, wd);
    const std::size_t w_out_off = kSmall.gate_weight_count() + 4 * kSmall.hidden;
    for (std::size_t j = 0; j < params.data.size(); ++j) {
        const bool is_weight = j < kSmall.gate_weight_count() ||
                               (j >= w_out_off && j < w_out_off + kSmall.output * kSmall.hidden);
        if (is_weight) {
            CHECK(grad_wd[j] == wd * params.data[j]);
        } else {
            CHECK(grad_wd[j] == 0.0);
        }
    }
}

TEST_CASE("backward_accumulate: pure data term, additive, guarded against stale caches") {
    RngStream rng(67, 1);
    const LstmParams params = random_params(kSmall, rng, 0.5);
    const auto features = random_features(24, rng, 1.0);
    const auto labels = random_labels(4, rng);
    const ForwardCache cache = forward(features, params, kSmallLayout);

    const std::vector<double> reference = backward(cache, labels, params, 0.0);
    std::vector<double> acc(params.data.size(), 0.0);
    backward_accumulate(cache, labels, params, acc);
    for (std::size_t j = 0; j < acc.size(); ++j) CHECK(acc[j] == reference[j]);

    backward_accumulate(cache, labels, params, acc);
    for (std::size_t j = 0; j < acc.size(); ++j) {
        CHECK(acc[j] == doctest::Approx(2.0 * reference[j]).epsilon(1e-14));
    }

    LstmParams tampered = params;
    tampered.data[0] += 1.0;
    CHECK_THROWS(backward(cache, labels, tampered, 0.0));
    CHECK_THROWS(backward(cache, std::vector<std::uint8_t>{1, 0}, params, 0.0));
    std::vector<double> short_buf(10, 0.0);
    CHECK_THROWS(backward_accumulate(cache, labels, params, short_buf));
}

TEST_CASE("gradient clipping rescales to the threshold and never inflates") {
    std::vector<double> g{1.2, -1.6};  // norm 2
    clip_gradients(g, 1.0);
    CHECK(g[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<double> small{0.3, 0.4};  // norm 0.5
    const auto before = small;
    clip_gradients(small, 1.0);
    CHECK(small == before);

    std::vector<double> zero(5, 0.0);
    clip_gradients(zero, 1.0);
    for (double v : zero) CHECK(v == 0.0);

    CHECK_THROWS(clip_gradients(g, 0.0));
    CHECK_THROWS(clip_gradients(g, -1.0));
}

TEST_CASE("frame features interleave re/im, pilot block first") {
    const cvec pilot{{1.0, 2.0}, {3.0, 4.0}};
    const cvec data{{5.0, 6.0}};
    const std::vector<double> expected{1, 2, 3, 4, 5, 6};
    CHECK(frame_features(pilot, data) == expected);
}

TEST_CASE("predict_bits: threshold contract, tie rule, and bank validation") {
    OfdmConfig config;
    const LstmShape shape{16, 128, 16};
    ModelBank bank;
    bank.layout = SequenceLayout{2, 128};
    bank.models.assign(8, LstmParams::zeros(shape));
    CHECK_NOTHROW(bank.validate(config.data_bit_count()));
    CHECK(bank.group_bits() == 16);

    RngStream rng(68, 1);
    std::vector<std::uint8_t> bits(config.data_bit_count());
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_below(2));
    const OfdmFrame frame = build_frame(bits, pilot_sequence(config.subcarriers), config);
    const cvec tx = serialize_frame(frame, config);

    // Zero parameters emit exactly 0.5 -> the tie decides 0 everywhere.
    const auto zero_bits = predict_bits(tx, bank, config);
    REQUIRE(zero_bits.size() == config.data_bit_count());
    for (auto b : zero_bits) CHECK(b == 0);

    // Saturated biases dictate the pattern regardless of the input frame.
    for (auto& m : bank.models) {
        for (std::size_t j = 0; j < shape.output; ++j) m.b_out()[j] = (j % 2 == 0) ? -10.0 : 10.0;
    }
    const auto patterned = predict_bits(tx, bank, config);
    for (std::size_t j = 0; j < patterned.size(); ++j) {
        CHECK(patterned[j] == (j % 2 == 0 ? 0 : 1));
    }

    ModelBank incomplete = bank;
    incomplete.models.pop_back();
    CHECK_THROWS(predict_bits(tx, incomplete, config));
    CHECK_THROWS(predict_bits(cvec(17), bank, config));

    ModelBank mixed = bank;
    mixed.models[3] = LstmParams::zeros(LstmShape{8, 128, 16});
    CHECK_THROWS(mixed.validate(config.data_bit_count()));
}

TEST_CASE("group bookkeeping") {
    CHECK(group_count(128, 16) == 8);
    CHECK(group_count(256, 16) == 16);
    CHECK(group_count(16, 16) == 1);
    CHECK_THROWS(group_count(130, 16));
    CHECK_THROWS(group_count(0, 16));
    CHECK_THROWS(group_count(128, 0));
}
