// Scalar reference kernels against the runtime-dispatched SIMD variants.
// Reductions may reassociate, so comparisons are tolerance-based.

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "ofdmdet/kernels.hpp"
#include "ofdmdet/rng.hpp"

using namespace ofdmdet;

namespace {

std::vector<double> random_vec(RngStream& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_range(-scale, scale);
    return v;
}

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 7, 8, 9, 15, 16, 17, 31, 64, 100, 129, 1000};

} // namespace

TEST_CASE("scalar kernels: hand-checked values") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> y{4.0, -5.0, 6.0};
    CHECK(kernels::scalar_ops.dot(x.data(), y.data(), 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
    CHECK(kernels::scalar_ops.sum_sq(x.data(), 3) == doctest::Approx(14.0));

    std::vector<double> acc{1.0, 1.0, 1.0};
    kernels::scalar_ops.axpy(2.0, x.data(), acc.data(), 3);
    CHECK(acc[0] == doctest::Approx(3.0));
    CHECK(acc[2] == doctest::Approx(7.0));

    // 2x3 row-major matvec with bias.
    const std::vector<double> a{1, 0, 0, 0, 1, 1};
    const std::vector<double> bias{10, 20};
    std::vector<double> out(2);
    kernels::scalar_ops.gemv(a.data(), 2, 3, x.data(), bias.data(), out.data());
    CHECK(out[0] == doctest::Approx(11.0));
    CHECK(out[1] == doctest::Approx(25.0));
}

TEST_CASE("every available variant matches the scalar reference") {
    const kernels::Ops& ref = kernels::scalar_ops;
    for (const char* name : {"scalar", "avx2"}) {
        const kernels::Ops* ops = kernels::by_name(name);
        if (ops == nullptr) continue;  // variant not available on this host
        CAPTURE(name);

        RngStream rng(7, 1);
        for (std::size_t n : kSizes) {
            CAPTURE(n);
            const auto x = random_vec(rng, n);
            const auto y = random_vec(rng, n);

            CHECK(close(ops->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n), 1e-13));
            CHECK(close(ops->sum_sq(x.data(), n), ref.sum_sq(x.data(), n), 1e-13));

            auto y1 = y, y2 = y;
            ops->axpy(0.37, x.data(), y1.data(), n);
            ref.axpy(0.37, x.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-14));

            auto s1 = x, s2 = x;
            ops->scal(-1.6, s1.data(), n);
            ref.scal(-1.6, s2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(s1[i], s2[i], 1e-14));
        }

        // Matrix shapes around the LSTM's real sizes plus awkward remainders.
        const std::vector<std::pair<std::size_t, std::size_t>> shapes{
            {1, 1}, {3, 5}, {4, 8}, {16, 16}, {64, 144}, {16, 130}, {5, 257}};
        for (auto [rows, cols] : shapes) {
            CAPTURE(rows);
            CAPTURE(cols);
            const auto a = random_vec(rng, rows * cols);
            const auto xv = random_vec(rng, cols);
            const auto xr = random_vec(rng, rows);
            const auto bias = random_vec(rng, rows);

            std::vector<double> o1(rows), o2(rows);
            ops->gemv(a.data(), rows, cols, xv.data(), bias.data(), o1.data());
            ref.gemv(a.data(), rows, cols, xv.data(), bias.data(), o2.data());
            for (std::size_t i = 0; i < rows; ++i) CHECK(close(o1[i], o2[i], 1e-12));

            ops->gemv(a.data(), rows, cols, xv.data(), nullptr, o1.data());
            ref.gemv(a.data(), rows, cols, xv.data(), nullptr, o2.data());
            for (std::size_t i = 0; i < rows; ++i) CHECK(close(o1[i], o2[i], 1e-12));

            std::vector<double> t1(cols, 0.5), t2(cols, 0.5);
            ops->gemv_t_acc(a.data(), rows, cols, xr.data(), t1.data());
            ref.gemv_t_acc(a.data(), rows, cols, xr.data(), t2.data());
            for (std::size_t i = 0; i < cols; ++i) CHECK(close(t1[i], t2[i], 1e-12));

            auto a1 = a, a2 = a;
            ops->ger_acc(a1.data(), rows, cols, 0.77, xr.data(), xv.data());
            ref.ger_acc(a2.data(), rows, cols, 0.77, xr.data(), xv.data());
            for (std::size_t i = 0; i < rows * cols; ++i) CHECK(close(a1[i], a2[i], 1e-13));
        }

        for (std::size_t n : kSizes) {
            std::vector<std::complex<double>> ca(n), cb(n), r1(n), r2(n);
            for (std::size_t i = 0; i < n; ++i) {
                ca[i] = {rng.next_range(-1, 1), rng.next_range(-1, 1)};
                cb[i] = {rng.next_range(-1, 1), rng.next_range(-1, 1)};
            }
            ops->cmul(ca.data(), cb.data(), r1.data(), n);
            ref.cmul(ca.data(), cb.data(), r2.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(close(r1[i].real(), r2[i].real(), 1e-14));
                CHECK(close(r1[i].imag(), r2[i].imag(), 1e-14));
            }
        }
    }
}

TEST_CASE("dispatch honors force() and reports a real variant") {
    const std::string_view original = kernels::active_name();
    CHECK((original == "scalar" || original == "avx2"));

    REQUIRE(kernels::force("scalar"));
    CHECK(kernels::active_name() == "scalar");
    CHECK(kernels::active().dot == kernels::scalar_ops.dot);

    if (kernels::by_name("avx2") != nullptr) {
        REQUIRE(kernels::force("avx2"));
        CHECK(kernels::active_name() == "avx2");
        CHECK(kernels::active().dot != kernels::scalar_ops.dot);
    }
    CHECK_FALSE(kernels::force("no-such-variant"));
    REQUIRE(kernels::force(std::string(original).c_str()));
}
