#include "ofdmdet/evaluate.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "ofdmdet/baseline.hpp"

namespace ofdmdet {

const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::Ls: return "ls";
        case DetectorKind::Mmse: return "mmse";
        case DetectorKind::Ddlsd: return "ddlsd";
        case DetectorKind::Oracle: return "oracle";
    }
    return "?";
}

DetectorKind detector_from_name(const std::string& name) {
    if (name == "ls") return DetectorKind::Ls;
    if (name == "mmse") return DetectorKind::Mmse;
    if (name == "ddlsd") return DetectorKind::Ddlsd;
    if (name == "oracle") return DetectorKind::Oracle;
    throw std::invalid_argument("unknown detector: " + name);
}

void ExperimentSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("experiment: empty name");
    config.validate();
    if (detectors.empty()) throw std::invalid_argument("experiment: no detectors");
    if (snr_grid_db.empty()) throw std::invalid_argument("experiment: empty SNR grid");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (!(snr_grid_db[i] > snr_grid_db[i - 1]))
            throw std::invalid_argument("experiment: SNR grid must be strictly increasing");
    if (frames_per_point == 0) throw std::invalid_argument("experiment: frames_per_point must be >= 1");
    if (group_bits == 0 || config.data_bit_count() % group_bits != 0)
        throw std::invalid_argument("experiment: group size must divide the data bit count");
}

namespace {

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_draw(const FrameDraw& draw) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a_bytes(h, draw.frame.data_bits.data(), draw.frame.data_bits.size());
    h = fnv1a_bytes(h, draw.channel.taps.data(),
                    draw.channel.taps.size() * sizeof(std::complex<double>));
    h = fnv1a_bytes(h, &draw.noise.noise_variance, sizeof(double));
    h = fnv1a_bytes(h, draw.rx_time.data(), draw.rx_time.size() * sizeof(std::complex<double>));
    return h;
}

} // namespace

BerCurve evaluate_with(const DetectorFn& detector, const std::string& detector_label,
                       const ExperimentSpec& spec) {
    spec.validate();
    const PowerDelayProfile pdp = spec.channel.profile();
    const std::size_t bits_per_frame = spec.config.data_bit_count();
    const std::size_t groups_per_frame = bits_per_frame / spec.group_bits;

    BerCurve curve;
    curve.spec_name = spec.name;
    curve.detector = detector_label;
    curve.seed = spec.seed;
    curve.points.reserve(spec.snr_grid_db.size());

    for (std::size_t si = 0; si < spec.snr_grid_db.size(); ++si) {
        const auto t0 = std::chrono::steady_clock::now();
        BerPoint pt;
        pt.snr_db = spec.snr_grid_db[si];
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (std::uint64_t fi = 0; fi < spec.frames_per_point; ++fi) {
            const FrameDraw draw =
                synthesize_frame(spec.config, pdp, pt.snr_db, spec.seed, si, fi, spec.mode);
            const std::uint64_t frame_hash = hash_draw(draw);
            hash = fnv1a_bytes(hash, &frame_hash, sizeof(frame_hash));

            const std::vector<std::uint8_t> decided = detector(draw, spec.config);
            if (decided.size() != bits_per_frame)
                throw std::runtime_error("evaluate: detector returned a wrong-length bit vector");

            const std::vector<std::uint8_t>& truth = draw.frame.data_bits;
            for (std::size_t g = 0; g < groups_per_frame; ++g) {
                std::uint64_t group_errors = 0;
                for (std::size_t j = g * spec.group_bits; j < (g + 1) * spec.group_bits; ++j)
                    group_errors += decided[j] != truth[j];
                pt.bit_errors += group_errors;
                pt.exact_matches += group_errors == 0;
            }
            pt.total_bits += bits_per_frame;
            pt.n_groups += groups_per_frame;
        }
        pt.ber_bit = static_cast<double>(pt.bit_errors) / static_cast<double>(pt.total_bits);
        pt.p_ber_eq13 =
            1.0 - static_cast<double>(pt.exact_matches) / static_cast<double>(pt.n_groups);
        pt.stderr_bit =
            std::sqrt(pt.ber_bit * (1.0 - pt.ber_bit) / static_cast<double>(pt.total_bits));
        pt.realization_hash = hash;
        pt.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        curve.points.push_back(pt);
    }
    return curve;
}

BerCurve evaluate_ber(DetectorKind detector, const ExperimentSpec& spec, const ModelBank* bank) {
    DetectorFn fn;
    switch (detector) {
        case DetectorKind::Ls:
            fn = [](const FrameDraw& draw, const OfdmConfig& config) {
                ReceiverOptions opt;
                opt.method = EstimatorMethod::Ls;
                return classical_receive(draw.rx_time, config, opt);
            };
            break;
        case DetectorKind::Mmse: {
            PowerDelayProfile pdp = spec.channel.profile();
            fn = [pdp](const FrameDraw& draw, const OfdmConfig& config) {
                ReceiverOptions opt;
                opt.method = EstimatorMethod::Mmse;
                opt.pdp = pdp;
                opt.noise_variance = draw.noise.noise_variance;
                return classical_receive(draw.rx_time, config, opt);
            };
            break;
        }
        case DetectorKind::Oracle:
            fn = [](const FrameDraw& draw, const OfdmConfig& config) {
                ReceiverOptions opt;
                opt.method = EstimatorMethod::Oracle;
                opt.true_channel = &draw.channel;
                return classical_receive(draw.rx_time, config, opt);
            };
            break;
        case DetectorKind::Ddlsd: {
            if (bank == nullptr)
                throw std::invalid_argument("evaluate: the learned detector needs a trained model bank");
            bank->validate(spec.config.data_bit_count());
            const ModelBank* b = bank;
            fn = [b](const FrameDraw& draw, const OfdmConfig& config) {
                return predict_bits(draw.rx_time, *b, config);
            };
            break;
        }
    }
    return evaluate_with(fn, detector_name(detector), spec);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string ber_csv_header() {
    return "spec_name,detector,snr_db,total_bits,bit_errors,ber_bit,n_groups,exact_matches,"
           "p_ber_eq13,stderr,seed\n";
}

void append_csv_rows(std::string& out, const BerCurve& curve) {
    for (const auto& pt : curve.points) {
        out += curve.spec_name;
        out += ',';
        out += curve.detector;
        out += ',';
        out += fmt_double(pt.snr_db);
        out += ',';
        out += std::to_string(pt.total_bits);
        out += ',';
        out += std::to_string(pt.bit_errors);
        out += ',';
        out += fmt_double(pt.ber_bit);
        out += ',';
        out += std::to_string(pt.n_groups);
        out += ',';
        out += std::to_string(pt.exact_matches);
        out += ',';
        out += fmt_double(pt.p_ber_eq13);
        out += ',';
        out += fmt_double(pt.stderr_bit);
        out += ',';
        out += std::to_string(curve.seed);
        out += '\n';
    }
}

} // namespace ofdmdet
