#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ofdmdet {

struct CsvRecord {
    std::string spec_name;
    std::string detector;
    double snr_db = 0.0;
    double ber_bit = 0.0;
};

// Parses a results CSV produced by this project; validates the header.
std::vector<CsvRecord> parse_results_csv(const std::string& content);

// SNR at which the (descending) BER curve first reaches `threshold`, by
// log-linear interpolation between grid points.  Grid values exactly on the
// threshold report that SNR verbatim; a segment ending at BER 0 reports its
// right endpoint; returns nullopt when the curve never reaches the threshold.
std::optional<double> crossing_snr(const std::vector<std::pair<double, double>>& curve,
                                   double threshold);

struct ReportRow {
    std::string spec_name;
    std::string detector;
    std::vector<std::string> cells;  // one per threshold, e.g. "15.6dB" or "20dB+"
    bool monotone = true;            // false when BER ever increases with SNR
};

// Per (spec, detector): crossing cells for each threshold, in first-appearance
// order.  Cells read "<snr>dB" or "<grid max>dB+" when never crossed.
std::vector<ReportRow> build_report(const std::vector<CsvRecord>& records,
                                    const std::vector<double>& thresholds);

// Fixed-width text table; non-monotone curves are flagged in a notes column.
std::string render_report(const std::vector<ReportRow>& rows,
                          const std::vector<double>& thresholds);

inline const std::vector<double>& default_report_thresholds() {
    static const std::vector<double> t{1e-1, 1e-2, 1e-3};
    return t;
}

} // namespace ofdmdet
