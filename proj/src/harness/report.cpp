#include "ofdmdet/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ofdmdet/evaluate.hpp"

namespace ofdmdet {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

std::vector<CsvRecord> parse_results_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("results csv: empty file");
    std::string expected = ber_csv_header();
    if (!expected.empty() && expected.back() == '\n') expected.pop_back();
    if (line != expected) throw std::runtime_error("results csv: unexpected header: " + line);

    std::vector<CsvRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 11)
            throw std::runtime_error("results csv: line " + std::to_string(line_no) +
                                     ": expected 11 fields, got " + std::to_string(f.size()));
        CsvRecord r;
        r.spec_name = f[0];
        r.detector = f[1];
        try {
            r.snr_db = std::stod(f[2]);
            r.ber_bit = std::stod(f[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("results csv: line " + std::to_string(line_no) +
                                     ": unparsable number");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::optional<double> crossing_snr(const std::vector<std::pair<double, double>>& curve,
                                   double threshold) {
    if (curve.empty() || !(threshold > 0.0))
        throw std::invalid_argument("crossing_snr: empty curve or non-positive threshold");
    if (curve.front().second <= threshold) return curve.front().first;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto [s1, b1] = curve[i];
        const auto [s2, b2] = curve[i + 1];
        if (b1 > threshold && b2 <= threshold) {
            if (b2 <= 0.0) return s2;  // cannot log-interpolate through zero
            const double t = (std::log10(b1) - std::log10(threshold)) /
                             (std::log10(b1) - std::log10(b2));
            return s1 + (s2 - s1) * t;
        }
    }
    return std::nullopt;
}

std::vector<ReportRow> build_report(const std::vector<CsvRecord>& records,
                                    const std::vector<double>& thresholds) {
    if (records.empty()) throw std::invalid_argument("report: no records");

    // Group by (spec, detector), keeping first-appearance order.
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> curves;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.spec_name, r.detector);
        if (curves.find(key) == curves.end()) order.push_back(key);
        curves[key].emplace_back(r.snr_db, r.ber_bit);
    }

    std::vector<ReportRow> rows;
    for (const auto& key : order) {
        auto& curve = curves[key];
        std::sort(curve.begin(), curve.end());
        const double grid_max = curve.back().first;

        ReportRow row;
        row.spec_name = key.first;
        row.detector = key.second;
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
            if (curve[i + 1].second > curve[i].second) row.monotone = false;
        for (double thr : thresholds) {
            const auto cross = crossing_snr(curve, thr);
            std::ostringstream cell;
            if (cross) {
                cell.setf(std::ios::fixed);
                cell.precision(1);
                cell << *cross << "dB";
            } else {
                cell.setf(std::ios::fixed);
                cell.precision(0);
                cell << grid_max << "dB+";
            }
            row.cells.push_back(cell.str());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_report(const std::vector<ReportRow>& rows,
                          const std::vector<double>& thresholds) {
    std::vector<std::string> headers{"spec", "detector"};
    for (double thr : thresholds) {
        std::ostringstream h;
        h << "BER<=" << thr;
        headers.push_back(h.str());
    }
    headers.push_back("notes");

    std::vector<std::vector<std::string>> table;
    table.push_back(headers);
    for (const auto& row : rows) {
        std::vector<std::string> r{row.spec_name, row.detector};
        r.insert(r.end(), row.cells.begin(), row.cells.end());
        r.push_back(row.monotone ? "" : "non-monotone");
        table.push_back(std::move(r));
    }

    std::vector<std::size_t> widths(headers.size(), 0);
    for (const auto& r : table)
        for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());

    std::ostringstream out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t c = 0; c < table[i].size(); ++c) {
            out << table[i][c] << std::string(widths[c] - table[i][c].size(), ' ');
            out << (c + 1 < table[i].size() ? "  " : "");
        }
        out << '\n';
        if (i == 0) {
            for (std::size_t c = 0; c < widths.size(); ++c)
                out << std::string(widths[c], '-') << (c + 1 < widths.size() ? "  " : "");
            out << '\n';
        }
    }
    return out.str();
}

} // namespace ofdmdet
