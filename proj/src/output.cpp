#include "risknet/errors.hpp"
#include "risknet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace risknet {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw IoError("cannot format number");
    return std::string(buf, ptr);
}

std::vector<TraceRow> trace_rows(const std::vector<TrialTrace>& traces) {
    std::vector<TraceRow> rows;
    for (const auto& t : traces) {
        const double initial = t.trace.initial_surplus;
        for (const auto& s : t.trace.steps) {
            rows.push_back({t.trial, s.step, s.surplus, initial > 0.0 ? s.surplus / initial : 0.0, s.subset_index});
        }
    }
    return rows;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

template <typename T>
T parse_number(const std::string& s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "' in CSV");
    return value;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) throw ParseError(path.string() + ": unexpected header");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(split(line));
    }
    return rows;
}

constexpr const char* kTraceHeader = "trial,step,surplus,surplus_fraction,subset";
constexpr const char* kCaptureHeader = "trial,agent,degree,capture_fraction";

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::vector<TraceRow> rows;
    for (const auto& f : read_csv(path, kTraceHeader)) {
        if (f.size() != 5) throw ParseError("trace.csv: expected 5 fields");
        rows.push_back({parse_number<int>(f[0]), parse_number<int>(f[1]), parse_number<double>(f[2]),
                        parse_number<double>(f[3]), parse_number<int>(f[4])});
    }
    return rows;
}

std::vector<CaptureRecord> read_capture_csv(const std::filesystem::path& path) {
    std::vector<CaptureRecord> rows;
    for (const auto& f : read_csv(path, kCaptureHeader)) {
        if (f.size() != 4) throw ParseError("capture.csv: expected 4 fields");
        rows.push_back({parse_number<int>(f[0]), parse_number<int>(f[1]), parse_number<int>(f[2]),
                        parse_number<double>(f[3])});
    }
    return rows;
}

std::string trace_svg(const std::vector<TrialTrace>& traces) {
    constexpr double kWidth = 640, kHeight = 400, kMargin = 50;
    constexpr double kFloor = -16.0;  // log10 of the smallest plotted fraction
    int max_step = 1;
    for (const auto& t : traces)
        if (!t.trace.steps.empty()) max_step = std::max(max_step, t.trace.steps.back().step);
    auto x_of = [&](double step) { return kMargin + (kWidth - 2 * kMargin) * step / max_step; };
    auto y_of = [&](double fraction) {
        const double l = fraction > 0.0 ? std::max(std::log10(fraction), kFloor) : kFloor;
        return kMargin + (kHeight - 2 * kMargin) * (l / kFloor);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "<text x=\"" << kMargin << "\" y=\"30\" font-size=\"14\">log10 remaining surplus fraction vs. step</text>\n";
    for (int e = 0; e >= -16; e -= 4) {
        const double y = y_of(std::pow(10.0, e));
        svg << "<text x=\"5\" y=\"" << fixed(y) << "\" font-size=\"10\">1e" << e << "</text>\n";
    }
    for (const auto& t : traces) {
        svg << "<polyline fill=\"none\" stroke=\"green\" stroke-width=\"1\" points=\"" << fixed(x_of(0)) << ','
            << fixed(y_of(1.0));
        const double initial = t.trace.initial_surplus;
        for (const auto& s : t.trace.steps) {
            svg << ' ' << fixed(x_of(s.step)) << ',' << fixed(y_of(initial > 0.0 ? s.surplus / initial : 0.0));
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string capture_svg(const std::vector<CaptureRecord>& records, int n_agents) {
    constexpr double kWidth = 640, kHeight = 400, kMargin = 50;
    int max_degree = 1;
    double max_capture = n_agents > 0 ? 1.0 / n_agents : 0.0;
    for (const auto& r : records) {
        max_degree = std::max(max_degree, r.degree);
        max_capture = std::max(max_capture, r.capture_fraction);
    }
    if (!(max_capture > 0.0)) max_capture = 1.0;
    auto x_of = [&](double d) { return kMargin + (kWidth - 2 * kMargin) * d / max_degree; };
    auto y_of = [&](double c) {
        return kHeight - kMargin - (kHeight - 2 * kMargin) * std::clamp(c / max_capture, -0.1, 1.0);
    };
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "<text x=\"" << kMargin << "\" y=\"30\" font-size=\"14\">captured surplus per agent vs. degree</text>\n";
    for (const auto& r : records) {
        svg << "<circle cx=\"" << fixed(x_of(r.degree)) << "\" cy=\"" << fixed(y_of(r.capture_fraction))
            << "\" r=\"2\" fill=\"none\" stroke=\"green\"/>\n";
    }
    if (n_agents > 0) {
        const double y = y_of(1.0 / n_agents);
        svg << "<line x1=\"" << fixed(kMargin) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kWidth - kMargin)
            << "\" y2=\"" << fixed(y) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir, const OutputOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::ostringstream trace;
    trace << kTraceHeader << '\n';
    for (const auto& r : trace_rows(result.traces)) {
        trace << r.trial << ',' << r.step << ',' << format_double(r.surplus) << ',' << format_double(r.surplus_fraction)
              << ',' << r.subset << '\n';
    }
    write_file(out_dir / "trace.csv", trace.str());

    std::ostringstream capture;
    capture << kCaptureHeader << '\n';
    for (const auto& r : result.records) {
        capture << r.trial << ',' << r.agent << ',' << r.degree << ',' << format_double(r.capture_fraction) << '\n';
    }
    write_file(out_dir / "capture.csv", capture.str());

    std::ostringstream summary;
    summary << "degree,count,mean_capture,median_capture,fair_line,spearman\n";
    if (!result.records.empty()) {
        const CaptureSummary s = analyze_capture(result.records);
        for (const auto& row : s.by_degree) {
            summary << row.degree << ',' << row.count << ',' << format_double(row.mean_capture) << ','
                    << format_double(row.median_capture) << ',' << format_double(s.fair_line) << ','
                    << format_double(s.spearman) << '\n';
        }
    }
    write_file(out_dir / "summary.csv", summary.str());

    if (options.svg) {
        write_file(out_dir / "trace.svg", trace_svg(result.traces));
        write_file(out_dir / "capture.svg", capture_svg(result.records, result.n_agents));
    }
}

}  // namespace risknet
