#include "resmpc/series.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "resmpc/errors.hpp"

namespace resmpc {

std::size_t InflowSeries::index_of(Timestamp t) const {
    const std::int64_t off = t - start;
    if (off < 0 || off >= std::int64_t(values.size()))
        fail(ErrorKind::InvalidInput,
             "timestamp " + format_timestamp(t) + " outside inflow record [" +
                 format_timestamp(start) + ", " + format_timestamp(end()) + ")");
    return std::size_t(off);
}

void InflowSeries::validate() const {
    if (values.empty())
        fail(ErrorKind::Validation, "inflow series is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            fail(ErrorKind::Validation,
                 "non-finite inflow at " + format_timestamp(time_at(i)));
        if (values[i] < 0.0)
            fail(ErrorKind::Validation,
                 "negative inflow at " + format_timestamp(time_at(i)));
    }
}

namespace {

double parse_double_field(const std::string& text, int line_no) {
    errno = 0;
    char* endp = nullptr;
    const double v = std::strtod(text.c_str(), &endp);
    if (endp == text.c_str() || *endp != '\0' || errno == ERANGE)
        fail(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                   ": bad numeric value '" + text + "'");
    return v;
}

}  // namespace

InflowSeries load_inflow_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open inflow file '" + path + "'");

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line))
        fail(ErrorKind::Parse, "empty inflow file '" + path + "'");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,inflow_m3s")
        fail(ErrorKind::Parse,
             "line 1: expected header 'timestamp,inflow_m3s', got '" + line + "'");

    InflowSeries series;
    bool have_start = false;
    Timestamp expected;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(ErrorKind::Parse,
                 "line " + std::to_string(line_no) + ": expected 2 fields");
        Timestamp t;
        try {
            t = parse_timestamp(line.substr(0, comma));
        } catch (const Error& e) {
            fail(ErrorKind::Parse,
                 "line " + std::to_string(line_no) + ": " + e.what());
        }
        const double q = parse_double_field(line.substr(comma + 1), line_no);
        if (!std::isfinite(q))
            fail(ErrorKind::Validation, "line " + std::to_string(line_no) +
                                            ": non-finite inflow");
        if (q < 0.0)
            fail(ErrorKind::Validation, "line " + std::to_string(line_no) +
                                            ": negative inflow " +
                                            std::to_string(q));
        if (!have_start) {
            series.start = t;
            expected = t;
            have_start = true;
        }
        if (t < expected)
            fail(ErrorKind::Validation,
                 "line " + std::to_string(line_no) +
                     ": duplicate or out-of-order timestamp " +
                     format_timestamp(t));
        if (t > expected)
            fail(ErrorKind::Validation,
                 "gap in inflow record: missing hours [" +
                     format_timestamp(expected) + ", " + format_timestamp(t) +
                     ") before line " + std::to_string(line_no));
        series.values.push_back(q);
        expected = expected + 1;
    }
    if (series.values.empty())
        fail(ErrorKind::Parse, "inflow file '" + path + "' has no data rows");
    return series;
}

void save_inflow_csv(const InflowSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
    if (!out)
        fail(ErrorKind::Io, "cannot write inflow file '" + path + "'");
    out << "timestamp,inflow_m3s\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
        out << format_timestamp(series.time_at(i)) << ',' << buf << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace resmpc
