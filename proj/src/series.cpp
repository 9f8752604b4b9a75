#include "windcast/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "windcast/errors.hpp"

namespace windcast {

void TimeSeries::validate() const {
    if (values.empty()) throw DataError("time series is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw DataError("non-finite value at position " + std::to_string(i));
        if (physical && values[i] < 0.0)
            throw DataError("negative speed " + std::to_string(values[i]) +
                            " at position " + std::to_string(i) +
                            " in physical series");
    }
}

namespace {

// Strips an optional trailing '\r' so CRLF files parse cleanly.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_double_field(const std::string& field, std::size_t line_no) {
    double v{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("bad numeric field '" + field + "'", line_no);
    return v;
}

std::int64_t parse_index_field(const std::string& field, std::size_t line_no) {
    std::int64_t v{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("bad index field '" + field + "'", line_no);
    if (v < 0) throw ParseError("negative sample index", line_no);
    return v;
}

struct Row {
    std::int64_t index;
    double speed;
};

std::vector<Row> parse_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw DataError("empty file '" + path + "'");
    ++line_no;
    chomp(line);
    if (line != "index,speed_ms")
        throw ParseError("expected header 'index,speed_ms', got '" + line + "'", line_no);

    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError("expected exactly two columns", line_no);
        Row row;
        row.index = parse_index_field(line.substr(0, comma), line_no);
        row.speed = parse_double_field(line.substr(comma + 1), line_no);
        if (!std::isfinite(row.speed))
            throw ParseError("non-finite speed", line_no);
        if (!rows.empty() && row.index <= rows.back().index)
            throw ParseError("sample index not strictly increasing", line_no);
        rows.push_back(row);
    }
    if (rows.empty()) throw DataError("no data rows in '" + path + "'");
    return rows;
}

std::vector<Row> longest_contiguous_run(const std::vector<Row>& rows) {
    std::size_t best_begin = 0, best_len = 1;
    std::size_t begin = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].index != rows[i - 1].index + 1) begin = i;
        if (i - begin + 1 > best_len) {
            best_len = i - begin + 1;
            best_begin = begin;
        }
    }
    return {rows.begin() + best_begin, rows.begin() + best_begin + best_len};
}

}  // namespace

TimeSeries read_csv(const std::string& path, const GapPolicy& policy) {
    std::vector<Row> rows = parse_rows(path);

    if (policy.mode == GapPolicy::Mode::drop_leading_trailing)
        rows = longest_contiguous_run(rows);

    TimeSeries out;
    out.start_index = rows.front().index;
    out.label = path;
    out.physical = true;
    out.values.reserve(rows.size());
    out.values.push_back(rows.front().speed);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::int64_t gap = rows[i].index - rows[i - 1].index - 1;
        if (gap > 0) {
            if (policy.mode != GapPolicy::Mode::interpolate_linear)
                throw GapError("gap of " + std::to_string(gap) + " samples before index " +
                               std::to_string(rows[i].index) + " (policy rejects gaps)");
            if (static_cast<std::size_t>(gap) > policy.max_gap)
                throw GapError("gap of " + std::to_string(gap) + " samples before index " +
                               std::to_string(rows[i].index) + " exceeds max_gap " +
                               std::to_string(policy.max_gap));
            double a = rows[i - 1].speed;
            double b = rows[i].speed;
            for (std::int64_t k = 1; k <= gap; ++k) {
                double t = static_cast<double>(k) / static_cast<double>(gap + 1);
                out.values.push_back(a + t * (b - a));
            }
        }
        out.values.push_back(rows[i].speed);
    }

    out.validate();
    return out;
}

void write_csv(const std::string& path, const TimeSeries& series) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "index,speed_ms\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof buf, series.values[i]);
        out << (series.start_index + static_cast<std::int64_t>(i)) << ','
            << std::string_view(buf, res.ptr - buf) << '\n';
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec) {
    const std::size_t n = series.size();
    std::size_t boundary;
    if (spec.kind == SplitSpec::Kind::fraction) {
        if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
            throw ArgumentError("train fraction must be in (0,1)");
        boundary = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
    } else {
        boundary = spec.boundary;
    }
    if (boundary == 0 || boundary >= n)
        throw ArgumentError("split at " + std::to_string(boundary) + " of " +
                            std::to_string(n) + " samples leaves an empty segment");

    TimeSeries train = series;
    TimeSeries test = series;
    train.values.assign(series.values.begin(), series.values.begin() + boundary);
    test.values.assign(series.values.begin() + boundary, series.values.end());
    test.start_index = series.start_index + static_cast<std::int64_t>(boundary);
    return {std::move(train), std::move(test)};
}

}  // namespace windcast
