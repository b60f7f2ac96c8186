#include "windroute/reports.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "windroute/errors.hpp"

namespace windroute {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Field {
    std::string_view text;
    std::size_t offset; // within the line
};

std::vector<Field> split_csv(std::string_view line)
{
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
        out.push_back(Field{trim(line.substr(start, end - start)), start});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t offset)
{
    throw ParseError(msg, line, offset);
}

double parse_number(const Field& f, const char* column, std::size_t line, std::size_t line_offset)
{
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    if (!f.text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (f.text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        std::ostringstream os;
        os << "line " << line << ", column " << column << ": cannot parse number '" << f.text << "'";
        fail(os.str(), line, line_offset + f.offset);
    }
    return v;
}

/// Splits a stream into lines, tracking byte offsets.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line)
    {
        offset_ = next_offset_;
        if (!std::getline(in_, line)) return false;
        ++number_;
        next_offset_ += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    std::size_t number() const { return number_; }
    std::size_t offset() const { return offset_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
    std::size_t offset_ = 0;
    std::size_t next_offset_ = 0;
};

bool blank(std::string_view s) { return trim(s).empty(); }

} // namespace

StationDirectory parse_station_directory(std::istream& in)
{
    LineReader reader(in);
    std::string line;
    while (reader.next(line) && blank(line)) {
    }
    if (reader.number() == 0 || blank(line)) fail("station directory: missing header", 0, 0);
    const auto header = split_csv(line);
    if (header.size() != 3 || header[0].text != "code" || header[1].text != "lat_deg" || header[2].text != "lon_deg") {
        fail("station directory: header must be 'code,lat_deg,lon_deg'", reader.number(), reader.offset());
    }

    StationDirectory dir;
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto f = split_csv(line);
        const std::size_t ln = reader.number();
        if (f.size() != 3) {
            std::ostringstream os;
            os << "station directory line " << ln << ": expected 3 fields, found " << f.size();
            fail(os.str(), ln, reader.offset());
        }
        if (f[0].text.empty()) fail("station directory line " + std::to_string(ln) + ": empty code", ln, reader.offset());
        const double lat = parse_number(f[1], "lat_deg", ln, reader.offset());
        const double lon = parse_number(f[2], "lon_deg", ln, reader.offset());
        if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
            fail("station directory line " + std::to_string(ln) + ": coordinate out of range", ln,
                 reader.offset() + f[1].offset);
        }
        const std::string code(f[0].text);
        if (!dir.emplace(code, GeoPoint::make(lat, lon)).second) {
            fail("station directory line " + std::to_string(ln) + ": duplicate code '" + code + "'", ln,
                 reader.offset());
        }
    }
    return dir;
}

std::vector<AircraftReport> AircraftReportTable::reports() const
{
    std::vector<AircraftReport> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        const double th = deg2rad(r.track_deg);
        out.push_back(AircraftReport::make(GeoPoint::make(r.lat_deg, r.lon_deg, r.alt_ft),
                                           WindVector{r.gs_kt * std::sin(th), r.gs_kt * std::cos(th)}, r.tas_kt,
                                           r.aircraft_id));
    }
    return out;
}

AircraftReportTable parse_aircraft_csv(std::istream& in, const CsvOptions& opts)
{
    LineReader reader(in);
    std::string line;
    while (reader.next(line) && blank(line)) {
    }
    if (reader.number() == 0 || blank(line)) fail("aircraft CSV: missing header", 0, 0);

    constexpr std::size_t kColumns = std::size(kAircraftCsvColumns);
    std::size_t col_index[kColumns];
    {
        const auto header = split_csv(line);
        std::map<std::string_view, std::size_t> by_name;
        for (std::size_t i = 0; i < header.size(); ++i) by_name.emplace(header[i].text, i);
        for (std::size_t c = 0; c < kColumns; ++c) {
            const auto it = by_name.find(kAircraftCsvColumns[c]);
            if (it == by_name.end()) {
                fail(std::string("aircraft CSV header: missing column '") + kAircraftCsvColumns[c] + "'",
                     reader.number(), reader.offset());
            }
            col_index[c] = it->second;
        }
    }

    AircraftReportTable table;
    while (reader.next(line)) {
        if (blank(line)) continue;
        const std::size_t ln = reader.number();
        const auto f = split_csv(line);
        for (std::size_t c = 0; c < kColumns; ++c) {
            if (col_index[c] >= f.size()) {
                std::ostringstream os;
                os << "line " << ln << ", column " << kAircraftCsvColumns[c] << ": missing field";
                fail(os.str(), ln, reader.offset() + line.size());
            }
        }
        auto num = [&](std::size_t c) { return parse_number(f[col_index[c]], kAircraftCsvColumns[c], ln, reader.offset()); };

        AircraftRow row;
        row.line = ln;
        row.time_utc = std::string(f[col_index[0]].text);
        row.aircraft_id = std::string(f[col_index[1]].text);
        row.lat_deg = num(2);
        row.lon_deg = num(3);
        row.alt_ft = num(4);
        row.gs_kt = num(5);
        row.track_deg = num(6);
        row.tas_kt = num(7);

        const char* bad_col = nullptr;
        const char* why = nullptr;
        if (row.lat_deg < -90.0 || row.lat_deg > 90.0) {
            bad_col = "lat_deg", why = "outside [-90, 90]";
        } else if (row.lon_deg < -180.0 || row.lon_deg > 180.0) {
            bad_col = "lon_deg", why = "outside [-180, 180]";
        } else if (row.alt_ft < 0.0) {
            bad_col = "alt_ft", why = "negative";
        } else if (!(row.gs_kt > 0.0 && row.gs_kt < 900.0)) {
            bad_col = "gs_kt", why = "outside (0, 900)";
        } else if (row.track_deg < 0.0 || row.track_deg > 360.0) {
            bad_col = "track_deg", why = "outside [0, 360]";
        } else if (!(row.tas_kt > 0.0 && row.tas_kt < 700.0)) {
            bad_col = "tas_kt", why = "outside (0, 700)";
        }
        if (bad_col) {
            std::ostringstream os;
            os << "line " << ln << ", column " << bad_col << ": value " << why;
            if (!opts.skip_invalid_rows) fail(os.str(), ln, reader.offset());
            table.rejected.push_back(RejectedRow{ln, bad_col, os.str()});
            continue;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace windroute
