#include "windroute/fb.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "windroute/errors.hpp"

namespace windroute {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int two_digits(std::string_view s, std::size_t at) { return (s[at] - '0') * 10 + (s[at + 1] - '0'); }

[[noreturn]] void lexical_error(std::string_view text, std::size_t at, std::size_t base, const char* why)
{
    std::ostringstream os;
    os << "FB group '" << text << "': " << why << " at byte " << (base + at);
    throw ParseError(os.str(), 0, base + at);
}

} // namespace

FbEntry decode_fb_group(std::string_view text, int level_ft, std::size_t base_offset)
{
    FbEntry e;
    if (std::all_of(text.begin(), text.end(), [](char c) { return c == ' ' || c == '\t'; })) return e;

    const std::size_t n = text.size();
    if (n != 4 && n != 6 && n != 7) lexical_error(text, 0, base_offset, "expected 4, 6 or 7 characters");
    for (std::size_t i = 0; i < 4; ++i) {
        if (!is_digit(text[i])) lexical_error(text, i, base_offset, "expected a digit");
    }
    if (n == 6) {
        if (level_ft < 24000) lexical_error(text, 4, base_offset, "unsigned temperature below 24000 ft");
        for (std::size_t i = 4; i < 6; ++i) {
            if (!is_digit(text[i])) lexical_error(text, i, base_offset, "expected a digit");
        }
        e.temp_c = -two_digits(text, 4);
    } else if (n == 7) {
        if (text[4] != '+' && text[4] != '-') lexical_error(text, 4, base_offset, "expected temperature sign");
        for (std::size_t i = 5; i < 7; ++i) {
            if (!is_digit(text[i])) lexical_error(text, i, base_offset, "expected a digit");
        }
        const int t = two_digits(text, 5);
        e.temp_c = text[4] == '-' ? -t : t;
    }

    const int dd = two_digits(text, 0);
    const int ff = two_digits(text, 2);
    if (dd == 99) {
        if (ff != 0) {
            std::ostringstream os;
            os << "FB group '" << text << "': code 99 with nonzero speed at byte " << base_offset;
            throw FormatError(os.str(), 0, base_offset);
        }
        e.kind = FbKind::Calm;
        e.light_variable = true;
        return e;
    }
    if (dd <= 36) {
        e.kind = FbKind::Wind;
        e.direction_from_deg = (dd * 10) % 360;
        e.speed_kt = ff;
        return e;
    }
    if (dd >= 51 && dd <= 86) {
        e.kind = FbKind::Wind;
        e.direction_from_deg = ((dd - 50) * 10) % 360;
        e.speed_kt = ff + 100;
        return e;
    }
    std::ostringstream os;
    os << "FB group '" << text << "': direction code " << dd << " is reserved at byte " << base_offset;
    throw FormatError(os.str(), 0, base_offset);
}

std::string encode_fb_group(int direction_from_deg, int speed_kt, std::optional<int> temp_c, int level_ft)
{
    if (direction_from_deg < 0 || direction_from_deg >= 360 || direction_from_deg % 10 != 0) {
        throw InputError("encode_fb_group: direction must be a multiple of 10 in [0, 360)");
    }
    if (speed_kt < 0 || speed_kt > 199) throw InputError("encode_fb_group: speed must be in [0, 199]");
    int dd = direction_from_deg == 0 ? 36 : direction_from_deg / 10;
    int ff = speed_kt;
    if (ff >= 100) {
        dd += 50;
        ff -= 100;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d%02d", dd, ff);
    std::string out = buf;
    if (temp_c) {
        const int t = *temp_c;
        if (t < -99 || t > 99) throw InputError("encode_fb_group: temperature must be within +-99 C");
        if (level_ft >= 24000 && t <= 0) {
            std::snprintf(buf, sizeof buf, "%02d", -t);
        } else {
            std::snprintf(buf, sizeof buf, "%c%02d", t < 0 ? '-' : '+', std::abs(t));
        }
        out += buf;
    }
    return out;
}

namespace {

struct Token {
    std::string_view text;
    std::size_t begin; // column within the line
};

std::vector<Token> tokenize(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(Token{line.substr(start, i - start), start});
    }
    return out;
}

bool parse_level(std::string_view s, int& out)
{
    if (s.empty() || s.size() > 6) return false;
    int v = 0;
    for (char c : s) {
        if (!is_digit(c)) return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

bool valid_code(std::string_view s)
{
    if (s.empty() || s.size() > 5) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

} // namespace

WindsAloftBulletin parse_fb_bulletin(std::string_view text)
{
    WindsAloftBulletin b;
    std::vector<std::size_t> level_end_cols;
    bool have_header = false;

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::size_t line_offset = pos;
        ++line_no;
        pos = eol + 1;

        const auto tokens = tokenize(line);
        if (tokens.empty()) {
            if (eol == text.size()) break;
            continue;
        }

        if (!have_header) {
            for (std::size_t k = 0; k + 1 < tokens.size(); ++k) {
                if (tokens[k].text == "VALID") {
                    b.valid_time = std::string(tokens[k + 1].text);
                    break;
                }
            }
            if (tokens[0].text == "FT" && tokens[0].begin == 0) {
                for (std::size_t k = 1; k < tokens.size(); ++k) {
                    int lvl = 0;
                    if (!parse_level(tokens[k].text, lvl)) {
                        std::ostringstream os;
                        os << "FB header line " << line_no << ": bad level '" << tokens[k].text << "'";
                        throw ParseError(os.str(), line_no, line_offset + tokens[k].begin);
                    }
                    if (!b.levels_ft.empty() && lvl <= b.levels_ft.back()) {
                        std::ostringstream os;
                        os << "FB header line " << line_no << ": levels must be strictly increasing";
                        throw ParseError(os.str(), line_no, line_offset + tokens[k].begin);
                    }
                    b.levels_ft.push_back(lvl);
                    level_end_cols.push_back(tokens[k].begin + tokens[k].text.size());
                }
                if (b.levels_ft.empty()) throw ParseError("FB header lists no levels", line_no, line_offset);
                have_header = true;
            }
            if (eol == text.size()) break;
            continue;
        }

        if (tokens[0].begin != 0 || !valid_code(tokens[0].text)) {
            std::ostringstream os;
            os << "FB line " << line_no << ": expected a station code at column 1";
            throw ParseError(os.str(), line_no, line_offset + tokens[0].begin);
        }
        const std::string code(tokens[0].text);
        if (b.entries.count(code)) {
            std::ostringstream os;
            os << "FB line " << line_no << ": duplicate station '" << code << "'";
            throw ParseError(os.str(), line_no, line_offset);
        }
        const std::size_t groups = tokens.size() - 1;
        if (groups > b.levels_ft.size()) {
            std::ostringstream os;
            os << "FB line " << line_no << ": " << groups << " groups for " << b.levels_ft.size() << " levels";
            throw ParseError(os.str(), line_no, line_offset + tokens.back().begin);
        }

        std::vector<FbEntry> row(b.levels_ft.size());
        std::size_t next_level = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            const Token& t = tokens[g + 1];
            std::size_t level = next_level;
            if (groups < b.levels_ft.size()) {
                // nearest header column by right edge, never reusing a level
                const std::size_t end = t.begin + t.text.size();
                std::size_t best = next_level;
                std::size_t best_dist = static_cast<std::size_t>(-1);
                const std::size_t last = b.levels_ft.size() - (groups - g);
                for (std::size_t k = next_level; k <= last; ++k) {
                    const std::size_t d = end > level_end_cols[k] ? end - level_end_cols[k] : level_end_cols[k] - end;
                    if (d < best_dist) {
                        best_dist = d;
                        best = k;
                    }
                }
                level = best;
            }
            row[level] = decode_fb_group(t.text, b.levels_ft[level], line_offset + t.begin);
            next_level = level + 1;
        }
        b.entries.emplace(code, std::move(row));
        b.stations.push_back(code);
        if (eol == text.size()) break;
    }
    if (!have_header) throw ParseError("FB bulletin has no 'FT' level header", 0, 0);
    return b;
}

std::string format_fb_bulletin(const WindsAloftBulletin& bulletin)
{
    constexpr std::size_t kCode = 4;
    constexpr std::size_t kColumn = 8;
    auto right = [](std::string& line, std::size_t end_col, const std::string& text) {
        if (line.size() < end_col) line.resize(end_col, ' ');
        line.replace(end_col - text.size(), text.size(), text);
    };
    auto rstrip = [](std::string s) {
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s;
    };

    std::ostringstream os;
    os << "DATA BASED ON " << bulletin.valid_time << "\n";
    os << "VALID " << bulletin.valid_time << "\n\n";
    std::string header = "FT";
    for (std::size_t k = 0; k < bulletin.levels_ft.size(); ++k) {
        right(header, kCode + kColumn * (k + 1), std::to_string(bulletin.levels_ft[k]));
    }
    os << header << "\n";
    for (const auto& code : bulletin.stations) {
        const auto& row = bulletin.entries.at(code);
        std::string line = code;
        for (std::size_t k = 0; k < bulletin.levels_ft.size() && k < row.size(); ++k) {
            const FbEntry& e = row[k];
            std::string group;
            if (e.kind == FbKind::Missing) continue;
            if (e.kind == FbKind::Calm) {
                group = "9900";
                if (e.temp_c) group = encode_fb_group(90, 0, e.temp_c, bulletin.levels_ft[k]).replace(0, 4, "9900");
            } else {
                group = encode_fb_group(e.direction_from_deg, e.speed_kt, e.temp_c, bulletin.levels_ft[k]);
            }
            right(line, kCode + kColumn * (k + 1), group);
        }
        os << rstrip(line) << "\n";
    }
    return os.str();
}

StationObservationSet fb_to_station_observations(const WindsAloftBulletin& bulletin,
                                                 const StationDirectory& directory, int level_ft,
                                                 const FbConversionOptions& opts)
{
    const auto it = std::find(bulletin.levels_ft.begin(), bulletin.levels_ft.end(), level_ft);
    if (it == bulletin.levels_ft.end()) {
        throw InputError("level " + std::to_string(level_ft) + " ft not present in the bulletin");
    }
    const auto level = static_cast<std::size_t>(it - bulletin.levels_ft.begin());

    StationObservationSet out;
    for (const auto& code : bulletin.stations) {
        const FbEntry& e = bulletin.entries.at(code)[level];
        if (e.kind == FbKind::Missing) continue;
        if (e.light_variable && !opts.include_light_variable) continue;
        const auto site = directory.find(code);
        if (site == directory.end()) {
            out.warnings.push_back("station '" + code + "' not in the station directory; skipped");
            continue;
        }
        GeoPoint p = site->second;
        p.alt_ft = level_ft;
        const WindVector w =
            e.kind == FbKind::Calm ? WindVector{0.0, 0.0} : WindVector::from_direction(e.direction_from_deg, e.speed_kt);
        out.observations.push_back(StationObservation{p, w});
        out.station_codes.push_back(code);
    }
    return out;
}

} // namespace windroute
