#include "epimix/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace epimix {

namespace {

std::string trim(const std::string& s) {
    size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

bool parse_int(const std::string& s, long& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// "YYYY-MM-DD" -> days since epoch; returns false on malformed input.
bool parse_iso_date(const std::string& s, long& days) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    long y = 0, m = 0, d = 0;
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
        !parse_int(s.substr(8, 2), d))
        return false;
    if (m < 1 || m > 12 || d < 1 || d > 31) return false;
    days = days_from_civil(static_cast<int>(y), static_cast<unsigned>(m),
                           static_cast<unsigned>(d));
    return true;
}

}  // namespace

long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

void IngestConfig::validate() const {
    if (smoothing_window < 1 || smoothing_window % 2 == 0)
        throw std::invalid_argument("IngestConfig: smoothing_window must be odd and >= 1");
    if (!(zero_floor > 0.0))
        throw std::invalid_argument("IngestConfig: zero_floor must be > 0");
    if (date_origin) {
        long unused;
        if (!parse_iso_date(*date_origin, unused))
            throw std::invalid_argument("IngestConfig: date_origin must be YYYY-MM-DD");
    }
}

CaseSeries ingest_text(const std::string& text, const IngestConfig& cfg,
                       IngestReport* report) {
    cfg.validate();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    enum class Mode { Unknown, IntegerDay, IsoDate } mode = Mode::Unknown;

    std::vector<long> times;
    std::vector<double> values;
    std::vector<std::string> bad_rows;
    IngestReport local;
    IngestReport& rep = report ? *report : local;

    long origin_days = 0;
    bool have_origin = false;
    if (cfg.date_origin) {
        parse_iso_date(*cfg.date_origin, origin_days);
        have_origin = true;
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!saw_header) {
            saw_header = true;  // first nonempty line is the header
            continue;
        }
        const size_t comma = line.find(',');
        if (comma == std::string::npos) {
            bad_rows.push_back(std::to_string(line_no));
            continue;
        }
        const std::string col_t = trim(line.substr(0, comma));
        const std::string col_v = trim(line.substr(comma + 1));

        long t = 0;
        double v = 0.0;
        bool row_ok = parse_double(col_v, v);
        if (row_ok) {
            if (mode == Mode::Unknown) {
                long dummy;
                if (parse_int(col_t, dummy))
                    mode = Mode::IntegerDay;
                else if (parse_iso_date(col_t, dummy))
                    mode = Mode::IsoDate;
                else
                    row_ok = false;
            }
            if (row_ok && mode == Mode::IntegerDay) {
                row_ok = parse_int(col_t, t);
            } else if (row_ok && mode == Mode::IsoDate) {
                long days;
                row_ok = parse_iso_date(col_t, days);
                if (row_ok) {
                    if (!have_origin) {
                        origin_days = days;
                        have_origin = true;
                    }
                    t = days - origin_days;
                }
            }
        }
        if (!row_ok || !std::isfinite(v)) {
            bad_rows.push_back(std::to_string(line_no));
            continue;
        }
        if (v <= 0.0) {
            v = cfg.zero_floor;
            ++rep.floored_rows;
            rep.warnings.push_back("line " + std::to_string(line_no) +
                                   ": nonpositive count floored to " +
                                   std::to_string(cfg.zero_floor));
        }
        times.push_back(t);
        values.push_back(v);
    }

    if (!bad_rows.empty()) {
        std::string msg = "ingest: malformed rows at line(s) ";
        for (size_t i = 0; i < bad_rows.size(); ++i)
            msg += (i ? ", " : "") + bad_rows[i];
        throw std::invalid_argument(msg);
    }
    if (times.size() < 3)
        throw std::invalid_argument("ingest: need at least 3 data rows");
    for (size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("ingest: time column must be strictly increasing");
        if (times[i] != times[i - 1] + 1)
            throw std::invalid_argument(
                "ingest: time column must advance by one day per row (gap after t=" +
                std::to_string(times[i - 1]) + ")");
    }

    values = moving_average(values, cfg.smoothing_window);
    return CaseSeries(static_cast<int>(times.front()), std::move(values));
}

CaseSeries ingest(const std::string& path, const IngestConfig& cfg, IngestReport* report) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("ingest: cannot open " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return ingest_text(buf.str(), cfg, report);
}

void write_ensemble_csv(std::ostream& os, const std::vector<Trajectory>& ensemble) {
    os << "trial,t,n1,n2,crossing_time\n";
    for (size_t trial = 0; trial < ensemble.size(); ++trial) {
        const Trajectory& traj = ensemble[trial];
        const bool two = !traj.n2.empty();
        std::string crossing;
        if (two)
            crossing = traj.crossing_time == Trajectory::kNever
                           ? "never"
                           : std::to_string(traj.crossing_time);
        for (size_t t = 0; t < traj.n1.size(); ++t) {
            os << trial << ',' << t << ',' << traj.n1[t] << ',';
            if (two) os << traj.n2[t];
            os << ',' << crossing << '\n';
        }
    }
}

void write_forecast_csv(std::ostream& os, const std::vector<std::pair<int, double>>& rows) {
    os << "t,predicted\n";
    os.precision(12);
    for (const auto& [t, v] : rows) os << t << ',' << v << '\n';
}

void write_stransform_csv(std::ostream& os, const STransform& st) {
    os << "t,s\n";
    os.precision(12);
    for (int i = 0; i < st.size(); ++i)
        os << st.t_first + i << ',' << st.values[static_cast<size_t>(i)] << '\n';
}

void write_closedloop_csv(std::ostream& os, const ClosedLoopResult& result) {
    os << "t,infected,alpha\n";
    os.precision(12);
    for (const auto& pt : result.points)
        os << pt.t << ',' << pt.infected << ',' << pt.alpha << '\n';
}

}  // namespace epimix
