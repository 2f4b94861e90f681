#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epimix/closedloop.hpp"
#include "epimix/model.hpp"
#include "epimix/sim.hpp"
#include "epimix/transform.hpp"

namespace epimix {

struct IngestConfig {
    int smoothing_window = 1;  // centered moving average; odd, 1 = off
    double zero_floor = 1.0;   // substituted for nonpositive counts
    std::optional<std::string> date_origin;  // ISO date mapped to t = 0

    void validate() const;
};

struct IngestReport {
    int floored_rows = 0;
    std::vector<std::string> warnings;
};

/// Parses a two-column CSV with header: (t, cases) with integer days, or
/// (date, cases) with ISO-8601 dates. Nonpositive counts are floored to
/// zero_floor with a warning, then the moving average is applied. Malformed
/// rows are reported with their line numbers; a time column that is not
/// consecutive increasing days is rejected.
CaseSeries ingest(const std::string& path, const IngestConfig& cfg,
                  IngestReport* report = nullptr);
CaseSeries ingest_text(const std::string& text, const IngestConfig& cfg,
                       IngestReport* report = nullptr);

/// Days since 1970-01-01 of a proleptic Gregorian date.
long days_from_civil(int year, unsigned month, unsigned day);

/// Ensemble CSV: trial,t,n1,n2,crossing_time. n2 and crossing_time are blank
/// for single-community trajectories; crossing_time prints "never" when no
/// infection reached community 2.
void write_ensemble_csv(std::ostream& os, const std::vector<Trajectory>& ensemble);

void write_forecast_csv(std::ostream& os, const std::vector<std::pair<int, double>>& rows);

void write_stransform_csv(std::ostream& os, const STransform& st);

void write_closedloop_csv(std::ostream& os, const ClosedLoopResult& result);

}  // namespace epimix
