#include <sstream>

#include "doctest.h"
#include "epimix/io.hpp"

using namespace epimix;

TEST_CASE("ingest: integer-day CSV") {
    IngestConfig cfg;
    const CaseSeries series = ingest_text("t,cases\n0,10\n1,12\n2,15\n", cfg);
    CHECK(series.t0() == 0);
    REQUIRE(series.size() == 3);
    CHECK(series.values() == std::vector<double>{10.0, 12.0, 15.0});
}

TEST_CASE("ingest: zero counts are floored with a warning") {
    IngestConfig cfg;
    cfg.zero_floor = 1.0;
    IngestReport report;
    const CaseSeries series = ingest_text("t,cases\n0,10\n1,0\n2,15\n", cfg, &report);
    CHECK(series.values()[1] == 1.0);
    CHECK(report.floored_rows == 1);
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("line 3") != std::string::npos);
}

TEST_CASE("ingest: smoothing window of three") {
    IngestConfig cfg;
    cfg.smoothing_window = 3;
    const CaseSeries series = ingest_text("t,cases\n0,10\n1,12\n2,15\n", cfg);
    CHECK(series.values()[0] == doctest::Approx(11.0));
    CHECK(series.values()[1] == doctest::Approx(37.0 / 3.0));
    CHECK(series.values()[2] == doctest::Approx(13.5));
}

TEST_CASE("ingest: ISO dates map onto day offsets") {
    IngestConfig cfg;
    const CaseSeries series =
        ingest_text("date,cases\n2020-03-01,5\n2020-03-02,6\n2020-03-03,7\n", cfg);
    CHECK(series.t0() == 0);
    CHECK(series.size() == 3);

    IngestConfig origin = cfg;
    origin.date_origin = "2020-02-29";
    const CaseSeries shifted =
        ingest_text("date,cases\n2020-03-01,5\n2020-03-02,6\n2020-03-03,7\n", origin);
    CHECK(shifted.t0() == 1);
}

TEST_CASE("ingest: malformed and non-monotone input is rejected with line numbers") {
    IngestConfig cfg;
    CHECK_THROWS_WITH_AS(ingest_text("t,cases\n0,10\n1,oops\n2,15\n", cfg),
                         doctest::Contains("line(s) 3"), std::invalid_argument);
    CHECK_THROWS_AS(ingest_text("t,cases\n0,10\n2,12\n1,15\n", cfg), std::invalid_argument);
    CHECK_THROWS_AS(ingest_text("t,cases\n0,10\n2,12\n4,15\n", cfg), std::invalid_argument);
    CHECK_THROWS_AS(ingest_text("t,cases\n0,10\n1,12\n", cfg), std::invalid_argument);
    CHECK_THROWS_AS(ingest("/nonexistent/file.csv", cfg), std::invalid_argument);
}

TEST_CASE("ingest config validation") {
    IngestConfig bad;
    bad.smoothing_window = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.smoothing_window = 1;
    bad.zero_floor = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.zero_floor = 1.0;
    bad.date_origin = "03/01/2020";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("days_from_civil matches known anchors") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2020, 3, 1) - days_from_civil(2020, 2, 29) == 1);
    CHECK(days_from_civil(2021, 1, 1) - days_from_civil(2020, 1, 1) == 366);  // leap year
}

TEST_CASE("ensemble CSV layout") {
    Trajectory single;
    single.n1 = {1, 3, 0};
    Trajectory crossed;
    crossed.n1 = {1, 2, 4};
    crossed.n2 = {0, 0, 2};
    crossed.crossing_time = 2;
    Trajectory never;
    never.n1 = {1, 0, 0};
    never.n2 = {0, 0, 0};

    std::ostringstream single_out;
    write_ensemble_csv(single_out, {single});
    CHECK(single_out.str() == "trial,t,n1,n2,crossing_time\n"
                              "0,0,1,,\n0,1,3,,\n0,2,0,,\n");

    std::ostringstream two_out;
    write_ensemble_csv(two_out, {crossed, never});
    CHECK(two_out.str().find("0,2,4,2,2\n") != std::string::npos);
    CHECK(two_out.str().find("1,0,1,0,never\n") != std::string::npos);
}

TEST_CASE("forecast and transform CSV writers") {
    std::ostringstream fc;
    write_forecast_csv(fc, {{5, 12.25}, {6, 13.5}});
    CHECK(fc.str() == "t,predicted\n5,12.25\n6,13.5\n");

    STransform st;
    st.t_first = 1;
    st.values = {-0.5, 0.25};
    std::ostringstream sc;
    write_stransform_csv(sc, st);
    CHECK(sc.str() == "t,s\n1,-0.5\n2,0.25\n");
}
