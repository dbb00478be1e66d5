#include "fixtures.hpp"

#include "mrnn/csv.hpp"
#include "mrnn/errors.hpp"
#include "mrnn/evalio.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

using namespace mrnn;

namespace {

std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
    const std::string path = dir + "/" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("timestamps parse in ISO and epoch forms") {
    CHECK(parse_timestamp("1970-01-02") == 86400.0);
    CHECK(parse_timestamp("2020-01-24T13:00:00Z") == parse_timestamp("2020-01-24 13:00"));
    CHECK(parse_timestamp("2020-01-24T13:00:00+00:00") == parse_timestamp("2020-01-24T13:00:00"));
    CHECK(parse_timestamp("1579870800") == 1579870800.0);
    CHECK(parse_timestamp("2020-01-24T13:00:00Z") == 1579870800.0);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), ConfigError);
    CHECK_THROWS_AS(parse_timestamp("2020-13-01"), ConfigError);
}

TEST_CASE("load_csv reads well-formed files") {
    const std::string dir = fixture::scratch_dir("load_ok");
    const auto path = write_file(dir, "a.csv", "timestamp,value\n2020-01-01T00:00:00Z,1.5\n2020-01-01T01:00:00Z,2\n2020-01-01T02:00:00Z,2.5\n");
    const RawSeries raw = load_csv(path, CsvSchema{});
    CHECK(raw.values.size() == 3);
    CHECK(raw.values[2] == 2.5);
    CHECK(raw.source == path);

    const auto renamed = write_file(dir, "b.csv", "\xEF\xBB\xBFwhen,\"price\"\r\n1000,1\r\n2000,\"2\"\r\n");
    const RawSeries r2 = load_csv(renamed, CsvSchema{"when", "price"});
    CHECK(r2.timestamps == std::vector<double>{1000.0, 2000.0});
}

TEST_CASE("load_csv errors name the file, row and column") {
    const std::string dir = fixture::scratch_dir("load_bad");
    const auto bad_value = write_file(dir, "v.csv", "timestamp,value\n1,1\n2,abc\n");
    try {
        load_csv(bad_value, CsvSchema{});
        FAIL("expected a parse error");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("'value'") != std::string::npos);
    }
    const auto unordered = write_file(dir, "o.csv", "timestamp,value\n5,1\n3,2\n");
    CHECK_THROWS_WITH_AS(load_csv(unordered, CsvSchema{}), doctest::Contains("strictly increasing"), IoError);
    const auto dup = write_file(dir, "d.csv", "timestamp,value\n5,1\n5,2\n");
    CHECK_THROWS_AS(load_csv(dup, CsvSchema{}), IoError);
    CHECK_THROWS_WITH_AS(load_csv(dir + "/missing.csv", CsvSchema{}), doctest::Contains("missing.csv"), IoError);
    const auto no_col = write_file(dir, "c.csv", "time,value\n1,1\n");
    CHECK_THROWS_WITH_AS(load_csv(no_col, CsvSchema{}), doctest::Contains("timestamp"), IoError);
    const auto ragged = write_file(dir, "r.csv", "timestamp,value\n1,1\n2\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged, CsvSchema{}), doctest::Contains("line 3"), IoError);
}

TEST_CASE("daily aggregation") {
    RawSeries raw;
    raw.timestamps = {0, 3600, 7200, 86400, 90000};
    raw.values = {1, 1, 1, 1, 3};
    const DailyFeatures d = daily_aggregate(raw);
    REQUIRE(d.mean.size() == 2);
    CHECK(d.mean[0] == 1.0);
    CHECK(d.stddev[0] == 0.0);
    CHECK(d.mean[1] == 2.0);
    CHECK(d.stddev[1] == 1.0);
    const SeriesBundle b = daily_bundle(d);
    REQUIRE(b.size() == 1);
    CHECK(b.inputs[0][0] == 1.0);
    CHECK(b.targets[0][0] == 2.0);

    raw.timestamps = {0, 3 * 86400.0};
    raw.values = {1, 2};
    CHECK(daily_aggregate(raw).skipped_days == 2);
    CHECK_THROWS_AS(daily_aggregate(RawSeries{}), ConfigError);
}

TEST_CASE("differencing examples and round trip") {
    const Differenced d = difference({1, 4, 9});
    CHECK(d.diffs == std::vector<double>{3, 5});
    CHECK(d.anchor == 1);
    CHECK(reconstruct(d.diffs, d.anchor) == std::vector<double>{1, 4, 9});
    for (double v : difference({2.5, 2.5, 2.5, 2.5}).diffs) CHECK(v == 0.0);
    CHECK_THROWS_AS(difference({1.0}), ConfigError);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> walk{100.0};
    for (int i = 0; i < 5000; ++i) walk.push_back(walk.back() + n(rng));
    const Differenced w = difference(walk);
    const auto back = reconstruct(w.diffs, w.anchor);
    double worst = 0.0;
    for (std::size_t i = 0; i < walk.size(); ++i) worst = std::max(worst, std::abs(back[i] - walk[i]));
    CHECK(worst <= 1e-12 * 200.0);
}

TEST_CASE("differenced daily rows map back to levels") {
    DailyFeatures d;
    d.mean = {1.0, 1.5, 1.2, 2.0, 2.2};
    d.stddev = {0.1, 0.2, 0.3, 0.4, 0.5};
    d.days = {0, 1, 2, 3, 4};
    const DifferencedDaily dd = differenced_daily_bundle(d, false);
    REQUIRE(dd.bundle.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(dd.bundle.inputs[i][0] == doctest::Approx(d.mean[i + 1] - d.mean[i]));
        CHECK(dd.bundle.inputs[i][1] == d.stddev[i + 1]);
        CHECK(dd.level_base[i] + dd.bundle.targets[i][0] == doctest::Approx(dd.level_target[i]));
    }
    const DifferencedDaily all = differenced_daily_bundle(d, true);
    CHECK(all.bundle.inputs[0][1] == doctest::Approx(0.1));
}

TEST_CASE("60/20/20 splits") {
    const Split ten = split_60_20_20(10);
    CHECK(ten.train_end == 6);
    CHECK(ten.val_end == 8);
    const Split big = split_60_20_20(5000);
    CHECK(big.train_end == 3000);
    CHECK(big.val_end == 4000);
    CHECK_THROWS_AS(split_60_20_20(4), ConfigError);
    for (std::size_t n = 5; n < 200; ++n) {
        const Split s = split_60_20_20(n);
        CHECK(0 < s.train_end);
        CHECK(s.train_end <= s.val_end);
        CHECK(s.val_end < n);
    }
}

TEST_CASE("calibration fits") {
    const std::vector<double> y{1.0, 2.0, 4.0, 3.0};
    const Calibration same = fit_calibration(y, y);
    CHECK(std::abs(same.slope - 1.0) <= 1e-12);
    CHECK(std::abs(same.intercept) <= 1e-12);
    std::vector<double> half;
    for (double v : y) half.push_back(v / 2);
    const Calibration c2 = fit_calibration(half, y);
    CHECK(c2.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(c2.intercept) <= 1e-12);
    const Calibration flat = fit_calibration({3.0, 3.0, 3.0, 3.0}, y);
    CHECK(flat.intercept_only);
    CHECK(flat.slope == 0.0);
    CHECK(flat.intercept == doctest::Approx(2.5));
    CHECK(apply_calibration(c2, half) == std::vector<double>{2.0 * half[0] + c2.intercept, 2.0 * half[1] + c2.intercept,
                                                             2.0 * half[2] + c2.intercept, 2.0 * half[3] + c2.intercept});
}

TEST_CASE("calibration never increases error on the fitting set") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p, t;
        for (int i = 0; i < 30; ++i) {
            p.push_back(n(rng));
            t.push_back(0.3 * p.back() + n(rng));
        }
        const Calibration c = fit_calibration(p, t);
        CHECK(compute_metrics(apply_calibration(c, p), t).rmse <= compute_metrics(p, t).rmse + 1e-12);
    }
}

TEST_CASE("scaler round trip and training-prefix statistics") {
    std::mt19937_64 rng(4);
    SeriesBundle s = fixture::random_series(rng, 50, 2, 1);
    s.inputs[0] = Vector::Constant(2, 100.0);  // outlier inside the fitting prefix
    const Scaler sc = Scaler::fit(s, 30);
    const SeriesBundle z = sc.transform(s);
    Vector mean = Vector::Zero(2);
    for (std::size_t t = 0; t < 30; ++t) mean += z.inputs[t];
    CHECK((mean / 30.0).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t t = 0; t < s.size(); ++t)
        CHECK((sc.inverse_target(z.targets[t]) - s.targets[t]).cwiseAbs().maxCoeff() <= 1e-12);
    const Scaler id = Scaler::identity(2, 1);
    CHECK(id.transform_input(s.inputs[3]) == s.inputs[3]);
}

TEST_CASE("error metrics") {
    const ErrorMetrics m = compute_metrics(std::vector<double>{1, 2, 5}, std::vector<double>{1, 2, 3});
    CHECK(m.rmse == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
    CHECK(m.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    Vector a(2), b(2);
    a << 1, 1;
    b << 0, 3;
    const ErrorMetrics v = compute_metrics(std::vector<Vector>{a}, std::vector<Vector>{b});
    CHECK(v.rmse == doctest::Approx(std::sqrt(5.0)));
    CHECK(v.mae == doctest::Approx(1.5));
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST_CASE("csv numbers round trip exactly") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_double(""), ConfigError);
    CHECK(parse_double(" 2.5 ") == 2.5);
}
