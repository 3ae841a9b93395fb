#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ineq/regress.hpp"
#include "ineq/rng.hpp"

using namespace ineq;
using namespace ineq::regress;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ineq_regress_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        std::ofstream(p) << content;
        return p.string();
    }
};

// Synthetic occupation panel with a planted first-difference slope on the
// exposure score, plus optional dirty rows exercising the filters.
struct Fixture {
    std::string oews_2019;
    std::string oews_2023;
    std::string aioe;
};

Fixture make_fixture(const TempDir& dir, int n_occ, double slope, std::uint64_t seed,
                     bool add_dirty_rows) {
    Rng rng(seed);
    std::ostringstream o19, o23, af;
    o19 << "OCC_CODE,OCC_TITLE,A_PCT10,A_MEDIAN,A_PCT90\n";
    o23 << "OCC_CODE,OCC_TITLE,A_PCT10,A_MEDIAN,A_PCT90\n";
    af << "SOC,score\n";
    for (int i = 0; i < n_occ; ++i) {
        char soc[8];
        std::snprintf(soc, sizeof soc, "%02d-%04d", 11 + i % 8, 1000 + i);
        const double aioe = rng.normal();
        const double med19 = 40000.0 * std::exp(0.3 * rng.normal());
        const double spread19 = 0.8 + 0.1 * rng.normal();
        const double d_spread = slope * aioe + 0.02 * rng.normal();
        const double med23 = med19 * 1.1;
        o19 << soc << ",\"Occupation " << i << "\"," << med19 * std::exp(-spread19 / 2.0) << ','
            << med19 << ',' << med19 * std::exp(spread19 / 2.0) << '\n';
        o23 << soc << ",\"Occupation " << i << "\"," << med23 * std::exp(-(spread19 + d_spread) / 2.0)
            << ',' << med23 << ',' << med23 * std::exp((spread19 + d_spread) / 2.0) << '\n';
        af << soc << ',' << aioe << '\n';
    }
    if (add_dirty_rows) {
        o19 << "99-9901,Ordered Wrong,50000,40000,90000\n";   // p10 > median
        o23 << "99-9901,Ordered Wrong,30000,40000,90000\n";
        af << "99-9901,0.5\n";
        o19 << "99-9902,Suppressed,*,45000,90000\n";
        o23 << "99-9902,Suppressed,30000,45000,90000\n";
        af << "99-9902,0.1\n";
        o19 << "99-9903,Topcoded,30000,45000,\"208,000\"\n";
        o23 << "99-9903,Topcoded,30000,45000,#\n";
        af << "99-9903,-0.2\n";
        o19 << "99-9904,NoExposure,30000,45000,90000\n";      // missing from AIOE
        o23 << "99-9904,NoExposure,30000,45000,90000\n";
        o19 << "999999,BadSoc,30000,45000,90000\n";
        o23 << "999999,BadSoc,30000,45000,90000\n";
        af << "999999,0.3\n";
    }
    Fixture f;
    f.oews_2019 = dir.file("oews_2019.csv", o19.str());
    f.oews_2023 = dir.file("oews_2023.csv", o23.str());
    f.aioe = dir.file("aioe.csv", af.str());
    return f;
}

} // namespace

TEST_CASE("three-point regression matches the hand solution exactly") {
    const std::vector<double> y = {1.0, 2.0, 4.0};
    const std::vector<double> x = {0.0, 1.0, 2.0};
    const auto out = ols_hc1(y, {x}, {"x"});
    CHECK(out.coefficients[0].estimate == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(out.coefficients[1].estimate == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("exact linear fit") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(i);
        y.push_back(3.0 - 0.25 * i);
    }
    const auto out = ols_hc1(y, {x}, {"x"});
    CHECK(out.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.coefficients[1].se == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("hc1 equals classical under constant-magnitude residuals") {
    // x in {0,1} with +/-c residuals at each point: |e_i| is constant, so the
    // sandwich and the classical estimator coincide (including the n/(n-k)
    // scaling).
    const double c = 0.7;
    std::vector<double> x = {0.0, 0.0, 1.0, 1.0, 2.0, 2.0};
    std::vector<double> y = {1.0 - c, 1.0 + c, 2.0 - c, 2.0 + c, 3.0 - c, 3.0 + c};
    const auto out = ols_hc1(y, {x}, {"x"});
    const int n = 6, k = 2;
    // Classical: s^2 (X'X)^-1 with s^2 = RSS/(n-k). RSS = 6 c^2.
    const double s2 = 6.0 * c * c / (n - k);
    const double sxx = 4.0;  // sum (x - xbar)^2 with xbar = 1
    const double classical_slope_se = std::sqrt(s2 / sxx);
    CHECK(out.coefficients[1].se == doctest::Approx(classical_slope_se).epsilon(1e-10));
}

TEST_CASE("planted heteroskedastic slope is recovered within two robust SEs") {
    Rng rng(99);
    const int n = 5000;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = rng.normal();
        const double noise_sd = 0.1 + 0.3 * std::fabs(x[i]);
        y[i] = 0.5 + 0.1 * x[i] + noise_sd * rng.normal();
    }
    const auto out = ols_hc1(y, {x}, {"aioe"});
    CHECK(std::fabs(out.coefficients[1].estimate - 0.1) < 2.0 * out.coefficients[1].se);
    CHECK(out.coefficients[1].se > 0.0);
}

TEST_CASE("rank deficiency names the offending column") {
    std::vector<double> ones(10, 1.0), y(10, 2.0), x(10);
    for (int i = 0; i < 10; ++i) {
        x[i] = i;
        y[i] = 1.0 + i;
    }
    CHECK_THROWS_WITH_AS(ols_hc1(y, {x, ones}, {"x", "copy_of_intercept"}),
                         doctest::Contains("copy_of_intercept"), std::runtime_error);
}

TEST_CASE("load_and_merge filters and counts") {
    TempDir dir;
    const Fixture f = make_fixture(dir, 10, 0.05, 4, /*add_dirty_rows=*/true);
    const MergeResult merged = load_and_merge(f.oews_2019, f.oews_2023, f.aioe);
    CHECK(merged.panel.size() == 10);
    CHECK(merged.drop_counts.at("wage_order_2019") == 1);
    CHECK(merged.drop_counts.at("suppressed_2019") == 1);
    CHECK(merged.drop_counts.at("topcoded_2019") == 1);
    CHECK(merged.drop_counts.at("bad_soc_2019") == 1);
    CHECK(merged.drop_counts.at("unmatched") >= 1);
    for (const auto& row : merged.panel) {
        CHECK(row.p10_2019 <= row.median_2019);
        CHECK(row.median_2019 <= row.p90_2019);
        CHECK(row.major_group == row.soc.substr(0, 2));
    }
}

TEST_CASE("merge is order invariant") {
    TempDir dir;
    const Fixture f = make_fixture(dir, 12, 0.05, 5, false);
    const MergeResult a = load_and_merge(f.oews_2019, f.oews_2023, f.aioe);

    // Reverse the data rows of the 2019 file.
    std::ifstream in(f.oews_2019);
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    std::ostringstream shuffled;
    shuffled << header << '\n';
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) shuffled << *it << '\n';
    const std::string reversed = dir.file("oews_2019_reversed.csv", shuffled.str());

    const MergeResult b = load_and_merge(reversed, f.oews_2023, f.aioe);
    REQUIRE(a.panel.size() == b.panel.size());
    for (std::size_t i = 0; i < a.panel.size(); ++i) {
        CHECK(a.panel[i].soc == b.panel[i].soc);
        CHECK(a.panel[i].p90_2019 == b.panel[i].p90_2019);
    }
}

TEST_CASE("schema violations are named") {
    TempDir dir;
    const std::string bad = dir.file("bad.csv", "OCC_CODE,A_PCT10,A_MEDIAN\n11-1000,1,2\n");
    const Fixture f = make_fixture(dir, 5, 0.05, 6, false);
    CHECK_THROWS_WITH_AS(load_and_merge(bad, f.oews_2023, f.aioe), doctest::Contains("A_PCT90"),
                         std::runtime_error);

    const std::string empty_aioe = dir.file("empty_aioe.csv", "SOC,score\n");
    CHECK_THROWS_WITH_AS(load_and_merge(f.oews_2019, f.oews_2023, empty_aioe),
                         doctest::Contains("zero matched"), std::runtime_error);
}

TEST_CASE("five-column table structure and planted slope") {
    TempDir dir;
    const Fixture f = make_fixture(dir, 400, 0.08, 7, false);
    const MergeResult merged = load_and_merge(f.oews_2019, f.oews_2023, f.aioe);
    const auto table = run_table4(merged.panel);
    REQUIRE(table.size() == 5);
    CHECK(table[0].design == "Levels");
    CHECK(table[1].design == "Levels");
    CHECK(table[1].fixed_effects);
    CHECK(table[2].design == "FD");
    CHECK(table[4].fixed_effects);
    for (const auto& col : table) CHECK(col.n == 400);

    // The FD design recovers the planted exposure slope.
    const auto& fd = table[2];
    CHECK(fd.coefficients[1].name == "aioe");
    CHECK(std::fabs(fd.coefficients[1].estimate - 0.08) < 2.0 * fd.coefficients[1].se);

    const std::string csv = table_csv(table);
    CHECK(csv.rfind("column,design,fixed_effects,term,estimate,robust_se,z,stars,r_squared,n", 0) == 0);
}

TEST_CASE("first differences ignore time-constant level shifts") {
    TempDir dir;
    const Fixture f = make_fixture(dir, 150, 0.06, 8, false);
    const MergeResult merged = load_and_merge(f.oews_2019, f.oews_2023, f.aioe);
    const auto base = run_table4(merged.panel);

    // Scale both years of each occupation by its own constant factor.
    std::vector<OccPanelRow> shifted = merged.panel;
    Rng rng(11);
    for (OccPanelRow& row : shifted) {
        const double k = std::exp(0.5 * rng.normal());
        row.p10_2019 *= k;
        row.p90_2019 *= k;
        row.p10_2023 *= k;
        row.p90_2023 *= k;
    }
    const auto moved = run_table4(shifted);
    for (int col : {2, 3, 4}) {
        CHECK(moved[col].coefficients[1].estimate ==
              doctest::Approx(base[col].coefficients[1].estimate).epsilon(1e-9));
    }
    CHECK(mean_fd_log_ratio(shifted) == doctest::Approx(mean_fd_log_ratio(merged.panel)).epsilon(1e-9));
}
