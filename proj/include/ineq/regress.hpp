#pragma once

#include <map>
#include <string>
#include <vector>

namespace ineq::regress {

// One matched occupation with wage percentiles in both years.
struct OccPanelRow {
    std::string soc;
    std::string major_group;  // first two SOC digits
    double aioe = 0.0;
    double p10_2019 = 0.0, median_2019 = 0.0, p90_2019 = 0.0;
    double p10_2023 = 0.0, median_2023 = 0.0, p90_2023 = 0.0;
};

struct MergeResult {
    std::vector<OccPanelRow> panel;
    std::map<std::string, int> drop_counts;  // reason -> count
};

// Inner join of the two OEWS years with the exposure index on 6-digit SOC.
// Rows with suppressed, top-coded, or order-violating wages are dropped and
// counted by reason. Throws on missing columns or an empty join.
MergeResult load_and_merge(const std::string& oews_2019_path, const std::string& oews_2023_path,
                           const std::string& aioe_path);

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;  // HC1 robust
    double z = 0.0;
    std::string stars;  // ***, **, * at 1/5/10% two-sided
};

struct RegressionOutput {
    std::string design;  // "Levels" or "FD"
    bool fixed_effects = false;
    std::vector<Coefficient> coefficients;
    double r_squared = 0.0;
    int n = 0;
    int k = 0;
};

// OLS with HC1 sandwich standard errors. X must not contain the intercept;
// one is prepended. Rank deficiency raises an error naming the columns.
RegressionOutput ols_hc1(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& x_columns,
                         const std::vector<std::string>& names);

// The five-specification dispersion table: levels and first differences of
// log(p90/p10) on exposure, median-wage controls and major-group effects.
std::vector<RegressionOutput> run_table4(const std::vector<OccPanelRow>& panel);

// Mean change in log(p90/p10) across the panel.
double mean_fd_log_ratio(const std::vector<OccPanelRow>& panel);

std::string table_csv(const std::vector<RegressionOutput>& table);

} // namespace ineq::regress
