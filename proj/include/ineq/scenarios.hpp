#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ineq/model.hpp"

namespace ineq::scenarios {

enum class SweepParam { Xi, Eta1, GiniK };

const char* sweep_param_name(SweepParam p);

struct SweepSpec {
    SweepParam param = SweepParam::Xi;
    std::vector<double> grid;
    model::StructuralParams base;
    model::FixedEnv env;

    bool valid() const;
};

struct SweepRow {
    double value = 0.0;
    double delta_gini = 0.0;
    model::Regime regime = model::Regime::Boundary;
};

struct SweepResult {
    SweepParam param = SweepParam::Xi;
    std::vector<SweepRow> rows;
    // Sign change location by linear interpolation, when one exists.
    std::optional<double> zero_crossing;
};

SweepResult run_sweep(const SweepSpec& spec);

struct IndustrySpec {
    std::string label;
    double giniK = 0.5;
    double xi = 0.1;
};

struct IndustryRow {
    std::string label;
    double giniK = 0.5;
    double xi = 0.1;
    double delta_gini = 0.0;
    model::Regime regime = model::Regime::Boundary;
};

std::vector<IndustryRow> industry_table(const model::StructuralParams& base,
                                        const model::FixedEnv& env,
                                        const std::vector<IndustrySpec>& rows);

// The published industry panel; the baseline row reuses the base point itself.
std::vector<IndustrySpec> default_industries(const model::StructuralParams& base,
                                             const model::FixedEnv& env);

std::vector<double> default_xi_grid();

struct ContourCell {
    double eta1 = 0.0;
    double giniK = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    model::Regime regime = model::Regime::Boundary;
};

struct BoundaryPoint {
    double giniK = 0.0;
    double eta1 = 0.0;  // boundary eta1 on this giniK row
};

struct ContourResult {
    int resolution = 0;
    std::vector<ContourCell> cells;  // row-major, giniK outer, eta1 inner
    std::vector<BoundaryPoint> boundary;  // from per-row sign-change bisection
};

ContourResult contour_grid(std::pair<double, double> eta1_range,
                           std::pair<double, double> giniK_range, int resolution,
                           const model::StructuralParams& base, const model::FixedEnv& env);

std::string sweep_csv(const SweepResult& res);
std::string industry_csv(const std::vector<IndustryRow>& rows);
std::string contour_csv(const ContourResult& res);

} // namespace ineq::scenarios
