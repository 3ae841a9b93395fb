#include "ineq/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ineq/parallel.hpp"

namespace ineq::scenarios {

const char* sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::Xi: return "xi";
        case SweepParam::Eta1: return "eta1";
        case SweepParam::GiniK: return "giniK";
    }
    return "?";
}

bool SweepSpec::valid() const {
    if (grid.empty()) return false;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) return false;
    return base.valid() && env.valid();
}

namespace {

// Evaluate one grid point: substitute the swept value and recompute.
model::RegimeOutcome at_value(SweepParam param, double value, const model::StructuralParams& base,
                              const model::FixedEnv& env) {
    model::StructuralParams p = base;
    model::FixedEnv e = env;
    switch (param) {
        case SweepParam::Xi: e.xi = value; break;
        case SweepParam::Eta1: p.eta1 = value; break;
        case SweepParam::GiniK: p.giniK = value; break;
    }
    return model::knife_edge(p, e);
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    if (!spec.valid()) throw std::domain_error("run_sweep: bad spec");
    SweepResult res;
    res.param = spec.param;
    res.rows.resize(spec.grid.size());

    parallel_for(static_cast<std::ptrdiff_t>(spec.grid.size()), [&](std::ptrdiff_t i) {
        const double v = spec.grid[static_cast<std::size_t>(i)];
        const model::RegimeOutcome out = at_value(spec.param, v, spec.base, spec.env);
        res.rows[static_cast<std::size_t>(i)] = {v, out.delta_gini, out.regime};
    });

    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        const SweepRow& a = res.rows[i - 1];
        const SweepRow& b = res.rows[i];
        if (a.delta_gini == 0.0) { res.zero_crossing = a.value; break; }
        if (a.delta_gini < 0.0 && b.delta_gini > 0.0) {
            const double t = -a.delta_gini / (b.delta_gini - a.delta_gini);
            res.zero_crossing = a.value + t * (b.value - a.value);
            break;
        }
    }
    return res;
}

std::vector<IndustryRow> industry_table(const model::StructuralParams& base,
                                        const model::FixedEnv& env,
                                        const std::vector<IndustrySpec>& rows) {
    std::vector<IndustryRow> out(rows.size());
    parallel_for(static_cast<std::ptrdiff_t>(rows.size()), [&](std::ptrdiff_t i) {
        const IndustrySpec& spec = rows[static_cast<std::size_t>(i)];
        model::StructuralParams p = base;
        p.giniK = spec.giniK;
        model::FixedEnv e = env;
        e.xi = spec.xi;
        const model::RegimeOutcome o = model::knife_edge(p, e);
        out[static_cast<std::size_t>(i)] = {spec.label, spec.giniK, spec.xi, o.delta_gini, o.regime};
    });
    return out;
}

std::vector<IndustrySpec> default_industries(const model::StructuralParams& base,
                                             const model::FixedEnv& env) {
    return {
        {"tech_ai_platforms", 0.95, 0.25},
        {"finance_banking", 0.85, 0.20},
        {"healthcare", 0.70, 0.15},
        {"manufacturing", 0.65, 0.15},
        {"retail_hospitality", 0.50, 0.10},
        {"education_government", 0.40, 0.07},
        {"us_baseline", base.giniK, env.xi},
        {"scandinavia_like", 0.60, 0.25},
    };
}

std::vector<double> default_xi_grid() {
    return {0.00, 0.05, 0.07, 0.10, 0.15, 0.18, 0.20, 0.25, 0.30};
}

ContourResult contour_grid(std::pair<double, double> eta1_range,
                           std::pair<double, double> giniK_range, int resolution,
                           const model::StructuralParams& base, const model::FixedEnv& env) {
    if (resolution < 2) throw std::domain_error("contour_grid: resolution < 2");
    ContourResult res;
    res.resolution = resolution;
    res.cells.resize(static_cast<std::size_t>(resolution) * resolution);

    auto eta1_at = [&](int i) {
        return eta1_range.first + (eta1_range.second - eta1_range.first) * i / (resolution - 1);
    };
    auto gini_at = [&](int g) {
        return giniK_range.first + (giniK_range.second - giniK_range.first) * g / (resolution - 1);
    };

    parallel_for(static_cast<std::ptrdiff_t>(resolution) * resolution, [&](std::ptrdiff_t idx) {
        const int g = static_cast<int>(idx) / resolution;
        const int i = static_cast<int>(idx) % resolution;
        model::StructuralParams p = base;
        p.eta1 = eta1_at(i);
        p.giniK = gini_at(g);
        const model::RegimeOutcome o = model::knife_edge(p, env);
        res.cells[static_cast<std::size_t>(idx)] = {p.eta1, p.giniK, o.lhs, o.rhs, o.regime};
    });

    // Boundary polyline: bisect the channel gap along eta1 within each giniK
    // row whose endpoints bracket a sign change.
    for (int g = 0; g < resolution; ++g) {
        const double gini = gini_at(g);
        model::StructuralParams p = base;
        p.giniK = gini;
        auto gap = [&](double e1) {
            p.eta1 = e1;
            const model::RegimeOutcome o = model::knife_edge(p, env);
            return o.lhs - o.rhs;
        };
        double lo = eta1_range.first, hi = eta1_range.second;
        if (gap(lo) >= 0.0 || gap(hi) <= 0.0) continue;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (gap(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        res.boundary.push_back({gini, 0.5 * (lo + hi)});
    }
    return res;
}

std::string sweep_csv(const SweepResult& res) {
    std::ostringstream os;
    os << "param,value,delta_gini,regime\n";
    os.precision(10);
    for (const SweepRow& r : res.rows)
        os << sweep_param_name(res.param) << ',' << r.value << ',' << r.delta_gini << ','
           << model::regime_name(r.regime) << '\n';
    return os.str();
}

std::string industry_csv(const std::vector<IndustryRow>& rows) {
    std::ostringstream os;
    os << "label,giniK,xi,delta_gini,regime\n";
    os.precision(10);
    for (const IndustryRow& r : rows)
        os << r.label << ',' << r.giniK << ',' << r.xi << ',' << r.delta_gini << ','
           << model::regime_name(r.regime) << '\n';
    return os.str();
}

std::string contour_csv(const ContourResult& res) {
    std::ostringstream os;
    os << "eta1,giniK,lhs,rhs,regime\n";
    os.precision(10);
    for (const ContourCell& c : res.cells)
        os << c.eta1 << ',' << c.giniK << ',' << c.lhs << ',' << c.rhs << ','
           << model::regime_name(c.regime) << '\n';
    return os.str();
}

} // namespace ineq::scenarios
