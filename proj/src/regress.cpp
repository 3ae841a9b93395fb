#include "ineq/regress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ineq/csv.hpp"
#include "ineq/stats.hpp"

namespace ineq::regress {

namespace {

// OEWS annual top-code caps: ratios against a capped p90 are biased, so
// capped rows are dropped with their own reason code.
const std::set<double> kTopCodeCaps = {208000.0, 239200.0};

bool soc_ok(const std::string& soc) {
    if (soc.size() != 7 || soc[2] != '-') return false;
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u, 6u})
        if (!std::isdigit(static_cast<unsigned char>(soc[i]))) return false;
    return true;
}

// OEWS numeric cells may carry thousands separators; suppression markers
// ("*", "**") and the top-code marker ("#") parse as missing.
enum class Cell { Ok, Suppressed, TopCoded };

Cell parse_wage(std::string text, double& out) {
    std::erase(text, ',');
    std::erase(text, ' ');
    if (text.empty() || text == "*" || text == "**") return Cell::Suppressed;
    if (text == "#") return Cell::TopCoded;
    try {
        std::size_t pos = 0;
        out = std::stod(text, &pos);
        if (pos != text.size()) return Cell::Suppressed;
    } catch (const std::exception&) {
        return Cell::Suppressed;
    }
    if (kTopCodeCaps.count(out)) return Cell::TopCoded;
    return Cell::Ok;
}

struct YearRecord {
    double p10 = 0.0, median = 0.0, p90 = 0.0;
};

std::map<std::string, YearRecord> load_oews(const std::string& path,
                                            std::map<std::string, int>& drops,
                                            const std::string& year_tag) {
    const csv::Table t = csv::read_file(path);
    auto need = [&](const std::string& name) {
        const auto idx = t.column(name);
        if (!idx) throw std::runtime_error("schema error in " + path + ": missing column " + name);
        return *idx;
    };
    const std::size_t c_soc = need("OCC_CODE");
    const std::size_t c_p10 = need("A_PCT10");
    const std::size_t c_med = need("A_MEDIAN");
    const std::size_t c_p90 = need("A_PCT90");

    std::map<std::string, YearRecord> out;
    for (const auto& row : t.rows) {
        const std::string& soc = row[c_soc];
        if (!soc_ok(soc)) {
            ++drops["bad_soc_" + year_tag];
            continue;
        }
        YearRecord rec;
        const Cell a = parse_wage(row[c_p10], rec.p10);
        const Cell b = parse_wage(row[c_med], rec.median);
        const Cell c = parse_wage(row[c_p90], rec.p90);
        if (a == Cell::TopCoded || b == Cell::TopCoded || c == Cell::TopCoded) {
            ++drops["topcoded_" + year_tag];
            continue;
        }
        if (a != Cell::Ok || b != Cell::Ok || c != Cell::Ok) {
            ++drops["suppressed_" + year_tag];
            continue;
        }
        if (!(rec.p10 > 0.0 && rec.p10 <= rec.median && rec.median <= rec.p90)) {
            ++drops["wage_order_" + year_tag];
            continue;
        }
        if (!out.emplace(soc, rec).second) ++drops["duplicate_" + year_tag];
    }
    return out;
}

} // namespace

MergeResult load_and_merge(const std::string& oews_2019_path, const std::string& oews_2023_path,
                           const std::string& aioe_path) {
    MergeResult res;
    const auto y2019 = load_oews(oews_2019_path, res.drop_counts, "2019");
    const auto y2023 = load_oews(oews_2023_path, res.drop_counts, "2023");

    const csv::Table aioe = csv::read_file(aioe_path);
    const auto c_soc = aioe.column("SOC");
    const auto c_score = aioe.column("score");
    if (!c_soc) throw std::runtime_error("schema error in " + aioe_path + ": missing column SOC");
    if (!c_score) throw std::runtime_error("schema error in " + aioe_path + ": missing column score");

    for (const auto& row : aioe.rows) {
        const std::string& soc = row[*c_soc];
        if (!soc_ok(soc)) {
            ++res.drop_counts["bad_soc_aioe"];
            continue;
        }
        double score = 0.0;
        if (parse_wage(row[*c_score], score) != Cell::Ok) {
            ++res.drop_counts["bad_score_aioe"];
            continue;
        }
        const auto a = y2019.find(soc);
        const auto b = y2023.find(soc);
        if (a == y2019.end() || b == y2023.end()) {
            ++res.drop_counts["unmatched"];
            continue;
        }
        OccPanelRow out;
        out.soc = soc;
        out.major_group = soc.substr(0, 2);
        out.aioe = score;
        out.p10_2019 = a->second.p10;
        out.median_2019 = a->second.median;
        out.p90_2019 = a->second.p90;
        out.p10_2023 = b->second.p10;
        out.median_2023 = b->second.median;
        out.p90_2023 = b->second.p90;
        res.panel.push_back(std::move(out));
    }
    std::sort(res.panel.begin(), res.panel.end(),
              [](const OccPanelRow& a, const OccPanelRow& b) { return a.soc < b.soc; });
    if (res.panel.empty()) {
        std::ostringstream os;
        os << "load_and_merge: zero matched occupations (";
        for (const auto& [k, v] : res.drop_counts) os << k << '=' << v << ' ';
        os << ')';
        throw std::runtime_error(os.str());
    }
    return res;
}

RegressionOutput ols_hc1(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& x_columns,
                         const std::vector<std::string>& names) {
    const int n = static_cast<int>(y.size());
    const int k = static_cast<int>(x_columns.size()) + 1;  // with intercept
    if (x_columns.size() != names.size()) throw std::invalid_argument("ols_hc1: names/columns mismatch");
    if (n <= k) throw std::runtime_error("ols_hc1: more regressors than observations");
    for (const auto& col : x_columns)
        if (static_cast<int>(col.size()) != n) throw std::invalid_argument("ols_hc1: ragged design");

    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        yv(i) = y[static_cast<std::size_t>(i)];
        for (int j = 1; j < k; ++j)
            x(i, j) = x_columns[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        // Columns outside the pivot prefix are the linearly dependent ones.
        const auto perm = qr.colsPermutation().indices();
        std::ostringstream os;
        os << "ols_hc1: rank-deficient design; collinear column(s):";
        for (int j = qr.rank(); j < k; ++j) {
            const int col = perm(j);
            os << ' ' << (col == 0 ? std::string("intercept") : names[static_cast<std::size_t>(col - 1)]);
        }
        throw std::runtime_error(os.str());
    }

    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd resid = yv - x * beta;

    const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < n; ++i)
        meat += resid(i) * resid(i) * x.row(i).transpose() * x.row(i);
    const double scale = static_cast<double>(n) / static_cast<double>(n - k);
    const Eigen::MatrixXd cov = scale * bread * meat * bread;

    RegressionOutput out;
    out.n = n;
    out.k = k;
    const double y_mean = yv.mean();
    const double sst = (yv.array() - y_mean).square().sum();
    out.r_squared = sst > 0.0 ? 1.0 - resid.squaredNorm() / sst : 1.0;

    for (int j = 0; j < k; ++j) {
        Coefficient c;
        c.name = j == 0 ? "intercept" : names[static_cast<std::size_t>(j - 1)];
        c.estimate = beta(j);
        c.se = std::sqrt(std::max(0.0, cov(j, j)));
        c.z = c.se > 0.0 ? c.estimate / c.se : 0.0;
        const double az = std::fabs(c.z);
        if (az >= 2.5758293035489004) c.stars = "***";
        else if (az >= 1.959963984540054) c.stars = "**";
        else if (az >= 1.6448536269514722) c.stars = "*";
        out.coefficients.push_back(std::move(c));
    }
    return out;
}

namespace {

std::vector<std::string> sorted_groups(const std::vector<OccPanelRow>& panel) {
    std::set<std::string> groups;
    for (const OccPanelRow& r : panel) groups.insert(r.major_group);
    return {groups.begin(), groups.end()};
}

// Dummies for every major group except the lowest-numbered reference.
void add_group_dummies(const std::vector<OccPanelRow>& panel,
                       std::vector<std::vector<double>>& cols, std::vector<std::string>& names) {
    const auto groups = sorted_groups(panel);
    for (std::size_t g = 1; g < groups.size(); ++g) {
        std::vector<double> dummy(panel.size(), 0.0);
        for (std::size_t i = 0; i < panel.size(); ++i)
            if (panel[i].major_group == groups[g]) dummy[i] = 1.0;
        cols.push_back(std::move(dummy));
        names.push_back("group_" + groups[g]);
    }
}

} // namespace

std::vector<RegressionOutput> run_table4(const std::vector<OccPanelRow>& panel) {
    if (panel.empty()) throw std::runtime_error("run_table4: empty panel");
    const std::size_t n = panel.size();

    std::vector<double> y_level(n), y_fd(n), aioe(n), log_med_2023(n), d_log_med(n);
    for (std::size_t i = 0; i < n; ++i) {
        const OccPanelRow& r = panel[i];
        y_level[i] = std::log(r.p90_2023 / r.p10_2023);
        y_fd[i] = std::log(r.p90_2023 / r.p10_2023) - std::log(r.p90_2019 / r.p10_2019);
        aioe[i] = r.aioe;
        log_med_2023[i] = std::log(r.median_2023);
        d_log_med[i] = std::log(r.median_2023) - std::log(r.median_2019);
    }

    std::vector<RegressionOutput> table;

    {  // (1) levels, exposure only
        RegressionOutput o = ols_hc1(y_level, {aioe}, {"aioe"});
        o.design = "Levels";
        table.push_back(std::move(o));
    }
    {  // (2) levels + log median wage + major-group effects
        std::vector<std::vector<double>> cols = {aioe, log_med_2023};
        std::vector<std::string> names = {"aioe", "log_median_wage"};
        add_group_dummies(panel, cols, names);
        RegressionOutput o = ols_hc1(y_level, cols, names);
        o.design = "Levels";
        o.fixed_effects = true;
        table.push_back(std::move(o));
    }
    {  // (3) first difference, exposure only
        RegressionOutput o = ols_hc1(y_fd, {aioe}, {"aioe"});
        o.design = "FD";
        table.push_back(std::move(o));
    }
    {  // (4) FD + change in log median wage
        RegressionOutput o = ols_hc1(y_fd, {aioe, d_log_med}, {"aioe", "d_log_median_wage"});
        o.design = "FD";
        table.push_back(std::move(o));
    }
    {  // (5) FD + change in log median wage + major-group effects
        std::vector<std::vector<double>> cols = {aioe, d_log_med};
        std::vector<std::string> names = {"aioe", "d_log_median_wage"};
        add_group_dummies(panel, cols, names);
        RegressionOutput o = ols_hc1(y_fd, cols, names);
        o.design = "FD";
        o.fixed_effects = true;
        table.push_back(std::move(o));
    }
    return table;
}

double mean_fd_log_ratio(const std::vector<OccPanelRow>& panel) {
    double acc = 0.0;
    for (const OccPanelRow& r : panel)
        acc += std::log(r.p90_2023 / r.p10_2023) - std::log(r.p90_2019 / r.p10_2019);
    return acc / static_cast<double>(panel.size());
}

std::string table_csv(const std::vector<RegressionOutput>& table) {
    std::ostringstream os;
    os << "column,design,fixed_effects,term,estimate,robust_se,z,stars,r_squared,n\n";
    os.precision(10);
    for (std::size_t c = 0; c < table.size(); ++c) {
        const RegressionOutput& o = table[c];
        for (const Coefficient& coef : o.coefficients) {
            if (coef.name.rfind("group_", 0) == 0) continue;  // keep the table compact
            os << (c + 1) << ',' << o.design << ',' << (o.fixed_effects ? 1 : 0) << ','
               << coef.name << ',' << coef.estimate << ',' << coef.se << ',' << coef.z << ','
               << coef.stars << ',' << o.r_squared << ',' << o.n << '\n';
        }
    }
    return os.str();
}

} // namespace ineq::regress
