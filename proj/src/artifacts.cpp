#include "ineq/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ineq::artifacts {

using nlohmann::json;

namespace {

json theta_json(const model::StructuralParams& p) {
    return {{"r", p.r}, {"sigma", p.sigma}, {"eta0", p.eta0}, {"eta1", p.eta1}, {"giniK", p.giniK}};
}

} // namespace

std::string calib_json(const calib::CalibResult& res) {
    json j;
    j["theta_hat"] = theta_json(res.theta_hat);
    j["objective"] = res.objective;
    j["j_stat"] = res.j_stat;
    j["j_df"] = res.j_df;
    j["p_value"] = res.p_value;
    j["model_moments"] = res.model_moments;
    j["derived"] = {{"delta_gini", res.derived.delta_gini},
                    {"wage_compression", res.derived.wage_compression},
                    {"profit_elasticity_pre", res.derived.profit_elasticity_pre},
                    {"profit_elasticity_post", res.derived.profit_elasticity_post}};
    j["nu_clamped"] = res.nu_clamped;
    return j.dump(2) + "\n";
}

std::string calib_table_csv(const calib::CalibResult& res, const model::MomentVector& targets) {
    std::ostringstream os;
    os.precision(10);
    os << "panel,row,value_a,value_b\n";
    const auto pa = res.theta_hat.to_array();
    for (int j = 0; j < 5; ++j)
        os << "parameters," << model::kParamNames[j] << ',' << pa[j] << ",\n";
    for (int i = 0; i < 6; ++i)
        os << "moments," << model::kMomentNames[i] << ',' << targets.values[i] << ','
           << res.model_moments[i] << '\n';
    os << "diagnostics,j_stat," << res.j_stat << ',' << res.p_value << '\n';
    os << "diagnostics,delta_gini," << res.derived.delta_gini << ",\n";
    os << "diagnostics,wage_compression," << res.derived.wage_compression << ",\n";
    os << "diagnostics,profit_elasticity," << res.derived.profit_elasticity_pre << ','
       << res.derived.profit_elasticity_post << '\n';
    return os.str();
}

std::string sensitivity_json(const calib::SensitivityResult& s) {
    json j;
    j["jacobian"] = s.jacobian;
    j["S"] = s.S;
    j["elasticities"] = s.elasticities;
    j["boundary"] = s.boundary;
    j["direct"] = s.direct;
    j["direct_elasticities"] = s.direct_elasticities;
    j["singular"] = s.singular;
    j["rcond"] = s.rcond;
    if (s.singular) {
        j["deficient_direction"] = s.deficient_direction;
        j["deficient_description"] = s.deficient_description;
    }
    return j.dump(2) + "\n";
}

std::string sensitivity_csv(const calib::SensitivityResult& s) {
    std::ostringstream os;
    os.precision(10);
    os << "block,row";
    for (const char* m : model::kMomentNames) os << ',' << m;
    os << '\n';
    for (int j = 0; j < 5; ++j) {
        os << "S," << model::kParamNames[j];
        for (int i = 0; i < 6; ++i) os << ',' << s.S[j][i];
        os << '\n';
    }
    for (int j = 0; j < 5; ++j) {
        os << "elasticity," << model::kParamNames[j];
        for (int i = 0; i < 6; ++i) os << ',' << s.elasticities[j][i];
        os << '\n';
    }
    os << "boundary,delta_gini_per_se";
    for (int i = 0; i < 6; ++i) os << ',' << s.boundary[i];
    os << '\n';
    os << "direct,d_delta_gini";
    for (int i = 0; i < 5; ++i) os << ',' << s.direct[i];
    os << ',' << s.direct[5] << '\n';
    os << "direct,elasticity";
    for (int i = 0; i < 5; ++i) os << ',' << s.direct_elasticities[i];
    os << ',' << s.direct_elasticities[5] << '\n';
    return os.str();
}

std::string bootstrap_intervals_json(const bootstrap::BootstrapResult& res) {
    json j;
    j["ci_level"] = res.ci_level;
    j["augmented"] = res.augmented;
    j["replications"] = res.replications.size();
    j["excluded"] = res.excluded;
    json arr = json::array();
    for (const auto& iv : res.intervals)
        arr.push_back({{"name", iv.name}, {"point", iv.point}, {"lo", iv.lo}, {"hi", iv.hi}});
    j["intervals"] = arr;
    return j.dump(2) + "\n";
}

std::string regress_manifest_json(const regress::MergeResult& merge, double mean_fd) {
    json j;
    j["matched_occupations"] = merge.panel.size();
    j["mean_fd_log_p90_p10"] = mean_fd;
    j["drop_counts"] = merge.drop_counts;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace ineq::artifacts
