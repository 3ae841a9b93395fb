#pragma once

#include <string>
#include <vector>

#include "ineq/bootstrap.hpp"
#include "ineq/calib.hpp"
#include "ineq/config.hpp"
#include "ineq/regress.hpp"

namespace ineq::artifacts {

std::string calib_json(const calib::CalibResult& res);

// Calibration summary CSV: parameter panel, moment-fit panel, diagnostics.
std::string calib_table_csv(const calib::CalibResult& res, const model::MomentVector& targets);

std::string sensitivity_json(const calib::SensitivityResult& s);
std::string sensitivity_csv(const calib::SensitivityResult& s);

std::string bootstrap_intervals_json(const bootstrap::BootstrapResult& res);

std::string regress_manifest_json(const regress::MergeResult& merge, double mean_fd);

void write_file(const std::string& path, const std::string& content);

} // namespace ineq::artifacts
