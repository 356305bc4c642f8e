#pragma once

#include <string>

#include "conelab/cone.hpp"
#include "conelab/io.hpp"

namespace conelab {

constexpr const char* kToolkitVersion = "0.1.0";

json toolkit_json();

/// {"degree", "eigenvalues", "residuals", "near_zero_count", "solver"}.
json spectrum_to_json(const SpectrumSlice& s, const NearZero& nz);

json cone_report_to_json(const ConeReport& r);
json nolog_to_json(const NologResult& v, const ConeReport& r);
json windows_to_json(const std::vector<WindowVerdict>& w);

/// One row per eigenvalue: j, lambda, alpha_root, beta_root, order_alpha, order_beta, flags.
std::string cone_report_csv(const ConeReport& r);

}  // namespace conelab
