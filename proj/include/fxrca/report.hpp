#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fxrca/did.hpp"
#include "fxrca/iv.hpp"
#include "fxrca/placebo.hpp"
#include "fxrca/regression.hpp"

namespace fxrca::report {

// "***" below 1%, "**" below 5%, "*" below 10%.
std::string stars(double p_value);

// term,estimate,std_error,stat,p_value
std::string fit_csv(const econ::RegressionFit& fit);

std::string fit_json(const econ::RegressionFit& fit);
std::string iv_json(const econ::IvResult& result);

using LabelledFit = std::pair<std::string, const econ::RegressionFit*>;

// One column per model: starred estimate on the term row, the standard
// error in parentheses on the row below, then n, R^2 and the log-likelihood
// when any model has one. Fixed-effect indicator terms ("<key>=<level>")
// are left out.
std::string comparison_csv(const std::vector<LabelledFit>& fits);

// relative_year,estimate,ci_low,ci_high
std::string event_csv(const econ::EventStudy& es);

// draw,coefficient,p_value
std::string placebo_csv(const econ::PlaceboResult& result);

// statistic,value,p_value for the four instrument diagnostics.
std::string iv_diagnostics_csv(const econ::IvDiagnostics& d);

}  // namespace fxrca::report
