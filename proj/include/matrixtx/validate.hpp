#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matrixtx {

struct CriterionResult {
    std::string id;
    std::string description;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full cross-validation suite (C1..C10) at the reference desk
/// parameters: a = r_RX = 1 um, D = 1e-9 m^2/s, M_inf = 1e4, d in {2,5} um,
/// A/Cs in {1,25,100,400}, PBS time step 1e-6 s with 100 realizations.
/// Progress lines go to `log` when non-null.
std::vector<CriterionResult> run_acceptance_criteria(int threads,
                                                     std::ostream* log);

/// One line per criterion plus a summary; returns the count of failures.
int print_criteria_report(const std::vector<CriterionResult>& results,
                          std::ostream& out);

}  // namespace matrixtx
