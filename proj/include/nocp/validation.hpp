// Self-test suite: each check compares a production code path against an
// independent construction over randomized shapes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nocp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst error, or the fitted quantity
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 7;
    std::size_t cases = 20;  // random shapes per property check
};

/// Window of the linear convolution of a symbol stream vs the ISI/ICI matrix model.
CheckResult check_matrix_model(const ValidationOptions& opt);

/// gtilde_diag vs the diagonal of an explicit F G F^H product.
CheckResult check_gtilde_diag(const ValidationOptions& opt);

/// Component powers vs the independent total for every receiver.
CheckResult check_decomposition_audit(const ValidationOptions& opt);

/// Noiseless cp-zf detection recovers the transmitted grid.
CheckResult check_cp_recovery(const ValidationOptions& opt);

/// Time-reversal cross-talk relative to the main tap decays like 1/M.
CheckResult check_crosstalk_decay(const ValidationOptions& opt);

/// Single-user noiseless MRC SIR at large M vs the closed form.
CheckResult check_closed_form_sir(const ValidationOptions& opt);

std::vector<CheckResult> run_validation_suite(const ValidationOptions& opt);

/// "PASS name measured=... tolerance=... detail" per line.
void print_results(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace nocp
