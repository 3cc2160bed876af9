#pragma once

#include <string>

namespace pdelab {

// Evaluation record of one inequality or threshold: left/right side, the
// constant that entered the right side, and the resulting verdict.
// margin = rhs - lhs (nonnegative when the bound holds).
struct BoundCertificate {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 1.0;  // multiplicative constant used in rhs
    double margin = 0.0;
    double ratio = 0.0;     // lhs / (rhs/constant), the empirical constant
    bool pass = false;
    bool indeterminate = false;  // degenerate input (e.g. zero field)

    static BoundCertificate make(std::string name, double lhs, double rhs,
                                 double constant, double tol) {
        BoundCertificate c;
        c.name = std::move(name);
        c.lhs = lhs;
        c.rhs = rhs;
        c.constant = constant;
        c.margin = rhs - lhs;
        c.ratio = (rhs > 0.0) ? lhs / (rhs / constant) : 0.0;
        c.pass = lhs <= rhs * (1.0 + tol);
        if (lhs == 0.0 && rhs == 0.0) {
            c.pass = true;  // 0 <= 0, degenerate
            c.indeterminate = true;
        }
        return c;
    }
};

} // namespace pdelab
