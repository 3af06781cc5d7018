#pragma once

#include <cstddef>
#include <vector>

namespace imphedge {

// Thomas algorithm for a tridiagonal system
//   lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]
// (lower[0] and upper[n-1] unused). Scratch buffers are caller-owned so the
// solve can run in tight loops without allocation. Overwrites rhs-copy into x.
inline void solve_tridiagonal(const std::vector<double>& lower,
                              const std::vector<double>& diag,
                              const std::vector<double>& upper,
                              const std::vector<double>& rhs,
                              std::vector<double>& x,
                              std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    x.resize(n);
    scratch.resize(n);

    double beta = diag[0];
    x[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= scratch[i + 1] * x[i + 1];
    }
}

} // namespace imphedge
