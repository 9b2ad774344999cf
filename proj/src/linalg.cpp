#include "fdmlens/linalg.hpp"

#include <cassert>
#include <cmath>
#include <utility>

namespace fdmlens::linalg {

bool solve(std::vector<double> a, std::vector<double> b, std::size_t n,
           std::vector<double>& x) {
    assert(a.size() == n * n && b.size() == n);

    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tol = scale > 0.0 ? scale * 1e-12 : 1e-300;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        }
        if (std::abs(a[pivot * n + col]) <= tol) return false;
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }

    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return true;
}

} // namespace fdmlens::linalg
