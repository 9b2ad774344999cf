#ifndef FDMLENS_LINALG_HPP
#define FDMLENS_LINALG_HPP

#include <cstddef>
#include <vector>

namespace fdmlens::linalg {

/// Dense row-major square matrix solve A x = b by Gaussian elimination with
/// partial pivoting. Sized for this project's systems (n <= 4). Returns false
/// when the matrix is numerically singular (pivot below a scale-relative
/// threshold); A and b are clobbered, x is written only on success.
bool solve(std::vector<double> a, std::vector<double> b, std::size_t n,
           std::vector<double>& x);

} // namespace fdmlens::linalg

#endif
