#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <charconv>
#include <limits>
#include <stdexcept>
#include <string>

namespace dynbc {

using Real = double;
using VecXd = Eigen::VectorXd;
using VecXi = Eigen::VectorXi;
using MatXd = Eigen::MatrixXd;
using MatXi = Eigen::MatrixXi;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when a caller violates a documented parameter range.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown on vector/matrix size mismatches.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when Dirichlet elimination leaves no free dofs.
struct DegenerateSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

struct NonFiniteStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation; keeps CSV output diffable.
inline std::string format_double(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long x) { return std::to_string(x); }

}  // namespace dynbc
