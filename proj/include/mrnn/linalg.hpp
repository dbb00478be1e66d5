#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mrnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// Throws ConfigError naming `what` when the shape differs.
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what);
void require_size(const Vector& v, Eigen::Index size, const std::string& what);

// Row-major flattening used by the checkpoint and CSV writers.
std::vector<double> to_row_major(const Matrix& m);
Matrix from_row_major(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& data);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

}  // namespace mrnn
