#include "mrnn/linalg.hpp"

#include "mrnn/errors.hpp"

#include <sstream>

namespace mrnn {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << what << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
        throw ConfigError(os.str());
    }
}

void require_size(const Vector& v, Eigen::Index size, const std::string& what) {
    if (v.size() != size) {
        std::ostringstream os;
        os << what << ": expected length " << size << ", got " << v.size();
        throw ConfigError(os.str());
    }
}

std::vector<double> to_row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

Matrix from_row_major(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& data) {
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        std::ostringstream os;
        os << "row-major payload has " << data.size() << " values, shape needs " << rows * cols;
        throw ConfigError(os.str());
    }
    Matrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[idx++];
    return m;
}

double min_eigenvalue(const Matrix& symmetric) {
    if (symmetric.rows() == 1) return symmetric(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace mrnn
