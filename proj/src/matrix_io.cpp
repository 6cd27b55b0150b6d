#include "ucd/matrix_io.hpp"

namespace ucd {

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> re, im;
  re.reserve(static_cast<size_t>(m.size()));
  im.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return nlohmann::json{
      {"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("matrix_from_json: rows/cols must be >= 1");
  }
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols) {
    throw std::invalid_argument("matrix_from_json: entry count mismatch");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      const size_t k = static_cast<size_t>(i * cols + j2);
      m(i, j2) = Complex(re[k].get<double>(), im[k].get<double>());
    }
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("matrix_from_json: non-finite entries");
  }
  return m;
}

}  // namespace ucd
