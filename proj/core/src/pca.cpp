#include "honeyboost/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace honeyboost {

namespace {

Eigen::RowVectorXd with_sign_convention(Eigen::RowVectorXd row) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    if (std::abs(row(j)) > std::abs(row(best))) best = j;
  }
  if (row(best) < 0.0) row = -row;
  return row;
}

}  // namespace

PcaModel degenerate_pca2(std::size_t input_dim) {
  PcaModel m;
  const auto d = static_cast<Eigen::Index>(input_dim);
  m.input_dim = input_dim;
  m.mean = Eigen::VectorXd::Zero(d);
  m.scale = Eigen::VectorXd::Ones(d);
  m.components = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, d);
  m.degenerate = true;
  return m;
}

PcaModel fit_pca2(const Eigen::MatrixXd& points, PcaOptions options) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (d < 2) throw std::invalid_argument("fit_pca2 needs at least 2 columns");

  PcaModel m = degenerate_pca2(static_cast<std::size_t>(d));
  if (n == 0) return m;
  m.mean = points.colwise().mean().transpose();
  if (n < 2) return m;

  const Eigen::MatrixXd centered = points.rowwise() - m.mean.transpose();
  const Eigen::VectorXd sd =
      (centered.colwise().squaredNorm() / static_cast<double>(n - 1)).transpose().cwiseSqrt();
  bool any_varying = false;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (sd(j) > 0.0) {
      any_varying = true;
      if (options.standardize) m.scale(j) = sd(j);
    }
  }
  if (!any_varying) return m;

  const Eigen::MatrixXd z = centered.array().rowwise() / m.scale.transpose().array();
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) return m;

  // Eigen returns eigenvalues in ascending order.
  for (int k = 0; k < 2; ++k) {
    const Eigen::Index col = d - 1 - k;
    m.components.row(k) = with_sign_convention(eig.eigenvectors().col(col).transpose());
    m.eigenvalues[static_cast<std::size_t>(k)] = std::max(0.0, eig.eigenvalues()(col));
  }
  m.degenerate = false;
  return m;
}

std::array<double, 2> project_pca2(const PcaModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw std::invalid_argument("project_pca2: expected dimension " +
                                std::to_string(model.input_dim) + ", got " +
                                std::to_string(x.size()));
  }
  if (model.degenerate) return {0.0, 0.0};
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd z = (v - model.mean).cwiseQuotient(model.scale);
  const Eigen::Vector2d s = model.components * z;
  return {s(0), s(1)};
}

Eigen::MatrixX2d project_rows(const PcaModel& model, const Eigen::MatrixXd& points) {
  if (static_cast<std::size_t>(points.cols()) != model.input_dim) {
    throw std::invalid_argument("project_rows: dimension mismatch");
  }
  if (model.degenerate) return Eigen::MatrixX2d::Zero(points.rows(), 2);
  const Eigen::MatrixXd z = (points.rowwise() - model.mean.transpose()).array().rowwise() /
                            model.scale.transpose().array();
  return z * model.components.transpose();
}

}  // namespace honeyboost
