#include "anneal/core/mixture_json.hpp"

#include <string>

namespace anneal {

namespace {

Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix covariance_from_json(const nlohmann::json& j, Eigen::Index d) {
  if (j.is_number()) return Matrix::Identity(d, d) * j.get<double>();
  if (!j.is_array() || j.empty()) throw InputError("covariance must be a number, vector or matrix");
  if (j.front().is_number()) {
    const Vector diag = vector_from_json(j, "covariance diagonal");
    if (diag.size() != d) throw InputError("covariance diagonal has wrong length");
    return diag.asDiagonal();
  }
  if (j.size() != static_cast<std::size_t>(d)) throw InputError("covariance has wrong number of rows");
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], "covariance row");
    if (row.size() != d) throw InputError("covariance row has wrong length");
    m.row(r) = row.transpose();
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

Mixture mixture_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("mixture must be a JSON object");
  for (const char* key : {"weights", "means", "covariances"}) {
    if (!j.contains(key)) throw InputError(std::string("mixture is missing \"") + key + "\"");
  }
  const auto& means = j.at("means");
  const auto& covs = j.at("covariances");
  const Vector weights = vector_from_json(j.at("weights"), "weights");
  if (!means.is_array() || !covs.is_array() || means.size() != covs.size() ||
      means.size() != static_cast<std::size_t>(weights.size())) {
    throw InputError("weights, means and covariances must have the same length");
  }
  std::vector<Gaussian> comps;
  comps.reserve(means.size());
  for (std::size_t m = 0; m < means.size(); ++m) {
    Vector mean = vector_from_json(means[m], "mean");
    Matrix cov = covariance_from_json(covs[m], mean.size());
    comps.emplace_back(std::move(mean), std::move(cov));
  }
  return Mixture(std::vector<double>(weights.data(), weights.data() + weights.size()), std::move(comps));
}

nlohmann::json mixture_to_json(const Mixture& gmm) {
  nlohmann::json out;
  out["weights"] = gmm.weights();
  out["means"] = nlohmann::json::array();
  out["covariances"] = nlohmann::json::array();
  for (const auto& c : gmm.components()) {
    out["means"].push_back(vector_to_json(c.mean()));
    out["covariances"].push_back(matrix_to_json(c.covariance()));
  }
  return out;
}

Gaussian gaussian_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mean")) throw InputError("gaussian needs a \"mean\"");
  Vector mean = vector_from_json(j.at("mean"), "mean");
  Matrix cov = j.contains("covariance") ? covariance_from_json(j.at("covariance"), mean.size())
                                        : Matrix::Identity(mean.size(), mean.size());
  return Gaussian(std::move(mean), std::move(cov));
}

nlohmann::json gaussian_to_json(const Gaussian& g) {
  return {{"mean", vector_to_json(g.mean())}, {"covariance", matrix_to_json(g.covariance())}};
}

}  // namespace anneal
