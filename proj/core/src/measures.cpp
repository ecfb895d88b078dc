#include "measure_pca/measures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "measure_pca/error.hpp"

namespace measure_pca {

double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& values) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i);
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() < 1) throw std::invalid_argument("DiscreteMeasure: empty support");
  if (points_.cols() < 1) throw std::invalid_argument("DiscreteMeasure: dimension must be >= 1");
  if (weights_.size() != points_.rows()) {
    throw std::invalid_argument("DiscreteMeasure: weight count does not match point count");
  }
  if (!points_.allFinite()) throw std::invalid_argument("DiscreteMeasure: non-finite coordinate");
  if (!weights_.allFinite() || weights_.minCoeff() < 0.0) {
    throw std::invalid_argument("DiscreteMeasure: weights must be finite and nonnegative");
  }
  if (std::abs(compensated_sum(weights_) - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
  }
  const double u = 1.0 / static_cast<double>(points_.rows());
  uniform_ = (weights_.array() == u).all();
}

DiscreteMeasure DiscreteMeasure::uniform(Eigen::MatrixXd points) {
  const Eigen::Index m = points.rows();
  if (m < 1) throw std::invalid_argument("DiscreteMeasure: empty support");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  return DiscreteMeasure(std::move(points), std::move(w));
}

DiscreteMeasure DiscreteMeasure::translated(const Eigen::VectorXd& offset) const {
  if (static_cast<std::size_t>(offset.size()) != dim()) {
    throw std::invalid_argument("translated: offset dimension mismatch");
  }
  Eigen::MatrixXd shifted = points_.rowwise() + offset.transpose();
  return DiscreteMeasure(std::move(shifted), weights_);
}

GaussianLaw::GaussianLaw(Eigen::VectorXd mean, double sigma) : mean_(std::move(mean)), sigma_(sigma) {
  if (mean_.size() < 1) throw std::invalid_argument("GaussianLaw: dimension must be >= 1");
  if (!mean_.allFinite()) throw std::invalid_argument("GaussianLaw: non-finite mean");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("GaussianLaw: sigma must be positive and finite");
  }
}

void RandomMeasureModel::validate() const {
  if (d < 1) throw std::invalid_argument("RandomMeasureModel: d must be >= 1");
  if (!(tau_b >= 0.0) || !std::isfinite(tau_b)) {
    throw std::invalid_argument("RandomMeasureModel: tau_b must be >= 0");
  }
  if (!(tau_sigma >= 0.0) || !std::isfinite(tau_sigma)) {
    throw std::invalid_argument("RandomMeasureModel: tau_sigma must be >= 0");
  }
  if (!(sigma_floor > 0.0)) throw std::invalid_argument("RandomMeasureModel: sigma_floor must be > 0");
}

GaussianLaw draw_random_gaussian(const RandomMeasureModel& model, RngStream& rng) {
  model.validate();
  Eigen::VectorXd b(static_cast<Eigen::Index>(model.d));
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = model.tau_b * rng.normal();

  constexpr int kMaxAttempts = 1'000'000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double sigma = 1.0 + model.tau_sigma * rng.normal();
    if (sigma >= model.sigma_floor) return GaussianLaw(std::move(b), sigma);
  }
  throw NumericalError("draw_random_gaussian: no scale above sigma_floor after 1e6 draws");
}

DiscreteMeasure sample_gaussian(const GaussianLaw& law, std::size_t m, RngStream& rng) {
  if (m == 0) throw std::invalid_argument("sample_gaussian: m must be >= 1");
  const auto d = static_cast<Eigen::Index>(law.dim());
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), d);
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      pts(j, k) = law.mean()(k) + law.sigma() * rng.normal();
    }
  }
  return DiscreteMeasure::uniform(std::move(pts));
}

DiscreteMeasure subsample(const DiscreteMeasure& mu, std::size_t m, RngStream& rng) {
  if (m == 0) throw std::invalid_argument("subsample: m must be >= 1");
  if (m > mu.size()) throw std::invalid_argument("subsample: m exceeds the support size");
  if (!mu.is_uniform()) throw std::invalid_argument("subsample: input weights must be uniform");

  // Partial Fisher-Yates shuffle of the index set.
  std::vector<Eigen::Index> idx(mu.size());
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(mu.size() - i));
    std::swap(idx[i], idx[j]);
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(mu.dim()));
  for (std::size_t i = 0; i < m; ++i) pts.row(static_cast<Eigen::Index>(i)) = mu.points().row(idx[i]);
  return DiscreteMeasure::uniform(std::move(pts));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view token, double& value) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

DiscreteMeasure parse_point_cloud(std::istream& in, const std::string& source_name) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_row = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty()) continue;

    const auto fields = split_fields(view);
    std::vector<double> parsed(fields.size());
    std::size_t numeric = 0;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (parse_number(fields[k], parsed[k])) ++numeric;
    }
    if (first_row) {
      first_row = false;
      if (numeric == 0) {
        // Header row: every token is non-numeric.
        cols = fields.size();
        continue;
      }
    }
    if (numeric != fields.size()) {
      for (std::size_t k = 0; k < fields.size(); ++k) {
        double dummy = 0.0;
        if (!parse_number(fields[k], dummy)) {
          throw ParseError(source_name, line_no,
                           "non-numeric field " + std::to_string(k + 1) + " '" +
                               std::string(fields[k]) + "'");
        }
      }
    }
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(cols) + " fields, found " +
                           std::to_string(fields.size()));
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw ParseError(source_name, line_no == 0 ? 1 : line_no, "no data rows");

  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  return DiscreteMeasure::uniform(std::move(pts));
}

DiscreteMeasure ingest_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open point cloud '" + path.string() + "'");
  return parse_point_cloud(in, path.string());
}

}  // namespace measure_pca
