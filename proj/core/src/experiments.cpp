#include "measure_pca/experiments.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "measure_pca/hilbert.hpp"
#include "measure_pca/oracles.hpp"
#include "measure_pca/parallel.hpp"

namespace measure_pca {

std::string to_string(Regime regime) { return regime == Regime::Dense ? "dense" : "sparse"; }

SweepConfig SweepConfig::desk(Regime regime) {
  SweepConfig cfg;
  cfg.regime = regime;
  cfg.m0 = 200;
  cfg.T = 10;
  cfg.p = 10;
  cfg.trials = 10;
  if (regime == Regime::Dense) {
    cfg.values = {25, 50, 100, 200, 400};
    cfg.fixed = 500;
  } else {
    cfg.values = {10, 25, 50, 100, 250, 500};
    cfg.fixed = 200;
  }
  return cfg;
}

SweepConfig SweepConfig::full(Regime regime) {
  SweepConfig cfg;
  cfg.regime = regime;
  cfg.trials = 20;
  if (regime == Regime::Dense) {
    cfg.values = {10, 20, 50, 100, 200, 500, 1000};
    cfg.fixed = 1000;
    cfg.m0 = 500;
    cfg.T = 20;
    cfg.p = 20;
  } else {
    cfg.values = {10, 20, 50, 100, 200, 500};
    cfg.fixed = 500;
    cfg.m0 = 100;
    cfg.T = 10;
    cfg.p = 10;
  }
  return cfg;
}

void SweepConfig::validate() const {
  model.validate();
  if (kinds.empty()) throw std::invalid_argument("sweep: no embeddings selected");
  if (values.empty()) throw std::invalid_argument("sweep: empty grid of swept values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) throw std::invalid_argument("sweep: swept values must be positive");
    if (i > 0 && values[i] <= values[i - 1]) throw std::invalid_argument("sweep: swept values must increase");
  }
  if (fixed == 0) throw std::invalid_argument("sweep: fixed n or m must be positive");
  if (m0 == 0 || T == 0 || p == 0) throw std::invalid_argument("sweep: m0, T and p must be positive");
  if (trials == 0) throw std::invalid_argument("sweep: trials must be >= 1");
  if (q == 0) throw std::invalid_argument("sweep: q must be >= 1");
  for (EmbeddingKind kind : kinds) {
    const std::size_t dim = kind == EmbeddingKind::KME ? m0 : kind == EmbeddingKind::LOT ? m0 * model.d : T * p;
    if (q > dim) throw std::invalid_argument("sweep: q exceeds the dimension of the " + to_string(kind) + " space");
  }
}

EmbeddingConfig make_trial_embedding(EmbeddingKind kind, std::size_t d, std::size_t m0, std::size_t T,
                                     std::size_t p, std::uint64_t seed, std::size_t trial) {
  switch (kind) {
    case EmbeddingKind::KME:
    case EmbeddingKind::LOT: {
      RngStream rng(seed, derive_stream_id({stream_role::reference, trial}));
      DiscreteMeasure reference = make_gaussian_reference(m0, d, 1.0, rng);
      return kind == EmbeddingKind::KME ? EmbeddingConfig::kme(std::move(reference), Kernel::linear())
                                        : EmbeddingConfig::lot(std::move(reference));
    }
    case EmbeddingKind::SW: {
      RngStream rng(seed, derive_stream_id({stream_role::directions, trial}));
      return EmbeddingConfig::sw(make_sphere_directions(p, d, rng), make_quantile_grid(T));
    }
  }
  throw std::invalid_argument("unknown embedding kind");
}

namespace {

struct PopulationSpace {
  EmbeddingConfig config;
  CovOperator sigma;
  SpectralDecomp spectrum;
};

struct MeanStd {
  double mean;
  double std;
};

MeanStd mean_std(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

std::vector<SweepSummaryRow> SweepResult::summary() const {
  std::vector<SweepSummaryRow> rows;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    std::vector<double> hs;
    std::vector<double> ex;
    while (j < raw.size() && raw[j].kind == raw[i].kind && raw[j].value == raw[i].value) {
      hs.push_back(raw[j].hs_error);
      ex.push_back(raw[j].excess_risk);
      ++j;
    }
    const MeanStd h = mean_std(hs);
    const MeanStd e = mean_std(ex);
    rows.push_back({raw[i].kind, raw[i].value, h.mean, h.std, e.mean, e.std, hs.size()});
    i = j;
  }
  return rows;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t nk = cfg.kinds.size();
  const std::size_t nv = cfg.values.size();
  const GaussianModelParams params = GaussianModelParams::from_model(cfg.model);

  std::vector<std::unique_ptr<PopulationSpace>> spaces(cfg.trials * nk);
  parallel_for(spaces.size(), [&](std::size_t idx) {
    const std::size_t trial = idx / nk;
    const EmbeddingKind kind = cfg.kinds[idx % nk];
    EmbeddingConfig space = make_trial_embedding(kind, cfg.model.d, cfg.m0, cfg.T, cfg.p, cfg.seed, trial);
    CovOperator sigma = analytic_covariance(params, space);
    SpectralDecomp spectrum = spectral_decompose(sigma);
    spaces[idx] = std::make_unique<PopulationSpace>(
        PopulationSpace{std::move(space), std::move(sigma), std::move(spectrum)});
  });

  // cells[(trial * nv + v) * nk + k]
  std::vector<std::pair<double, double>> cells(cfg.trials * nv * nk);
  parallel_for(cfg.trials * nv, [&](std::size_t cell) {
    const std::size_t trial = cell / nv;
    const std::size_t v = cell % nv;
    const std::size_t n = cfg.n_for(cfg.values[v]);
    const std::size_t m = cfg.m_for(cfg.values[v]);

    std::vector<DiscreteMeasure> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream law_rng(cfg.seed, derive_stream_id({stream_role::law, trial, i}));
      const GaussianLaw law = draw_random_gaussian(cfg.model, law_rng);
      RngStream sample_rng(cfg.seed, derive_stream_id({stream_role::sample, trial, i, m}));
      samples.push_back(sample_gaussian(law, m, sample_rng));
    }

    for (std::size_t k = 0; k < nk; ++k) {
      const PopulationSpace& pop = *spaces[trial * nk + k];
      std::vector<EmbeddedVector> vs;
      vs.reserve(n);
      for (const auto& mu : samples) vs.push_back(embed(mu, pop.config));
      const CovOperator sigma_hat = empirical_covariance(vs, cfg.center);
      const double hs = hs_norm(sigma_hat - pop.sigma);
      const Projector p_hat = top_q_projector(spectral_decompose(sigma_hat), cfg.q);
      const double ex = excess_risk(pop.sigma, pop.spectrum, p_hat, cfg.q);
      cells[cell * nk + k] = {hs, ex};
    }
  });

  SweepResult result;
  result.config = cfg;
  result.raw.reserve(cells.size());
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const auto& [hs, ex] = cells[(trial * nv + v) * nk + k];
        result.raw.push_back({cfg.kinds[k], cfg.values[v], trial, hs, ex});
      }
    }
  }
  return result;
}

double estimate_rate_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("estimate_rate_slope: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("estimate_rate_slope: need at least 3 points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("estimate_rate_slope: values must be positive");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("estimate_rate_slope: xs must not all be equal");
  return sxy / sxx;
}

std::vector<double> minmax_scale(std::span<const double> ys) {
  if (ys.size() < 2) throw std::invalid_argument("minmax_scale: need at least 2 values");
  double lo = ys[0];
  double hi = ys[0];
  for (double y : ys) {
    if (!std::isfinite(y)) throw std::invalid_argument("minmax_scale: non-finite value");
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (!(hi > lo)) throw std::invalid_argument("minmax_scale: all values are equal");
  std::vector<double> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = (ys[i] - lo) / (hi - lo);
  return out;
}

StabilityResult run_stability(std::span<const DiscreteMeasure> measures, const StabilityConfig& cfg,
                              const EmbeddingConfig& embedding) {
  if (cfg.repeats < 2) throw std::invalid_argument("run_stability: need at least 2 repeats");
  if (measures.size() < 2) throw std::invalid_argument("run_stability: need at least 2 measures");
  if (cfg.m_values.empty()) throw std::invalid_argument("run_stability: empty list of subsample sizes");
  if (cfg.q < 1 || cfg.q > embedding.size()) throw std::invalid_argument("run_stability: q out of range");
  for (std::size_t m : cfg.m_values) {
    if (m == 0) throw std::invalid_argument("run_stability: subsample sizes must be positive");
    for (const auto& mu : measures) {
      if (mu.size() < m) throw std::invalid_argument("run_stability: a measure has fewer points than m");
    }
  }

  const std::size_t nm = cfg.m_values.size();
  const std::size_t reps = cfg.repeats;
  std::vector<Eigen::MatrixXd> scores(nm * reps);
  parallel_for(nm * reps, [&](std::size_t task) {
    const std::size_t mi = task / reps;
    const std::size_t k = task % reps;
    const std::size_t m = cfg.m_values[mi];
    std::vector<EmbeddedVector> vs;
    vs.reserve(measures.size());
    for (std::size_t i = 0; i < measures.size(); ++i) {
      RngStream rng(cfg.seed, derive_stream_id({stream_role::subsample, m, k, i}));
      vs.push_back(embed(subsample(measures[i], m, rng), embedding));
    }
    const CovOperator cov = empirical_covariance(vs, cfg.center);
    const Projector proj = top_q_projector(spectral_decompose(cov), cfg.q);
    scores[task] = pca_scores(vs, proj, cfg.center);
  });

  StabilityResult result;
  result.config = cfg;
  for (std::size_t mi = 0; mi < nm; ++mi) {
    StabilityRow row;
    row.m = cfg.m_values[mi];
    row.repeats = reps;
    row.scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(mi * reps),
                      scores.begin() + static_cast<std::ptrdiff_t>((mi + 1) * reps));
    double sum = 0.0;
    for (std::size_t k = 0; k < reps; ++k) {
      for (std::size_t l = k + 1; l < reps; ++l) {
        const double d = procrustes_disparity(row.scores[k], row.scores[l]);
        row.pairwise.push_back(d);
        sum += d;
      }
    }
    const auto nr = static_cast<double>(reps);
    row.mean_disparity = 2.0 / (nr * (nr - 1.0)) * sum;
    row.std_disparity = mean_std(row.pairwise).std;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<DiscreteMeasure> make_cluster_measures(std::size_t per_group, std::size_t points, std::uint64_t seed) {
  if (per_group == 0 || points == 0) throw std::invalid_argument("make_cluster_measures: counts must be positive");
  static constexpr double centers[4][2] = {{3.0, 0.0}, {-3.0, 0.0}, {0.0, 1.5}, {0.0, -1.5}};
  std::vector<DiscreteMeasure> out;
  out.reserve(4 * per_group);
  for (std::size_t i = 0; i < 4 * per_group; ++i) {
    const auto& c = centers[i / per_group];
    RngStream rng(seed, derive_stream_id({stream_role::cluster, i}));
    Eigen::Vector2d mean(c[0] + 0.3 * rng.normal(), c[1] + 0.3 * rng.normal());
    const double scale = std::max(0.5, 1.0 + 0.05 * rng.normal());
    out.push_back(sample_gaussian(GaussianLaw(mean, scale), points, rng));
  }
  return out;
}

void RmDecayConfig::validate() const {
  model.validate();
  if (kinds.empty()) throw std::invalid_argument("oracle check: no embeddings selected");
  if (m_values.size() < 3) throw std::invalid_argument("oracle check: need at least 3 sample sizes");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] == 0 || (i > 0 && m_values[i] <= m_values[i - 1])) {
      throw std::invalid_argument("oracle check: sample sizes must be positive and increasing");
    }
  }
  if (laws == 0 || trials == 0) throw std::invalid_argument("oracle check: laws and trials must be >= 1");
  if (m0 == 0 || T == 0 || p == 0) throw std::invalid_argument("oracle check: m0, T and p must be positive");
}

double RmDecayResult::slope(EmbeddingKind kind) const {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : rows) {
    if (row.kind != kind) continue;
    xs.push_back(static_cast<double>(row.m));
    ys.push_back(row.mc_estimate);
  }
  return estimate_rate_slope(xs, ys);
}

RmDecayResult run_rm_decay(const RmDecayConfig& cfg) {
  cfg.validate();
  const std::size_t nk = cfg.kinds.size();
  const std::size_t nm = cfg.m_values.size();
  const std::size_t nl = cfg.laws;

  std::vector<GaussianLaw> laws;
  laws.reserve(nl);
  for (std::size_t j = 0; j < nl; ++j) {
    RngStream rng(cfg.seed, derive_stream_id({stream_role::oracle, stream_role::law, j}));
    laws.push_back(draw_random_gaussian(cfg.model, rng));
  }

  std::vector<double> estimates(nk * nm * nl);
  parallel_for(estimates.size(), [&](std::size_t task) {
    const std::size_t k = task / (nm * nl);
    const std::size_t mi = (task / nl) % nm;
    const std::size_t j = task % nl;
    const EmbeddingKind kind = cfg.kinds[k];
    const std::size_t m = cfg.m_values[mi];
    const bool matched = kind == EmbeddingKind::LOT && cfg.lot_matched_reference;
    const EmbeddingConfig space = make_trial_embedding(kind, cfg.model.d, matched ? m : cfg.m0, cfg.T, cfg.p,
                                                       cfg.seed, matched ? m : 0);
    const RngStream rng(cfg.seed, derive_stream_id({stream_role::oracle, static_cast<std::uint64_t>(kind), m, j}));
    estimates[task] = sampling_error_mc(laws[j], space, m, cfg.trials, rng);
  });

  RmDecayResult result;
  result.config = cfg;
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t mi = 0; mi < nm; ++mi) {
      double sum = 0.0;
      for (std::size_t j = 0; j < nl; ++j) sum += estimates[(k * nm + mi) * nl + j];
      result.rows.push_back({cfg.kinds[k], cfg.m_values[mi], sum / static_cast<double>(nl), nl * cfg.trials});
    }
  }
  return result;
}

}  // namespace measure_pca
