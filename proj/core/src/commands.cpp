#include "measure_pca/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "measure_pca/csv.hpp"
#include "measure_pca/error.hpp"
#include "measure_pca/hilbert.hpp"

#ifndef MEASURE_PCA_VERSION
#define MEASURE_PCA_VERSION "unknown"
#endif

namespace measure_pca {

namespace fs = std::filesystem;

namespace {

constexpr const char* kStreamScheme =
    "every random draw uses RngStream(seed, derive_stream_id({role, indices...})); "
    "roles: reference=1 (trial), directions=2 (trial), law=3 (trial, measure), "
    "sample=4 (trial, measure, m), subsample=5 (m, repeat, measure), cluster=6 (measure), "
    "oracle=7 (law: 3, j | kind, m, j)";

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string join_kinds(const std::vector<EmbeddingKind>& kinds) {
  std::string out;
  for (std::size_t i = 0; i < kinds.size(); ++i) out += (i ? "," : "") + to_string(kinds[i]);
  return out;
}

// Typed reads that also record the effective value of every key.
class Resolver {
 public:
  Resolver(ConfigFile& file, std::map<std::string, std::string>& resolved) : file_(file), resolved_(resolved) {}

  std::size_t size(const std::string& key, std::size_t fallback) {
    const std::size_t v = file_.get_size(key, fallback);
    resolved_[key] = std::to_string(v);
    return v;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const std::uint64_t v = file_.get_u64(key, fallback);
    resolved_[key] = std::to_string(v);
    return v;
  }
  double real(const std::string& key, double fallback) {
    const double v = file_.get_double(key, fallback);
    resolved_[key] = format_double(v);
    return v;
  }
  bool flag(const std::string& key, bool fallback) {
    const bool v = file_.get_bool(key, fallback);
    resolved_[key] = v ? "true" : "false";
    return v;
  }
  std::string word(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
    std::string v = file_.get_string(key, fallback);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const char* a : allowed) {
      if (v == a) {
        resolved_[key] = v;
        return v;
      }
    }
    std::string options;
    for (const char* a : allowed) options += (options.empty() ? "" : "|") + std::string(a);
    throw ConfigError("key `" + key + "`: expected " + options + ", got `" + v + "`");
  }
  std::vector<std::size_t> sizes(const std::string& key, const std::vector<std::size_t>& fallback) {
    const auto v = file_.get_size_list(key, fallback);
    resolved_[key] = join(v);
    return v;
  }
  std::vector<EmbeddingKind> kinds(const std::string& key) {
    std::vector<EmbeddingKind> out;
    for (const auto& name : file_.get_word_list(key, {"KME", "LOT", "SW"})) {
      const auto kind = parse_embedding_kind(name);
      if (!kind) throw ConfigError("key `" + key + "`: unknown embedding `" + name + "`");
      if (std::find(out.begin(), out.end(), *kind) != out.end()) {
        throw ConfigError("key `" + key + "`: embedding `" + name + "` listed twice");
      }
      out.push_back(*kind);
    }
    resolved_[key] = join_kinds(out);
    return out;
  }

 private:
  ConfigFile& file_;
  std::map<std::string, std::string>& resolved_;
};

RandomMeasureModel read_model(Resolver& r) {
  RandomMeasureModel model;
  model.d = r.size("model.d", model.d);
  model.tau_b = r.real("model.tau_b", model.tau_b);
  model.tau_sigma = r.real("model.tau_sigma", model.tau_sigma);
  model.sigma_floor = r.real("model.sigma_floor", model.sigma_floor);
  return model;
}

template <typename F>
auto as_config_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

struct NamedMeasures {
  std::vector<std::string> ids;
  std::vector<DiscreteMeasure> measures;
};

NamedMeasures load_data_dir(const fs::path& dir) {
  if (!fs::exists(dir)) throw DataError("data directory not found: " + dir.string());
  if (!fs::is_directory(dir)) throw DataError("data path is not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) {
    throw DataError("data directory " + dir.string() + " must contain at least 2 point-cloud .csv files");
  }
  NamedMeasures out;
  for (const auto& f : files) {
    out.ids.push_back(f.stem().string());
    out.measures.push_back(ingest_point_cloud(f));
    if (out.measures.back().dim() != out.measures.front().dim()) {
      throw DataError(f.string() + ": dimension " + std::to_string(out.measures.back().dim()) + " differs from " +
                      std::to_string(out.measures.front().dim()) + " of " + files.front().string());
    }
  }
  return out;
}

// Settings for embedding arbitrary point clouds (not the Gaussian model).
struct DataEmbeddingSettings {
  std::size_t m0 = 100;
  std::size_t T = 10;
  std::size_t p = 10;
  std::string kme_kernel = "rbf";
  double bandwidth = 0.0;
  std::string reference = "gaussian";
  double reference_scale = 0.0;

  static DataEmbeddingSettings read(Resolver& r) {
    DataEmbeddingSettings s;
    s.m0 = r.size("embedding.m0", s.m0);
    s.T = r.size("embedding.T", s.T);
    s.p = r.size("embedding.p", s.p);
    s.kme_kernel = r.word("embedding.kme_kernel", s.kme_kernel, {"rbf", "linear"});
    s.bandwidth = r.real("embedding.bandwidth", s.bandwidth);
    s.reference = r.word("embedding.reference", s.reference, {"gaussian", "uniform"});
    s.reference_scale = r.real("embedding.reference_scale", s.reference_scale);
    if (s.m0 == 0 || s.T == 0 || s.p == 0) throw ConfigError("embedding.m0, embedding.T and embedding.p must be >= 1");
    if (s.bandwidth < 0.0 || s.reference_scale < 0.0) {
      throw ConfigError("embedding.bandwidth and embedding.reference_scale must be >= 0 (0 = from the data)");
    }
    return s;
  }
};

// Pooled location and spread of a collection: mean of the measure means and
// root mean squared deviation per coordinate.
std::pair<Eigen::VectorXd, double> pooled_moments(std::span<const DiscreteMeasure> measures) {
  const auto d = static_cast<Eigen::Index>(measures.front().dim());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& mu : measures) mean += mu.points().transpose() * mu.weights();
  mean /= static_cast<double>(measures.size());
  double ss = 0.0;
  for (const auto& mu : measures) {
    ss += ((mu.points().rowwise() - mean.transpose()).rowwise().squaredNorm().array() * mu.weights().array()).sum();
  }
  const double spread = std::sqrt(ss / (static_cast<double>(measures.size()) * static_cast<double>(d)));
  return {mean, spread > 0.0 ? spread : 1.0};
}

EmbeddingConfig build_data_embedding(EmbeddingKind kind, std::span<const DiscreteMeasure> measures,
                                     const DataEmbeddingSettings& s, std::uint64_t seed) {
  const std::size_t d = measures.front().dim();
  const auto [center, spread] = pooled_moments(measures);
  if (kind == EmbeddingKind::SW) {
    RngStream rng(seed, derive_stream_id({stream_role::directions, 0}));
    return EmbeddingConfig::sw(make_sphere_directions(s.p, d, rng), make_quantile_grid(s.T));
  }
  RngStream rng(seed, derive_stream_id({stream_role::reference, 0}));
  const double scale = s.reference_scale > 0.0 ? s.reference_scale : spread;
  DiscreteMeasure reference = s.reference == "gaussian"
                                  ? make_gaussian_reference(s.m0, d, scale, rng)
                                  : make_uniform_reference(s.m0, d, std::sqrt(3.0) * scale, rng);
  reference = reference.translated(center);
  if (kind == EmbeddingKind::LOT) return EmbeddingConfig::lot(std::move(reference));
  const Kernel kernel =
      s.kme_kernel == "linear" ? Kernel::linear() : Kernel::rbf(s.bandwidth > 0.0 ? s.bandwidth : spread);
  return EmbeddingConfig::kme(std::move(reference), kernel);
}

std::vector<std::string> score_header(std::size_t q, bool with_embedding) {
  std::vector<std::string> header;
  if (with_embedding) header.push_back("embedding");
  header.push_back("measure_id");
  for (std::size_t j = 1; j <= q; ++j) header.push_back("pc" + std::to_string(j));
  return header;
}

RunManifest start_manifest(const std::string& command, const std::map<std::string, std::string>& resolved,
                           std::uint64_t seed, bool center) {
  RunManifest m;
  m.command = command;
  m.config = resolved;
  m.seed = seed;
  m.center = center;
  m.timestamp = utc_timestamp();
  return m;
}

}  // namespace

void write_manifest(const RunManifest& manifest, const fs::path& path) {
  nlohmann::ordered_json doc;
  doc["command"] = manifest.command;
  doc["artifact_version"] = MEASURE_PCA_VERSION;
  doc["timestamp"] = manifest.timestamp;
  doc["seed"] = manifest.seed;
  doc["center"] = manifest.center;
  doc["stream_derivation"] = kStreamScheme;
  doc["grids"] = manifest.grids;
  doc["config"] = manifest.config;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

SweepConfig read_sweep_config(ConfigFile& file, std::map<std::string, std::string>& resolved) {
  Resolver r(file, resolved);
  const std::string regime_name = r.word("regime", "dense", {"dense", "sparse"});
  const Regime regime = regime_name == "dense" ? Regime::Dense : Regime::Sparse;
  const std::string preset = r.word("preset", "desk", {"desk", "full"});
  SweepConfig cfg = preset == "desk" ? SweepConfig::desk(regime) : SweepConfig::full(regime);

  cfg.seed = r.u64("seed", cfg.seed);
  cfg.kinds = r.kinds("embeddings");
  cfg.model = read_model(r);
  const std::vector<std::size_t> fixed{cfg.fixed};
  const auto n_list = r.sizes("sweep.n", regime == Regime::Dense ? cfg.values : fixed);
  const auto m_list = r.sizes("sweep.m", regime == Regime::Dense ? fixed : cfg.values);
  const auto& swept = regime == Regime::Dense ? n_list : m_list;
  const auto& single = regime == Regime::Dense ? m_list : n_list;
  if (single.size() != 1) {
    throw ConfigError(std::string("key `") + (regime == Regime::Dense ? "sweep.m" : "sweep.n") +
                      "` must hold a single value in the " + regime_name + " regime");
  }
  cfg.values = swept;
  cfg.fixed = single.front();
  cfg.m0 = r.size("embedding.m0", cfg.m0);
  cfg.T = r.size("embedding.T", cfg.T);
  cfg.p = r.size("embedding.p", cfg.p);
  cfg.q = r.size("pca.q", cfg.q);
  cfg.trials = r.size("trials", cfg.trials);
  cfg.center = r.flag("center", cfg.center);
  file.reject_unknown();
  as_config_error([&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

RmDecayConfig read_rm_decay_config(ConfigFile& file, std::map<std::string, std::string>& resolved) {
  Resolver r(file, resolved);
  RmDecayConfig cfg;
  cfg.seed = r.u64("seed", cfg.seed);
  cfg.kinds = r.kinds("embeddings");
  cfg.model = read_model(r);
  cfg.m_values = r.sizes("oracle.m", cfg.m_values);
  cfg.laws = r.size("oracle.laws", cfg.laws);
  cfg.trials = r.size("oracle.trials", cfg.trials);
  cfg.lot_matched_reference = r.word("oracle.lot_reference", "matched", {"matched", "fixed"}) == "matched";
  cfg.m0 = r.size("embedding.m0", cfg.m0);
  cfg.T = r.size("embedding.T", cfg.T);
  cfg.p = r.size("embedding.p", cfg.p);
  file.reject_unknown();
  as_config_error([&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

void cmd_sweep(const CommandOptions& opts) {
  ConfigFile file = ConfigFile::load(opts.config);
  std::map<std::string, std::string> resolved;
  const SweepConfig cfg = read_sweep_config(file, resolved);
  ensure_dir(opts.out);

  const SweepResult result = run_sweep(cfg);

  CsvWriter raw(opts.out / "sweep_raw.csv", {"embedding", "swept_value", "trial", "hs_error", "excess_risk"});
  for (const auto& rec : result.raw) {
    raw.row({to_string(rec.kind), std::to_string(rec.value), std::to_string(rec.trial), format_double(rec.hs_error),
             format_double(rec.excess_risk)});
  }
  raw.close();

  CsvWriter summary(opts.out / "sweep_summary.csv",
                    {"embedding", "regime", "swept_value", "n", "m", "hs_error_mean", "hs_error_std",
                     "excess_risk_mean", "excess_risk_std", "trials"});
  for (const auto& row : result.summary()) {
    summary.row({to_string(row.kind), to_string(cfg.regime), std::to_string(row.value),
                 std::to_string(cfg.n_for(row.value)), std::to_string(cfg.m_for(row.value)),
                 format_double(row.hs_error_mean), format_double(row.hs_error_std),
                 format_double(row.excess_risk_mean), format_double(row.excess_risk_std),
                 std::to_string(row.trials)});
  }
  summary.close();

  RunManifest manifest = start_manifest("sweep", resolved, cfg.seed, cfg.center);
  manifest.grids["swept"] = cfg.regime == Regime::Dense ? "n" : "m";
  manifest.grids["values"] = join(cfg.values);
  manifest.grids["quantile_levels"] = "(2l-1)/(2T), l=1..T";
  manifest.grids["reference"] = "m0 points from N(0, I_d), one draw per trial";
  manifest.grids["directions"] = "p normalized Gaussian vectors, one draw per trial";
  write_manifest(manifest, opts.out / "manifest.json");
}

void cmd_stability(const CommandOptions& opts) {
  ConfigFile file = ConfigFile::load(opts.config);
  std::map<std::string, std::string> resolved;
  Resolver r(file, resolved);
  StabilityConfig cfg;
  cfg.seed = r.u64("seed", cfg.seed);
  const auto kinds = r.kinds("embeddings");
  cfg.m_values = r.sizes("stability.m", cfg.m_values);
  cfg.repeats = r.size("stability.repeats", cfg.repeats);
  cfg.q = r.size("pca.q", cfg.q);
  cfg.center = r.flag("center", cfg.center);
  const DataEmbeddingSettings settings = DataEmbeddingSettings::read(r);
  const std::size_t per_group = r.size("synthetic.per_group", 5);
  const std::size_t points = r.size("synthetic.points", 10000);
  file.reject_unknown();
  if (cfg.repeats < 2) throw ConfigError("stability.repeats must be >= 2");

  NamedMeasures data;
  if (opts.data) {
    data = load_data_dir(*opts.data);
  } else {
    data.measures = as_config_error([&] { return make_cluster_measures(per_group, points, cfg.seed); });
    for (std::size_t i = 0; i < data.measures.size(); ++i) data.ids.push_back("synthetic_" + std::to_string(i));
  }
  for (std::size_t m : cfg.m_values) {
    for (std::size_t i = 0; i < data.measures.size(); ++i) {
      if (data.measures[i].size() < m) {
        throw DataError("measure `" + data.ids[i] + "` has " + std::to_string(data.measures[i].size()) +
                        " points, fewer than the subsample size " + std::to_string(m));
      }
      if (!data.measures[i].is_uniform()) throw DataError("measure `" + data.ids[i] + "` is not uniformly weighted");
    }
  }
  ensure_dir(opts.out);

  CsvWriter table(opts.out / "stability.csv", {"embedding", "m", "mean_disparity", "std_disparity", "N"});
  for (EmbeddingKind kind : kinds) {
    const EmbeddingConfig space = build_data_embedding(kind, data.measures, settings, cfg.seed);
    if (cfg.q > space.size()) throw ConfigError("pca.q exceeds the dimension of the " + to_string(kind) + " space");
    const StabilityResult result = run_stability(data.measures, cfg, space);
    const fs::path dir = opts.out / to_string(kind);
    ensure_dir(dir);
    for (const auto& row : result.rows) {
      table.row({to_string(kind), std::to_string(row.m), format_double(row.mean_disparity),
                 format_double(row.std_disparity), std::to_string(row.repeats)});
      for (std::size_t k = 0; k < row.scores.size(); ++k) {
        CsvWriter scores(dir / ("scores_m" + std::to_string(row.m) + "_k" + std::to_string(k) + ".csv"),
                         score_header(cfg.q, false));
        for (Eigen::Index i = 0; i < row.scores[k].rows(); ++i) {
          std::vector<std::string> fields{data.ids[static_cast<std::size_t>(i)]};
          for (Eigen::Index j = 0; j < row.scores[k].cols(); ++j) fields.push_back(format_double(row.scores[k](i, j)));
          scores.row(fields);
        }
        scores.close();
      }
    }
  }
  table.close();

  RunManifest manifest = start_manifest("stability", resolved, cfg.seed, cfg.center);
  manifest.grids["m"] = join(cfg.m_values);
  manifest.grids["data"] = opts.data ? fs::absolute(*opts.data).string() : "synthetic four-cluster measures";
  manifest.grids["reference"] = "m0 points, centered at the pooled mean; scale 0 means pooled spread";
  write_manifest(manifest, opts.out / "manifest.json");
}

void cmd_pca(const CommandOptions& opts) {
  ConfigFile file = ConfigFile::load(opts.config);
  std::map<std::string, std::string> resolved;
  Resolver r(file, resolved);
  const std::uint64_t seed = r.u64("seed", 20240601);
  const auto kinds = r.kinds("embeddings");
  const std::size_t q = r.size("pca.q", 2);
  const bool center = r.flag("center", true);
  const DataEmbeddingSettings settings = DataEmbeddingSettings::read(r);
  file.reject_unknown();
  if (q == 0) throw ConfigError("pca.q must be >= 1");
  if (!opts.data) throw ConfigError("the pca command needs --data <dir>");

  const NamedMeasures data = load_data_dir(*opts.data);
  ensure_dir(opts.out);

  CsvWriter scores(opts.out / "pca_scores.csv", score_header(q, true));
  CsvWriter eig(opts.out / "eigenvalues.csv", {"embedding", "index", "eigenvalue"});
  for (EmbeddingKind kind : kinds) {
    const EmbeddingConfig space = build_data_embedding(kind, data.measures, settings, seed);
    if (q > space.size()) throw ConfigError("pca.q exceeds the dimension of the " + to_string(kind) + " space");
    std::vector<EmbeddedVector> vs;
    vs.reserve(data.measures.size());
    for (const auto& mu : data.measures) vs.push_back(embed(mu, space));
    const SpectralDecomp spectrum = spectral_decompose(empirical_covariance(vs, center));
    const Eigen::MatrixXd y = pca_scores(vs, top_q_projector(spectrum, q), center);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      std::vector<std::string> fields{to_string(kind), data.ids[static_cast<std::size_t>(i)]};
      for (Eigen::Index j = 0; j < y.cols(); ++j) fields.push_back(format_double(y(i, j)));
      scores.row(fields);
    }
    for (Eigen::Index j = 0; j < spectrum.eigenvalues.size(); ++j) {
      eig.row({to_string(kind), std::to_string(j + 1), format_double(spectrum.eigenvalues(j))});
    }
  }
  scores.close();
  eig.close();

  RunManifest manifest = start_manifest("pca", resolved, seed, center);
  manifest.grids["data"] = fs::absolute(*opts.data).string();
  manifest.grids["reference"] = "m0 points, centered at the pooled mean; scale 0 means pooled spread";
  write_manifest(manifest, opts.out / "manifest.json");
}

void cmd_oracle_check(const CommandOptions& opts) {
  ConfigFile file = ConfigFile::load(opts.config);
  std::map<std::string, std::string> resolved;
  const RmDecayConfig cfg = read_rm_decay_config(file, resolved);
  ensure_dir(opts.out);

  const RmDecayResult result = run_rm_decay(cfg);

  CsvWriter decay(opts.out / "rm_decay.csv", {"embedding", "m", "mc_estimate", "trials"});
  for (const auto& row : result.rows) {
    decay.row({to_string(row.kind), std::to_string(row.m), format_double(row.mc_estimate),
               std::to_string(row.draws)});
  }
  decay.close();

  CsvWriter slopes(opts.out / "rm_slopes.csv", {"embedding", "slope", "m_min", "m_max"});
  for (EmbeddingKind kind : cfg.kinds) {
    slopes.row({to_string(kind), format_double(result.slope(kind)), std::to_string(cfg.m_values.front()),
                std::to_string(cfg.m_values.back())});
  }
  slopes.close();

  RunManifest manifest = start_manifest("oracle-check", resolved, cfg.seed, true);
  manifest.grids["m"] = join(cfg.m_values);
  manifest.grids["quantile_levels"] = "(2l-1)/(2T), l=1..T";
  manifest.grids["lot_reference"] = cfg.lot_matched_reference ? "m0 = m, N(0, I_d)" : "fixed m0, N(0, I_d)";
  write_manifest(manifest, opts.out / "manifest.json");
}

void run_command(const std::string& name, const CommandOptions& opts) {
  if (name == "sweep") return cmd_sweep(opts);
  if (name == "stability") return cmd_stability(opts);
  if (name == "pca") return cmd_pca(opts);
  if (name == "oracle-check") return cmd_oracle_check(opts);
  throw ConfigError("unknown command `" + name + "`");
}

}  // namespace measure_pca
