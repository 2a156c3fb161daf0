#include "scengen/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace scengen {

double TimeChangeDistribution::mean() const {
  double m = 0.0;
  for (const auto& [duration, prob] : atoms) m += duration * prob;
  return m;
}

void TimeChangeDistribution::validate() const {
  if (atoms.empty()) raise(Errc::BadConfig, "time-change distribution needs at least one atom");
  double total = 0.0;
  for (const auto& [duration, prob] : atoms) {
    if (!(duration > 0.0)) raise(Errc::BadConfig, "time-change durations must be positive");
    if (!(prob > 0.0)) raise(Errc::BadConfig, "time-change probabilities must be positive");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9) raise(Errc::BadConfig, "time-change probabilities must sum to 1");
}

Vector CalibratedModel::total_drift(const Vector& state) const {
  const Index j_count = layout.factor_count();
  if (state.size() != j_count) raise(Errc::LengthMismatch, "state length does not match model layout");
  Vector result = Vector::Zero(j_count);
  const Index n = layout.tenor_count();
  const auto& tenors = layout.tenor_grid();

  if (n > 0 && drift.include_hjm) {
    const Vector multipliers = sigma.multipliers(state);
    for (Index c = 0; c < layout.currency_count(); ++c) {
      const Index off = layout.curve_offset(c);
      const Vector curve_mult = multipliers.segment(off, n);
      const Matrix curve_dirs = directions.middleRows(off, n);
      if (c == 0)
        result.segment(off, n) = hjm_domestic_drift(curve_mult, curve_dirs, scale, tenors);
      else
        result.segment(off, n) =
            hjm_foreign_drift(curve_mult, curve_dirs, fx_loadings.row(c - 1).transpose(), scale, tenors);
    }
  }
  if (drift.include_fx_drift) {
    for (Index c = 1; c < layout.currency_count(); ++c) {
      const double domestic_short = n > 0 ? state(layout.curve_offset(0)) : 0.0;
      const double foreign_short = n > 0 ? state(layout.curve_offset(c)) : 0.0;
      result(layout.fx_index(c)) = fx_drift(domestic_short, foreign_short, fx_loadings.row(c - 1).transpose());
    }
  }
  if (drift.mu2.size() > 0) result += drift.mu2;
  return result;
}

CalibratedModel build_calibrated_model(const HistoricalPanel& panel, const FilteredReturns& filtered,
                                       const ExtremeEventSet& extremes, const ModelConfig& config) {
  if (panel.observation_count() == 0) raise(Errc::EmptyPanel, "cannot calibrate on an empty panel");
  if (!(config.jump_rate >= 0.0 && config.jump_rate < 1.0))
    raise(Errc::BadConfig, "jump rate must lie in [0, 1)");
  config.time_change.validate();
  if (config.mu2.size() > 0 && config.mu2.size() != panel.layout.factor_count())
    raise(Errc::LengthMismatch, "mu2 override must have one entry per factor");
  if (filtered.values.cols() != panel.layout.factor_count() || filtered.first_index < 1 ||
      filtered.last_index() > panel.observation_count() - 1)
    raise(Errc::IndexMismatch, "filtered returns do not align with the panel");

  const ReturnPartition partition = partition_returns(filtered, extremes);

  CalibratedModel model{panel.layout, GeometricSigma(panel.layout, config.rate_floor), {}, {}, 0.0,
                        panel.delta,  {},                                              {}, {}, {},
                        {}};
  const Index j_count = panel.layout.factor_count();
  const Index n_drivers = partition.diffusive.rows();

  model.directions.resize(j_count, n_drivers);
  for (Index m = 0; m < n_drivers; ++m) {
    const Index i = partition.diffusive_indices[static_cast<std::size_t>(m)];
    // the return at series index i starts at observation Y_i, stored in row i-1
    const Vector state = panel.values.row(i - 1).transpose();
    model.directions.col(m) = model.sigma.inverse_apply(state, partition.diffusive.row(m).transpose());
  }
  model.direction_indices = partition.diffusive_indices;
  model.scale = 1.0 / std::sqrt(panel.delta * static_cast<double>(n_drivers));

  const Index p = panel.layout.foreign_count();
  model.fx_loadings.resize(p, n_drivers);
  for (Index c = 1; c <= p; ++c)
    model.fx_loadings.row(c - 1) = model.scale * model.directions.row(panel.layout.fx_index(c));

  model.drift.include_hjm = config.include_hjm;
  model.drift.include_fx_drift = config.include_fx_drift;
  model.drift.mu2 = config.mu2;

  const Index n_extreme = partition.extreme.rows();
  model.jumps.measure.resize(j_count, n_extreme);
  for (Index e = 0; e < n_extreme; ++e) {
    const Index i = partition.extreme_indices[static_cast<std::size_t>(e)];
    const Vector state = panel.values.row(i - 1).transpose();
    model.jumps.measure.col(e) = model.sigma.inverse_apply(state, partition.extreme.row(e).transpose());
  }
  model.jumps.source_indices = partition.extreme_indices;
  model.jumps.rate = config.jump_rate;
  if (n_extreme == 0 && config.jump_rate > 0.0) {
    // no extreme events observed: an empty jump measure cannot be sampled
    model.jumps.rate = 0.0;
    model.jumps.rate_clamped = true;
  }

  model.time_change = config.time_change;
  model.anchor_state = panel.last_state();
  return model;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Index expected_rows = -1) {
  if (!j.is_array()) raise(Errc::BadModelFile, "expected a JSON array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) {
    Matrix m(expected_rows >= 0 ? expected_rows : 0, 0);
    return m;
  }
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[static_cast<std::size_t>(r)].size()) != cols)
      raise(Errc::BadModelFile, "ragged matrix in model file");
    for (Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

constexpr int kModelFormatVersion = 1;

} // namespace

void save_model(const CalibratedModel& model, const std::string& path,
                const std::map<std::string, std::string>& config_echo) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "scengen-model";
  j["layout"]["currencies"] = model.layout.currencies();
  j["layout"]["tenors"] = model.layout.tenor_grid();
  j["delta"] = model.delta;
  j["scale"] = model.scale;
  j["sigma"]["rule"] = model.sigma.is_identity() ? "identity" : "per-kind";
  j["sigma"]["rate_floor"] = model.sigma.rate_floor();
  // drivers as rows so the file diffs line-per-driver
  j["directions"] = matrix_to_json(model.directions.transpose());
  j["direction_indices"] = model.direction_indices;
  j["drift"]["include_hjm"] = model.drift.include_hjm;
  j["drift"]["include_fx_drift"] = model.drift.include_fx_drift;
  j["drift"]["mu2"] = std::vector<double>(model.drift.mu2.data(), model.drift.mu2.data() + model.drift.mu2.size());
  j["jumps"]["rate"] = model.jumps.rate;
  j["jumps"]["rate_clamped"] = model.jumps.rate_clamped;
  j["jumps"]["measure"] = matrix_to_json(model.jumps.measure.transpose());
  j["jumps"]["source_indices"] = model.jumps.source_indices;
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [duration, prob] : model.time_change.atoms) atoms.push_back({duration, prob});
  j["time_change"]["atoms"] = std::move(atoms);
  j["anchor_state"] =
      std::vector<double>(model.anchor_state.data(), model.anchor_state.data() + model.anchor_state.size());
  j["config_echo"] = config_echo;

  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write model file: " + path);
  out << j.dump(1) << '\n';
}

CalibratedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadModelFile, "model file is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (!j.contains("format_version") || !j.contains("kind") || j["kind"] != "scengen-model")
      raise(Errc::BadModelFile, "not a scengen model file: " + path);
    if (j["format_version"].get<int>() != kModelFormatVersion)
      raise(Errc::BadModelFile, "unsupported model format version " + j["format_version"].dump() + " (expected " +
                                    std::to_string(kModelFormatVersion) + ")");
    FactorLayout layout(j["layout"]["currencies"].get<std::vector<std::string>>(),
                        j["layout"]["tenors"].get<std::vector<double>>());
    const double rate_floor = j["sigma"]["rate_floor"].get<double>();
    GeometricSigma sigma = j["sigma"]["rule"] == "identity" ? GeometricSigma::identity(layout)
                                                            : GeometricSigma(layout, rate_floor);
    CalibratedModel model{layout, sigma, {}, {}, 0.0, 0.0, {}, {}, {}, {}, {}};
    model.delta = j["delta"].get<double>();
    model.scale = j["scale"].get<double>();
    model.directions = matrix_from_json(j["directions"]).transpose();
    if (model.directions.rows() == 0)
      model.directions.resize(layout.factor_count(), 0);
    else if (model.directions.rows() != layout.factor_count())
      raise(Errc::BadModelFile, "direction dimension does not match the layout");
    model.direction_indices = j["direction_indices"].get<std::vector<Index>>();
    model.drift.include_hjm = j["drift"]["include_hjm"].get<bool>();
    model.drift.include_fx_drift = j["drift"]["include_fx_drift"].get<bool>();
    model.drift.mu2 = vector_from_json(j["drift"]["mu2"]);
    model.jumps.rate = j["jumps"]["rate"].get<double>();
    model.jumps.rate_clamped = j["jumps"]["rate_clamped"].get<bool>();
    model.jumps.measure = matrix_from_json(j["jumps"]["measure"]).transpose();
    if (model.jumps.measure.rows() == 0)
      model.jumps.measure.resize(layout.factor_count(), 0);
    model.jumps.source_indices = j["jumps"]["source_indices"].get<std::vector<Index>>();
    model.time_change.atoms.clear();
    for (const auto& atom : j["time_change"]["atoms"])
      model.time_change.atoms.emplace_back(atom[0].get<double>(), atom[1].get<double>());
    model.time_change.validate();
    model.anchor_state = vector_from_json(j["anchor_state"]);
    if (model.anchor_state.size() != layout.factor_count())
      raise(Errc::BadModelFile, "anchor state dimension does not match the layout");

    const Index p = layout.foreign_count();
    model.fx_loadings.resize(p, model.directions.cols());
    for (Index c = 1; c <= p; ++c)
      model.fx_loadings.row(c - 1) = model.scale * model.directions.row(layout.fx_index(c));
    return model;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::BadModelFile, "malformed model file: " + std::string(e.what()));
  }
}

} // namespace scengen
