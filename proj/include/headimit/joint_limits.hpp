#pragma once

// Yaw-dependent pitch limits: an SVR pair fitted to the manufacturer's
// collision table, a 5% margin on each bound, and the pitch clamp.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/svr.hpp"

namespace headimit {

inline constexpr double kFitToleranceDeg = 1.0;
inline constexpr double kBoundMargin = 0.05;

struct LimitRow {
  double yaw_deg = 0.0;
  double min_pitch_deg = 0.0;
  double max_pitch_deg = 0.0;
};

struct LimitTable {
  std::vector<LimitRow> rows;
};

struct PitchBounds {
  double min_deg = 0.0;
  double max_deg = 0.0;
};

// kAsWritten: min = SVR_min + 0.05 SVR_min, max = SVR_max - 0.05 SVR_max.
// kTowardZero: both bounds are scaled by 0.95 regardless of sign.
enum class MarginMode { kAsWritten, kTowardZero };

struct PitchLimitModel {
  svr::Model min_model;
  svr::Model max_model;
  svr::Hyperparams hyperparams;
};

inline void validate(const LimitTable& table) {
  if (table.rows.size() < 2) throw InvalidTable("limit table needs at least two rows");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const LimitRow& r = table.rows[i];
    if (!std::isfinite(r.yaw_deg) || !std::isfinite(r.min_pitch_deg) ||
        !std::isfinite(r.max_pitch_deg))
      throw InvalidTable("row " + std::to_string(i) + ": non-finite value");
    if (!(r.min_pitch_deg < r.max_pitch_deg))
      throw InvalidTable("row " + std::to_string(i) + ": min_pitch must be below max_pitch");
    if (i > 0 && !(table.rows[i - 1].yaw_deg < r.yaw_deg))
      throw InvalidTable("row " + std::to_string(i) + ": yaw must be strictly increasing");
  }
  if (table.rows.front().yaw_deg > -kYawLimitDeg || table.rows.back().yaw_deg < kYawLimitDeg)
    throw InvalidTable("limit table must cover yaw range [-119.5, 119.5]");
}

// Piecewise-linear lookup of the raw table; yaw outside the table is held at
// the end rows. Used as the hardware envelope by the simulator.
inline PitchBounds table_bounds(const LimitTable& table, double yaw_deg) {
  const auto& rows = table.rows;
  if (yaw_deg <= rows.front().yaw_deg)
    return {rows.front().min_pitch_deg, rows.front().max_pitch_deg};
  if (yaw_deg >= rows.back().yaw_deg) return {rows.back().min_pitch_deg, rows.back().max_pitch_deg};
  auto hi = std::upper_bound(rows.begin(), rows.end(), yaw_deg,
                             [](double y, const LimitRow& r) { return y < r.yaw_deg; });
  auto lo = hi - 1;
  const double t = (yaw_deg - lo->yaw_deg) / (hi->yaw_deg - lo->yaw_deg);
  return {lo->min_pitch_deg + t * (hi->min_pitch_deg - lo->min_pitch_deg),
          lo->max_pitch_deg + t * (hi->max_pitch_deg - lo->max_pitch_deg)};
}

inline PitchLimitModel fit_pitch_limit_model(const LimitTable& table,
                                            const svr::Hyperparams& hp = {},
                                            const svr::SolverOptions& opts = {}) {
  validate(table);
  std::vector<double> yaw, lo, hi;
  for (const LimitRow& r : table.rows) {
    yaw.push_back(r.yaw_deg);
    lo.push_back(r.min_pitch_deg);
    hi.push_back(r.max_pitch_deg);
  }
  PitchLimitModel model;
  model.hyperparams = hp;
  model.min_model = svr::fit(yaw, lo, hp, opts).model;
  model.max_model = svr::fit(yaw, hi, hp, opts).model;

  for (const LimitRow& r : table.rows) {
    const double e_lo = std::abs(model.min_model.predict(r.yaw_deg) - r.min_pitch_deg);
    const double e_hi = std::abs(model.max_model.predict(r.yaw_deg) - r.max_pitch_deg);
    if (e_lo > kFitToleranceDeg || e_hi > kFitToleranceDeg)
      throw FitFailure("limit fit residual exceeds 1 degree at yaw " + std::to_string(r.yaw_deg) +
                       " (min " + std::to_string(e_lo) + ", max " + std::to_string(e_hi) +
                       "); adjust C/epsilon/gamma");
  }
  for (double y = table.rows.front().yaw_deg; y <= table.rows.back().yaw_deg; y += 0.5) {
    if (!(model.min_model.predict(y) < model.max_model.predict(y)))
      throw FitFailure("fitted min/max pitch curves cross at yaw " + std::to_string(y));
  }
  return model;
}

inline PitchBounds pitch_bounds(const PitchLimitModel& model, double yaw_deg,
                                MarginMode mode = MarginMode::kAsWritten) {
  if (!(std::abs(yaw_deg) <= kYawLimitDeg))
    throw Rejected("yaw " + std::to_string(yaw_deg) + " outside [-119.5, 119.5]");
  const double lo = model.min_model.predict(yaw_deg);
  const double hi = model.max_model.predict(yaw_deg);
  PitchBounds b;
  if (mode == MarginMode::kAsWritten) {
    b = {lo + kBoundMargin * lo, hi - kBoundMargin * hi};
  } else {
    b = {lo - kBoundMargin * lo, hi - kBoundMargin * hi};
  }
  if (!(b.min_deg < b.max_deg))
    throw InvertedBounds("pitch bounds inverted at yaw " + std::to_string(yaw_deg));
  return b;
}

inline double clamp_pitch(double pitch_deg, const PitchBounds& bounds) noexcept {
  if (pitch_deg > bounds.max_deg) return bounds.max_deg;
  if (pitch_deg < bounds.min_deg) return bounds.min_deg;
  return pitch_deg;
}

// ---- serialization ----------------------------------------------------------

inline LimitTable limit_table_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidTable("limit table must be a JSON array");
  LimitTable t;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    auto num = [&](const char* key) {
      if (!e.is_object() || !e.contains(key) || !e[key].is_number())
        throw InvalidTable("row " + std::to_string(i) + ": missing numeric '" + key + "'");
      return e[key].get<double>();
    };
    t.rows.push_back({num("yaw"), num("min_pitch"), num("max_pitch")});
  }
  validate(t);
  return t;
}

inline LimitTable load_limit_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open limit table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidTable(path.string() + ": " + e.what());
  }
  return limit_table_from_json(j);
}

namespace detail {

inline nlohmann::json svr_to_json(const svr::Model& m) {
  return {{"support", m.support}, {"coefficients", m.coefficients}, {"bias", m.bias},
          {"gamma", m.gamma}};
}

inline svr::Model svr_from_json(const nlohmann::json& j) {
  svr::Model m;
  m.support = j.at("support").get<std::vector<double>>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.gamma = j.at("gamma").get<double>();
  if (m.support.size() != m.coefficients.size())
    throw ConfigError("model: support and coefficients differ in length");
  return m;
}

}  // namespace detail

inline nlohmann::json to_json(const PitchLimitModel& m) {
  return {{"hyperparams",
           {{"c", m.hyperparams.c},
            {"epsilon", m.hyperparams.epsilon},
            {"gamma", m.hyperparams.gamma}}},
          {"min_model", detail::svr_to_json(m.min_model)},
          {"max_model", detail::svr_to_json(m.max_model)}};
}

inline PitchLimitModel pitch_limit_model_from_json(const nlohmann::json& j) {
  try {
    PitchLimitModel m;
    const auto& hp = j.at("hyperparams");
    m.hyperparams = {hp.at("c").get<double>(), hp.at("epsilon").get<double>(),
                     hp.at("gamma").get<double>()};
    m.min_model = detail::svr_from_json(j.at("min_model"));
    m.max_model = detail::svr_from_json(j.at("max_model"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("limit model: ") + e.what());
  }
}

}  // namespace headimit
