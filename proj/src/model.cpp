#include "gaussmon/model.hpp"

#include <cmath>

#include <json.hpp>

#include "gaussmon/errors.hpp"
#include "gaussmon/kernels/steady_core.hpp"

namespace gaussmon {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgumentError(message);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void OscillatorParams::validate() const {
  require(positive_finite(mass), "m must be positive");
  require(positive_finite(omega), "omega must be positive");
  require(positive_finite(hbar), "hbar must be positive");
}

void DetectorConfig::validate() const {
  require(positive_finite(k_x), "k_x must be positive");
  require(positive_finite(k_p), "k_p must be positive");
  require(std::isfinite(eta_x) && eta_x > 0.0 && eta_x <= 1.0,
          "eta_x must be in (0, 1]");
  require(std::isfinite(eta_p) && eta_p > 0.0 && eta_p <= 1.0,
          "eta_p must be in (0, 1]");
}

void Efficiencies::validate() const {
  require(std::isfinite(eta_x) && eta_x > 0.0 && eta_x <= 1.0,
          "eta_x must be in (0, 1]");
  require(std::isfinite(eta_p) && eta_p > 0.0 && eta_p <= 1.0,
          "eta_p must be in (0, 1]");
}

void StrengthCoords::validate() const {
  require(positive_finite(q), "q must be positive");
  require(positive_finite(s), "s must be positive");
}

SystemMatrices build_system_matrices(const OscillatorParams& osc,
                                     const DetectorConfig& det) {
  osc.validate();
  det.validate();

  SystemMatrices sys;
  sys.mass = osc.mass;
  sys.omega = osc.omega;
  sys.hbar = osc.hbar;
  sys.k_x = det.k_x;
  sys.k_p = det.k_p;
  sys.eta_x = det.eta_x;
  sys.eta_p = det.eta_p;

  sys.a = Mat2{0.0, -osc.mass * osc.omega * osc.omega, 1.0 / osc.mass, 0.0};
  sys.b = Mat2::diagonal(std::sqrt(det.eta_x * det.k_x),
                         std::sqrt(det.eta_p * det.k_p));
  // Q couples k_p to the position variance and k_x to the momentum one;
  // the diagonal order is deliberately reversed relative to B.
  const double h24 = 0.25 * osc.hbar * osc.hbar;
  sys.q = SymMat2::diagonal(h24 * det.k_p, h24 * det.k_x);
  sys.chi = SymMat2::diagonal(1.0 / det.eta_x, 1.0 / det.eta_p);
  sys.bbt = SymMat2::diagonal(det.eta_x * det.k_x, det.eta_p * det.k_p);
  return sys;
}

GreekParams greek_params(const OscillatorParams& osc,
                         const DetectorConfig& det) {
  osc.validate();
  det.validate();
  const auto g = kern::greek_eval<kern::ScalarPack>(
      osc.mass, osc.omega, 0.25 * osc.hbar * osc.hbar, det.eta_x, det.eta_p,
      det.k_x, det.k_p);
  return {g.alpha, g.beta, g.gamma, g.delta};
}

Strengths strengths_from_coords(const StrengthCoords& coords) {
  coords.validate();
  return {std::sqrt(coords.q * coords.s), std::sqrt(coords.q / coords.s)};
}

StrengthCoords coords_from_strengths(double k_x, double k_p) {
  if (!(std::isfinite(k_x) && k_x > 0.0 && std::isfinite(k_p) && k_p > 0.0)) {
    throw InvalidArgumentError("strengths must be positive");
  }
  return {k_x * k_p, k_x / k_p};
}

DetectorConfig detector_from_coords(const StrengthCoords& coords,
                                    const Efficiencies& eff) {
  eff.validate();
  const Strengths k = strengths_from_coords(coords);
  return {k.k_x, k.k_p, eff.eta_x, eff.eta_p};
}

std::string to_json_string(const ModelParams& params) {
  nlohmann::json j{
      {"m", params.osc.mass},     {"omega", params.osc.omega},
      {"hbar", params.osc.hbar},  {"k_x", params.det.k_x},
      {"k_p", params.det.k_p},    {"eta_x", params.det.eta_x},
      {"eta_p", params.det.eta_p},
  };
  return j.dump(2);
}

ModelParams model_params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgumentError(std::string("invalid parameter JSON: ") +
                               e.what());
  }
  ModelParams params;
  const auto fetch = [&](const char* key, double& slot) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw InvalidArgumentError(std::string("parameter JSON missing key: ") +
                                 key);
    }
    slot = j[key].get<double>();
  };
  fetch("m", params.osc.mass);
  fetch("omega", params.osc.omega);
  fetch("hbar", params.osc.hbar);
  fetch("k_x", params.det.k_x);
  fetch("k_p", params.det.k_p);
  fetch("eta_x", params.det.eta_x);
  fetch("eta_p", params.det.eta_p);
  params.validate();
  return params;
}

}  // namespace gaussmon
