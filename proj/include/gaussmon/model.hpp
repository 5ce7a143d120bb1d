#pragma once

#include <string>

#include "gaussmon/linalg2.hpp"

namespace gaussmon {

/// Harmonic oscillator constants. The library is unit-agnostic; the CLI and
/// all bundled presets use the nondimensionalization m = omega = 1, hbar = 2.
struct OscillatorParams {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 2.0;

  void validate() const;
};

/// Detector control knobs: one measurement strength and one efficiency per
/// monitored quadrature.
struct DetectorConfig {
  double k_x = 1.0;
  double k_p = 1.0;
  double eta_x = 1.0;
  double eta_p = 1.0;

  void validate() const;
};

/// Efficiencies alone, for the operations that leave the strengths free.
struct Efficiencies {
  double eta_x = 1.0;
  double eta_p = 1.0;

  void validate() const;
};

/// Drift, noise-coupling and diffusion matrices of the moment dynamics.
/// bbt is formed directly as diag(eta_x*k_x, eta_p*k_p) rather than by
/// squaring b, so B B^T holds exactly in floating point.
struct SystemMatrices {
  Mat2 a;       // [[0, -m w^2], [1/m, 0]]
  Mat2 b;       // diag(sqrt(eta_x k_x), sqrt(eta_p k_p))
  SymMat2 q;    // (hbar^2/4) diag(k_p, k_x)  -- note the reversed order
  SymMat2 chi;  // diag(1/eta_x, 1/eta_p)
  SymMat2 bbt;  // diag(eta_x k_x, eta_p k_p), exact

  // Inputs kept alongside the derived matrices; several downstream
  // operations need them in scalar form.
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 2.0;
  double k_x = 1.0;
  double k_p = 1.0;
  double eta_x = 1.0;
  double eta_p = 1.0;
};

/// alpha < 0 < beta, gamma > beta, delta > |alpha|.
struct GreekParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

/// Strength coordinates: product q = k_x*k_p and ratio s = k_x/k_p.
struct StrengthCoords {
  double q = 1.0;
  double s = 1.0;

  void validate() const;
};

struct Strengths {
  double k_x = 1.0;
  double k_p = 1.0;
};

SystemMatrices build_system_matrices(const OscillatorParams& osc,
                                     const DetectorConfig& det);

GreekParams greek_params(const OscillatorParams& osc,
                         const DetectorConfig& det);

/// Inverse of the coordinate map: k_x = sqrt(q*s), k_p = sqrt(q/s).
Strengths strengths_from_coords(const StrengthCoords& coords);

StrengthCoords coords_from_strengths(double k_x, double k_p);

DetectorConfig detector_from_coords(const StrengthCoords& coords,
                                    const Efficiencies& eff);

/// Full parameter set; serializes to the flat JSON object with keys
/// m, omega, hbar, k_x, k_p, eta_x, eta_p.
struct ModelParams {
  OscillatorParams osc;
  DetectorConfig det;

  void validate() const {
    osc.validate();
    det.validate();
  }
};

std::string to_json_string(const ModelParams& params);
ModelParams model_params_from_json(const std::string& text);

}  // namespace gaussmon
