#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaussmon/kernels.hpp"
#include "gaussmon/linalg2.hpp"
#include "gaussmon/model.hpp"
#include "gaussmon/steady_state.hpp"

namespace gaussmon {

/// Probability mass inside the 1-sigma contour of a 2-D Gaussian.
inline constexpr double kOneSigmaMass = 0.39346934028736658;

/// Log-spaced grid over strength coordinates at fixed oscillator and
/// detector efficiencies.
struct SweepGrid {
  std::vector<double> q_values;
  std::vector<double> s_values;
  OscillatorParams osc;
  Efficiencies eff;

  void validate() const;
};

struct SurfaceRow {
  double q = 0.0;
  double s = 0.0;
  double p_inf = 0.0;
  double c_inf = 0.0;
  double v_x_inf = 0.0;
  double v_p_inf = 0.0;
  double d_inf = 0.0;
};

/// Slow ratio schedule at fixed product; the state tracks the instantaneous
/// steady state. settle_rtol is used by the tracking diagnostics, not by
/// the production evaluation.
struct QuasiStaticProtocol {
  std::vector<double> s_schedule;
  double q_fixed = 1.0;
  double settle_rtol = 1e-4;

  void validate() const;
};

/// Iso-probability contour of a 2-D Gaussian: semi-axes at the requested
/// mass, orientation of the leading eigenvector (first nonzero component
/// positive).
struct EllipseSpec {
  Vec2 center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // radians
  double level = 0.0;
};

struct ProtocolPoint {
  double s = 0.0;
  SteadyStateSolution solution;
  EllipseSpec ellipse;
};

/// One row per (q, s) in row-major grid order (q outer, s inner), all rows
/// evaluated through the stationary closed form with its Riccati
/// self-check. Failures are collected and reported with their grid point.
std::vector<SurfaceRow> purity_surface(const SweepGrid& grid,
                                       SimdMode simd = SimdMode::kAuto,
                                       int threads = 0);

std::vector<ProtocolPoint> run_quasi_static(const QuasiStaticProtocol& proto,
                                            const OscillatorParams& osc,
                                            const Efficiencies& eff,
                                            double level = kOneSigmaMass);

EllipseSpec ellipse_from_covariance(const SymMat2& sigma, Vec2 center,
                                    double level);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// CSV with header q,s,p_inf,c_inf,v_x_inf,v_p_inf,d_inf.
void write_csv(const std::vector<SurfaceRow>& rows, std::ostream& os);

/// CSV with header
/// step,s,q,v_x_inf,c_inf,v_p_inf,p_inf,ellipse_a,ellipse_b,ellipse_theta.
void write_protocol_csv(const std::vector<ProtocolPoint>& points,
                        double q_fixed, std::ostream& os);

/// Stroke-only SVG of the ellipse sequence, labeled by step.
std::string protocol_svg(const std::vector<ProtocolPoint>& points);

// Presets matching the bundled figure parameters
// (m = omega = 1, hbar = 2, eta_x = 0.1, eta_p = 0.9).
SweepGrid fig2_grid();
SweepGrid fig3_grid();
QuasiStaticProtocol fig4_protocol();
OscillatorParams fig_oscillator();
Efficiencies fig_efficiencies();

}  // namespace gaussmon
