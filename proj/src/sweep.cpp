#include "gaussmon/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gaussmon/errors.hpp"
#include "gaussmon/io.hpp"
#include "gaussmon/parallel.hpp"

namespace gaussmon {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgumentError(message);
}

void check_grid_axis(const std::vector<double>& v, const char* name) {
  require(!v.empty(), "sweep grid axis is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(std::isfinite(v[i]) && v[i] > 0.0)) {
      throw InvalidArgumentError(std::string(name) +
                                 " grid values must be positive");
    }
    if (i > 0 && !(v[i] > v[i - 1])) {
      throw InvalidArgumentError(std::string(name) +
                                 " grid must be strictly increasing");
    }
  }
}

}  // namespace

void SweepGrid::validate() const {
  osc.validate();
  eff.validate();
  check_grid_axis(q_values, "q");
  check_grid_axis(s_values, "s");
}

void QuasiStaticProtocol::validate() const {
  require(!s_schedule.empty(), "protocol schedule is empty");
  for (double s : s_schedule) {
    require(std::isfinite(s) && s > 0.0,
            "protocol schedule values must be positive");
  }
  require(std::isfinite(q_fixed) && q_fixed > 0.0, "q_fixed must be positive");
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  require(n >= 1, "log_spaced: n must be >= 1");
  require(std::isfinite(lo) && lo > 0.0 && std::isfinite(hi) && hi > 0.0,
          "log_spaced: bounds must be positive");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = std::exp(llo + f * (lhi - llo));
  }
  v[0] = lo;
  v[n - 1] = hi;
  return v;
}

std::vector<SurfaceRow> purity_surface(const SweepGrid& grid, SimdMode simd,
                                       int threads) {
  grid.validate();
  const std::size_t nq = grid.q_values.size();
  const std::size_t ns = grid.s_values.size();
  const std::size_t n = nq * ns;

  std::vector<double> k_x(n), k_p(n);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t is = 0; is < ns; ++is) {
      const Strengths k = strengths_from_coords(
          StrengthCoords{grid.q_values[iq], grid.s_values[is]});
      k_x[iq * ns + is] = k.k_x;
      k_p[iq * ns + is] = k.k_p;
    }
  }

  std::vector<double> v_x(n), c(n), v_p(n), d(n), p(n), resid(n);
  const kern::SteadyBatchParams params{grid.osc.mass, grid.osc.omega,
                                       0.25 * grid.osc.hbar * grid.osc.hbar,
                                       grid.eff.eta_x, grid.eff.eta_p};
  const auto surface = kern::steady_surface_fn(simd);

  // Parallelize over q rows; each row is an independent contiguous slab.
  parallel_for_index(nq, threads, [&](std::size_t iq) {
    const std::size_t off = iq * ns;
    kern::SteadySurfaceOut out{v_x.data() + off, c.data() + off,
                               v_p.data() + off, d.data() + off,
                               p.data() + off, resid.data() + off};
    surface(params, k_x.data() + off, k_p.data() + off, ns, out);
  });

  std::ostringstream failures;
  std::size_t n_failures = 0;
  std::vector<SurfaceRow> rows(n);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t is = 0; is < ns; ++is) {
      const std::size_t i = iq * ns + is;
      rows[i] = SurfaceRow{grid.q_values[iq], grid.s_values[is], p[i], c[i],
                           v_x[i], v_p[i], d[i]};
      if (!(resid[i] < tol::kAreResidual)) {
        if (n_failures < 8) {
          failures << " (q=" << grid.q_values[iq] << ", s=" << grid.s_values[is]
                   << ", residual=" << resid[i] << ")";
        }
        ++n_failures;
      }
    }
  }
  if (n_failures > 0) {
    throw NumericalError("purity_surface: " + std::to_string(n_failures) +
                             " grid points failed the Riccati self-check:" +
                             failures.str(),
                         static_cast<double>(n_failures));
  }
  return rows;
}

std::vector<ProtocolPoint> run_quasi_static(const QuasiStaticProtocol& proto,
                                            const OscillatorParams& osc,
                                            const Efficiencies& eff,
                                            double level) {
  proto.validate();
  osc.validate();
  eff.validate();
  std::vector<ProtocolPoint> points;
  points.reserve(proto.s_schedule.size());
  for (double s : proto.s_schedule) {
    const DetectorConfig det =
        detector_from_coords(StrengthCoords{proto.q_fixed, s}, eff);
    ProtocolPoint pt;
    pt.s = s;
    pt.solution = steady_state_covariance(osc, det);
    pt.ellipse = ellipse_from_covariance(pt.solution.sigma_inf, Vec2{}, level);
    points.push_back(std::move(pt));
  }
  return points;
}

EllipseSpec ellipse_from_covariance(const SymMat2& sigma, Vec2 center,
                                    double level) {
  if (!is_positive_definite(sigma)) {
    throw InvalidArgumentError(
        "ellipse_from_covariance: sigma must be positive definite");
  }
  require(std::isfinite(level) && level > 0.0 && level < 1.0,
          "ellipse level must be in (0, 1)");

  const double mid = 0.5 * sigma.trace();
  const double gap = std::hypot(0.5 * (sigma.xx - sigma.pp), sigma.xp);
  const double eig_hi = mid + gap;
  const double eig_lo = mid - gap;

  Vec2 axis{1.0, 0.0};
  if (sigma.xp != 0.0) {
    axis = Vec2{eig_hi - sigma.pp, sigma.xp};
  } else if (sigma.pp > sigma.xx) {
    axis = Vec2{0.0, 1.0};
  }
  // Deterministic sign: first nonzero component positive.
  if (axis.x < 0.0 || (axis.x == 0.0 && axis.p < 0.0)) {
    axis = Vec2{-axis.x, -axis.p};
  }

  const double radius = std::sqrt(-2.0 * std::log1p(-level));
  EllipseSpec spec;
  spec.center = center;
  spec.semi_major = radius * std::sqrt(eig_hi);
  spec.semi_minor = radius * std::sqrt(std::max(eig_lo, 0.0));
  spec.orientation = std::atan2(axis.p, axis.x);
  spec.level = level;
  return spec;
}

void write_csv(const std::vector<SurfaceRow>& rows, std::ostream& os) {
  std::string out = "q,s,p_inf,c_inf,v_x_inf,v_p_inf,d_inf\n";
  for (const auto& r : rows) {
    out += format_double(r.q);
    out += ',';
    out += format_double(r.s);
    out += ',';
    out += format_double(r.p_inf);
    out += ',';
    out += format_double(r.c_inf);
    out += ',';
    out += format_double(r.v_x_inf);
    out += ',';
    out += format_double(r.v_p_inf);
    out += ',';
    out += format_double(r.d_inf);
    out += '\n';
  }
  os << out;
}

void write_protocol_csv(const std::vector<ProtocolPoint>& points,
                        double q_fixed, std::ostream& os) {
  std::string out =
      "step,s,q,v_x_inf,c_inf,v_p_inf,p_inf,ellipse_a,ellipse_b,"
      "ellipse_theta\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    out += std::to_string(i);
    out += ',';
    out += format_double(pt.s);
    out += ',';
    out += format_double(q_fixed);
    out += ',';
    out += format_double(pt.solution.sigma_inf.xx);
    out += ',';
    out += format_double(pt.solution.sigma_inf.xp);
    out += ',';
    out += format_double(pt.solution.sigma_inf.pp);
    out += ',';
    out += format_double(pt.solution.p_inf);
    out += ',';
    out += format_double(pt.ellipse.semi_major);
    out += ',';
    out += format_double(pt.ellipse.semi_minor);
    out += ',';
    out += format_double(pt.ellipse.orientation);
    out += '\n';
  }
  os << out;
}

namespace {

std::string svg_num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::string protocol_svg(const std::vector<ProtocolPoint>& points) {
  double extent = 1e-30;
  for (const auto& pt : points) {
    extent = std::max(extent, pt.ellipse.semi_major);
  }
  const double view = 1.1 * extent;
  const double size = 640.0;
  const double scale = size / (2.0 * view);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\">\n";
  svg << "  <rect width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\"/>\n";
  // Phase-space axes through the origin.
  svg << "  <line x1=\"0\" y1=\"" << size / 2 << "\" x2=\"" << size
      << "\" y2=\"" << size / 2 << "\" stroke=\"#cccccc\"/>\n";
  svg << "  <line x1=\"" << size / 2 << "\" y1=\"0\" x2=\"" << size / 2
      << "\" y2=\"" << size << "\" stroke=\"#cccccc\"/>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& e = points[i].ellipse;
    const double cx = size / 2 + scale * e.center.x;
    const double cy = size / 2 - scale * e.center.p;
    const double deg = -e.orientation * 180.0 / 3.14159265358979323846;
    const double shade =
        points.size() > 1
            ? static_cast<double>(i) / static_cast<double>(points.size() - 1)
            : 0.0;
    const int gray = static_cast<int>(190.0 * (1.0 - shade));
    svg << "  <ellipse cx=\"" << svg_num(cx) << "\" cy=\"" << svg_num(cy)
        << "\" rx=\"" << svg_num(scale * e.semi_major) << "\" ry=\""
        << svg_num(scale * e.semi_minor) << "\" transform=\"rotate("
        << svg_num(deg) << " " << svg_num(cx) << " " << svg_num(cy)
        << ")\" fill=\"none\" stroke=\"rgb(" << gray << "," << gray << ","
        << gray << ")\" stroke-width=\"1\"><title>step " << i << "</title>"
        << "</ellipse>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

OscillatorParams fig_oscillator() { return {1.0, 1.0, 2.0}; }

Efficiencies fig_efficiencies() { return {0.1, 0.9}; }

SweepGrid fig2_grid() {
  SweepGrid grid;
  grid.q_values = log_spaced(1e-3, 1e3, 101);
  grid.s_values = log_spaced(1e-3, 1e3, 101);
  grid.osc = fig_oscillator();
  grid.eff = fig_efficiencies();
  return grid;
}

SweepGrid fig3_grid() {
  SweepGrid grid;
  grid.q_values = log_spaced(1e-3, 1e3, 101);
  grid.s_values = {0.03, 0.3, 3.0, 30.0, 300.0};
  grid.osc = fig_oscillator();
  grid.eff = fig_efficiencies();
  return grid;
}

QuasiStaticProtocol fig4_protocol() {
  QuasiStaticProtocol proto;
  auto s = log_spaced(1e-4, 3.0, 21);
  std::reverse(s.begin(), s.end());  // slow squeeze: s from 3 down to 1e-4
  proto.s_schedule = std::move(s);
  proto.q_fixed = 1.0;
  return proto;
}

}  // namespace gaussmon
