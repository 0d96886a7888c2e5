#pragma once

#include <string>
#include <vector>

#include "morawetz/manufactured.hpp"
#include "morawetz/multipliers.hpp"

namespace morawetz {

enum class Spacing { log_from_horizon, linear };

struct GridSpec {
  double r_min = 0;
  double r_max = 0;
  std::size_t count = 0;
  Spacing spacing = Spacing::log_from_horizon;

  std::vector<double> nodes(double M) const;
  std::string describe() const;
};

struct Grid2D {
  GridSpec r;
  std::size_t n_theta = 1;
  double theta_min = 0.0;
  double theta_max = 1.5707963267948966;

  std::vector<double> thetas() const;
  std::string describe() const;
};

struct Certificate {
  std::string name;
  std::string grid;
  double min_margin = 0;
  double argmin_r = 0;
  double argmin_theta = 0;
  double tolerance = 0;
  bool passed = false;
  std::string note;
};

// Builds a certificate; passed <=> min_margin >= -tolerance (or > 0 when strict).
Certificate make_certificate(std::string name, std::string grid, double margin, double r, double theta,
                             double tolerance, bool strict = false);

// Default certification grids: log grid [M(1+1e-8), 1e4 M] with 1e6 points;
// the 2-d grids use 2e4 radii and 50 angles in [0, pi/2].
GridSpec default_radial_grid(const Params& p, std::size_t count = 1000000);
Grid2D default_grid2d(const Params& p, std::size_t n_r = 20000, std::size_t n_theta = 50);

// A >= 2 r (r-M)^4/(r^2+M^2)^3 K with K the supplied constant (default c0 M^2).
Certificate certify_A_bound(const MultiplierSet& ms, const GridSpec& grid);
Certificate certify_A_bound(const MultiplierSet& ms, const GridSpec& grid, double K, const std::string& name);
// Sharp form with K = A~(r_*), tight on r >= r_*; scaled by the sabotage knob.
Certificate certify_A_sharp(const MultiplierSet& ms, const GridSpec& grid);

// y' + (2r/|q|^2) y - (|q|^2/4) y^2 - (r^2+M^2)/(r^2 (r+M)^2 (r-M)^2) for y = lambda y0 on [r_e, r_*].
Certificate certify_hardy(const MultiplierSet& ms, const Grid2D& grid, double lambda = 0.5);

// Coefficients of |q|^2 times the divergence of the combined current, per channel.
struct ChannelCoefficients {
  double dr, dt, ang, psi;
};
ChannelCoefficients combined_available(const MultiplierSet& ms, double r, double theta);
ChannelCoefficients combined_target(const MultiplierSet& ms, double r, double theta);

// kappa_channel = min available/target; each must be > 0.
std::vector<Certificate> certify_combined(const MultiplierSet& ms, const Grid2D& grid);

// Which pieces of the current enter the divergence check.
struct CurrentParts {
  bool stogin = true;  // X = z u d_r with w = z u'
  bool wT = true;      // delta_T w_T added to w
  bool J = true;
};

struct DivergenceBox {
  double r_min = 1.5, r_max = 10.0;  // units of M
  double theta_min = 0.2, theta_max = 3.141592653589793 - 0.2;
  double t = 0.5;  // units of M
  std::size_t n_r = 24, n_theta = 12;
  double exclusion = 0.3;  // units of M, around non-smooth radii
};

struct DivergenceResult {
  double residual = 0;  // max |LHS - RHS| / max(1, |RHS|)
  double argmax_r = 0, argmax_theta = 0;
  std::size_t points = 0;
};

// |q|^2 D^mu P_mu by 4th-order finite differences of the current with spacing h.
double divergence_lhs(const MultiplierSet& ms, const ManufacturedField& f, const CurrentParts& parts, double t,
                      double r, double theta, double h);
// Closed form of |q|^2 D^mu P_mu, including the |q|^2 (box psi)(X psi + w psi/2) source.
double divergence_rhs(const MultiplierSet& ms, const ManufacturedField& f, const CurrentParts& parts, double t,
                      double r, double theta);
// |q|^2 box psi from analytic derivatives.
double q2_box(const Params& p, const Jet& j, double r, double theta);

DivergenceResult divergence_residual(const MultiplierSet& ms, const ManufacturedField& f, double h,
                                     const CurrentParts& parts = {}, const DivergenceBox& box = {});

struct DivergenceStudy {
  std::string field;
  std::vector<double> h;
  std::vector<double> residual;
  double slope = 0;  // least-squares slope of log residual vs log h
};

DivergenceStudy divergence_study(const MultiplierSet& ms, const ManufacturedField& f, double h0, int levels,
                                 const CurrentParts& parts = {}, const DivergenceBox& box = {});

struct Report {
  std::vector<Certificate> certificates;
  bool passed() const;
  std::vector<const Certificate*> failures() const;
};

struct CertifyOptions {
  std::size_t radial_points = 1000000;
  std::size_t grid2d_r = 20000;
  std::size_t grid2d_theta = 50;
  double div_h0 = 0.1;
  int div_levels = 4;
  double div_order_tol = 0.2;
  double div_abs_tol = 1e-6;
};

Report certify_all(const MultiplierSet& ms, const CertifyOptions& opt = {});

}  // namespace morawetz
