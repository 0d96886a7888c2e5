#pragma once

#include <functional>
#include <vector>

#include "morawetz/solver.hpp"

namespace morawetz {

using Field2 = Grid<double>::Array2;

// First derivatives on the grid: d_r* centred (one-sided second order at the
// ends), d_theta centred with even reflection across the poles.
Field2 d_rstar(const Grid<double>& g, const Field2& f);
Field2 d_theta(const Grid<double>& g, const Field2& f);

// pi * integral of [(r^2+M^2 - Delta M^2 sin^2/(r^2+M^2)) psi_t^2 + (r^2+M^2) psi_r*^2
//                   + Delta/(r^2+M^2) psi_theta^2] sin(theta) dr* dtheta
double energy_T(const Grid<double>& g, const FieldState<double>& s);

// Flux of the d_phi current through t = const. dphi is a test hook for a
// synthetic d_phi psi; axisymmetric states pass nullptr and get exactly 0.
double energy_Z(const Grid<double>& g, const FieldState<double>& s, const Field2* dphi = nullptr);

// Instantaneous energy fluxes leaving through the inner and outer r* boundaries.
struct BoundaryFlux {
  double inner, outer;
};
BoundaryFlux boundary_flux(const Grid<double>& g, const FieldState<double>& s);

struct BulkOptions {
  double r_e = 1.1;           // corollary region [r_e, R_e]
  double R_e = 10.0;
  double trap_window = 0.5;   // |r - r_trap| <= trap_window for the trapping channels
};

// Slice integrals with measure 2 pi |q|^2 sin(theta) dr dtheta.
struct BulkSlice {
  double total = 0;       // Morawetz integrand summed over all channels
  double dr = 0, dt = 0, ang = 0, psi = 0;
  double corollary = 0;   // undegenerated integrand on [r_e, R_e]
  double trap = 0;        // (d_t + angular) channels near r_trap
};

BulkSlice morawetz_bulk(const Grid<double>& g, const FieldState<double>& s, const BulkOptions& opt = {});

struct EnergySeries {
  std::vector<double> times, E_T, flux_in, flux_out, B;
  std::vector<double> corollary, trap;
  double E0 = 0;
  double C_est = 0;
};

// Trapezoid-in-time accumulation of slice integrals and boundary fluxes.
class Accumulator {
 public:
  void start(double t, const BulkSlice& b, const BoundaryFlux& f);
  void accumulate(double dt, const BulkSlice& b, const BoundaryFlux& f);
  double t() const { return t_; }
  double B() const { return B_; }
  double corollary() const { return cor_; }
  double trap() const { return trap_; }
  double flux_in() const { return fin_; }
  double flux_out() const { return fout_; }

 private:
  double t_ = 0;
  BulkSlice last_;
  BoundaryFlux last_flux_{0, 0};
  double B_ = 0, cor_ = 0, trap_ = 0, fin_ = 0, fout_ = 0;
};

struct CEstimate {
  double value = 0;
  bool degenerate = false;  // E_T(0) == 0
};
CEstimate estimate_C(const EnergySeries& s);

struct HardyRatio {
  double ratio = 0;
  bool within_bound = false;  // ratio <= 4 (1 + tol)
};
// Trapezoid ratio of int psi^2 over int x^2 psi'^2; psi' by second-order
// differences on the (possibly non-uniform) samples.
HardyRatio hardy_discrete(const std::vector<double>& x, const std::vector<double>& psi, double tol = 1e-3);

struct EvolveConfig {
  GridConfig grid;
  double cfl = 0.4;
  double t_end = 200.0;
  double output_every = 1.0;
  GaussianData data;
  BulkOptions bulk;
};

struct EvolveResult {
  EnergySeries series;
  FieldState<double> final_state;
  double dt = 0;
  long steps = 0;
  double corollary_const = 0;
  double trap_const = 0;
  double ebc = 0;
};

// Sample callback runs at each output time on the current snapshot.
using SampleHook = std::function<void(const Grid<double>&, const FieldState<double>&)>;

EvolveResult evolve(const Params& p, const EvolveConfig& c, const SampleHook& hook = {});
EvolveResult evolve(const Grid<double>& g, FieldState<double> state, const EvolveConfig& c,
                    const SampleHook& hook = {});

}  // namespace morawetz
