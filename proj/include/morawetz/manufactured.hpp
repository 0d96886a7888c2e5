#pragma once

#include <functional>
#include <string>
#include <vector>

namespace morawetz {

// Value and derivatives of a closed-form field psi(t, r, theta).
struct Jet {
  double f = 0;
  double t = 0, r = 0, th = 0;
  double tt = 0, rr = 0, thth = 0;
};

// f, f', f'' of a one-variable profile.
struct Jet1 {
  double f, d1, d2;
};

using Profile = std::function<Jet1(double)>;

struct ManufacturedField {
  std::string name;
  Profile time, radial, angular;

  Jet operator()(double t, double r, double theta) const;
};

// Separable products T(t) R(r) Theta(theta); lengths in units of M.
ManufacturedField constant_field();
ManufacturedField decaying_over_r_P2(double M);
ManufacturedField oscillatory_P0(double M);
ManufacturedField oscillatory_P2(double M);

// The three non-trivial catalog entries.
std::vector<ManufacturedField> manufactured_catalog(double M);

}  // namespace morawetz
