#include "morawetz/solver.hpp"

namespace morawetz {

std::string to_string(Boundary b) { return b == Boundary::sommerfeld ? "sommerfeld" : "dirichlet"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "sommerfeld") return Boundary::sommerfeld;
  if (s == "dirichlet") return Boundary::dirichlet;
  throw ConfigError("grid.boundary must be 'sommerfeld' or 'dirichlet'");
}

template Grid<double> make_grid<double>(const Params&, const GridConfig&);
template void rhs_into<double>(const Grid<double>&, const Grid<double>::Array2&, const Grid<double>::Array2&,
                               Grid<double>::Array2&, Grid<double>::Array2&);
template class Stepper<double>;

}  // namespace morawetz
