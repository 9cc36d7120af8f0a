#ifndef LEVYKB_QUADRATURE_HPP
#define LEVYKB_QUADRATURE_HPP

#include <functional>

namespace levykb {

// Adaptive Gauss-Kronrod (G7/K15) on a finite interval. Bisects until the
// embedded error estimate meets rel_tol (with a small absolute floor).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 60);

} // namespace levykb

#endif
