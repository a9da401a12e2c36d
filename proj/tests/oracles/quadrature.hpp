#pragma once

// Adaptive quadrature oracle (GSL QAGS).

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <functional>
#include <stdexcept>

namespace oracle {

inline double integrate(const std::function<double(double)>& f, double a, double b, double rel = 1e-12) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  gsl_function F;
  F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
  F.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, err = 0.0;
  gsl_set_error_handler_off();
  gsl_integration_qags(&F, a, b, 0.0, rel, 2000, ws, &result, &err);
  gsl_integration_workspace_free(ws);
  return result;
}

}  // namespace oracle
