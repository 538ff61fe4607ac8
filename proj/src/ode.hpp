#pragma once

#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "ecs/linalg.hpp"

namespace ecs::detail {

using State = std::vector<double>;

// Adaptive rkf78 from t0 to t1 (either direction), lands exactly on t1.
template <class Rhs>
void integrate_to(Rhs&& rhs, State& x, double t0, double t1, double abs_tol = 1e-12,
                  double rel_tol = 1e-12) {
  namespace odeint = boost::numeric::odeint;
  if (t1 == t0) return;
  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_fehlberg78<State>());
  try {
    odeint::integrate_adaptive(stepper, rhs, x, t0, t1, (t1 - t0) / 64.0);
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("integrator stalled: ") + e.what());
  }
}

}  // namespace ecs::detail
