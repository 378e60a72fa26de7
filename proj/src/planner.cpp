#include "socnav/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "socnav/erf.hpp"

namespace socnav {
namespace {

// Substituted for a chance residual whose direction vector is undefined
// (robot exactly on the predicted mean); exact-mode only.
constexpr double kDegenerateChanceResidual = -1e3;

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

Vec7 state_error(const Vec7& x, const Vec7& ref) {
  Vec7 e = x - ref;
  e(2) = wrap_angle(e(2));
  return e;
}

double smooth_norm(const Eigen::Vector2d& e, double eps) {
  return std::sqrt(e.squaredNorm() + eps * eps);
}

/// Barrier / hard residual with smoothed norm; r_total already bundles
/// r_o + r_th + margin.
double smooth_h(const Eigen::Vector2d& pos, const Eigen::Vector2d& mu, double r_total,
                double eps, Eigen::Vector2d* grad) {
  const Eigen::Vector2d e = pos - mu;
  const double ds = smooth_norm(e, eps);
  if (grad != nullptr) *grad = e / ds;
  return ds - r_total;
}

/// Chance residual with smoothed norm; r_free bundles r_o + a0 + margin
/// and c = erf_inv(1 - 2 delta).
double smooth_chance(const Eigen::Vector2d& pos, const Eigen::Vector2d& mu,
                     const Eigen::Matrix2d& sigma, double c, double r_free, double eps,
                     Eigen::Vector2d* grad) {
  const Eigen::Vector2d e = pos - mu;
  const double ds = smooth_norm(e, eps);
  const Eigen::Vector2d q = sigma * e;
  const double s2 = std::max(e.dot(q) / (ds * ds), 0.0);
  if (grad != nullptr) {
    Eigen::Vector2d g = e / ds;
    if (s2 > 1e-14) {
      const Eigen::Vector2d ds2 = (2.0 / (ds * ds)) * (q - s2 * e);
      g -= (c / std::sqrt(2.0 * s2)) * ds2;
    }
    *grad = g;
  }
  return ds - r_free - c * std::sqrt(2.0 * s2);
}

/// Per-pedestrian precomputed data shared by every residual evaluation
/// within one solve.
struct PedCache {
  Eigen::Vector2d anchor;
  double anchor_r_total = 0.0;  // r_o + a0 + margin (no forecast spread yet)
  std::vector<Eigen::Vector2d> mu;
  std::vector<Eigen::Matrix2d> sigma;
  std::vector<double> r_total;  // r_o + a0 + sqrt(lambda1) + margin per step
};

std::vector<PedCache> build_ped_cache(const OcpProblem& p) {
  const SafetyGeometry& geom = p.config.geometry;
  const double clearance = geom.robot_radius + geom.margin;
  std::vector<PedCache> out;
  out.reserve(p.pedestrians.size());
  for (const PedConstraint& ped : p.pedestrians) {
    PedCache c;
    c.anchor = ped.current_pos;
    c.anchor_r_total = clearance + geom.ped_radius;
    c.mu.reserve(ped.steps.size());
    c.sigma.reserve(ped.steps.size());
    c.r_total.reserve(ped.steps.size());
    for (const GaussianStep& s : ped.steps) {
      c.mu.push_back(s.mean);
      c.sigma.push_back(s.cov);
      c.r_total.push_back(clearance + bounding_radius(s.cov, geom));
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Residuals at given states; smooth uses the solver's eps-regularized
/// norm, exact defers to the public constraint functions so metrics and
/// solver agree by construction.
Eigen::VectorXd residuals_impl(const OcpProblem& p, const std::vector<PedCache>& peds,
                               const std::vector<Vec7>& x, bool smooth) {
  const int n = p.horizon();
  const ConstraintMode& mode = p.config.mode;
  const SafetyGeometry& geom = p.config.geometry;
  const double eps = smooth ? p.config.smooth_eps : 0.0;
  const double chance_c = erf_inv(1.0 - 2.0 * mode.delta_prob);
  const double r_free = geom.robot_radius + geom.ped_radius + geom.margin;

  Eigen::VectorXd res(n * static_cast<int>(peds.size()));
  for (std::size_t i = 0; i < peds.size(); ++i) {
    const PedCache& ped = peds[i];
    for (int k = 0; k < n; ++k) {
      const int j = static_cast<int>(i) * n + k;
      switch (mode.kind) {
        case ConstraintMode::Kind::Hard: {
          const Eigen::Vector2d pos = x[k + 1].head<2>();
          if (smooth) {
            res(j) = smooth_h(pos, ped.mu[k], ped.r_total[k], eps, nullptr);
          } else {
            GaussianStep step{ped.mu[k], ped.sigma[k]};
            res(j) = hard_residual(pos, step, geom, 0.0);
          }
          break;
        }
        case ConstraintMode::Kind::Chance: {
          const Eigen::Vector2d pos = x[k + 1].head<2>();
          if (smooth) {
            res(j) = smooth_chance(pos, ped.mu[k], ped.sigma[k], chance_c, r_free, eps,
                                   nullptr);
          } else {
            GaussianStep step{ped.mu[k], ped.sigma[k]};
            try {
              res(j) = chance_residual(pos, step, mode.delta_prob, geom, 0.0);
            } catch (const std::domain_error&) {
              res(j) = kDegenerateChanceResidual;
            }
          }
          break;
        }
        case ConstraintMode::Kind::Cbf: {
          const Eigen::Vector2d pos_next = x[k + 1].head<2>();
          const double h_next = smooth_h(pos_next, ped.mu[k], ped.r_total[k], eps, nullptr);
          double h_now;
          if (k == 0) {
            h_now = smooth_h(x[0].head<2>(), ped.anchor, ped.anchor_r_total, eps, nullptr);
          } else {
            h_now = smooth_h(x[k].head<2>(), ped.mu[k - 1], ped.r_total[k - 1], eps, nullptr);
          }
          res(j) = cbf_residual(h_now, h_next, mode.gamma);
          break;
        }
      }
    }
  }
  return res;
}

struct InnerOutcome {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

class ShootingSolver {
 public:
  explicit ShootingSolver(const OcpProblem& problem)
      : p_(problem),
        n_(problem.horizon()),
        nu_(2 * problem.horizon()),
        n_res_(problem.collision_residual_count()),
        peds_(build_ped_cache(problem)),
        x_(problem.horizon() + 1),
        A_(problem.horizon()),
        B_(problem.horizon()) {
    lo_.resize(nu_);
    hi_.resize(nu_);
    for (int k = 0; k < n_; ++k) {
      lo_(2 * k) = -p_.config.force_limit;
      hi_(2 * k) = p_.config.force_limit;
      lo_(2 * k + 1) = -p_.config.steer_rate_limit;
      hi_(2 * k + 1) = p_.config.steer_rate_limit;
    }
    chance_c_ = erf_inv(1.0 - 2.0 * p_.config.mode.delta_prob);
    r_free_ = p_.config.geometry.robot_radius + p_.config.geometry.ped_radius +
              p_.config.geometry.margin;
    shift_ = p_.config.mode.kind == ConstraintMode::Kind::Hard ? p_.config.hard_strict_margin
                                                               : 0.0;
  }

  SolveResult solve_from(const Eigen::VectorXd& u0);

  double eval(const Eigen::VectorXd& u, const Eigen::VectorXd* lambda, double rho,
              Eigen::VectorXd* grad);

  const std::vector<Vec7>& states() const { return x_; }
  const std::vector<PedCache>& peds() const { return peds_; }

 private:
  void roll(const Eigen::VectorXd& u, bool with_jacobians);
  double objective_from_states(const Eigen::VectorXd& u) const;
  double penalty_value(const Eigen::VectorXd& res, const Eigen::VectorXd& lambda,
                       double rho) const;
  InnerOutcome minimize(Eigen::VectorXd& u, const Eigen::VectorXd& lambda, double rho);
  Eigen::VectorXd clamped(const Eigen::VectorXd& u) const {
    return u.cwiseMax(lo_).cwiseMin(hi_);
  }

  const OcpProblem& p_;
  int n_;
  int nu_;
  int n_res_;
  double chance_c_ = 0.0;
  double r_free_ = 0.0;
  double shift_ = 0.0;
  std::vector<PedCache> peds_;
  Eigen::VectorXd lo_, hi_;
  std::vector<Vec7> x_;
  std::vector<Mat7> A_;
  std::vector<Mat72> B_;
};

void ShootingSolver::roll(const Eigen::VectorXd& u, bool with_jacobians) {
  x_[0] = p_.initial.vec();
  RobotState cur = p_.initial;
  for (int k = 0; k < n_; ++k) {
    const ControlInput ck{u(2 * k), u(2 * k + 1)};
    if (with_jacobians) {
      cur = step_with_jacobians(cur, ck, p_.config.dt, p_.config.vehicle, A_[k], B_[k]);
    } else {
      cur = step(cur, ck, p_.config.dt, p_.config.vehicle);
    }
    x_[k + 1] = cur.vec();
  }
}

double ShootingSolver::objective_from_states(const Eigen::VectorXd& u) const {
  double j = 0.0;
  for (int k = 0; k < n_; ++k) {
    const Eigen::Vector2d uk = u.segment<2>(2 * k);
    const Eigen::Vector2d uprev =
        k == 0 ? p_.prev_input.vec() : Eigen::Vector2d(u.segment<2>(2 * (k - 1)));
    j += stage_cost(x_[k], p_.reference[k], uk, uprev, p_.config.state_weights,
                    p_.config.input_weights, p_.config.input_rate_weights);
  }
  j += terminal_cost(x_[n_], p_.reference.back(), p_.config.terminal_weights);
  return j;
}

double ShootingSolver::penalty_value(const Eigen::VectorXd& res, const Eigen::VectorXd& lambda,
                                     double rho) const {
  double phi = 0.0;
  for (int j = 0; j < res.size(); ++j) {
    const double t = std::max(0.0, lambda(j) - rho * (res(j) - shift_));
    phi += (t * t - lambda(j) * lambda(j)) / (2.0 * rho);
  }
  return phi;
}

double ShootingSolver::eval(const Eigen::VectorXd& u, const Eigen::VectorXd* lambda, double rho,
                            Eigen::VectorXd* grad) {
  roll(u, grad != nullptr);
  double value = objective_from_states(u);

  if (grad == nullptr) {
    if (lambda != nullptr && n_res_ > 0) {
      value += penalty_value(residuals_impl(p_, peds_, x_, true), *lambda, rho);
    }
    return value;
  }

  // Direct cost gradients w.r.t. each rolled-out state (x_0 is fixed).
  std::vector<Vec7> gx(n_ + 1, Vec7::Zero());
  for (int k = 1; k < n_; ++k) {
    gx[k] = 2.0 * p_.config.state_weights.cwiseProduct(state_error(x_[k], p_.reference[k]));
  }
  gx[n_] =
      2.0 * p_.config.terminal_weights.cwiseProduct(state_error(x_[n_], p_.reference.back()));

  Eigen::VectorXd gu = Eigen::VectorXd::Zero(nu_);
  for (int k = 0; k < n_; ++k) {
    const Eigen::Vector2d uk = u.segment<2>(2 * k);
    const Eigen::Vector2d uprev =
        k == 0 ? p_.prev_input.vec() : Eigen::Vector2d(u.segment<2>(2 * (k - 1)));
    Eigen::Vector2d g2 = 2.0 * p_.config.input_weights.cwiseProduct(uk) +
                         2.0 * p_.config.input_rate_weights.cwiseProduct(uk - uprev);
    if (k + 1 < n_) {
      g2 -= 2.0 * p_.config.input_rate_weights.cwiseProduct(
                      Eigen::Vector2d(u.segment<2>(2 * (k + 1))) - uk);
    }
    gu.segment<2>(2 * k) += g2;
  }

  // Constraint penalties: value and position gradients in one sweep.
  if (lambda != nullptr && n_res_ > 0) {
    const ConstraintMode& mode = p_.config.mode;
    const double eps = p_.config.smooth_eps;
    for (std::size_t i = 0; i < peds_.size(); ++i) {
      const PedCache& ped = peds_[i];
      for (int k = 0; k < n_; ++k) {
        const int j = static_cast<int>(i) * n_ + k;
        double r_j = 0.0;
        Eigen::Vector2d g_next = Eigen::Vector2d::Zero();
        Eigen::Vector2d g_now = Eigen::Vector2d::Zero();
        bool has_now = false;
        switch (mode.kind) {
          case ConstraintMode::Kind::Hard:
            r_j = smooth_h(x_[k + 1].head<2>(), ped.mu[k], ped.r_total[k], eps, &g_next);
            break;
          case ConstraintMode::Kind::Chance:
            r_j = smooth_chance(x_[k + 1].head<2>(), ped.mu[k], ped.sigma[k], chance_c_,
                                r_free_, eps, &g_next);
            break;
          case ConstraintMode::Kind::Cbf: {
            const double h_next =
                smooth_h(x_[k + 1].head<2>(), ped.mu[k], ped.r_total[k], eps, &g_next);
            double h_now;
            if (k == 0) {
              h_now = smooth_h(x_[0].head<2>(), ped.anchor, ped.anchor_r_total, eps, nullptr);
            } else {
              h_now = smooth_h(x_[k].head<2>(), ped.mu[k - 1], ped.r_total[k - 1], eps, &g_now);
              has_now = true;
            }
            r_j = cbf_residual(h_now, h_next, mode.gamma);
            break;
          }
        }
        const double t = std::max(0.0, (*lambda)(j) - rho * (r_j - shift_));
        value += (t * t - (*lambda)(j) * (*lambda)(j)) / (2.0 * rho);
        if (t > 0.0) {
          const double w = -t;  // d penalty / d residual
          gx[k + 1].head<2>() += w * g_next;
          if (has_now) gx[k].head<2>() += w * (-(1.0 - mode.gamma)) * g_now;
        }
      }
    }
  }

  // Adjoint sweep through the rollout.
  Vec7 lam = gx[n_];
  for (int k = n_ - 1; k >= 0; --k) {
    gu.segment<2>(2 * k) += B_[k].transpose() * lam;
    if (k >= 1) lam = gx[k] + A_[k].transpose() * lam;
  }
  *grad = gu;
  return value;
}

InnerOutcome ShootingSolver::minimize(Eigen::VectorXd& u, const Eigen::VectorXd& lambda,
                                      double rho) {
  InnerOutcome out;
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(nu_, nu_);
  Eigen::VectorXd g(nu_);
  double f = eval(u, &lambda, rho, &g);
  for (int it = 0; it < p_.config.max_inner; ++it) {
    const Eigen::VectorXd pg = u - clamped(u - g);
    if (pg.lpNorm<Eigen::Infinity>() <= p_.config.kkt_tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = -h_inv * g;
    if (d.dot(g) > -1e-12 * std::max(1.0, d.norm() * g.norm())) d = -g;

    bool accepted = false;
    Eigen::VectorXd u_new;
    double f_new = f;
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd trial = clamped(u + alpha * d);
      const double predicted = g.dot(trial - u);
      if (predicted < 0.0) {
        const double f_trial = eval(trial, &lambda, rho, nullptr);
        if (std::isfinite(f_trial) && f_trial <= f + 1e-4 * predicted) {
          u_new = trial;
          f_new = f_trial;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no descent along the projected direction

    Eigen::VectorXd g_new(nu_);
    eval(u_new, &lambda, rho, &g_new);
    const Eigen::VectorXd s = u_new - u;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd hy = h_inv * y;
      h_inv += -((s * hy.transpose() + hy * s.transpose()) / sy) +
               ((1.0 + y.dot(hy) / sy) / sy) * (s * s.transpose());
    }
    ++out.iterations;
    const bool stalled = std::abs(f - f_new) <= p_.config.stall_tol * (1.0 + std::abs(f_new));
    u = u_new;
    f = f_new;
    g = g_new;
    if (stalled) break;
  }
  out.value = f;
  return out;
}

SolveResult ShootingSolver::solve_from(const Eigen::VectorXd& u0) {
  Eigen::VectorXd u = clamped(u0);
  if (!u.allFinite()) u.setZero();
  if (!std::isfinite(eval(u, nullptr, 1.0, nullptr))) {
    u.setZero();
    if (!std::isfinite(eval(u, nullptr, 1.0, nullptr))) {
      throw SolverError("solve_ocp: objective non-finite even from a zero start");
    }
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n_res_);
  double rho = 10.0;
  double viol_prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  int total_inner = 0;
  for (int outer = 0; outer < p_.config.max_outer; ++outer) {
    const InnerOutcome inner = minimize(u, lambda, rho);
    total_inner += inner.iterations;
    roll(u, false);
    double viol = 0.0;
    Eigen::VectorXd res;
    if (n_res_ > 0) {
      res = residuals_impl(p_, peds_, x_, true);
      for (int j = 0; j < res.size(); ++j) viol = std::max(viol, shift_ - res(j));
    }
    if (inner.converged && viol <= p_.config.kkt_tol) {
      converged = true;
      break;
    }
    for (int j = 0; j < res.size(); ++j) {
      lambda(j) = std::max(0.0, lambda(j) - rho * (res(j) - shift_));
    }
    if (viol > 0.25 * viol_prev && viol > p_.config.kkt_tol) rho = std::min(rho * 10.0, 1e8);
    viol_prev = viol;
  }

  SolveResult result;
  roll(u, false);
  result.controls.reserve(n_);
  result.trajectory.reserve(n_);
  for (int k = 0; k < n_; ++k) {
    result.controls.push_back(ControlInput{u(2 * k), u(2 * k + 1)});
    result.trajectory.push_back(RobotState::from_vec(x_[k + 1]));
  }
  result.objective = objective_from_states(u);
  result.iterations = total_inner;
  if (n_res_ > 0) {
    const Eigen::VectorXd exact = residuals_impl(p_, peds_, x_, false);
    for (int j = 0; j < exact.size(); ++j) {
      result.max_violation = std::max(result.max_violation, -exact(j));
    }
    result.max_violation = std::max(result.max_violation, 0.0);
  }
  if (result.max_violation > p_.config.kkt_tol) {
    result.status = SolveStatus::InfeasibleRelaxed;
  } else if (converged) {
    result.status = SolveStatus::Converged;
  } else {
    result.status = SolveStatus::MaxIter;
  }
  return result;
}

/// Feasible (within tolerance) beats infeasible; ties break on lower
/// violation, then lower objective.
bool better_candidate(const SolveResult& a, const SolveResult& b, double tol) {
  const bool fa = a.max_violation <= tol;
  const bool fb = b.max_violation <= tol;
  if (fa != fb) return fa;
  if (!fa && std::abs(a.max_violation - b.max_violation) > 1e-12) {
    return a.max_violation < b.max_violation;
  }
  return a.objective < b.objective;
}

}  // namespace

double stage_cost(const Vec7& x, const Vec7& x_ref, const Eigen::Vector2d& u,
                  const Eigen::Vector2d& u_prev, const Vec7& q_weights,
                  const Eigen::Vector2d& r_weights, const Eigen::Vector2d& s_weights) {
  const Vec7 e = state_error(x, x_ref);
  const Eigen::Vector2d du = u - u_prev;
  return e.cwiseProduct(q_weights).dot(e) + u.cwiseProduct(r_weights).dot(u) +
         du.cwiseProduct(s_weights).dot(du);
}

double terminal_cost(const Vec7& x, const Vec7& x_ref, const Vec7& p_weights) {
  const Vec7 e = state_error(x, x_ref);
  return e.cwiseProduct(p_weights).dot(e);
}

OcpProblem build_ocp(const RobotState& state, const std::vector<GaussianForecast>& forecasts,
                     const PlannerConfig& config, const ControlInput& prev_input) {
  if (config.horizon < 1) throw std::invalid_argument("build_ocp: horizon must be >= 1");
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw std::invalid_argument("build_ocp: dt must be positive and finite");
  }
  if (!(config.force_limit > 0.0) || !(config.steer_rate_limit > 0.0)) {
    throw std::invalid_argument("build_ocp: control bounds must be positive");
  }
  if (!state.vec().allFinite()) {
    throw std::invalid_argument("build_ocp: robot state is non-finite");
  }

  OcpProblem p;
  p.initial = state;
  p.prev_input = prev_input;
  p.config = config;

  Vec7 ref = Vec7::Zero();
  ref(0) = config.goal.x();
  ref(1) = config.goal.y();
  const Eigen::Vector2d to_goal = config.goal - state.position();
  ref(2) = to_goal.norm() >= config.goal_tolerance
               ? std::atan2(to_goal.y(), to_goal.x())
               : state.heading;
  p.reference.assign(config.horizon, ref);

  const int n = config.horizon;
  for (const GaussianForecast& f : forecasts) {
    if (f.steps.empty()) continue;
    for (const GaussianStep& s : f.steps) {
      if (!s.mean.allFinite() || !s.cov.allFinite()) {
        throw std::invalid_argument("build_ocp: forecast contains non-finite values");
      }
    }
    if (!f.origin.allFinite()) {
      throw std::invalid_argument("build_ocp: forecast origin is non-finite");
    }
    if (config.prune_radius > 0.0 &&
        (f.origin - state.position()).norm() > config.prune_radius) {
      continue;
    }
    PedConstraint c;
    c.pedestrian_id = f.pedestrian_id;
    c.current_pos = f.origin;
    c.steps.reserve(n);
    for (int k = 0; k < n; ++k) {
      if (k < static_cast<int>(f.steps.size())) {
        c.steps.push_back(f.steps[k]);
      } else {
        GaussianStep held = c.steps.back();  // hold last, inflate 10% per step
        held.cov *= 1.1;
        c.steps.push_back(held);
      }
    }
    p.pedestrians.push_back(std::move(c));
  }
  return p;
}

double ocp_objective(const OcpProblem& problem, const Eigen::VectorXd& u,
                     std::vector<RobotState>* states_out) {
  if (u.size() != 2 * problem.horizon()) {
    throw std::invalid_argument("ocp_objective: control vector has wrong size");
  }
  ShootingSolver solver(problem);
  const double j = solver.eval(u, nullptr, 1.0, nullptr);
  if (states_out != nullptr) {
    states_out->clear();
    for (int k = 1; k <= problem.horizon(); ++k) {
      states_out->push_back(RobotState::from_vec(solver.states()[k]));
    }
  }
  return j;
}

Eigen::VectorXd ocp_objective_gradient(const OcpProblem& problem, const Eigen::VectorXd& u) {
  if (u.size() != 2 * problem.horizon()) {
    throw std::invalid_argument("ocp_objective_gradient: control vector has wrong size");
  }
  ShootingSolver solver(problem);
  Eigen::VectorXd grad(u.size());
  solver.eval(u, nullptr, 1.0, &grad);
  return grad;
}

Eigen::VectorXd ocp_residuals(const OcpProblem& problem, const std::vector<RobotState>& states,
                              bool smooth) {
  if (static_cast<int>(states.size()) != problem.horizon()) {
    throw std::invalid_argument("ocp_residuals: expected one state per horizon step");
  }
  std::vector<Vec7> x(problem.horizon() + 1);
  x[0] = problem.initial.vec();
  for (int k = 0; k < problem.horizon(); ++k) x[k + 1] = states[k].vec();
  return residuals_impl(problem, build_ped_cache(problem), x, smooth);
}

SolveResult solve_ocp(const OcpProblem& problem, const std::vector<ControlInput>& warm_start) {
  const auto t0 = std::chrono::steady_clock::now();
  ShootingSolver solver(problem);
  const int nu = 2 * problem.horizon();

  std::vector<Eigen::VectorXd> starts;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nu);
  if (!warm_start.empty()) {
    if (static_cast<int>(warm_start.size()) != problem.horizon()) {
      throw std::invalid_argument("solve_ocp: warm start must have one control per step");
    }
    Eigen::VectorXd w(nu);
    for (int k = 0; k < problem.horizon(); ++k) w.segment<2>(2 * k) = warm_start[k].vec();
    starts.push_back(w);
    if ((w - zero).lpNorm<Eigen::Infinity>() > 1e-12) starts.push_back(zero);
  } else {
    starts.push_back(zero);
  }

  SolveResult best;
  bool have = false;
  int total_iterations = 0;
  for (const Eigen::VectorXd& s : starts) {
    SolveResult r = solver.solve_from(s);
    total_iterations += r.iterations;
    if (!have || better_candidate(r, best, problem.config.kkt_tol)) {
      best = std::move(r);
      have = true;
    }
  }
  best.iterations = total_iterations;
  best.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

std::pair<ControlInput, SolveResult> Planner::plan(
    const RobotState& state, const std::vector<GaussianForecast>& forecasts) {
  const OcpProblem problem = build_ocp(state, forecasts, config_, prev_applied_);
  if (static_cast<int>(warm_start_.size()) != config_.horizon) warm_start_.clear();

  SolveResult result;
  bool failed = false;
  try {
    result = solve_ocp(problem, warm_start_);
  } catch (const SolverError&) {
    failed = true;
  }

  if (failed) {
    // Braking fallback: bleed the longitudinal speed and recentre the
    // steering, both rate-limited by the control bounds.
    ControlInput brake;
    brake.force = std::clamp(-state.vx * config_.vehicle.mass / config_.dt,
                             -config_.force_limit, config_.force_limit);
    brake.steer_rate = std::clamp(-state.steer / config_.dt, -config_.steer_rate_limit,
                                  config_.steer_rate_limit);
    result = SolveResult{};
    result.fallback = true;
    result.controls.assign(config_.horizon, brake);
    result.trajectory = rollout(state, result.controls, config_.dt, config_.vehicle);
    Eigen::VectorXd u(2 * config_.horizon);
    for (int k = 0; k < config_.horizon; ++k) u.segment<2>(2 * k) = brake.vec();
    const double obj = ocp_objective(problem, u);
    result.objective = std::isfinite(obj) ? obj : 0.0;
    warm_start_.clear();
    prev_applied_ = brake;
    return {brake, result};
  }

  const ControlInput first = result.controls.front();
  warm_start_.assign(result.controls.begin() + 1, result.controls.end());
  warm_start_.push_back(result.controls.back());
  prev_applied_ = first;
  return {first, result};
}

void Planner::reset() {
  warm_start_.clear();
  prev_applied_ = ControlInput{};
}

}  // namespace socnav
