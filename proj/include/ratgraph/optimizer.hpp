#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ratgraph/filters.hpp"
#include "ratgraph/remez.hpp"

namespace ratgraph {

enum class TrainMethod {
  kGradientDescent,     // fixed learning rate, step halving on poles / blow-ups
  kLevenbergMarquardt,  // damped Gauss-Newton on the residual vector
};
std::string_view to_string(TrainMethod method);
TrainMethod parse_train_method(std::string_view name);

struct TrainConfig {
  TrainMethod method = TrainMethod::kLevenbergMarquardt;
  double learning_rate = 1e-3;  // gradient descent only
  std::size_t max_epochs = 5000;
  // Stop once the best loss improved by no more than tol over `window` epochs.
  double tol = 1e-12;
  std::size_t window = 50;
  double pole_guard = kDefaultPoleGuard;
  std::size_t max_halvings = 20;     // gradient descent step halvings per epoch
  double blowup_factor = 10.0;       // gradient descent rejects loss growth beyond this
  double initial_damping = 1e-3;     // Levenberg-Marquardt mu
  std::size_t max_damping_tries = 20;

  // Throws Error(kInvalidParameter) for non-positive settings. A zero learning
  // rate is allowed: it turns training into an evaluation of the start point.
  void validate() const;
};

// Spectral-domain samples: normalized eigenvalues, target y_hat and input x_hat.
struct SpectralProblem {
  std::vector<double> ts;
  std::vector<double> y_hat;
  std::vector<double> x_hat;

  // x_hat defaults to all ones.
  static SpectralProblem from_target(const DiscreteTarget& target,
                                     std::vector<double> x_hat = {});
  std::size_t size() const { return ts.size(); }
};

// mean_d (R(t_d) x_hat_d - y_hat_d)^2. Throws Error(kPole) if |Q(t_d)| < pole_guard.
double spectral_loss(const RationalFilter& f, const SpectralProblem& problem,
                     double pole_guard = kDefaultPoleGuard);

struct Gradients {
  std::vector<double> dpsi;
  std::vector<double> dphi;
};

// Analytic gradient of spectral_loss with respect to psi and phi.
Gradients gradients(const RationalFilter& f, const SpectralProblem& problem,
                    double pole_guard = kDefaultPoleGuard);

// True when Q(t_d) > pole_guard at every sample. Q(0) = 1, so a negative Q
// at a sample means a real pole crossed the sample range.
bool pole_free(const RationalFilter& f, std::span<const double> ts,
               double pole_guard = kDefaultPoleGuard);

struct TrainResult {
  RationalFilter filter;       // coefficients with the lowest loss seen
  double loss = 0.0;           // == min(trace)
  std::size_t epochs = 0;
  std::vector<double> trace;   // trace[0] is the start loss, trace[e] after epoch e
  std::size_t rejected_epochs = 0;
};

// Throws Error(kPole) when f0 has a pole on the samples.
TrainResult train(const RationalFilter& f0, const SpectralProblem& problem,
                  const TrainConfig& config = {});

enum class InitSource { kRemez, kZeros, kGiven };
std::string_view to_string(InitSource init);

// Outcome of one fitting method in an experiment.
struct FitReport {
  std::string method;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  InitSource init = InitSource::kGiven;
  std::optional<RationalFilter> rational;
  std::optional<PolynomialFilter> polynomial;
  double spectral_mse = 0.0;
  double vertex_mse = 0.0;
  std::size_t epochs = 0;
  std::vector<double> trace;
  double seconds = 0.0;
  std::string error;  // non-empty when the method failed

  bool ok() const { return error.empty(); }
};

nlohmann::json to_json(const FitReport& report);
// "epoch,loss" header, one row per trace entry.
void write_trace_csv(std::span<const double> trace, std::ostream& out);

}  // namespace ratgraph
