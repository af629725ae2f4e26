#pragma once

// CSV persistence of iteration logs, weight checkpoints and policy gains.

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "msqvi/learning/msqvi.hpp"

namespace msqvi {

namespace detail {
inline std::ostream& exact(std::ostream& os) {
  return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}
}  // namespace detail

inline void write_iteration_log_header(std::ostream& os, Index k) {
  os << "round,player,delta_sup,residual_or_objective,poe_lambda_min";
  for (Index j = 1; j <= k; ++j) os << ",w_" << j;
  os << '\n';
}

/// One row per round and player, without wall-clock time.
inline void write_iteration_log_rows(std::ostream& os, const IterationReport& rep) {
  detail::exact(os);
  for (std::size_t i = 0; i < rep.weights.size(); ++i) {
    os << rep.round << ',' << i + 1 << ',' << rep.delta[i] << ',' << rep.residual_or_objective[i]
       << ',' << rep.poe_lambda_min[i];
    for (Index j = 0; j < rep.weights[i].size(); ++j) os << ',' << rep.weights[i](j);
    os << '\n';
  }
}

inline void write_iteration_log(std::ostream& os, const std::vector<IterationReport>& reports) {
  if (reports.empty()) return;
  write_iteration_log_header(os, reports.front().weights.front().size());
  for (const auto& r : reports) write_iteration_log_rows(os, r);
}

inline void write_weights(std::ostream& os, const QFunction& q) {
  detail::exact(os);
  os << "# monomial_order: " << kMonomialOrderVersion << '\n';
  os << "index,monomial,weight\n";
  const auto names = q.basis().monomial_names(q.player());
  for (Index k = 0; k < q.size(); ++k)
    os << k + 1 << ',' << names[static_cast<std::size_t>(k)] << ',' << q.weights()(k) << '\n';
}

/// Inverse of write_weights. Rejects other monomial orders and mismatched
/// monomial names.
inline QFunction read_weights(std::istream& is, const BasisSpec& basis, std::size_t player) {
  std::string line;
  if (!std::getline(is, line) || line != "# monomial_order: " + std::string(kMonomialOrderVersion))
    throw ConfigError("weight file does not declare monomial order " +
                      std::string(kMonomialOrderVersion));
  if (!std::getline(is, line) || line != "index,monomial,weight")
    throw ConfigError("weight file header missing");
  const auto names = basis.monomial_names(player);
  Vector w(basis.size());
  Index k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, name, value;
    std::getline(ss, idx, ',');
    std::getline(ss, name, ',');
    std::getline(ss, value);
    if (k >= w.size() || name != names[static_cast<std::size_t>(k)])
      throw ConfigError("weight file row " + std::to_string(k + 1) + " does not match the basis");
    w(k++) = std::stod(value);
  }
  if (k != w.size()) throw ConfigError("weight file has " + std::to_string(k) + " rows, expected " +
                                       std::to_string(w.size()));
  return QFunction(basis, player, w);
}

/// Gain matrix of a linear policy, one row per action coordinate.
inline void write_policy(std::ostream& os, const Policy& policy, const BasisSpec& basis) {
  detail::exact(os);
  Matrix gain;
  if (!linear_gain_over(policy, basis.signals(), gain))
    throw ConfigError("only linear feedback policies can be exported");
  os << "action";
  for (const auto& s : basis.signals()) os << ',' << s.name();
  os << '\n';
  for (Index r = 0; r < gain.rows(); ++r) {
    os << r + 1;
    for (Index c = 0; c < gain.cols(); ++c) os << ',' << gain(r, c);
    os << '\n';
  }
}

}  // namespace msqvi
