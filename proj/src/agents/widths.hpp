#pragma once

#include "imrl/agents/agent.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace imrl::agents::detail {

inline std::vector<int> widths(int in, const AgentConfig& c, const std::string& env, int out) {
  std::vector<int> w{in};
  const std::vector<int> hidden = c.hidden.empty() ? default_hidden(env) : c.hidden;
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

inline void require_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) throw NonFiniteError(std::string(what) + ": non-finite loss " + std::to_string(loss));
}

}  // namespace imrl::agents::detail
