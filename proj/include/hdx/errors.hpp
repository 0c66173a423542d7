#pragma once

#include <stdexcept>
#include <string>

namespace hdx {

// A requested enumeration or search exceeds its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hdx
