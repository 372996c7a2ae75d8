#pragma once

#include <stdexcept>

namespace qpp {

// A computation refused to start or could not finish within its configured
// resource budget. The message says which budget and by how much.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpp
