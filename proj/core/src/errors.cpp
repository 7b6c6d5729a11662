#include "wkam/errors.hpp"

#include <utility>

namespace wkam {

DivergenceError::DivergenceError(const std::string& what, std::vector<double> history)
    : Error(what), history_(std::move(history)) {}

}  // namespace wkam
