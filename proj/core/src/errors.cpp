#include "photocorr/errors.hpp"

namespace photocorr {

SolverError::SolverError(const std::string& what, int null_space_dimension, double residual)
    : std::runtime_error(what), null_space_dimension_(null_space_dimension), residual_(residual) {}

}  // namespace photocorr
