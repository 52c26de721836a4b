#include "cep/solver/backend.hpp"

namespace cep {

std::shared_ptr<const LpBackend> default_backend() {
  static const auto backend = std::make_shared<const SimplexBackend>();
  return backend;
}

}  // namespace cep
