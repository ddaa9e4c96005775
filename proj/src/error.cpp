#include "streambeam/error.hpp"

namespace streambeam {

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const IoError*>(&e)) return 2;
  if (dynamic_cast<const InputError*>(&e)) return 2;
  return 3;
}

}  // namespace streambeam
