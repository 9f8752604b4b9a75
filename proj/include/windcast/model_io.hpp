#ifndef WINDCAST_MODEL_IO_HPP
#define WINDCAST_MODEL_IO_HPP

#include <memory>
#include <string>

#include "windcast/regressor.hpp"

namespace windcast {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Loads a saved model file of either kind, dispatching on its tag.
std::unique_ptr<Regressor> load_model(const std::string& path);

}  // namespace windcast

#endif
