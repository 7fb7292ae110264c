#pragma once

#include <functional>
#include <string>

namespace chemokin {

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal conditions (boundary mass, renormalized inputs, ...). The default
// handler writes to stderr; returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace chemokin
