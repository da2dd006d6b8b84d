#pragma once

#include <functional>
#include <string_view>

namespace jsaforge {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal conditions (multiple roots, inverted ratios). Defaults to stderr.
void warn(std::string_view message);

// Replaces the sink and returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace jsaforge
