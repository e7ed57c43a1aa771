#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace gegen {

using WarningSink = std::function<void(std::string_view)>;

// Emits a non-fatal diagnostic. Defaults to stderr.
void warn(std::string_view message);

// Replaces the process-wide sink and returns the previous one. Passing an
// empty function restores the stderr sink.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace gegen
