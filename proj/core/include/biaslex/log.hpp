#pragma once

#include <functional>
#include <string_view>

namespace biaslex {

using WarningSink = std::function<void(std::string_view)>;

// Routes library warnings. The default sink writes to std::clog; passing an
// empty function silences warnings. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace biaslex
