#pragma once

#include <string_view>

namespace wkam {

/// git-describe style version recorded in report files.
std::string_view version_string();

}  // namespace wkam
