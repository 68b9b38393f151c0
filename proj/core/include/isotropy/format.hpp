#pragma once

#include <string>
#include <string_view>

namespace isotropy {

/// Decimal with 17 significant digits ("%.17g"), locale independent.
std::string format_double(double v);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace isotropy
