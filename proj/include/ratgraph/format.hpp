#pragma once

#include <string>
#include <string_view>

namespace ratgraph {

// 17 significant digits; parse_double(format_double(x)) == x for finite x.
std::string format_double(double x);

// Whole-token parse (surrounding whitespace allowed). Throws Error(kParse).
double parse_double(std::string_view text);

}  // namespace ratgraph
