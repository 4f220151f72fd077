// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Number formatting shared by reports, charts and annotations. Everything
// rounds to at most two decimals and drops trailing zeros.

#ifndef GREENLOOP_DISPLAY_HPP_
#define GREENLOOP_DISPLAY_HPP_

#include <string>

namespace greenloop {

// 0.5 -> "0.5", 17.0 -> "17", -26.666 -> "-26.67". Negative zero prints "0".
std::string format_decimal(double v, int decimals = 2);

// As format_decimal with a leading '+' on positive values.
std::string format_signed(double v, int decimals = 2);

// 20000 -> "20,000", 1234.5 -> "1,234.5".
std::string format_thousands(double v, int decimals = 2);

}  // namespace greenloop

#endif  // GREENLOOP_DISPLAY_HPP_
