// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/display.hpp"

#include <cmath>

#include <fmt/format.h>

namespace greenloop {

namespace {

std::string trim(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string format_decimal(double v, int decimals) {
  std::string s = trim(fmt::format("{:.{}f}", v, decimals));
  if (s == "-0") s = "0";
  return s;
}

std::string format_signed(double v, int decimals) {
  std::string s = format_decimal(v, decimals);
  if (s != "0" && s.front() != '-') s.insert(s.begin(), '+');
  return s;
}

std::string format_thousands(double v, int decimals) {
  std::string s = format_decimal(v, decimals);
  const bool negative = !s.empty() && s.front() == '-';
  if (negative) s.erase(s.begin());
  const size_t dot = s.find('.');
  std::string whole = s.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : s.substr(dot);
  std::string grouped;
  for (size_t i = 0; i < whole.size(); ++i) {
    if (i > 0 && (whole.size() - i) % 3 == 0) grouped += ',';
    grouped += whole[i];
  }
  return (negative ? "-" : "") + grouped + frac;
}

}  // namespace greenloop
