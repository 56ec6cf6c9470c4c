#pragma once

// Parameter grids: `name=v`, `name=v1,v2,...` or `name=linspace(lo,hi,n)`.
// Tuples are the cartesian product with the first parameter varying slowest.

#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "refracted_levy/errors.hpp"

namespace refracted_levy::cli {

struct ParamAxis {
  std::string name;
  std::vector<double> values;
};

using ParamTuple = std::vector<double>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError("invalid number '" + std::string(s) + "' in '" +
                     std::string(context) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

inline ParamAxis parse_param(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw InputError("parameter '" + std::string(text) +
                     "' must look like name=value, name=v1,v2 or "
                     "name=linspace(lo,hi,n)");
  ParamAxis axis{std::string(detail::trim(text.substr(0, eq))), {}};
  const auto rhs = detail::trim(text.substr(eq + 1));
  constexpr std::string_view lin = "linspace(";
  if (rhs.substr(0, lin.size()) == lin) {
    if (rhs.back() != ')')
      throw InputError("unterminated linspace in '" + std::string(text) + "'");
    const auto args =
        detail::split(rhs.substr(lin.size(), rhs.size() - lin.size() - 1), ',');
    if (args.size() != 3)
      throw InputError("linspace needs (lo, hi, n) in '" + std::string(text) + "'");
    const double lo = detail::parse_number(args[0], text);
    const double hi = detail::parse_number(args[1], text);
    const double nd = detail::parse_number(args[2], text);
    if (nd < 1.0 || nd != std::floor(nd) || nd > 1e7)
      throw InputError("linspace count must be a positive integer in '" +
                       std::string(text) + "'");
    const auto n = static_cast<std::size_t>(nd);
    for (std::size_t i = 0; i < n; ++i)
      axis.values.push_back(n == 1 ? lo
                                   : lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(n - 1));
  } else {
    for (auto part : detail::split(rhs, ','))
      axis.values.push_back(detail::parse_number(part, text));
  }
  if (axis.values.empty())
    throw InputError("parameter '" + axis.name + "' has no values");
  return axis;
}

/// Orders the axes by `names`, fills unset names from `defaults`, and
/// expands the product.
inline std::vector<ParamTuple> expand_grid(
    const std::vector<std::string>& names, const std::vector<ParamAxis>& axes,
    const std::map<std::string, double>& defaults,
    const std::string& operation) {
  std::vector<std::vector<double>> ordered;
  for (const auto& axis : axes) {
    bool known = false;
    for (const auto& n : names) known = known || n == axis.name;
    if (!known) {
      std::string expected;
      for (const auto& n : names) expected += (expected.empty() ? "" : ", ") + n;
      throw InputError("operation '" + operation + "' has no parameter '" +
                       axis.name + "' (expected: " +
                       (expected.empty() ? "none" : expected) + ")");
    }
  }
  for (const auto& n : names) {
    const ParamAxis* found = nullptr;
    for (const auto& axis : axes)
      if (axis.name == n) {
        if (found)
          throw InputError("parameter '" + n + "' given more than once");
        found = &axis;
      }
    if (found) {
      ordered.push_back(found->values);
    } else if (auto it = defaults.find(n); it != defaults.end()) {
      ordered.push_back({it->second});
    } else {
      throw InputError("operation '" + operation + "' needs parameter '" + n +
                       "' (use --param " + n + "=...)");
    }
  }
  std::vector<ParamTuple> out{{}};
  for (const auto& vals : ordered) {
    std::vector<ParamTuple> next;
    next.reserve(out.size() * vals.size());
    for (const auto& t : out)
      for (double v : vals) {
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace refracted_levy::cli
