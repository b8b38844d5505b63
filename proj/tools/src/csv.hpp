#pragma once

// Plot-ready CSV artifacts. Headers are fixed per artifact type and every value
// is printed with 17 significant digits so files round-trip exactly.

#include <fracpoint/control.hpp>

#include <filesystem>
#include <string>

namespace fracpoint::app {

inline constexpr const char* kGridHeader = "i,j,x,y,value";
inline constexpr const char* kCoefficientHeader = "m,n,coeff";
inline constexpr const char* kHistoryHeader = "iter,j,residual,step,active_fraction";

/// %.17g.
std::string exact(double value);

void write_grid(const std::filesystem::path& path, const GridFunction& g);
void write_coefficients(const std::filesystem::path& path, const SpectralField& w);
void write_history(const std::filesystem::path& path, const DescentHistory& history);

/// Reads a file written by write_grid. Throws ConfigError on malformed input.
GridFunction read_grid(const std::filesystem::path& path);

}  // namespace fracpoint::app
